"""Exact extremal-ray enumeration for pointed polyhedral cones.

Double description method over rationals: seed with a full-rank subset of
the inequality rows (whose inverse columns span the initial simplicial
cone), then insert the remaining inequalities one at a time, combining
adjacent positive/negative ray pairs.  Adjacency uses the combinatorial
test on zero sets, valid because the cones handled here are pointed (the
inequality matrix has full column rank).

Rays are returned as primitive integer tuples (gcd 1), orientation as
generated, deduplicated; callers impose their own ordering.
"""

from math import gcd

from .errors import ValidationError
from ._rational import QQ

__all__ = ["exact_rank", "invert", "primitive", "dd_rays"]

_ZERO = QQ(0)
_ONE = QQ(1)


def exact_rank(rows) -> int:
    """Rank of a rational matrix by fraction-free-ish Gaussian elimination."""
    mat = [list(map(QQ, r)) for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    col = 0
    while rank < len(mat) and col < ncols:
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        prow = mat[rank]
        inv = _ONE / prow[col]
        for r in range(rank + 1, len(mat)):
            f = mat[r][col]
            if f != 0:
                f *= inv
                mat[r] = [a - f * p for a, p in zip(mat[r], prow)]
        rank += 1
        col += 1
    return rank


def invert(B):
    """Exact inverse of a square rational matrix (Gauss-Jordan)."""
    d = len(B)
    aug = [list(map(QQ, row)) + [_ONE if j == i else _ZERO for j in range(d)]
           for i, row in enumerate(B)]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if piv is None:
            raise ValidationError("singular matrix passed to invert")
        aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        inv = _ONE / prow[col]
        aug[col] = prow = [v * inv for v in prow]
        for r in range(d):
            if r != col:
                f = aug[r][col]
                if f != 0:
                    aug[r] = [a - f * p for a, p in zip(aug[r], prow)]
    return [row[d:] for row in aug]


def primitive(vec) -> tuple:
    """Scale a rational vector to a primitive integer tuple, keeping sign."""
    vec = [QQ(v) for v in vec]
    lcm = 1
    for v in vec:
        den = v.denominator
        lcm = lcm // gcd(lcm, int(den)) * int(den)
    ints = [int(v * lcm) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _dot(row, ray):
    return sum(a * b for a, b in zip(row, ray))


def dd_rays(M) -> list[tuple]:
    """Extremal rays of the pointed cone {x : M x >= 0 componentwise}.

    M is a sequence of rational rows of equal length d and must have rank d
    (otherwise the cone contains a line and has no ray description).
    """
    M = [list(map(QQ, row)) for row in M]
    if not M:
        raise ValidationError("empty inequality system")
    d = len(M[0])
    seed: list[int] = []
    for i, row in enumerate(M):
        if len(seed) == d:
            break
        if exact_rank([M[j] for j in seed] + [row]) > len(seed):
            seed.append(i)
    if len(seed) < d:
        raise ValidationError(
            f"inequality matrix has rank {len(seed)} < {d}; cone is not pointed"
        )
    Binv = invert([M[i] for i in seed])
    # rays are kept as primitive integer tuples throughout, so equal rays
    # are equal tuples and the combinatorial adjacency test stays sound
    rays = [primitive(tuple(Binv[r][c] for r in range(d))) for c in range(d)]
    processed = list(seed)
    seeded = set(seed)

    def zeroset(ray):
        return frozenset(j for j in processed if _dot(M[j], ray) == 0)

    for i, row in enumerate(M):
        if i in seeded:
            continue
        vals = [(_dot(row, r), r) for r in rays]
        pos = [r for v, r in vals if v > 0]
        zero = [r for v, r in vals if v == 0]
        neg = [(v, r) for v, r in vals if v < 0]
        if not neg:
            processed.append(i)
            continue
        zsets = {r: zeroset(r) for r in rays}
        new = []
        for p in pos:
            vp = _dot(row, p)
            for vq, q in neg:
                common = zsets[p] & zsets[q]
                # p, q adjacent iff no third ray's zero set contains theirs
                adjacent = not any(
                    s != p and s != q and common <= zsets[s] for s in rays
                )
                if adjacent:
                    new.append(primitive(
                        [vp * qc - vq * pc for pc, qc in zip(q, p)]
                    ))
        rays = list(dict.fromkeys(pos + zero + new))
        processed.append(i)
    return rays
