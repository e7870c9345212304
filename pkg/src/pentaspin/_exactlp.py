"""Exact linear programming over rationals.

Dense tableau simplex with Bland's rule (smallest-index entering column,
ratio ties broken by smallest basic index), which guarantees termination
without perturbation.  Everything is desk-scale: tens of rows, at most a
few thousand columns, exact QQ arithmetic throughout.

Problems are in standard equality form: x >= 0, A x = b.  Phase 1 either
produces a basic feasible point or a Farkas certificate in "cone form":
a row vector y with y^T A >= 0 componentwise and y^T b < 0, i.e. a linear
functional nonnegative on every column yet negative on the target.
"""

from .errors import UnboundedProblem
from ._rational import QQ

__all__ = ["feasible_point", "minimize"]

_ZERO = QQ(0)
_ONE = QQ(1)


def _pivot(T, cost, basis, r, col):
    piv = T[r][col]
    row = T[r]
    inv = _ONE / piv
    T[r] = row = [v * inv for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[col]
            if f != 0:
                T[i] = [a - f * c for a, c in zip(other, row)]
    f = cost[col]
    if f != 0:
        for j, c in enumerate(row):
            cost[j] -= f * c
    basis[r] = col


def _bland_step(T, cost, basis, ncols):
    """One simplex step; returns False at optimality, raises if unbounded."""
    col = -1
    for j in range(ncols):
        if cost[j] < 0:
            col = j
            break
    if col < 0:
        return False
    r = -1
    best = None
    for i, row in enumerate(T):
        a = row[col]
        if a > 0:
            ratio = row[-1] / a
            if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                best = ratio
                r = i
    if r < 0:
        raise UnboundedProblem(f"column {col} is an unbounded improving ray")
    _pivot(T, cost, basis, r, col)
    return True


def _phase1(A, b):
    """Feasibility tableau for {x >= 0, Ax = b}.

    Returns (True, T, cost, basis, n) on feasibility, or (False, y) with the
    cone-form Farkas certificate.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    sign = [(-_ONE if bi < 0 else _ONE) for bi in b]
    T = []
    for i in range(m):
        s = sign[i]
        row = [s * qaij for qaij in A[i]]
        row.extend(_ONE if k == i else _ZERO for k in range(m))
        row.append(s * b[i])
        T.append(row)
    basis = [n + i for i in range(m)]
    # phase-1 reduced costs: artificial columns start at 0, original column j
    # at -sum_i T[i][j]; tracked objective (negated) in the last slot
    cost = [_ZERO] * (n + m + 1)
    for j in range(n):
        cost[j] = -sum(T[i][j] for i in range(m))
    cost[-1] = -sum(T[i][-1] for i in range(m))
    while _bland_step(T, cost, basis, n + m):
        pass
    if -cost[-1] > 0:
        # infeasible: the simplex multipliers y* satisfy y*^T A <= 0 and
        # y*^T b > 0; the final reduced cost of artificial k is 1 - y*_k.
        # Negate for cone form and undo the row sign flips.
        y = [sign[k] * (cost[n + k] - _ONE) for k in range(m)]
        return False, y
    return True, T, cost, basis, n


def _extract(T, basis, n):
    x = [_ZERO] * n
    for r, j in enumerate(basis):
        if j < n:
            x[j] = T[r][-1]
    return x


def feasible_point(A, b):
    """Decide {x >= 0, Ax = b}.

    Returns (True, x) with a basic feasible point, or (False, y) where y is
    the cone-form Farkas certificate (y^T A >= 0, y^T b < 0).
    """
    out = _phase1(A, b)
    if not out[0]:
        return False, out[1]
    _, T, _, basis, n = out
    return True, _extract(T, basis, n)


def minimize(A, b, c):
    """Minimize c.x over {x >= 0, Ax = b}.

    Returns ("optimal", x, value) or ("infeasible", y, None); raises
    UnboundedProblem when the objective is unbounded below.
    """
    out = _phase1(A, b)
    if not out[0]:
        return "infeasible", out[1], None
    _, T, _, basis, n = out
    # drive artificials out of the basis (degenerate pivots), dropping any
    # redundant all-zero rows, then truncate the artificial columns
    keep = []
    for r in range(len(T)):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                continue
            _pivot(T, [_ZERO] * len(T[r]), basis, r, col)
        keep.append(r)
    T = [T[r][: n] + [T[r][-1]] for r in keep]
    basis = [basis[r] for r in keep]
    cost = list(c) + [_ZERO]
    for r, j in enumerate(basis):
        f = cost[j]
        if f != 0:
            row = T[r]
            for k in range(n):
                cost[k] -= f * row[k]
            cost[-1] -= f * row[-1]
    while _bland_step(T, cost, basis, n):
        pass
    return "optimal", _extract(T, basis, n), -cost[-1]
