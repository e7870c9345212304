"""The marginal problem: do prescribed context marginals extend to a joint?

A context structure declares which +-1 observables are jointly measurable.
A marginal model assigns each context a probability table; the hidden
variable question asks for one distribution over all 2^n outcome
assignments whose restrictions reproduce every table.  Feasibility is a
linear program over the assignment weights, and the obstructions are
exactly the extremal rays of the cone of functions that are nonnegative
pointwise yet expressible within the context spans: hidden variables exist
iff every such ray has nonnegative expectation under the model.

This module solves the decision problem both ways: directly (exact rational
simplex, or a float LP with an indeterminate band near the boundary) and
through the cone (double description enumeration of the extremal rays),
and cross-validates one against the other.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _dd, _exactlp
from ._rational import QQ, qq, qq_str
from .errors import (
    InconsistentModel,
    ScaleGuard,
    StructureMismatch,
    ValidationError,
)
from .pentagram_geom import Pentagram
from .spin_core import SpinState, overlap

__all__ = [
    "SCALE_LIMIT",
    "ContextStructure",
    "ContextMarginal",
    "MarginalModel",
    "JointDistribution",
    "RayFunction",
    "HvCertificate",
    "pentagram5",
    "chsh",
    "builtin_structure",
    "monomial_key",
    "parse_monomial_key",
    "trivial_rays",
    "enumerate_extremal_rays",
    "marginals_from_state",
    "ray_expectation",
    "flip",
    "lp_feasible",
]

# enumeration and LP work over all 2^n assignments
SCALE_LIMIT = 2 ** 20

# rays are enumerable cheaply below this; margins and certificates use them
_RAY_LIMIT = 2 ** 12

_FLOAT_SUM_TOL = 1e-12
_CONSISTENCY_TOL = 2e-12


@dataclass(frozen=True)
class ContextStructure:
    """Observables 0..n-1 with declared mutually-commuting subsets."""

    n: int
    contexts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError("structure needs a positive observable count")
        ctxs = []
        for c in self.contexts:
            c = tuple(sorted(int(i) for i in c))
            if not c:
                raise ValidationError("empty context")
            if len(set(c)) != len(c):
                raise ValidationError(f"repeated observable in context {c}")
            if c[0] < 0 or c[-1] >= self.n:
                raise ValidationError(f"context {c} out of range for n={self.n}")
            ctxs.append(c)
        if len(set(ctxs)) != len(ctxs):
            raise ValidationError("duplicate contexts")
        covered = set(itertools.chain.from_iterable(ctxs))
        if covered != set(range(self.n)):
            missing = sorted(set(range(self.n)) - covered)
            raise ValidationError(f"observables {missing} appear in no context")
        object.__setattr__(self, "contexts", tuple(ctxs))

    def assignments(self):
        """All outcome assignments, in a fixed order: observable i carries
        bit i of the assignment index, bit 0 meaning -1 and bit 1 meaning +1."""
        for code in range(2 ** self.n):
            yield tuple(1 if (code >> i) & 1 else -1 for i in range(self.n))

    def monomials(self) -> tuple[tuple[int, ...], ...]:
        """The monomial basis: 1 plus all products within single contexts,
        ordered by degree then lexicographically."""
        monos = {()}
        for c in self.contexts:
            for k in range(1, len(c) + 1):
                monos.update(itertools.combinations(c, k))
        return tuple(sorted(monos, key=lambda s: (len(s), s)))

    def outcomes(self, context: tuple[int, ...]):
        return itertools.product((-1, 1), repeat=len(context))

    def to_json(self) -> dict:
        return {"n": self.n, "contexts": [list(c) for c in self.contexts]}

    @classmethod
    def from_json(cls, obj: dict) -> "ContextStructure":
        try:
            return cls(int(obj["n"]), tuple(tuple(c) for c in obj["contexts"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError('structure JSON needs "n" and "contexts"') from exc


def pentagram5() -> ContextStructure:
    """Five observables on a cycle; contexts are the adjacent pairs."""
    return ContextStructure(5, tuple(
        tuple(sorted((i, (i + 1) % 5))) for i in range(5)
    ))


def chsh() -> ContextStructure:
    """Two parties with two observables each: 0,1 vs 2,3."""
    return ContextStructure(4, ((0, 2), (0, 3), (1, 2), (1, 3)))


def builtin_structure(name: str) -> ContextStructure:
    try:
        return {"pentagram5": pentagram5, "chsh": chsh}[name]()
    except KeyError:
        raise ValidationError(f"unknown structure {name!r}") from None


def monomial_key(mono: tuple[int, ...]) -> str:
    return "1" if not mono else "".join(f"a{i}" for i in mono)


def parse_monomial_key(key: str) -> tuple[int, ...]:
    if key == "1":
        return ()
    if not re.fullmatch(r"(a\d+)+", key):
        raise ValidationError(f"bad monomial key {key!r}")
    return tuple(int(s) for s in re.findall(r"a(\d+)", key))


def _sign_str(outcome: tuple[int, ...]) -> str:
    return "".join("-" if v < 0 else "+" for v in outcome)


def _parse_sign_str(key: str, length: int) -> tuple[int, ...]:
    if len(key) != length or any(ch not in "-+" for ch in key):
        raise ValidationError(f"bad outcome key {key!r} for width {length}")
    return tuple(-1 if ch == "-" else 1 for ch in key)


@dataclass(frozen=True, eq=True)
class RayFunction:
    """Integer-coefficient function in the context span, nonnegative pointwise.

    Coefficients live on the monomial basis of the structure and are stored
    primitive (gcd 1).  Extremal rays of the cone additionally vanish
    somewhere; that necessary condition is validated here, full extremality
    is established by the enumeration that produced the ray.
    """

    structure: ContextStructure
    coeffs: tuple[tuple[tuple[int, ...], int], ...]
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("trivial", "nontrivial"):
            raise ValidationError(f"unknown ray class {self.kind!r}")
        basis = set(self.structure.monomials())
        cleaned = []
        g = 0
        for mono, c in sorted(dict(self.coeffs).items(), key=lambda kv: (len(kv[0]), kv[0])):
            mono = tuple(mono)
            c = int(c)
            if c == 0:
                continue
            if mono not in basis:
                raise ValidationError(
                    f"monomial {monomial_key(mono)} outside the context span"
                )
            g = math.gcd(g, abs(c))
            cleaned.append((mono, c))
        if not cleaned:
            raise ValidationError("zero function is not a ray")
        if g != 1:
            raise ValidationError("ray coefficients must be primitive (gcd 1)")
        object.__setattr__(self, "coeffs", tuple(cleaned))
        if 2 ** self.structure.n <= _RAY_LIMIT:
            vals = self.values()
            if min(vals) < 0:
                raise ValidationError("ray function is negative somewhere")
            if min(vals) > 0:
                raise ValidationError("ray function has no zero (not extremal)")

    def coeff_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.coeffs)

    def value_at(self, assignment: tuple[int, ...]) -> int:
        total = 0
        for mono, c in self.coeffs:
            prod = c
            for i in mono:
                prod *= assignment[i]
            total += prod
        return total

    def values(self) -> tuple[int, ...]:
        return tuple(self.value_at(a) for a in self.structure.assignments())

    def coeff_vector(self) -> tuple[int, ...]:
        d = dict(self.coeffs)
        return tuple(d.get(m, 0) for m in self.structure.monomials())

    def to_json(self) -> dict:
        return {
            "coeffs": {monomial_key(m): c for m, c in self.coeffs},
            "class": self.kind,
        }

    @classmethod
    def from_json(cls, structure: ContextStructure, obj: dict) -> "RayFunction":
        try:
            coeffs = tuple(
                (parse_monomial_key(k), int(v)) for k, v in obj["coeffs"].items()
            )
            kind = obj["class"]
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValidationError('ray JSON needs "coeffs" and "class"') from exc
        return cls(structure, coeffs, kind)


@lru_cache(maxsize=32)
def trivial_rays(structure: ContextStructure) -> tuple[RayFunction, ...]:
    """Outcome indicators of single contexts: prod_i (1 + sigma_i a_i).

    These are always extremal but yield vacuous inequalities.
    """
    rays = []
    for context in structure.contexts:
        for sigma in structure.outcomes(context):
            coeffs = []
            for k in range(len(context) + 1):
                for sub in itertools.combinations(range(len(context)), k):
                    mono = tuple(context[i] for i in sub)
                    sign = 1
                    for i in sub:
                        sign *= sigma[i]
                    coeffs.append((mono, sign))
            rays.append(RayFunction(structure, tuple(coeffs), "trivial"))
    return tuple(rays)


def _check_scale(structure: ContextStructure) -> None:
    if 2 ** structure.n > SCALE_LIMIT:
        raise ScaleGuard(
            f"2^{structure.n} assignments exceed the desk-scale limit 2^20"
        )


@lru_cache(maxsize=8)
def enumerate_extremal_rays(structure: ContextStructure) -> tuple[RayFunction, ...]:
    """All extremal rays of the cone {F in context span : F >= 0 pointwise}.

    Exact double description over the monomial basis.  Output is primitive,
    deduplicated, classified trivial/nontrivial by membership in the
    explicit indicator list, and sorted lexicographically by coefficient
    vector.
    """
    _check_scale(structure)
    monos = structure.monomials()
    rows = []
    for a in structure.assignments():
        row = []
        for mono in monos:
            v = 1
            for i in mono:
                v *= a[i]
            row.append(v)
        rows.append(row)
    trivial_keys = {r.coeffs for r in trivial_rays(structure)}
    rays = []
    for vec in _dd.dd_rays(rows):
        coeffs = tuple((m, int(c)) for m, c in zip(monos, vec) if c != 0)
        ray = RayFunction(structure, coeffs, "trivial")
        if ray.coeffs not in trivial_keys:
            ray = RayFunction(structure, coeffs, "nontrivial")
        rays.append(ray)
    return tuple(sorted(rays, key=lambda r: r.coeff_vector()))


@dataclass(frozen=True, eq=True)
class ContextMarginal:
    """Probability table for the joint outcomes of one context."""

    context: tuple[int, ...]
    table: dict

    def __post_init__(self) -> None:
        context = tuple(int(i) for i in self.context)
        object.__setattr__(self, "context", context)
        expected = set(itertools.product((-1, 1), repeat=len(context)))
        if set(self.table) != expected:
            raise ValidationError(
                f"table for context {context} must cover exactly its "
                f"{len(expected)} joint outcomes"
            )
        exact = all(not isinstance(v, float) for v in self.table.values())
        if exact:
            tab = {k: qq(v) for k, v in self.table.items()}
            if any(v < 0 for v in tab.values()):
                raise ValidationError(f"negative probability in context {context}")
            if sum(tab.values()) != 1:
                raise ValidationError(f"context {context} table does not sum to 1")
        else:
            tab = {k: float(v) for k, v in self.table.items()}
            if any(v < -_FLOAT_SUM_TOL or not math.isfinite(v) for v in tab.values()):
                raise ValidationError(f"negative probability in context {context}")
            if abs(sum(tab.values()) - 1.0) > _FLOAT_SUM_TOL:
                raise ValidationError(f"context {context} table does not sum to 1")
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "exact", exact)

    def single_site(self, i: int):
        """P(a_i = -1) from this table."""
        pos = self.context.index(i)
        zero = 0 if getattr(self, "exact") else 0.0
        return sum((v for k, v in self.table.items() if k[pos] == -1), zero)


@dataclass(frozen=True, eq=True)
class MarginalModel:
    """One table per context, cross-checked for overlap consistency.

    mode is "exact" (rational entries) or "float"; exact models may carry a
    rational uncertainty radius, meaning the true table entries are only
    known to lie within +-radius of the stored ones (used to pass irrational
    quantum predictions through exact arithmetic honestly).
    """

    structure: ContextStructure
    marginals: tuple[ContextMarginal, ...]
    mode: str
    radius: object = 0

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "float"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        marginals = tuple(self.marginals)
        if tuple(m.context for m in marginals) != self.structure.contexts:
            raise ValidationError("marginals must align with structure contexts")
        for m in marginals:
            if getattr(m, "exact") != (self.mode == "exact"):
                raise ValidationError(
                    f"context {m.context} table entries do not match mode {self.mode}"
                )
        radius = qq(self.radius)
        if radius < 0:
            raise ValidationError("radius must be nonnegative")
        if radius > 0 and self.mode != "exact":
            raise ValidationError("uncertainty radius requires exact mode")
        object.__setattr__(self, "marginals", marginals)
        object.__setattr__(self, "radius", radius)
        self._check_consistency()

    def _check_consistency(self) -> None:
        seen: dict[int, tuple[tuple[int, ...], object]] = {}
        for m in self.marginals:
            for i in m.context:
                p = m.single_site(i)
                if i in seen:
                    ctx0, p0 = seen[i]
                    bad = (p0 != p) if self.mode == "exact" else (
                        abs(p0 - p) > _CONSISTENCY_TOL
                    )
                    if bad:
                        raise InconsistentModel(
                            f"observable {i}: contexts {ctx0} and {m.context} "
                            f"disagree on P(a_{i}=-1) ({p0} vs {p})"
                        )
                else:
                    seen[i] = (m.context, p)

    def table(self, context_index: int) -> dict:
        return self.marginals[context_index].table

    def rationalized(self, radius=0) -> "MarginalModel":
        """Exact-mode copy: float entries become their exact rational values.

        Float models are only consistent up to roundoff, so the conversion
        repairs at ulp scale: each observable's single-site value is pinned
        by the first context containing it, and width-1 and width-2 tables
        are re-fit in closed form to match the pinned values exactly (the
        free diagonal entry is clamped into its Frechet interval).  Wider
        contexts only get their sum-to-1 gap charged to the all-plus
        outcome; if that leaves an exact inconsistency the constructor
        reports it.  radius, if given, records the caller's bound on how
        far these rounded entries may sit from the true ones.
        """
        if self.mode == "exact":
            if qq(radius) == self.radius:
                return self
            return MarginalModel(self.structure, self.marginals, "exact", radius)

        def clamp01(v):
            return min(max(v, qq(0)), qq(1))

        pinned: dict[int, object] = {}
        marginals = []
        for m in self.marginals:
            tab = {k: (qq(v) if v > 0 else qq(0)) for k, v in m.table.items()}
            if len(m.context) == 1:
                i = m.context[0]
                pi = pinned.setdefault(i, clamp01(tab[(-1,)]))
                new = {(-1,): pi, (1,): 1 - pi}
            elif len(m.context) == 2:
                i, j = m.context
                pi = pinned.setdefault(i, clamp01(tab[(-1, -1)] + tab[(-1, 1)]))
                pj = pinned.setdefault(j, clamp01(tab[(-1, -1)] + tab[(1, -1)]))
                lo = max(qq(0), pi + pj - 1)
                hi = min(pi, pj)
                a = min(max(tab[(-1, -1)], lo), hi)
                new = {
                    (-1, -1): a,
                    (-1, 1): pi - a,
                    (1, -1): pj - a,
                    (1, 1): 1 - pi - pj + a,
                }
            else:
                gap = 1 - sum(tab.values())
                if gap != 0:
                    allplus = tuple(1 for _ in m.context)
                    if tab[allplus] + gap >= 0:
                        tab[allplus] += gap
                    else:
                        top = max(tab, key=lambda k: (tab[k], k))
                        tab[top] += gap
                for pos, i in enumerate(m.context):
                    pinned.setdefault(
                        i, sum(v for k, v in tab.items() if k[pos] == -1)
                    )
                new = tab
            marginals.append(ContextMarginal(m.context, new))
        return MarginalModel(self.structure, tuple(marginals), "exact", radius)

    def floated(self) -> "MarginalModel":
        """Float-mode copy (drops any uncertainty radius)."""
        if self.mode == "float":
            return self
        marginals = [
            ContextMarginal(m.context, {k: float(v) for k, v in m.table.items()})
            for m in self.marginals
        ]
        return MarginalModel(self.structure, tuple(marginals), "float")

    def to_json(self) -> dict:
        tables = {}
        for idx, m in enumerate(self.marginals):
            enc = {}
            for k in sorted(m.table):
                v = m.table[k]
                enc[_sign_str(k)] = qq_str(v) if self.mode == "exact" else float(v)
            tables[str(idx)] = enc
        out = {
            "n": self.structure.n,
            "contexts": [list(c) for c in self.structure.contexts],
            "mode": self.mode,
            "tables": tables,
        }
        if self.radius != 0:
            out["radius"] = qq_str(self.radius)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MarginalModel":
        try:
            structure = ContextStructure.from_json(obj)
            mode = obj.get("mode", "float")
            tables = obj["tables"]
        except (KeyError, TypeError) as exc:
            raise ValidationError('model JSON needs "n", "contexts", "tables"') from exc
        marginals = []
        for idx, context in enumerate(structure.contexts):
            enc = tables.get(str(idx))
            if not isinstance(enc, dict):
                raise ValidationError(f'missing table "{idx}"')
            tab = {}
            for key, v in enc.items():
                outcome = _parse_sign_str(key, len(context))
                tab[outcome] = qq(v) if mode == "exact" else float(v)
            marginals.append(ContextMarginal(context, tab))
        radius = qq(obj.get("radius", 0)) if mode == "exact" else 0
        return cls(structure, tuple(marginals), mode, radius)


@dataclass(frozen=True, eq=True)
class JointDistribution:
    """Distribution over all 2^n assignments; the hidden-variable witness."""

    n: int
    weights: dict
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "float"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        weights = {}
        for a, w in self.weights.items():
            a = tuple(int(v) for v in a)
            if len(a) != self.n or any(v not in (-1, 1) for v in a):
                raise ValidationError(f"bad assignment {a}")
            w = qq(w) if self.mode == "exact" else float(w)
            if w < (0 if self.mode == "exact" else -_FLOAT_SUM_TOL):
                raise ValidationError("negative weight")
            if w != 0:
                weights[a] = w
        total = sum(weights.values())
        ok = total == 1 if self.mode == "exact" else abs(total - 1.0) <= 1e-9
        if not ok:
            raise ValidationError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "weights", weights)

    def pushforward(self, structure: ContextStructure) -> MarginalModel:
        if structure.n != self.n:
            raise StructureMismatch("joint and structure sizes differ")
        zero = qq(0) if self.mode == "exact" else 0.0
        marginals = []
        for context in structure.contexts:
            tab = {o: zero for o in structure.outcomes(context)}
            for a, w in sorted(self.weights.items()):
                key = tuple(a[i] for i in context)
                tab[key] = tab[key] + w
            marginals.append(ContextMarginal(context, tab))
        return MarginalModel(structure, tuple(marginals), self.mode)

    def to_json(self) -> dict:
        enc = {}
        for a in sorted(self.weights):
            w = self.weights[a]
            enc[_sign_str(a)] = qq_str(w) if self.mode == "exact" else float(w)
        return {"n": self.n, "mode": self.mode, "weights": enc}

    @classmethod
    def from_json(cls, obj: dict) -> "JointDistribution":
        try:
            n = int(obj["n"])
            mode = obj.get("mode", "float")
            enc = obj["weights"]
        except (KeyError, TypeError) as exc:
            raise ValidationError('joint JSON needs "n" and "weights"') from exc
        weights = {}
        for key, v in enc.items():
            a = _parse_sign_str(key, n)
            weights[a] = qq(v) if mode == "exact" else float(v)
        return cls(n, weights, mode)


@dataclass(frozen=True)
class HvCertificate:
    """Outcome of the hidden-variable decision.

    margin is the minimum nontrivial-ray expectation (signed distance to the
    boundary in expectation units); rho is the float LP's residual optimum
    when that path ran.  Exactly one of witness/violated is set for decided
    verdicts; indeterminate sets neither.
    """

    verdict: str
    mode: str
    tol: float
    margin: object = None
    witness: JointDistribution | None = None
    violated: RayFunction | None = None
    violated_expectation: object = None
    rho: float | None = None

    def to_json(self) -> dict:
        def num(v):
            if v is None or isinstance(v, float):
                return v
            return qq_str(v)

        return {
            "verdict": self.verdict,
            "mode": self.mode,
            "tol": self.tol,
            "margin": num(self.margin),
            "rho": self.rho,
            "witness": None if self.witness is None else self.witness.to_json(),
            "violated": None if self.violated is None else self.violated.to_json(),
            "violated_expectation": num(self.violated_expectation),
        }


def marginals_from_state(p: Pentagram, psi: SpinState) -> MarginalModel:
    """Quantum context tables for the five adjacent-pair contexts.

    Outcome -1 of observable i is the S^2 = 0 event along leg i, with
    probability |<l_i, psi>|^2.  Adjacent legs are orthogonal, so the joint
    (-1,-1) outcome is impossible and each pair table is determined by the
    two leg probabilities; computing each probability once makes the model
    exactly consistent in float arithmetic.
    """
    structure = pentagram5()
    probs = [abs(overlap(l, psi)) ** 2 for l in p.legs]
    marginals = []
    for context in structure.contexts:
        i, j = context
        tab = {
            (-1, -1): 0.0,
            (-1, 1): probs[i],
            (1, -1): probs[j],
            (1, 1): 1.0 - probs[i] - probs[j],
        }
        marginals.append(ContextMarginal(context, tab))
    return MarginalModel(structure, tuple(marginals), "float")


def _context_components(ray: RayFunction) -> list[dict[tuple[int, ...], int]]:
    """Split the ray into per-context outcome functions f_I.

    Each monomial is charged to the first context containing it; the split
    is not unique, but all splits give the same expectation on consistent
    models, which is the only use.
    """
    structure = ray.structure
    comps: list[dict[tuple[int, ...], int]] = [
        {o: 0 for o in structure.outcomes(c)} for c in structure.contexts
    ]
    for mono, c in ray.coeffs:
        home = next(
            idx for idx, ctx in enumerate(structure.contexts)
            if set(mono) <= set(ctx)
        )
        context = structure.contexts[home]
        positions = [context.index(i) for i in mono]
        for outcome in comps[home]:
            sign = 1
            for pos in positions:
                sign *= outcome[pos]
            comps[home][outcome] += c * sign
    return comps


def ray_expectation(r: RayFunction, m: MarginalModel):
    """<F> under the model: exact rational when the model is exact.

    Hidden variables exist iff this is >= 0 for every extremal ray.
    """
    if r.structure != m.structure:
        raise StructureMismatch("ray and model structures differ")
    total = qq(0) if m.mode == "exact" else 0.0
    for comp, marg in zip(_context_components(r), m.marginals):
        for outcome, coeff in comp.items():
            if coeff != 0:
                total = total + coeff * marg.table[outcome]
    return total


def flip(x, s):
    """Relabel outcomes a_i -> -a_i for i in s; an involution.

    Works on RayFunction, MarginalModel, and JointDistribution; maps cone
    rays to cone rays and preserves feasibility.
    """
    s = frozenset(int(i) for i in s)
    if isinstance(x, RayFunction):
        if s and (min(s) < 0 or max(s) >= x.structure.n):
            raise ValidationError("flip indices out of range")
        coeffs = tuple(
            (mono, c * (-1) ** len(s.intersection(mono))) for mono, c in x.coeffs
        )
        return RayFunction(x.structure, coeffs, x.kind)
    if isinstance(x, MarginalModel):
        if s and (min(s) < 0 or max(s) >= x.structure.n):
            raise ValidationError("flip indices out of range")
        marginals = []
        for m in x.marginals:
            flips = [(-1 if i in s else 1) for i in m.context]
            tab = {
                tuple(v * f for v, f in zip(k, flips)): w
                for k, w in m.table.items()
            }
            marginals.append(ContextMarginal(m.context, tab))
        return MarginalModel(x.structure, tuple(marginals), x.mode, x.radius)
    if isinstance(x, JointDistribution):
        if s and (min(s) < 0 or max(s) >= x.n):
            raise ValidationError("flip indices out of range")
        flips = [(-1 if i in s else 1) for i in range(x.n)]
        weights = {
            tuple(v * f for v, f in zip(a, flips)): w
            for a, w in x.weights.items()
        }
        return JointDistribution(x.n, weights, x.mode)
    raise ValidationError(f"cannot flip {type(x).__name__}")


def _row_index(structure: ContextStructure):
    rows = []
    for idx, context in enumerate(structure.contexts):
        for outcome in structure.outcomes(context):
            rows.append((idx, context, outcome))
    return rows


def _nontrivial_rays(structure: ContextStructure):
    if 2 ** structure.n > _RAY_LIMIT:
        return None
    return tuple(
        r for r in enumerate_extremal_rays(structure) if r.kind == "nontrivial"
    )


def _margin_and_argmin(model: MarginalModel):
    """Minimum nontrivial-ray expectation and the first ray attaining it."""
    rays = _nontrivial_rays(model.structure)
    if rays is None:
        return None, None
    best = None
    best_ray = None
    for r in rays:
        e = ray_expectation(r, model)
        if best is None or e < best:
            best = e
            best_ray = r
    return best, best_ray


def _exact_witness(x, structure: ContextStructure) -> JointDistribution:
    weights = {}
    for code, w in enumerate(x):
        if w != 0:
            a = tuple(1 if (code >> i) & 1 else -1 for i in range(structure.n))
            weights[a] = w
    return JointDistribution(structure.n, weights, "exact")


def _exact_equality_system(model: MarginalModel):
    structure = model.structure
    ncols = 2 ** structure.n
    rows = _row_index(structure)
    A = []
    b = []
    assignments = list(structure.assignments())
    for idx, context, outcome in rows:
        row = [
            qq(1) if tuple(a[i] for i in context) == outcome else qq(0)
            for a in assignments
        ]
        A.append(row)
        b.append(qq(model.marginals[idx].table[outcome]))
    A.append([qq(1)] * ncols)
    b.append(qq(1))
    return A, b


def _lp_exact_point(model: MarginalModel) -> HvCertificate:
    structure = model.structure
    A, b = _exact_equality_system(model)
    ok, data = _exactlp.feasible_point(A, b)
    margin, arg = _margin_and_argmin(model)
    if ok:
        return HvCertificate(
            verdict="feasible",
            mode="exact",
            tol=0.0,
            margin=margin,
            witness=_exact_witness(data, structure),
        )
    if arg is None:
        # structure too large for enumeration: convert the Farkas functional
        arg = _farkas_ray(structure, data)
        margin = ray_expectation(arg, model)
    return HvCertificate(
        verdict="infeasible",
        mode="exact",
        tol=0.0,
        margin=margin,
        violated=arg,
        violated_expectation=ray_expectation(arg, model),
    )


def _farkas_ray(structure: ContextStructure, y) -> RayFunction:
    """Turn a cone-form Farkas certificate into a RayFunction.

    y has one entry per (context, outcome) row plus the normalization row;
    the induced function sum_rows y_row * indicator_row is nonnegative on
    every assignment with negative model expectation.  Subtracting its
    minimum (charged to the constant) preserves both properties and
    supplies the required zero.
    """
    rows = _row_index(structure)
    coeffs: dict[tuple[int, ...], QQ] = {(): qq(y[-1])}
    for (idx, context, outcome), w in zip(rows, y):
        w = qq(w)
        if w == 0:
            continue
        scale = w / (2 ** len(context))
        for k in range(len(context) + 1):
            for sub in itertools.combinations(range(len(context)), k):
                mono = tuple(context[i] for i in sub)
                sign = 1
                for i in sub:
                    sign *= outcome[i]
                coeffs[mono] = coeffs.get(mono, qq(0)) + scale * sign
    vec = [coeffs.get(m, qq(0)) for m in structure.monomials()]
    floor = None
    for a in structure.assignments():
        v = qq(0)
        for mono, c in zip(structure.monomials(), vec):
            if c != 0:
                sign = 1
                for i in mono:
                    sign *= a[i]
                v += c * sign
        floor = v if floor is None else min(floor, v)
    vec[0] -= floor
    ints = _dd.primitive(vec)
    coeff_pairs = tuple(
        (m, c) for m, c in zip(structure.monomials(), ints) if c != 0
    )
    trivial_keys = {r.coeffs for r in trivial_rays(structure)}
    kind = "trivial" if coeff_pairs in trivial_keys else "nontrivial"
    return RayFunction(structure, coeff_pairs, kind)


def _box_consistency_rows(structure: ContextStructure, rows):
    """Equality rows tying shared observables' single-site sums together."""
    eqs = []
    owners: dict[int, tuple[int, tuple[int, ...]]] = {}
    for idx, context in enumerate(structure.contexts):
        for i in context:
            if i not in owners:
                owners[i] = (idx, context)
                continue
            oidx, octx = owners[i]
            row = {}
            for ridx, (cidx, ctx, outcome) in enumerate(rows):
                if cidx == oidx and outcome[octx.index(i)] == -1:
                    row[ridx] = row.get(ridx, qq(0)) + 1
                if cidx == idx and outcome[ctx.index(i)] == -1:
                    row[ridx] = row.get(ridx, qq(0)) - 1
            eqs.append(row)
    return eqs


def _lp_exact_interval(model: MarginalModel, radius) -> HvCertificate:
    """Exact decision under entrywise uncertainty +-radius.

    Outer step: is any valid model inside the box feasible?  (Relaxed LP
    over joint weights with interval constraints.)  If not, every model in
    the box is infeasible.  Inner step: minimize each nontrivial ray's
    expectation over valid tables inside the box; if all minima are >= 0,
    every model in the box is feasible.  Otherwise the box is mixed and the
    verdict is indeterminate.
    """
    structure = model.structure
    rows = _row_index(structure)
    nrows = len(rows)
    ncols = 2 ** structure.n
    assignments = list(structure.assignments())

    # outer relaxation: A w - s+ = b - r, A w + s- = b + r, sum w = 1
    A = []
    b = []
    for k, (idx, context, outcome) in enumerate(rows):
        ind = [
            qq(1) if tuple(a[i] for i in context) == outcome else qq(0)
            for a in assignments
        ]
        center = qq(model.marginals[idx].table[outcome])
        lo = [qq(0)] * (2 * nrows)
        lo[k] = qq(-1)
        A.append(ind + lo)
        b.append(max(qq(0), center - radius))
        hi = [qq(0)] * (2 * nrows)
        hi[nrows + k] = qq(1)
        A.append(ind + hi)
        b.append(center + radius)
    A.append([qq(1)] * ncols + [qq(0)] * (2 * nrows))
    b.append(qq(1))
    ok, _ = _exactlp.feasible_point(A, b)
    center_margin, center_arg = _margin_and_argmin(model)
    if not ok:
        return HvCertificate(
            verdict="infeasible",
            mode="exact",
            tol=0.0,
            margin=center_margin,
            violated=center_arg,
            violated_expectation=(
                None if center_arg is None else ray_expectation(center_arg, model)
            ),
        )
    rays = _nontrivial_rays(structure)
    if rays is None:
        return HvCertificate(verdict="indeterminate", mode="exact", tol=0.0)

    # inner: worst case of each ray over valid in-box tables
    # variables: one per (context, outcome) row, plus box slacks
    cons_rows = _box_consistency_rows(structure, rows)
    worst = None
    for ray in rays:
        comps = _context_components(ray)
        cost = [
            qq(comps[idx][outcome]) for idx, context, outcome in rows
        ]
        Ai = []
        bi = []
        # per-context normalization
        for cidx in range(len(structure.contexts)):
            row = [qq(1) if rows[k][0] == cidx else qq(0) for k in range(nrows)]
            Ai.append(row + [qq(0)] * (2 * nrows))
            bi.append(qq(1))
        # consistency across shared observables
        for eq in cons_rows:
            row = [qq(0)] * nrows
            for ridx, v in eq.items():
                row[ridx] = qq(v)
            Ai.append(row + [qq(0)] * (2 * nrows))
            bi.append(qq(0))
        # box: t + u = center + r, t - v = center - r (v >= 0, clipped at 0)
        for k, (idx, context, outcome) in enumerate(rows):
            center = qq(model.marginals[idx].table[outcome])
            up = [qq(0)] * nrows
            up[k] = qq(1)
            slack = [qq(0)] * (2 * nrows)
            slack[k] = qq(1)
            Ai.append(up + slack)
            bi.append(center + radius)
            lo_rhs = max(qq(0), center - radius)
            down = [qq(0)] * nrows
            down[k] = qq(1)
            slack = [qq(0)] * (2 * nrows)
            slack[nrows + k] = qq(-1)
            Ai.append(down + slack)
            bi.append(lo_rhs)
        full_cost = cost + [qq(0)] * (2 * nrows)
        status, _, val = _exactlp.minimize(Ai, bi, full_cost)
        if status != "optimal":
            return HvCertificate(verdict="indeterminate", mode="exact", tol=0.0)
        if worst is None or val < worst:
            worst = val
    if worst >= 0:
        point = _lp_exact_point(MarginalModel(structure, model.marginals, "exact"))
        return HvCertificate(
            verdict="feasible",
            mode="exact",
            tol=0.0,
            margin=worst,
            witness=point.witness,
        )
    return HvCertificate(
        verdict="indeterminate", mode="exact", tol=0.0, margin=worst
    )


def _lp_float(model: MarginalModel, tol: float) -> HvCertificate:
    from scipy.optimize import linprog

    structure = model.structure
    rows = _row_index(structure)
    ncols = 2 ** structure.n
    assignments = list(structure.assignments())
    A = np.zeros((len(rows), ncols))
    b = np.zeros(len(rows))
    for k, (idx, context, outcome) in enumerate(rows):
        for col, a in enumerate(assignments):
            if tuple(a[i] for i in context) == outcome:
                A[k, col] = 1.0
        b[k] = float(model.marginals[idx].table[outcome])
    # minimize rho subject to |A w - b| <= rho, sum w = 1, w >= 0
    nv = ncols + 1
    c = np.zeros(nv)
    c[-1] = 1.0
    A_ub = np.zeros((2 * len(rows), nv))
    b_ub = np.zeros(2 * len(rows))
    A_ub[: len(rows), :ncols] = A
    A_ub[: len(rows), -1] = -1.0
    b_ub[: len(rows)] = b
    A_ub[len(rows):, :ncols] = -A
    A_ub[len(rows):, -1] = -1.0
    b_ub[len(rows):] = -b
    A_eq = np.zeros((1, nv))
    A_eq[0, :ncols] = 1.0
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=np.ones(1),
        bounds=[(0, None)] * nv, method="highs",
    )
    if not res.success:
        raise ValidationError(f"float LP failed: {res.message}")
    rho = float(res.fun)
    margin, arg = _margin_and_argmin(model)
    if margin is None:
        # no ray enumeration at this scale: residual bands only
        if rho > tol:
            return HvCertificate(
                verdict="infeasible", mode="float", tol=tol, rho=rho
            )
        verdict = "feasible" if rho <= 1e-12 else "indeterminate"
        witness = _float_witness(res.x[:ncols], structure) if verdict == "feasible" else None
        return HvCertificate(
            verdict=verdict, mode="float", tol=tol, rho=rho, witness=witness
        )
    margin = float(margin)
    if margin > tol:
        return HvCertificate(
            verdict="feasible",
            mode="float",
            tol=tol,
            margin=margin,
            rho=rho,
            witness=_float_witness(res.x[:ncols], structure),
        )
    if margin < -tol:
        return HvCertificate(
            verdict="infeasible",
            mode="float",
            tol=tol,
            margin=margin,
            rho=rho,
            violated=arg,
            violated_expectation=float(ray_expectation(arg, model)),
        )
    return HvCertificate(
        verdict="indeterminate", mode="float", tol=tol, margin=margin, rho=rho
    )


def _float_witness(x, structure: ContextStructure) -> JointDistribution:
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    x = x / x.sum()
    weights = {}
    for code, w in enumerate(x):
        if w > 0:
            a = tuple(1 if (code >> i) & 1 else -1 for i in range(structure.n))
            weights[a] = float(w)
    return JointDistribution(structure.n, weights, "float")


def lp_feasible(m: MarginalModel, mode: str | None = None, tol: float = 1e-9) -> HvCertificate:
    """Decide whether a hidden joint distribution reproduces the model.

    mode defaults to the model's own arithmetic; passing the other mode
    converts (float -> exact decides the rounded rational model at radius 0
    unless the model carries a radius; exact -> float truncates entries).
    Exact mode returns feasible/infeasible with a checkable witness or
    violated ray, or indeterminate only when an uncertainty radius makes
    the box genuinely mixed.  Float mode measures the margin (minimum
    nontrivial-ray expectation) and abstains within +-tol of the boundary.
    """
    _check_scale(m.structure)
    mode = mode or m.mode
    if mode == "exact":
        model = m.rationalized(radius=m.radius)
        if model.radius == 0:
            return _lp_exact_point(model)
        return _lp_exact_interval(model, model.radius)
    if mode == "float":
        return _lp_float(m.floated(), float(tol))
    raise ValidationError(f"unknown mode {mode!r}")
