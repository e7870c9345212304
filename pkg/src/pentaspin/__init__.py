"""Exact and numerical tests of hidden variables for spin-1 pentagrams.

The geometry lives in real 3-space: five unit legs with cyclic adjacent
orthogonality, a complexified unit state, and the overlap sum K that
separates quantum statistics (up to sqrt(5)) from anything a joint
distribution over outcome assignments can produce (at most 2).  The
decision itself runs either in exact rational arithmetic with checkable
certificates or in floating point with an abstention band.
"""

from .errors import (
    DegenerateClosure,
    InconsistentModel,
    InfeasiblePlan,
    InvalidPentagram,
    PentaspinError,
    ScaleGuard,
    StructureMismatch,
    UnboundedProblem,
    ValidationError,
)
from .kernels import BACKEND
from .spin_core import (
    CanonicalForm,
    Direction,
    SpinState,
    TwoQubitSymmetricState,
    concurrence,
    degree_of_polarization,
    eigenbasis,
    orthonormal_frame,
    overlap,
    rotate,
    s_squared_expectation,
    spin_apply,
    spin_expectation,
    to_canonical,
    two_qubit,
    wootters_concurrence,
)
from .pentagram_geom import (
    ChainParams,
    Pentagram,
    correlation_form,
    frame_operator,
    from_chain,
    gram,
    gram_max,
    kcbs_spin_form,
    kcbs_sum,
    regular_pentagram,
)
from .hv_solver import (
    ContextMarginal,
    ContextStructure,
    HvCertificate,
    JointDistribution,
    MarginalModel,
    RayFunction,
    builtin_structure,
    chsh,
    enumerate_extremal_rays,
    flip,
    lp_feasible,
    marginals_from_state,
    pentagram5,
    ray_expectation,
    trivial_rays,
)
from .search import (
    RestartRecord,
    SearchConfig,
    SearchResult,
    detection_scan,
    optimize_pentagram,
    regular_K,
)
from .biphoton import (
    CoincidencePlan,
    StokesDirection,
    biphoton_state,
    clopper_pearson,
    coincidence_rate,
    plan_trials,
    simulate_counts,
    symmetric_test_angle,
    visibility_adjusted_rate,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "PentaspinError",
    "ValidationError",
    "InvalidPentagram",
    "DegenerateClosure",
    "InconsistentModel",
    "StructureMismatch",
    "ScaleGuard",
    "InfeasiblePlan",
    "UnboundedProblem",
    "Direction",
    "SpinState",
    "CanonicalForm",
    "TwoQubitSymmetricState",
    "orthonormal_frame",
    "overlap",
    "spin_apply",
    "spin_expectation",
    "s_squared_expectation",
    "eigenbasis",
    "rotate",
    "to_canonical",
    "concurrence",
    "degree_of_polarization",
    "two_qubit",
    "wootters_concurrence",
    "Pentagram",
    "ChainParams",
    "regular_pentagram",
    "from_chain",
    "kcbs_sum",
    "kcbs_spin_form",
    "correlation_form",
    "gram",
    "frame_operator",
    "gram_max",
    "ContextStructure",
    "ContextMarginal",
    "MarginalModel",
    "JointDistribution",
    "RayFunction",
    "HvCertificate",
    "pentagram5",
    "chsh",
    "builtin_structure",
    "trivial_rays",
    "enumerate_extremal_rays",
    "marginals_from_state",
    "ray_expectation",
    "flip",
    "lp_feasible",
    "SearchConfig",
    "SearchResult",
    "RestartRecord",
    "optimize_pentagram",
    "regular_K",
    "detection_scan",
    "StokesDirection",
    "CoincidencePlan",
    "biphoton_state",
    "coincidence_rate",
    "symmetric_test_angle",
    "visibility_adjusted_rate",
    "simulate_counts",
    "clopper_pearson",
    "plan_trials",
]
