"""Exception types shared across the package.

Everything raised on bad user input derives from ValidationError so callers
(and the CLI) can distinguish "your data is malformed" from genuine bugs.
"""


class PentaspinError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(PentaspinError, ValueError):
    """Input fails a documented precondition (non-unit vector, bad JSON, ...)."""


class InvalidPentagram(ValidationError):
    """Five legs that do not form a pentagram (adjacency or distinctness broken)."""


class DegenerateClosure(ValidationError):
    """Chain construction cannot close: the fourth leg is (anti)parallel to the first."""


class InconsistentModel(ValidationError):
    """Context tables disagree on a shared observable's single-site distribution."""


class StructureMismatch(ValidationError):
    """Ray and model belong to different context structures."""


class InfeasiblePlan(ValidationError):
    """Trial planning cannot separate a rate from an equal threshold."""


class ScaleGuard(PentaspinError):
    """Problem size exceeds the guard intended for desk-scale exact computation."""


class UnboundedProblem(PentaspinError):
    """Internal LP reached an unbounded ray; indicates a malformed program."""
