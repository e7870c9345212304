"""Kernel backend selection.

Imports the compiled chain kernel when available, otherwise the pure-Python
reference implementation.  Set PENTASPIN_KERNEL=python or =compiled to force
a backend (the latter raises if the extension is missing, rather than
silently running slow).
"""

import os

from .errors import PentaspinError

_forced = os.environ.get("PENTASPIN_KERNEL", "").strip().lower()

if _forced == "python":
    from . import _chainkernel_py as _impl

    BACKEND = "python"
elif _forced == "compiled":
    try:
        from . import _chainkernel as _impl  # type: ignore[attr-defined]
    except ImportError as exc:
        raise PentaspinError(
            "PENTASPIN_KERNEL=compiled but the extension is not built"
        ) from exc
    BACKEND = "compiled"
else:
    try:
        from . import _chainkernel as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _chainkernel_py as _impl

        BACKEND = "python"

completion = _impl.completion
chain_legs = _impl.chain_legs
kcbs_from_legs = _impl.kcbs_from_legs
chain_kcbs = _impl.chain_kcbs
CLOSURE_TOL = _impl.CLOSURE_TOL
PARALLEL_TOL = _impl.PARALLEL_TOL

__all__ = [
    "BACKEND",
    "completion",
    "chain_legs",
    "kcbs_from_legs",
    "chain_kcbs",
    "CLOSURE_TOL",
    "PARALLEL_TOL",
]
