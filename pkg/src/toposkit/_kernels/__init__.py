"""Backend selection for the enumeration kernel.

The compiled extension is used when it imported cleanly; setting
``TOPOSKIT_PURE_PYTHON=1`` forces the portable implementation.  Both
backends expose ``enumerate_assignments`` / ``count_assignments`` with
identical semantics (see ``csp_py``).
"""

import os

from . import csp_py

_FORCE_PURE = os.environ.get("TOPOSKIT_PURE_PYTHON", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _csp as _backend  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _backend = csp_py
        BACKEND = "pure-python"
else:
    _backend = csp_py
    BACKEND = "pure-python"

enumerate_assignments = _backend.enumerate_assignments
count_assignments = _backend.count_assignments


def backend_name() -> str:
    """Which kernel is active: ``"compiled"`` or ``"pure-python"``."""
    return BACKEND
