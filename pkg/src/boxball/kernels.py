"""Kernel dispatch: compiled extension if available, pure Python otherwise.

Set BOXBALL_PURE_PYTHON=1 to force the fallback (used by tests and the
backend benchmark).
"""

from __future__ import annotations

import os

if os.environ.get("BOXBALL_PURE_PYTHON"):
    from . import _core_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _core_py as _impl

        BACKEND = "python"

gap_trajectory = _impl.gap_trajectory
pushtasep_gap_trajectory = _impl.pushtasep_gap_trajectory


def backend() -> str:
    return BACKEND
