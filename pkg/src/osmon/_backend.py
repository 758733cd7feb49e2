"""Estimation backend selection.

The compiled extension is preferred when importable; the pure-Python backend
is the fallback and can be forced with OSMON_PURE_PYTHON=1.  Both expose the
same two functions with identical semantics (fit_snapshot, fit_milestones).
"""

import os

from . import _trial_kernel_py

if os.environ.get("OSMON_PURE_PYTHON") == "1":
    _impl = _trial_kernel_py
    BACKEND_NAME = "python"
else:
    try:
        from . import _trial_kernel as _impl  # type: ignore[attr-defined]

        BACKEND_NAME = "compiled"
    except ImportError:
        _impl = _trial_kernel_py
        BACKEND_NAME = "python"

fit_snapshot = _impl.fit_snapshot
fit_milestones = _impl.fit_milestones
