"""Sweep-kernel backend selection.

The compiled extension is preferred when present; the pure-Python twin is
used otherwise.  CPWAVE_KERNEL=python forces the fallback (the benchmark
and the backend-agreement tests import both modules directly).
"""
from __future__ import annotations

import os

if os.environ.get("CPWAVE_KERNEL", "").lower() == "python":
    from cpwave import _sweep_py as _impl
else:
    try:
        from cpwave import _sweep as _impl  # type: ignore[attr-defined]
    except ImportError:
        from cpwave import _sweep_py as _impl

goursat_sweep = _impl.goursat_sweep
COMPLETED = _impl.COMPLETED
SINGULAR = _impl.SINGULAR
DIVERGED = _impl.DIVERGED
KERNEL_BACKEND: str = _impl.BACKEND
