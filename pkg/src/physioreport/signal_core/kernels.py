"""Selects the compiled IIR kernel when available, else the pure-Python one.

Set ``PHYSIOREPORT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _iir_py

try:
    from . import _iir as _compiled
except ImportError:
    _compiled = None

_forced_python = os.environ.get("PHYSIOREPORT_PURE_PYTHON", "") not in ("", "0")
BACKEND = "cython" if _compiled is not None and not _forced_python else "python"


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


def _prepare(b, a, x):
    b = np.asarray(b, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    size = max(b.shape[0], a.shape[0])
    bp = np.zeros(size)
    ap = np.zeros(size)
    bp[: b.shape[0]] = b / a[0]
    ap[: a.shape[0]] = a / a[0]
    return bp, ap, np.ascontiguousarray(x, dtype=np.float64)


def lfilter_forward(b, a, x, backend: str | None = None) -> np.ndarray:
    """Forward-only IIR filtering with zero initial state.

    ``backend`` may be ``"cython"`` or ``"python"`` to pin an implementation
    (used by the benchmark and the equivalence tests).
    """
    bp, ap, xc = _prepare(b, a, x)
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled IIR kernel is not built")
        return _compiled.lfilter_forward(bp, ap, xc)
    if backend == "python":
        return _iir_py.lfilter_forward(bp, ap, xc)
    raise ValueError(f"unknown backend {backend!r}")
