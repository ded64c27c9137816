"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``KMRGLUE_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _core_py

BACKEND = "python"
_impl = _core_py

if os.environ.get("KMRGLUE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _compiled

        _impl = _compiled
        BACKEND = "compiled"
    except ImportError:  # extension not built
        pass


def mean_curvature_grid(P, hu, hv):
    """Mean curvature on the interior of a ``(nv, nu, 3)`` point grid."""
    return _impl.mean_curvature_grid(np.ascontiguousarray(P, dtype=float), float(hu), float(hv))


def tridiag_solve_batched(a, b, c, d):
    """Solve a batch of tridiagonal systems (rows are independent systems)."""
    args = [np.ascontiguousarray(t, dtype=float) for t in (a, b, c, d)]
    return _impl.tridiag_solve_batched(*args)
