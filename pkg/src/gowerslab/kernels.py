"""Hot-loop dispatch.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is loaded. Set ``GOWERSLAB_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _fallback

if os.environ.get("GOWERSLAB_PURE"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"


def _c(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.complex128)


def autocorr_energy(f, impl=None) -> float:
    return float((impl or _impl).autocorr_energy(_c(f)))


def lambda_dense(F, impl=None) -> complex:
    return complex((impl or _impl).lambda_dense(_c(F)))


def lambda_sparse(F, support, impl=None) -> complex:
    sup = np.ascontiguousarray(support, dtype=np.int64)
    return complex((impl or _impl).lambda_sparse(_c(F), sup))


def progression_sum(table, support, N: int, k: int, impl=None) -> float:
    tab = np.ascontiguousarray(table, dtype=np.float64)
    sup = np.ascontiguousarray(support, dtype=np.int64)
    if tab.shape[0] <= k * N:
        raise ValueError(f"table length {tab.shape[0]} must exceed k*N = {k * N}")
    return float((impl or _impl).progression_sum(tab, sup, int(N), int(k)))


def dual_function(f, impl=None) -> np.ndarray:
    return np.asarray((impl or _impl).dual_function(_c(f)))


def backends() -> dict:
    """Every importable implementation, keyed by name (used by tests and the benchmark)."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
