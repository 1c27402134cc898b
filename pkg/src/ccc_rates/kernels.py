"""Backend selection for the Monte Carlo hot loop.

``log_mixture_excess`` evaluates, for every row ``r`` and draw ``s``,

    ln sum_j exp(-(|x_r - c_j + w_rs|^2 - |w_rs|^2) / sigma_sq)

with the squared-magnitude difference expanded as
``|d|^2 + 2 Re(conj(d) w)`` so the own-center term is exactly zero.
The compiled extension is used when importable; setting
``CCC_RATES_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("CCC_RATES_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

__all__ = ["BACKEND", "available_backends", "default_threads", "log_mixture_excess"]


def available_backends() -> list[str]:
    return ["cython", "python"] if _ckernels is not None else ["python"]


def default_threads() -> int:
    """Thread cap from ``CCC_RATES_THREADS`` (defaults to the CPU count)."""
    raw = os.environ.get("CCC_RATES_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def log_mixture_excess(rows, centers, noise, sigma_sq, *, threads=None, backend=None):
    """Kernel entry point taking complex arrays.

    Parameters
    ----------
    rows : (R,) complex
        Transmitted point for each outer row.
    centers : (K,) complex
        Mixture centers.
    noise : (R, N) complex
        Noise draws; row ``r`` is used with ``rows[r]``.
    sigma_sq : float
        Complex noise variance.

    Returns
    -------
    (R, N) float64 array of natural-log values.
    """
    backend = backend or BACKEND
    rows = np.ascontiguousarray(rows, dtype=np.complex128)
    centers = np.ascontiguousarray(centers, dtype=np.complex128)
    noise = np.asarray(noise, dtype=np.complex128)
    args = (
        np.ascontiguousarray(rows.real),
        np.ascontiguousarray(rows.imag),
        np.ascontiguousarray(centers.real),
        np.ascontiguousarray(centers.imag),
        np.ascontiguousarray(noise.real),
        np.ascontiguousarray(noise.imag),
        float(sigma_sq),
    )
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        return _ckernels.log_mixture_excess(*args, threads if threads is not None else default_threads())
    if backend == "python":
        return _pykernels.log_mixture_excess(*args)
    raise ValueError(f"unknown backend {backend!r}")
