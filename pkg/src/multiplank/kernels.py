"""Batch kernels, compiled when available.

The Cython extension ``_ckernels`` is used if it imports; otherwise the numpy
implementation in ``_pykernels`` is used. Set ``MULTIPLANK_PURE_PYTHON=1`` to
force the fallback. ``MULTIPLANK_THREADS`` caps the number of worker threads
used to split large batches (the compiled loops release the GIL).
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

if os.environ.get("MULTIPLANK_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

_MIN_PARALLEL = 20000


def thread_count() -> int:
    raw = os.environ.get("MULTIPLANK_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return os.cpu_count() or 1


def _as2d(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    return a


def _run(fn, consts, X):
    X = _as2d(X)
    workers = thread_count()
    if BACKEND != "cython" or workers == 1 or X.shape[0] < _MIN_PARALLEL:
        return fn(*consts, X)
    # chunks are reassembled in submission order, so results do not depend on scheduling
    chunks = np.array_split(X, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: fn(*consts, np.ascontiguousarray(c)), chunks))
    return np.concatenate(parts)


def plank_margin(V, X, backend=None) -> np.ndarray:
    impl = _pick(backend)
    return _run(impl.plank_margin, (_as2d(V),), X)


def cell_margin(V, X, backend=None) -> np.ndarray:
    impl = _pick(backend)
    return _run(impl.cell_margin, (_as2d(V),), X)


def gauge_norms(A, X, backend=None) -> np.ndarray:
    impl = _pick(backend)
    return _run(impl.gauge_norms, (_as2d(A),), X)


def gauge_plank_margin(V, A, X, backend=None) -> np.ndarray:
    impl = _pick(backend)
    return _run(impl.gauge_plank_margin, (_as2d(V), _as2d(A)), X)


def fan_clearance(X, apex, dirs, backend=None) -> np.ndarray:
    impl = _pick(backend)
    apex = np.ascontiguousarray(apex, dtype=np.float64).reshape(-1, 2)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64).reshape(-1, 2)
    return _run(lambda X_: impl.fan_clearance(X_, apex, dirs), (), X)


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if BACKEND != "cython":
            raise RuntimeError("compiled kernels are not built")
        return _impl
    raise ValueError(f"unknown backend {backend!r}")
