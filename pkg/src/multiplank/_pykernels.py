"""Pure numpy batch kernels.

Reference implementation for ``_ckernels``; every function takes float64
arrays and returns a float64 vector with one entry per row of ``X``.
Large batches are processed in chunks to bound the (N, m, m, n) temporaries.
"""
import numpy as np

_CHUNK = 4096


def _chunked(fn):
    def wrapper(*args):
        X = args[-1]
        if X.shape[0] <= _CHUNK:
            return fn(*args)
        parts = [fn(*args[:-1], X[s:s + _CHUNK]) for s in range(0, X.shape[0], _CHUNK)]
        return np.concatenate(parts)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _offdiag(m):
    return ~np.eye(m, dtype=bool)


@_chunked
def plank_margin(V, X):
    """min_j max_{k != j} (|x - v_j + v_k| - |x|)."""
    m = V.shape[0]
    if X.shape[0] == 0:
        return np.empty(0)
    diff = V[None, :, :] - V[:, None, :]                  # diff[j, k] = v_k - v_j
    shifted = X[:, None, None, :] + diff[None]            # (N, m, m, n)
    vals = np.linalg.norm(shifted, axis=-1) - np.linalg.norm(X, axis=-1)[:, None, None]
    vals = np.where(_offdiag(m)[None], vals, -np.inf)
    return vals.max(axis=2).min(axis=1)


@_chunked
def cell_margin(V, X):
    """min_j (max_{k != j} |y_j + v_k| - |y_j + v_j|) with y_j = x - v_j."""
    m = V.shape[0]
    if X.shape[0] == 0:
        return np.empty(0)
    Y = X[:, None, :] - V[None, :, :]                     # (N, m, n)
    dist = np.linalg.norm(Y[:, :, None, :] + V[None, None, :, :], axis=-1)  # (N, j, k)
    own = np.diagonal(dist, axis1=1, axis2=2)
    far = np.where(_offdiag(m)[None], dist, -np.inf).max(axis=2)
    return (far - own).min(axis=1)


@_chunked
def gauge_norms(A, X):
    if X.shape[0] == 0:
        return np.empty(0)
    return (X @ A.T).max(axis=1)


@_chunked
def gauge_plank_margin(V, A, X):
    m = V.shape[0]
    if X.shape[0] == 0:
        return np.empty(0)
    diff = V[None, :, :] - V[:, None, :]
    shifted = X[:, None, None, :] + diff[None]
    g = (shifted @ A.T).max(axis=-1) - (X @ A.T).max(axis=1)[:, None, None]
    g = np.where(_offdiag(m)[None], g, -np.inf)
    return g.max(axis=2).min(axis=1)


def fan_clearance(X, apex, dirs):
    """min(1 - |x|, distance from x to the nearest ray apex + t*dir, t >= 0)."""
    f = 1.0 - np.linalg.norm(X, axis=1)
    if apex.shape[0] == 0 or X.shape[0] == 0:
        return f
    out = np.empty(X.shape[0])
    for s in range(0, X.shape[0], _CHUNK):
        P = X[s:s + _CHUNK, None, :] - apex[None]         # (N, R, 2)
        t = np.maximum((P * dirs[None]).sum(-1), 0.0)
        d = np.linalg.norm(P - t[..., None] * dirs[None], axis=-1).min(axis=1)
        out[s:s + _CHUNK] = np.minimum(f[s:s + _CHUNK], d)
    return out
