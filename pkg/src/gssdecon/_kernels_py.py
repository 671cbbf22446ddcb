"""NumPy implementations of the hot inner-loop kernels.

Mirrors the compiled module ``gssdecon._fast``; the active implementation is
chosen in ``gssdecon._backend``. Outer products are chunked so memory stays
bounded for Monte Carlo sized inputs.
"""

import numpy as np

# chunk size for len(t) x len(w) outer products, ~8 MB of doubles
_CHUNK = 1 << 20


def _chunks(n_t, n_w):
    rows = max(1, _CHUNK // max(n_w, 1))
    for start in range(0, n_t, rows):
        yield start, min(start + rows, n_t)


def sin_sums(t, w):
    """Return (S, Q) with S_i = sum_j sin(t_i w_j), Q_i = sum_j sin^2(t_i w_j)."""
    t = np.asarray(t, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    S = np.empty(t.shape[0])
    Q = np.empty(t.shape[0])
    for lo, hi in _chunks(t.shape[0], w.shape[0]):
        s = np.sin(np.multiply.outer(t[lo:hi], w))
        S[lo:hi] = s.sum(axis=1)
        np.square(s, out=s)
        Q[lo:hi] = s.sum(axis=1)
    return S, Q


def cos_sin_sums(t, w):
    """Return (C, S) with C_i = sum_j cos(t_i w_j), S_i = sum_j sin(t_i w_j)."""
    t = np.asarray(t, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    C = np.empty(t.shape[0])
    S = np.empty(t.shape[0])
    for lo, hi in _chunks(t.shape[0], w.shape[0]):
        arg = np.multiply.outer(t[lo:hi], w)
        C[lo:hi] = np.cos(arg).sum(axis=1)
        S[lo:hi] = np.sin(arg).sum(axis=1)
    return C, S


def cos_sin_transform(x, t, a, b):
    """Return g_m = sum_i [a_i cos(t_i x_m) + b_i sin(t_i x_m)]."""
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.empty(x.shape[0])
    for lo, hi in _chunks(x.shape[0], t.shape[0]):
        arg = np.multiply.outer(x[lo:hi], t)
        out[lo:hi] = np.cos(arg) @ a + np.sin(arg) @ b
    return out


def sin_transform(x, t, b):
    """Return g_m = sum_i b_i sin(t_i x_m)."""
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.empty(x.shape[0])
    for lo, hi in _chunks(x.shape[0], t.shape[0]):
        out[lo:hi] = np.sin(np.multiply.outer(x[lo:hi], t)) @ b
    return out


def tk_vector(w, xi, omega, m):
    """Sample even moments T_k = mean(((w - xi)/omega)^(2k)) for k = 1..m."""
    w = np.asarray(w, dtype=np.float64)
    y = np.square((w - xi) / omega)
    out = np.empty(m)
    p = y.copy()
    out[0] = p.mean()
    for k in range(1, m):
        p *= y
        out[k] = p.mean()
    return out
