"""numba kernels for the float64 Volterra recurrences.

All sums are Neumaier-compensated and run in a fixed order, so results are
bit-reproducible for a given input.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _two_sum_acc(s, c, t):
    x = s + t
    if abs(s) >= abs(t):
        c += (s - x) + t
    else:
        c += (t - x) + s
    return x, c


@njit(cache=True)
def direct_reciprocal(f, w, g1):
    """a(n) = (f(n) - sum_{k<n} a(k) k w(n//k) / n) / g1, O(N^2)."""
    N = f.shape[0] - 1
    a = np.zeros(N + 1, dtype=f.dtype)
    for n in range(1, N + 1):
        s = f[0] * 0
        c = f[0] * 0
        for k in range(1, n):
            s, c = _two_sum_acc(s, c, a[k] * (k * w[n // k] / n))
        a[n] = (f[n] - (s + c)) / g1
    return a


@njit(cache=True)
def direct_affine(f, c0, c1):
    N = f.shape[0] - 1
    a = np.zeros(N + 1, dtype=f.dtype)
    g1 = c0 + c1
    for n in range(1, N + 1):
        s = f[0] * 0
        c = f[0] * 0
        for k in range(1, n):
            s, c = _two_sum_acc(s, c, a[k] * (c1 * (k / n) + c0))
        a[n] = (f[n] - (s + c)) / g1
    return a


@njit(cache=True)
def blocked_reciprocal(f, w, g1):
    """Same recurrence as ``direct_reciprocal`` but summing over blocks of constant n//k.

    Uses compensated prefix sums P(k) = sum_{j<=k} j a(j); O(N^1.5).
    """
    N = f.shape[0] - 1
    a = np.zeros(N + 1, dtype=f.dtype)
    ph = np.zeros(N + 1, dtype=f.dtype)
    pl = np.zeros(N + 1, dtype=f.dtype)
    for n in range(1, N + 1):
        s = f[0] * 0
        c = f[0] * 0
        k = 1
        while k <= n - 1:
            q = n // k
            khi = n // q
            if khi > n - 1:
                khi = n - 1
            diff = (ph[khi] - ph[k - 1]) + (pl[khi] - pl[k - 1])
            s, c = _two_sum_acc(s, c, w[q] * diff)
            k = khi + 1
        a[n] = (f[n] - (s + c) / n) / g1
        t = n * a[n]
        x = ph[n - 1] + t
        if abs(ph[n - 1]) >= abs(t):
            err = (ph[n - 1] - x) + t
        else:
            err = (t - x) + ph[n - 1]
        ph[n] = x
        pl[n] = pl[n - 1] + err
    return a


@njit(cache=True)
def blocked_affine(f, c0, c1):
    """O(N): the row is (c1/n) sum k a(k) + c0 sum a(k)."""
    N = f.shape[0] - 1
    a = np.zeros(N + 1, dtype=f.dtype)
    g1 = c0 + c1
    s1 = f[0] * 0
    e1 = f[0] * 0
    s0 = f[0] * 0
    e0 = f[0] * 0
    for n in range(1, N + 1):
        row = c1 * ((s1 + e1) / n) + c0 * (s0 + e0)
        a[n] = (f[n] - row) / g1
        s1, e1 = _two_sum_acc(s1, e1, n * a[n])
        s0, e0 = _two_sum_acc(s0, e0, a[n])
    return a
