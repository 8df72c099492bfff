"""Hot simulation kernels with numba-jitted and pure-numpy implementations.

The active implementation is chosen per call: set ONEBIT_PURE_NUMPY=1 to
force the numpy path (also used automatically when numba is unavailable).
Both paths produce bit-identical output.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an install-time choice
    HAVE_NUMBA = False


def use_pure_numpy() -> bool:
    return not HAVE_NUMBA or os.environ.get("ONEBIT_PURE_NUMPY", "") not in ("", "0")


# --- decode-table kernel: bit-budget protocols ------------------------------
# Per-trial estimate from precomputed per-h tables: send probability q1 and
# the two decode values.  The private draw r selects the high value iff
# r < q1[h].


def _decode_table_np(h, r, q1, v0, v1):
    hi = r < q1[h]
    return np.where(hi, v1[h], v0[h])


def _decode_table_loop(h, r, q1, v0, v1):
    n = h.shape[0]
    out = np.empty(n)
    for i in range(n):
        hv = h[i]
        if r[i] < q1[hv]:
            out[i] = v1[hv]
        else:
            out[i] = v0[hv]
    return out


# --- threshold/affine kernel: continuous-shared protocols -------------------
# X = [u <= t]; estimate = clip(a*u + b + c*X, lo, hi).


def _threshold_affine_np(u, t, a, b, c, lo, hi):
    x_bit = (u <= t).astype(np.float64)
    est = a * u + b + c * x_bit
    return np.clip(est, lo, hi)


def _threshold_affine_loop(u, t, a, b, c, lo, hi):
    n = u.shape[0]
    out = np.empty(n)
    for i in range(n):
        est = a * u[i] + b
        if u[i] <= t:
            est += c
        if est < lo:
            est = lo
        elif est > hi:
            est = hi
        out[i] = est
    return out


if HAVE_NUMBA:
    _decode_table_nb = njit(cache=True)(_decode_table_loop)
    _threshold_affine_nb = njit(cache=True)(_threshold_affine_loop)


def decode_table(h, r, q1, v0, v1):
    h = np.ascontiguousarray(h, dtype=np.int64)
    r = np.ascontiguousarray(r, dtype=np.float64)
    q1 = np.ascontiguousarray(q1, dtype=np.float64)
    v0 = np.ascontiguousarray(v0, dtype=np.float64)
    v1 = np.ascontiguousarray(v1, dtype=np.float64)
    if use_pure_numpy():
        return _decode_table_np(h, r, q1, v0, v1)
    return _decode_table_nb(h, r, q1, v0, v1)


def threshold_affine(u, t, a, b, c, lo, hi):
    u = np.ascontiguousarray(u, dtype=np.float64)
    if use_pure_numpy():
        return _threshold_affine_np(u, t, a, b, c, lo, hi)
    return _threshold_affine_nb(u, float(t), float(a), float(b), float(c),
                                float(lo), float(hi))
