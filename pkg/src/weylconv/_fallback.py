"""Pure-numpy versions of the routines in ``_core.pyx``."""

from __future__ import annotations

import numpy as np


def _norm_pow(diff: np.ndarray, p: float) -> np.ndarray:
    if diff.shape[1] == 1:
        mag = np.abs(diff[:, 0])
    else:
        mag = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    if p == 1.0:
        return mag
    if p == 2.0:
        return mag * mag
    return mag**p


def shift_window_sup(f, shifts, win, p, nprobe):
    f = np.ascontiguousarray(f, dtype=np.float64)
    shifts = np.asarray(shifts, dtype=np.int64)
    n = f.shape[0]
    out = np.empty(len(shifts))
    arg = np.empty(len(shifts), dtype=np.int64)
    span = nprobe + win - 1
    for a, k in enumerate(shifts):
        if k < 0 or span + k > n:
            raise ValueError("shift window exceeds sample span")
        d = _norm_pow(f[k : k + span] - f[:span], p)
        c = np.concatenate(([0.0], np.cumsum(d)))
        sums = c[win:] - c[:-win]
        i = int(np.argmax(sums))
        out[a] = sums[i]
        arg[a] = i
    return out, arg


def causal_conv(w, x, k0, nout):
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    full = np.convolve(w, x)
    out = np.zeros(nout)
    hi = min(nout, len(full) - k0)
    if hi > 0:
        out[:hi] = full[k0 : k0 + hi]
    return out


def l1_history(t, u, alpha, out_idx):
    t = np.asarray(t, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    e = 1.0 - alpha
    slopes = np.diff(u) / np.diff(t)
    out = np.zeros(len(out_idx))
    for a, n in enumerate(out_idx):
        if n == 0:
            continue
        lag = t[n] - t[: n + 1]
        lag[-1] = 0.0
        pw = lag**e
        out[a] = np.dot(slopes[:n], pw[:-1] - pw[1:])
    return out
