"""Select the compiled core or the numpy fallback at import time.

Set ``WEYLCONV_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np
from scipy import signal

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("WEYLCONV_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _fallback

# direct summation below this many multiply-adds, FFT above
DIRECT_LIMIT = 4_000_000


def shift_window_sup(f, shifts, win, p, nprobe):
    f = np.ascontiguousarray(f, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    shifts = np.ascontiguousarray(shifts, dtype=np.int64)
    return _impl.shift_window_sup(f, shifts, int(win), float(p), int(nprobe))


def causal_conv(w, x, k0, nout):
    """``out[k] = sum_j w[j] x[k + k0 - j]`` with out-of-range terms dropped."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if len(w) * nout <= DIRECT_LIMIT:
        return _impl.causal_conv(w, x, int(k0), int(nout))
    full = signal.fftconvolve(w, x)
    out = np.zeros(nout)
    hi = min(nout, len(full) - k0)
    if hi > 0:
        out[:hi] = full[k0 : k0 + hi]
    return out


def l1_history(t, u, alpha, out_idx):
    return _impl.l1_history(
        np.ascontiguousarray(t, dtype=np.float64),
        np.ascontiguousarray(u, dtype=np.float64),
        float(alpha),
        np.ascontiguousarray(out_idx, dtype=np.int64),
    )
