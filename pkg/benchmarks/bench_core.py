"""Compare the compiled core with the numpy fallback on the three hot kernels.

Usage: python3 benchmarks/bench_core.py [--repeat N] [--scale S]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from weylconv import _fallback

try:
    from weylconv import _core
except ImportError:  # pragma: no cover - depends on the build
    _core = None


def _best(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(scale: float):
    rng = np.random.default_rng(0)
    n = int(20000 * scale)
    f = np.ascontiguousarray(rng.standard_normal((n, 1)))
    shifts = np.arange(0, int(400 * scale), dtype=np.int64)
    win, nprobe = 200, n - 200 - int(400 * scale)
    yield "shift_window_sup", lambda m: m.shift_window_sup(f, shifts, win, 2.0, nprobe)

    nw = int(2000 * scale)
    w = np.ascontiguousarray(np.exp(-0.01 * np.arange(nw)))
    x = np.ascontiguousarray(rng.standard_normal(nw + int(5000 * scale)))
    yield "causal_conv", lambda m: m.causal_conv(w, x, nw - 1, len(x) - nw + 1)

    m_ = int(3000 * scale)
    t = np.ascontiguousarray(np.linspace(0.0, 10.0, m_ + 1))
    u = np.ascontiguousarray(np.sin(t))
    idx = np.arange(1, m_ + 1, dtype=np.int64)
    yield "l1_history", lambda m: m.l1_history(t, u, 0.5, idx)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled core not built; only the fallback is timed")
    print(f"{'kernel':<18}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, run in cases(args.scale):
        tp, outp = _best(lambda: run(_fallback), args.repeat)
        if _core is None:
            print(f"{name:<18}{tp:>12.4f}{'-':>12}{'-':>10}{'-':>12}")
            continue
        tc, outc = _best(lambda: run(_core), args.repeat)
        a = np.asarray(outp[0] if isinstance(outp, tuple) else outp)
        b = np.asarray(outc[0] if isinstance(outc, tuple) else outc)
        diff = float(np.max(np.abs(a - b)))
        print(f"{name:<18}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
