# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.

Every routine here has a numpy twin in :mod:`weylconv._fallback` with the
same signature; :mod:`weylconv._backend` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs, sqrt

cnp.import_array()


cdef inline double _norm_pow(const double[:, ::1] f, Py_ssize_t i, Py_ssize_t j,
                             Py_ssize_t d, double p) nogil:
    cdef double acc = 0.0, diff
    cdef Py_ssize_t c
    if d == 1:
        diff = fabs(f[i, 0] - f[j, 0])
    else:
        for c in range(d):
            diff = f[i, c] - f[j, c]
            acc += diff * diff
        diff = sqrt(acc)
    if p == 1.0:
        return diff
    if p == 2.0:
        return diff * diff
    return pow(diff, p)


def shift_window_sup(const double[:, ::1] f, const long[::1] shifts,
                     Py_ssize_t win, double p, Py_ssize_t nprobe):
    """Largest window sum of ``|f[i+k] - f[i]|^p`` for every shift ``k``.

    Windows hold ``win`` consecutive cells and start at ``0 .. nprobe-1``.
    Returns ``(sums, argmax)``.
    """
    cdef Py_ssize_t n = f.shape[0], d = f.shape[1]
    cdef Py_ssize_t ns = shifts.shape[0]
    cdef Py_ssize_t a, i, k
    cdef double run, best, comp, y, t
    cdef Py_ssize_t arg
    out = np.empty(ns, dtype=np.float64)
    arg_out = np.empty(ns, dtype=np.int64)
    cdef double[::1] o = out
    cdef long[::1] ao = arg_out
    for a in range(ns):
        k = shifts[a]
        if k < 0 or nprobe + win - 1 + k > n:
            raise ValueError("shift window exceeds sample span")
    with nogil:
        for a in range(ns):
            k = shifts[a]
            run = 0.0
            comp = 0.0
            for i in range(win):
                y = _norm_pow(f, i + k, i, d, p) - comp
                t = run + y
                comp = (t - run) - y
                run = t
            best = run
            arg = 0
            for i in range(1, nprobe):
                y = (_norm_pow(f, i + win - 1 + k, i + win - 1, d, p)
                     - _norm_pow(f, i - 1 + k, i - 1, d, p)) - comp
                t = run + y
                comp = (t - run) - y
                run = t
                if run > best:
                    best = run
                    arg = i
            o[a] = best
            ao[a] = arg
    return out, arg_out


def causal_conv(const double[::1] w, const double[::1] x, Py_ssize_t k0,
                Py_ssize_t nout):
    """``out[k] = sum_j w[j] * x[k + k0 - j]`` over valid ``j``.

    The weights are reversed once so the inner product runs forward over
    both arrays; four partial sums keep the pipeline busy.
    """
    cdef Py_ssize_t nw = w.shape[0], nx = x.shape[0]
    cdef Py_ssize_t k, i, idx, jlo, jhi, base, cnt
    cdef double s0, s1, s2, s3
    wr_arr = np.ascontiguousarray(w[::-1])
    cdef double[::1] wr = wr_arr
    out = np.zeros(nout, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for k in range(nout):
            idx = k + k0
            # valid j: max(0, idx - nx + 1) <= j <= min(idx, nw - 1)
            jlo = idx - nx + 1
            if jlo < 0:
                jlo = 0
            jhi = idx
            if jhi > nw - 1:
                jhi = nw - 1
            if jhi < jlo:
                continue
            # w[j] x[idx - j] = wr[nw - 1 - j] x[idx - j]; walk j downwards
            base = nw - 1 - jhi
            cnt = jhi - jlo + 1
            s0 = s1 = s2 = s3 = 0.0
            i = 0
            while i + 3 < cnt:
                s0 += wr[base + i] * x[idx - jhi + i]
                s1 += wr[base + i + 1] * x[idx - jhi + i + 1]
                s2 += wr[base + i + 2] * x[idx - jhi + i + 2]
                s3 += wr[base + i + 3] * x[idx - jhi + i + 3]
                i += 4
            while i < cnt:
                s0 += wr[base + i] * x[idx - jhi + i]
                i += 1
            o[k] = (s0 + s1) + (s2 + s3)
    return out


def l1_history(const double[::1] t, const double[::1] u, double alpha,
               const long[::1] out_idx):
    """L1 sum ``sum_j (u[j+1]-u[j])/(t[j+1]-t[j]) * [(t_n-t_j)^(1-a) - (t_n-t_{j+1})^(1-a)]``.

    The Gamma(2 - alpha) normalisation is left to the caller.  When the nodes
    are uniform from ``t[1]`` on, the powers come from a table of ``(k h)^(1-a)``.
    """
    cdef Py_ssize_t m = out_idx.shape[0], N = t.shape[0]
    cdef Py_ssize_t a, j, n
    cdef double e = 1.0 - alpha, tn, acc, left, right, h
    cdef bint uniform = N > 2
    out = np.zeros(m, dtype=np.float64)
    cdef double[::1] o = out
    if uniform:
        h = (t[N - 1] - t[1]) / (N - 2)
        for j in range(1, N - 1):
            if fabs((t[j + 1] - t[j]) - h) > 1e-12 * h:
                uniform = False
                break
    if uniform:
        return _l1_uniform(t, u, e, out_idx, h)
    with nogil:
        for a in range(m):
            n = out_idx[a]
            tn = t[n]
            acc = 0.0
            if n > 0:
                left = pow(tn - t[0], e)
                for j in range(n):
                    if j + 1 == n:
                        right = 0.0
                    else:
                        right = pow(tn - t[j + 1], e)
                    acc = acc + (u[j + 1] - u[j]) / (t[j + 1] - t[j]) * (left - right)
                    left = right
            o[a] = acc
    return out


cdef object _l1_uniform(const double[::1] t, const double[::1] u, double e,
                        const long[::1] out_idx, double h):
    cdef Py_ssize_t m = out_idx.shape[0], N = t.shape[0]
    cdef Py_ssize_t a, j, n, k
    cdef double acc, h0 = t[1] - t[0]
    pw_arr = np.empty(N, dtype=np.float64)
    sl_arr = np.empty(N - 1, dtype=np.float64)
    cdef double[::1] pw = pw_arr
    cdef double[::1] sl = sl_arr
    out = np.zeros(m, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for k in range(N):
            pw[k] = pow(k * h, e)
        for j in range(N - 1):
            sl[j] = (u[j + 1] - u[j]) / (t[j + 1] - t[j])
        for a in range(m):
            n = out_idx[a]
            if n == 0:
                continue
            # first interval [t0, t1] with t_n - t_0 = (n - 1) h + h0
            acc = sl[0] * (pow((n - 1) * h + h0, e) - pw[n - 1])
            for j in range(1, n):
                acc = acc + sl[j] * (pw[n - j] - pw[n - j - 1])
            o[a] = acc
    return out
