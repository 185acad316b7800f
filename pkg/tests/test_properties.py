from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from weylconv.convolution import ConvolutionJob, finite_conv, infinite_conv
from weylconv.funcspace import Exponent, GridFunction, stepanov_norm
from weylconv.kernels import AlgLaw, ScalarFamily

DT = 0.02
N = 500
KERNELS = [ScalarFamily.exponential(1.0), AlgLaw(1.0, 0.6, 2.0)]


def _wave(w: float, phase: float) -> GridFunction:
    def func(t):
        return np.cos(w * np.asarray(t, dtype=float) + phase)

    return GridFunction(0.0, DT, func((np.arange(N) + 0.5) * DT), "full", "linear", func)


def _job(k, g, q=None):
    # a fixed horizon keeps the operator the same for every input
    return ConvolutionJob(k, g, q, Exponent(2), None, 10.0, 30.0)


freq = st.floats(0.1, 3.0)
phase = st.floats(0.0, 6.3)
coef = st.floats(-5.0, 5.0)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(KERNELS), freq, phase, freq, phase, coef, coef)
def test_infinite_product_is_linear(k, w1, p1, w2, p2, a, b):
    g1, g2 = _wave(w1, p1), _wave(w2, p2)
    f1, f2 = g1.func, g2.func

    def mix(t):
        return a * f1(t) + b * f2(t)

    g = GridFunction(0.0, DT, a * g1.samples + b * g2.samples, "full", "linear", mix)
    lhs = infinite_conv(_job(k, g)).samples
    rhs = a * infinite_conv(_job(k, g1)).samples + b * infinite_conv(_job(k, g2)).samples
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, abs(a) + abs(b))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(KERNELS), freq, phase, st.integers(1, 200))
def test_infinite_product_commutes_with_shifts(k, w, p, shift):
    g = _wave(w, p)
    G = infinite_conv(_job(k, g)).samples
    Gs = infinite_conv(_job(k, g.translated(shift * DT))).samples
    assert np.max(np.abs(Gs[:-shift] - G[shift:])) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(KERNELS), st.integers(0, 2**32 - 1), coef, coef)
def test_finite_product_is_linear(k, seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(-3, 3, (2, N))

    def Q(v):
        return finite_conv(ConvolutionJob(k, q=GridFunction(0.0, DT, v, "half", "linear"))).samples

    err = np.max(np.abs(Q(a * x + b * y) - a * Q(x) - b * Q(y)))
    assert err <= 1e-10 * max(1.0, abs(a) + abs(b))


@settings(max_examples=25, deadline=None)
@given(freq, phase, st.floats(0.1, 10.0))
def test_stepanov_norm_is_homogeneous(w, p, c):
    g = _wave(w, p)
    e = Exponent(2)
    cg = GridFunction(0.0, DT, c * g.samples, "full", "linear")
    assert abs(stepanov_norm(cg, e, 1.0) - c * stepanov_norm(g, e, 1.0)) <= 1e-12 * c
