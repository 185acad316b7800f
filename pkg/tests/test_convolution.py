from __future__ import annotations

import math

import numpy as np
import pytest

from weylconv.convolution import (
    ConvolutionJob,
    bound_Bp,
    decompose,
    finite_conv,
    finite_conv_at,
    infinite_conv,
    tail_bound,
    tail_term,
)
from weylconv.errors import AccuracyError, AdmissibilityError, DomainError, SpanError
from weylconv.funcspace import Exponent, GridFunction, make_example
from weylconv.kernels import AlgLaw, ScalarFamily

EXP = ScalarFamily.exponential(1.0)


def test_infinite_exp_kernel_on_sine_second_order():
    # int_0^inf e^-s sin(t - s) ds = (sin t - cos t) / 2
    errs = []
    for dt in (0.01, 0.005):
        g = make_example("sin", span=(0, 20), dt=dt)
        G = infinite_conv(ConvolutionJob(EXP, g, atol=1e-10))
        exact = 0.5 * (np.sin(G.times) - np.cos(G.times))
        errs.append(np.max(np.abs(G.samples - exact)))
    assert errs[0] < 5e-6
    assert math.log2(errs[0] / errs[1]) > 1.8


def test_infinite_constant_exact():
    g = make_example("constant", span=(0, 10), dt=0.01, c=3.0)
    G = infinite_conv(ConvolutionJob(EXP, g, atol=1e-10))
    assert np.max(np.abs(G.samples - 3.0)) < 1e-9


def test_meta_records_certified_tail():
    g = make_example("sin", span=(0, 10), dt=0.01)
    G = infinite_conv(ConvolutionJob(EXP, g, atol=1e-8))
    assert G.meta["tail_bound"] < 1e-8
    assert G.meta["t_trunc"] > 0


def test_fixed_truncation_rejected_when_too_short():
    g = make_example("sin", span=(0, 10), dt=0.01)
    with pytest.raises(AccuracyError):
        infinite_conv(ConvolutionJob(EXP, g, atol=1e-8, t_trunc=2.0))


def test_history_needed_without_exact_source():
    g = make_example("sin", span=(0, 10), dt=0.01)
    bare = GridFunction(g.t0, g.dt, g.samples)
    with pytest.raises(SpanError):
        infinite_conv(ConvolutionJob(EXP, bare, atol=1e-8))


def test_inadmissible_kernel_refused():
    g = make_example("sin", span=(0, 10), dt=0.01)
    with pytest.raises(AdmissibilityError):
        infinite_conv(ConvolutionJob(AlgLaw(1.0, 0.5, 2.0), g, exponent=Exponent(2)))


def test_finite_conv_of_constant():
    q = make_example("constant", span=(0, 10), dt=0.01)
    Q = finite_conv(ConvolutionJob(EXP, q=q))
    assert np.max(np.abs(Q.samples - (1 - np.exp(-Q.times)))) < 1e-12


def test_finite_conv_needs_half_line_grid():
    q = make_example("constant", span=(1, 10), dt=0.01)
    with pytest.raises(DomainError):
        finite_conv(ConvolutionJob(EXP, q=q))


@pytest.mark.parametrize("kernel,atol", [(EXP, 1e-8), (AlgLaw(1.0, 0.6, 2.0), 1e-3)])
def test_decomposition_identity(kernel, atol):
    g = make_example("quasi_periodic", span=(0, 40), dt=0.01)
    q = make_example("exp_decay", span=(0, 40), dt=0.01)
    dec = decompose(ConvolutionJob(kernel, g, q, atol=atol))
    assert dec.identity_error < 1e-9


def test_slow_tail_with_tight_budget_refused():
    g = make_example("sin", span=(0, 10), dt=0.01)
    with pytest.raises(AccuracyError):
        infinite_conv(ConvolutionJob(AlgLaw(1.0, 0.6, 2.0), g, atol=1e-8))


def test_tail_term_closed_form():
    g = make_example("constant", span=(-5, 5), dt=0.01)
    job = ConvolutionJob(EXP, g, atol=1e-12)
    assert tail_term(job, 0.0) == pytest.approx(1.0, rel=1e-10)
    assert tail_term(job, math.log(100.0)) == pytest.approx(0.01, rel=1e-8)
    assert tail_bound(job, 2.0) >= tail_term(job, 2.0)


def test_finite_conv_at_matches_grid():
    q = make_example("exp_decay", span=(0, 20), dt=0.01)
    job = ConvolutionJob(AlgLaw(1.0, 0.6, 2.0), q=q)
    Q = finite_conv(job)
    t = Q.times[[100, 500, 1500]]
    assert np.allclose(finite_conv_at(job, t), Q.samples[[100, 500, 1500]], atol=1e-5)


def test_bound_profile_shapes():
    q = make_example("chi_squares", span=(0, 200), dt=0.01)
    k = AlgLaw(1.0, 0.6, 2.0)
    Q = finite_conv(ConvolutionJob(k, q=q, exponent=Exponent(2)))
    prof = bound_Bp(q, k, a=0.5, e=Exponent(2), variant="holder", Q=Q)
    assert prof.dominated.all()
    assert len(prof.times) == len(prof.bound)
