from __future__ import annotations

import math

import numpy as np
import pytest

from weylconv.errors import ConsistencyError, DomainError
from weylconv.fracops import diagonal_model, scalar_model
from weylconv.funcspace import GridFunction, make_example
from weylconv.solvers import (
    IVProblem,
    LineProblem,
    default_exponent,
    heat1d_demo,
    solve_ivp,
    solve_line,
    variation_of_constants,
)


def _vector_sin(span, dt, n=2):
    def func(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.sin((k + 1) * t) for k in range(n)], axis=-1)

    t0, t1 = span
    k = int(round((t1 - t0) / dt))
    return GridFunction(t0, dt, func(t0 + (np.arange(k) + 0.5) * dt), "full", "linear", func)


def test_default_exponent_keeps_kernel_integrable():
    assert default_exponent(1.0).p == 2.0
    assert default_exponent(0.5).p == 4.0


def test_line_semigroup_matches_closed_form():
    # u' + 2u = sin t has the bounded solution (2 sin t - cos t) / 5
    f = make_example("sin", span=(0, 20), dt=0.005)
    tr = solve_line(LineProblem(scalar_model(2.0), f))
    t = tr.u.times
    assert np.max(np.abs(tr.u.samples - (2 * np.sin(t) - np.cos(t)) / 5)) < 1e-5
    assert tr.verdict == "pass"


def test_line_degenerate_slot_is_algebraic():
    f = _vector_sin((0, 10), 0.01)
    model = diagonal_model([1.0, 0.0], [1.0, 4.0])
    tr = solve_line(LineProblem(model, f))
    assert np.allclose(tr.u.samples[:, 1], f.samples[:, 1] / 4.0, atol=1e-14)
    assert tr.degenerate_defect < 1e-14
    assert tr.verdict == "pass"


def test_line_fractional_residual():
    f = make_example("sin", span=(0, 10), dt=0.01)
    tr = solve_line(LineProblem(scalar_model(1.0), f, gamma=0.5))
    assert tr.residual_max <= 1e-2
    assert tr.verdict == "pass"


def test_line_slot_count_checked():
    f = make_example("sin", span=(0, 10), dt=0.01)
    with pytest.raises(DomainError):
        LineProblem(diagonal_model([1.0, 1.0], [1.0, 2.0]), f)


def test_line_gamma_range():
    f = make_example("sin", span=(0, 10), dt=0.01)
    with pytest.raises(DomainError):
        LineProblem(scalar_model(1.0), f, gamma=1.2)


def test_ivp_matches_variation_of_constants():
    f = make_example("sin", span=(0, 10), dt=0.001)
    tr = solve_ivp(IVProblem(scalar_model(2.0), f, x0=1.0))
    t = tr.u.times[::500]
    want = variation_of_constants(2.0, 1.0, np.sin, t)
    assert np.max(np.abs(tr.u.samples[::500] - want)) < 1e-6


def test_ivp_fractional_residual_after_layer():
    f = make_example("sin", span=(0, 20), dt=0.005)
    tr = solve_ivp(IVProblem(scalar_model(1.0), f, x0=0.5, gamma=0.5, residual_layer=1.0))
    assert tr.residual_max < 1e-2


def test_ivp_consistency_on_degenerate_slot():
    f = _vector_sin((0, 5), 0.01)
    model = diagonal_model([1.0, 0.0], [1.0, 2.0])
    # sin(0) = 0 so x0 must vanish on the degenerate slot
    tr = solve_ivp(IVProblem(model, f, x0=[1.0, 0.0]))
    assert tr.diagnostics["initial_value"]["continuity_at_zero"]
    with pytest.raises(ConsistencyError):
        solve_ivp(IVProblem(model, f, x0=[1.0, 0.3]))


def test_ivp_forcing_from_zero():
    f = make_example("sin", span=(1, 5), dt=0.01)
    with pytest.raises(DomainError):
        IVProblem(scalar_model(1.0), f)


def test_ivp_half_exponential_kernel_solution():
    # D^1/2 u + u = 0, u(0) = 1 gives u = E_{1/2}(-t^{1/2}) = erfcx(t^{1/2})
    from scipy.special import erfcx

    f = GridFunction(0.0, 0.01, np.zeros(500), "half")
    tr = solve_ivp(IVProblem(scalar_model(1.0), f, x0=1.0, gamma=0.5, check_residual=False))
    assert np.max(np.abs(tr.u.samples - erfcx(np.sqrt(tr.u.times)))) < 1e-9


def test_heat_demo_closed_form():
    trace, rep = heat1d_demo({"span": [0.0, 20.0], "n": 19})
    assert rep["closed_form_error"] < 1e-5
    assert rep["mu_min"] > 0
    assert math.isfinite(rep["norm_max"])
    assert rep["verdict"] in ("pass", "fail")


def test_heat_demo_degenerate_constraint():
    trace, rep = heat1d_demo({"span": [0.0, 10.0], "n": 19, "m": "degenerate-mid"})
    assert rep["constraint_error"] < 1e-10
