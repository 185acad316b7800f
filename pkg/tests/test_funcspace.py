from __future__ import annotations

import math

import numpy as np
import pytest

from weylconv.errors import DomainError, GridMismatchError, SpanError
from weylconv.funcspace import (
    Exponent,
    GridFunction,
    SeminormParams,
    TranslationSearch,
    classify_vanishing,
    extrapolate_limit,
    find_translation_numbers,
    make_example,
    stepanov_metric,
    stepanov_norm,
    translation_defects,
    weyl_seminorm,
)


def test_exponent_conjugate():
    assert Exponent(2).q == 2
    assert Exponent(1).q_infinite
    assert Exponent(4).q == pytest.approx(4 / 3)
    with pytest.raises(DomainError):
        Exponent(0.5)


def test_gridfunction_validation():
    with pytest.raises(DomainError):
        GridFunction(0.0, 0.0, [1.0])
    with pytest.raises(DomainError):
        GridFunction(0.0, 0.1, [])
    with pytest.raises(DomainError):
        GridFunction(0.0, 0.1, [1.0], domain="circle")


def test_grid_arithmetic_requires_same_grid():
    f = make_example("sin", span=(0, 10), dt=0.1)
    g = make_example("sin", span=(0, 10), dt=0.05)
    with pytest.raises(GridMismatchError):
        f - g


@pytest.mark.parametrize("c", [1.0, -2.5, 0.3])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_constant_norm_is_exact(c, p):
    f = make_example("constant", span=(0, 50), dt=0.01, c=c)
    assert abs(stepanov_norm(f, Exponent(p), 1.0) - abs(c)) < 1e-12


def test_bump_stepanov_norm_scales_with_window():
    f = make_example("bump", span=(-100, 100), dt=0.01, a=0.0, b=1.0)
    for l in (1.0, 4.0, 10.0):
        assert stepanov_norm(f, Exponent(1), l) == pytest.approx(1.0 / l, abs=1e-12)


def test_weyl_seminorm_of_bump_vanishes():
    f = make_example("bump", span=(-1000, 3000), dt=0.01, a=0.0, b=1.0)
    rep = weyl_seminorm(f, Exponent(2), SeminormParams(10, (10, 100, 1000)))
    assert rep.seminorm_per_l == pytest.approx([10**-0.5, 0.1, 10**-1.5], rel=1e-9)
    assert rep.weyl_limit < 1e-3


def test_metric_is_symmetric_and_zero_on_diagonal():
    f = make_example("sin", span=(0, 40), dt=0.01)
    g = make_example("quasi_periodic", span=(0, 40), dt=0.01)
    e = Exponent(2)
    assert stepanov_metric(f, f, e, 2.0) == 0.0
    assert stepanov_metric(f, g, e, 2.0) == pytest.approx(stepanov_metric(g, f, e, 2.0))


def test_window_longer_than_span():
    f = make_example("sin", span=(0, 1), dt=0.01)
    with pytest.raises(SpanError):
        stepanov_norm(f, Exponent(2), 5.0)


def test_extrapolate_geometric_sequence():
    # Aitken is exact on a geometric tail; convergence needs the raw values to settle
    lim, unc, conv = extrapolate_limit([1.0 + 0.5**k for k in range(6)])
    assert lim == pytest.approx(1.0, abs=1e-12)
    assert not conv
    assert extrapolate_limit([1.0 + 0.5**k for k in range(12)])[2]


def test_period_is_a_translation_number():
    f = make_example("sin", span=(0, 200), dt=0.01)
    rep = find_translation_numbers(f, Exponent(2), TranslationSearch(0.05, (1.0, 20.0)),
                                   SeminormParams(10.0))
    taus = rep.taus
    assert len(taus) > 0
    assert np.min(np.abs(taus - 2 * math.pi)) < 0.05


def test_translation_defect_zero_shift():
    f = make_example("quasi_periodic", span=(0, 100), dt=0.01)
    d, _ = translation_defects(f, np.array([0]), Exponent(2), 5.0)
    assert d[0] == 0.0


def test_classifier_separates_classes():
    e = Exponent(1)
    sp = SeminormParams(1, (1, 10, 100))
    hz = [625, 1250, 2500, 5000, 10000]
    decay = make_example("exp_decay", span=(0, 40000), dt=0.01)
    assert classify_vanishing(decay, e, sp, hz).verdict == "C0"
    chi = make_example("chi_squares", span=(0, 40000), dt=0.01)
    assert classify_vanishing(chi, e, sp, hz).verdict == "equi-Weyl-vanishing"
    const = make_example("constant", span=(0, 40000), dt=0.01)
    assert classify_vanishing(const, e, sp, hz).verdict == "none"


def test_classifier_inconclusive_on_short_span():
    q = make_example("exp_decay", span=(0, 50), dt=0.01)
    rep = classify_vanishing(q, Exponent(1), SeminormParams(1, (1, 10)), [100, 200])
    assert rep.verdict == "inconclusive"


def test_translated_uses_exact_source():
    f = make_example("sin", span=(0, 20), dt=0.01)
    g = f.translated(0.123)
    assert np.allclose(g.samples, np.sin(f.times + 0.123), atol=1e-14)


def test_unknown_example():
    with pytest.raises(KeyError):
        make_example("nope")
