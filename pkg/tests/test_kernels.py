from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from weylconv.errors import DomainError
from weylconv.funcspace import Exponent
from weylconv.kernels import (
    AlgLaw,
    ExpLaw,
    ScalarFamily,
    check_admissible,
    kernel_from_config,
    lq_norm_interval,
    parse_kernel,
    power_weighted_integral,
    tail_sum,
)


def test_law_validation():
    with pytest.raises(DomainError):
        AlgLaw(1.0, 0.5, 1.0)
    with pytest.raises(DomainError):
        ExpLaw(1.0, -1.0, 0.5)


def test_parse_kernel_forms():
    assert isinstance(parse_kernel("alg:1,0.6,2"), AlgLaw)
    assert isinstance(parse_kernel("exp:1,1,0.5"), ExpLaw)
    k = parse_kernel("expfam:2")
    assert k(np.array([1.0]))[0] == pytest.approx(math.exp(-2.0))
    with pytest.raises(DomainError):
        parse_kernel("alg:1,2")
    assert isinstance(kernel_from_config({"law": "alg", "beta": 0.6, "gamma": 2}), AlgLaw)


def test_cell_moments_match_quadrature():
    k = AlgLaw(1.0, 0.6, 2.0)
    edges = np.concatenate(([0.0], (np.arange(40) + 0.5) * 0.05))
    m0, m1 = k.cell_moments(edges)
    for i in (0, 1, 2, 10, 39):
        a, b = edges[i], edges[i + 1]
        r0 = integrate.quad(lambda s: k(np.array([s]))[0], a, b, epsabs=0, epsrel=1e-13)[0]
        r1 = integrate.quad(lambda s: s * k(np.array([s]))[0], a, b, epsabs=0, epsrel=1e-13)[0]
        assert m0[i] == pytest.approx(r0, rel=1e-11)
        assert m1[i] == pytest.approx(r1, rel=1e-11)


def test_power_weighted_integral_beta_function():
    # int_0^1 s^-0.5 (1-s) ds = B(0.5, 2) = 4/3
    val = power_weighted_integral(lambda s: 1.0 - s, -0.5, 0.0, 1.0)
    assert val == pytest.approx(4.0 / 3.0, rel=1e-12)


def test_lq_norm_of_exponential():
    k = ScalarFamily.exponential(1.0)
    # ||e^-s||_{L^2[0,1]} = sqrt((1 - e^-2)/2)
    assert lq_norm_interval(k, 2.0, 0.0, 1.0) == pytest.approx(math.sqrt((1 - math.exp(-2)) / 2), rel=1e-10)


def test_tail_sum_exponential_geometric():
    k = ScalarFamily.exponential(1.0)
    # sum_k ||e^-s||_{L^inf[k,k+1]}: the q = inf norm is e^-k
    assert tail_sum(k, math.inf, 0.0) == pytest.approx(1.0 / (1.0 - math.exp(-1.0)), rel=1e-6)


def test_admissibility_boundary():
    ok = check_admissible(AlgLaw(1.0, 0.6, 2.0), Exponent(2))
    assert ok.passed
    assert ok.zeta_interval == pytest.approx((0.5, 1.9))
    assert math.isfinite(ok.weight_lq_norm) and math.isfinite(ok.weight_lp_integral)
    assert not check_admissible(AlgLaw(1.0, 0.5, 2.0), Exponent(2)).passed
    # p = 1 needs beta = 1
    assert check_admissible(AlgLaw(1.0, 1.0, 2.0), Exponent(1)).passed
    assert not check_admissible(AlgLaw(1.0, 0.9, 2.0), Exponent(1)).passed


def test_zeta_outside_interval_rejected():
    with pytest.raises(DomainError):
        check_admissible(AlgLaw(1.0, 0.6, 2.0), Exponent(2), zeta=0.4)
