"""Fractional derivatives, subordinated resolvent families and pencil models.

The degenerate generator is modelled by a diagonal pencil ``(M, A)``: slot ``i``
carries ``m_i >= 0`` and ``a_i > 0``.  Nondegenerate slots evolve with rate
``a_i / m_i``; slots with ``m_i = 0`` carry the algebraic constraint and every
family vanishes on them.  Resolvents are ``m_i / (lambda m_i + a_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special

from . import _backend
from .errors import AccuracyError, DomainError, SpanError
from .funcspace import GridFunction, _jsonable
from .kernels import KernelSpec, ScalarFamily
from .special import wright_nodes


# --- Riemann-Liouville kernels -----------------------------------------------------


@dataclass(frozen=True)
class RLKernel:
    """``g_beta(t) = t**(beta - 1) / Gamma(beta)`` for ``t > 0``."""

    order: float

    def __post_init__(self):
        if not self.order > 0:
            raise DomainError("order must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return t ** (self.order - 1.0) / math.gamma(self.order)

    def as_kernel(self) -> KernelSpec:
        b = self.order
        return ScalarFamily(func=lambda s: np.asarray(s, float) ** (b - 1.0) / math.gamma(b),
                            singular=b - 1.0, name=f"rl:{b}", monotone=b <= 1.0,
                            params={"order": b})

    def convolve(self, other: "RLKernel", t: float) -> float:
        """``(g_a * g_b)(t)`` by algebraic-weight quadrature."""
        if t <= 0:
            return 0.0
        a, b = self.order, other.order
        # int_0^t (t-s)^(a-1) s^(b-1) ds with QUADPACK's weight (s-0)^(b-1) (t-s)^(a-1)
        val, _ = integrate.quad(lambda s: 1.0, 0.0, t, weight="alg", wvar=(b - 1.0, a - 1.0),
                                epsabs=0.0, epsrel=1e-13)
        return val / (math.gamma(a) * math.gamma(b))


# --- Caputo and Weyl-Liouville derivatives -------------------------------------------


def _check_order(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise DomainError("derivative order must lie in (0, 1]")


def caputo_l1(times: np.ndarray, values: np.ndarray, alpha: float) -> np.ndarray:
    """L1 approximation of the Caputo derivative at ``times[1:]``.

    ``times`` is increasing with ``times[0]`` the base point.  Vector values
    are handled column by column.
    """
    _check_order(alpha)
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if alpha == 1.0:
        return np.diff(values, axis=0) / np.diff(times)[(slice(None),) + (None,) * (values.ndim - 1)]
    idx = np.arange(1, len(times))
    if values.ndim == 1:
        return _backend.l1_history(times, values, alpha, idx) / math.gamma(2.0 - alpha)
    return np.stack([_backend.l1_history(times, values[:, c], alpha, idx)
                     for c in range(values.shape[1])], axis=1) / math.gamma(2.0 - alpha)


def caputo_derivative(u: GridFunction, alpha: float, u0=None) -> GridFunction:
    """Caputo derivative of order ``alpha`` in ``(0, 1]`` at the cell centres of ``u``.

    ``u(t0)`` is taken from ``u0``, else from the exact source, else by
    linear extrapolation of the first two samples.  Accuracy is
    ``O(dt**(2 - alpha))`` for smooth ``u``.
    """
    _check_order(alpha)
    if u0 is None:
        if u.func is not None:
            u0 = np.asarray(u.func(np.array([u.t0])), dtype=float)[0]
        elif len(u) >= 2:
            u0 = 1.5 * u.samples[0] - 0.5 * u.samples[1]
        else:
            raise DomainError("need u(t0) or at least two samples")
    times = np.concatenate(([u.t0], u.times))
    values = np.concatenate((np.asarray(u0, dtype=float)[None, ...], u.samples), axis=0)
    d = caputo_l1(times, values, alpha)
    return GridFunction(u.t0, u.dt, d, u.domain, "linear")


_MAX_HISTORY_CELLS = 4_000_000


def weyl_liouville_derivative(u: GridFunction, gamma: float, atol: float = 1e-2,
                              t_out: tuple[float, float] | None = None) -> GridFunction:
    """``d/dt int_{-inf}^t g_{1-gamma}(t - s) u(s) ds`` with a certified history cut.

    The history integral is started at ``a = t_out[0] - H`` where
    ``sup|u| g_{1-gamma}(H) < atol`` bounds the derivative of the neglected
    part at every output time.  The integral is formed by product
    integration and differentiated by central differences.  ``gamma = 1``
    returns ``-u'``.
    """
    _check_order(gamma)
    dt = u.dt
    a, b = t_out if t_out is not None else (u.t0, u.t_end)
    if gamma == 1.0:
        d = -u.slopes()
        out = GridFunction(u.t0, dt, d, u.domain, "linear")
        return out.window(a, b) if t_out is not None else out
    sup = float(np.max(u.norms()))
    if sup == 0.0:
        H = dt
    else:
        H = (sup / (atol * math.gamma(1.0 - gamma))) ** (1.0 / gamma)
    nh = int(math.ceil(H / dt)) + 1
    if nh > _MAX_HISTORY_CELLS:
        raise AccuracyError(f"atol={atol} needs {nh} history cells at dt={dt}; "
                            "raise atol or coarsen the grid")
    a = u.t0 + round((a - u.t0) / dt) * dt
    b = u.t0 + round((b - u.t0) / dt) * dt
    nout = int(round((b - a) / dt))
    # one extra cell on each side for the central difference
    start = a - dt - nh * dt
    n = nout + 2 + nh
    if u.func is not None:
        src = GridFunction.from_callable(u.func, start, start + n * dt, dt, domain="full",
                                         interp=u.interp)
    else:
        if start < u.t0 - 1e-9 * dt or b + dt > u.t_end + 1e-9 * dt:
            raise SpanError(f"history of length {H:.4g} needed before t={a}; "
                            "attach an exact source or extend the samples")
        src = u.window(start, b + dt)
    from .convolution import _apply, _slopes, kernel_weights

    W, V = kernel_weights(RLKernel(1.0 - gamma).as_kernel(), dt, n)
    I = _apply(W, V, src.samples, _slopes(src), nh, nout + 2)
    d = (I[2:] - I[:-2]) / (2.0 * dt)
    return GridFunction(a, dt, d, "full", "linear",
                        meta={"history": H, "truncation_bound": sup * float(RLKernel(1.0 - gamma)(H))})


# --- pencil models ----------------------------------------------------------------


@dataclass
class PencilModel:
    """Diagonal degenerate pair ``(M, A)``."""

    m: np.ndarray
    a: np.ndarray
    name: str = "pencil"

    def __post_init__(self):
        self.m = np.atleast_1d(np.asarray(self.m, dtype=float))
        self.a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if self.m.shape != self.a.shape or self.m.ndim != 1:
            raise DomainError("m and a must be vectors of equal length")
        if np.any(self.m < 0) or np.any(self.a <= 0):
            raise DomainError("need m_i >= 0 and a_i > 0")
        if not np.any(self.m > 0):
            raise DomainError("at least one slot must be nondegenerate")

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def degenerate(self) -> np.ndarray:
        return self.m == 0

    @property
    def rates(self) -> np.ndarray:
        """``a_i / m_i`` on nondegenerate slots, ``inf`` on degenerate ones."""
        with np.errstate(divide="ignore"):
            return np.where(self.degenerate, np.inf, self.a / np.where(self.degenerate, 1.0, self.m))

    def resolvent(self, lam: complex) -> np.ndarray:
        """Diagonal of ``(lambda M + A)^{-1} M``; raises on a singular slot."""
        den = lam * self.m + self.a
        if np.any(den == 0):
            raise ZeroDivisionError(f"resolvent singular at lambda={lam}")
        return self.m / den

    def resolvent_norm(self, lam: complex) -> float:
        return float(np.max(np.abs(self.resolvent(lam))))

    def semigroup(self, t) -> np.ndarray:
        """``T(t)`` diagonals, shape ``(len(t), n)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        r = self.rates
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(-np.outer(t, np.where(np.isinf(r), 0.0, r)))
        out[:, self.degenerate] = 0.0
        return out

    def scaled(self, kappa: float) -> "PencilModel":
        return PencilModel(self.m.copy(), kappa * self.a, f"{self.name}*{kappa:g}")

    def to_dict(self) -> dict:
        return _jsonable({"name": self.name, "m": self.m, "a": self.a})

    @classmethod
    def from_config(cls, cfg: dict) -> "PencilModel":
        return cls(np.asarray(cfg["m"], float), np.asarray(cfg["a"], float),
                   str(cfg.get("name", "pencil")))


# --- subordination -----------------------------------------------------------------


def _laplace_moment(gamma: float, nu: int, x: np.ndarray) -> np.ndarray:
    """``int_0^inf s**nu Phi_gamma(s) exp(-x s) ds`` for an array of ``x >= 0``."""
    nd = wright_nodes(float(gamma))
    wphi = nd.w * nd.phi * nd.s**nu
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(len(flat))
    chunk = max(1, 2_000_000 // len(nd.s))
    for i in range(0, len(flat), chunk):
        xs = flat[i : i + chunk]
        out[i : i + chunk] = np.exp(-np.outer(xs, nd.s)) @ wphi
    return out.reshape(x.shape)


def _rate_grid(rates: np.ndarray, t: np.ndarray, gamma: float) -> np.ndarray:
    return np.outer(t**gamma, np.where(np.isinf(rates), 0.0, rates))


def subordinate(base: PencilModel, gamma: float, nu: float, t) -> np.ndarray:
    """``T_{gamma,nu}(t) = t**(gamma nu) int s**nu Phi_gamma(s) T(s t**gamma) ds``.

    Returns diagonals of shape ``(len(t), n)``; degenerate slots are zero.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError("subordination order must lie in (0, 1)")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise DomainError("subordinated families are evaluated at t > 0")
    x = _rate_grid(base.rates, t, gamma)
    vals = t[:, None] ** (gamma * nu) * _laplace_moment(gamma, nu, x)
    vals[:, base.degenerate] = 0.0
    return vals


def family_values(base: PencilModel, tag: str, gamma: float, t, nu: float = 0.0) -> np.ndarray:
    """Diagonals of ``T``, ``T_{gamma,nu}``, ``S``, ``P`` or ``R`` at times ``t``.

    ``S(0)`` is the identity on nondegenerate slots.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if tag == "T":
        return base.semigroup(t)
    if tag == "T_gamma_nu":
        return subordinate(base, gamma, nu, t)
    if tag == "S":
        out = np.zeros((len(t), base.n))
        pos = t > 0
        out[pos] = subordinate(base, gamma, 0.0, t[pos])
        out[np.ix_(~pos, ~base.degenerate)] = 1.0
        return out
    if tag in ("P", "R"):
        P = gamma * subordinate(base, gamma, 1.0, t) / t[:, None] ** gamma
        return P if tag == "P" else t[:, None] ** (gamma - 1.0) * P
    raise DomainError(f"unknown family tag {tag!r}")


def _exp_power_integral(c: np.ndarray, a: float, b: float, gamma: float) -> np.ndarray:
    """``int_a^b exp(-c t**gamma) dt`` for an array of ``c >= 0``."""
    c = np.asarray(c, dtype=float)
    out = np.empty_like(c)
    small = c * b**gamma < 1e-2
    cs = c[small]
    terms = 0.0
    fact = 1.0
    for k in range(5):
        if k:
            fact *= k
        e = k * gamma + 1.0
        terms = terms + (-cs) ** k * (b**e - a**e) / (fact * e)
    out[small] = terms
    cl = c[~small]
    if len(cl):
        s = 1.0 / gamma
        xa, xb = cl * a**gamma, cl * b**gamma
        lower = special.gammainc(s, xb) - special.gammainc(s, xa)
        upper = special.gammaincc(s, xa) - special.gammaincc(s, xb)
        diff = np.where(xa > s, upper, lower)
        out[~small] = s * cl ** (-s) * special.gamma(s) * diff
    return out


class SubordinatedKernel(ScalarFamily):
    """Scalar resolvent ``R_gamma(t) = t**(gamma-1) E_{gamma,gamma}(-lam t**gamma)``.

    Values come from Wright subordination of ``exp(-lam t)``.  Cell moments use
    ``R = -S'/lam``: ``int_a^b R = (S(a) - S(b))/lam`` exactly, and the first
    moment adds ``int_a^b S`` (exact near zero, Simpson's rule elsewhere).
    """

    _EXACT_CELLS = 200

    def __init__(self, lam: float, gamma: float):
        if not lam > 0:
            raise DomainError("rate must be positive")
        if not 0.0 < gamma < 1.0:
            raise DomainError("subordination order must lie in (0, 1)")
        self.lam, self.gamma = float(lam), float(gamma)
        # beyond x_asym the first K terms of the asymptotic series of E_gamma(-x) leave
        # a remainder below 1e-16, bounded by Gamma(gamma K + 1) / x**K
        K = self._ASYMPTOTIC_TERMS
        self._x_asym = max(5.0, math.exp((special.gammaln(gamma * K + 1.0) + 16.0 * math.log(10.0)) / K))
        super().__init__(func=self._R, singular=gamma - 1.0, integral_from=self._upper,
                         name="subordinated", params={"lambda": lam, "gamma": gamma})

    _ASYMPTOTIC_TERMS = 30

    def S(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.ones_like(t)
        x = self.lam * np.where(t > 0, t, 0.0) ** self.gamma
        near = (t > 0) & (x < self._x_asym)
        far = x >= self._x_asym
        out[near] = _laplace_moment(self.gamma, 0, x[near])
        if far.any():
            # E_gamma(-x) = -sum_k (-x)**-k / Gamma(1 - gamma k)
            y = -1.0 / x[far]
            acc = np.zeros_like(y)
            for k in range(self._ASYMPTOTIC_TERMS, 0, -1):
                acc = (acc + float(special.rgamma(1.0 - self.gamma * k))) * y
            out[far] = -acc
        return out

    def P(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.gamma * _laplace_moment(self.gamma, 1, self.lam * t**self.gamma)

    def _R(self, t):
        t = np.asarray(t, dtype=float)
        return t ** (self.gamma - 1.0) * self.P(t)

    def _smooth(self, s):
        return self.P(s)

    def _upper(self, s: float) -> float:
        return float(self.S(np.array([s]))[0]) / self.lam

    def cell_moments(self, edges):
        edges = np.asarray(edges, dtype=float)
        lam, g = self.lam, self.gamma
        Se = self.S(edges)
        m0 = (Se[:-1] - Se[1:]) / lam
        a, b = edges[:-1], edges[1:]
        intS = np.empty(len(a))
        k = min(len(a), self._EXACT_CELLS)
        nd = wright_nodes(g)
        wphi = nd.w * nd.phi
        for i in range(k):
            intS[i] = _exp_power_integral(lam * nd.s, a[i], b[i], g) @ wphi
        if k < len(a):
            # far from the origin S is smooth on the cell scale: Simpson's rule
            aa, bb = a[k:], b[k:]
            mid = self.S(0.5 * (aa + bb))
            intS[k:] = (bb - aa) * (Se[k:-1] + 4.0 * mid + Se[k + 1 :]) / 6.0
        # int t R = [-t S / lam]_a^b + (1/lam) int S
        m1 = (a * Se[:-1] - b * Se[1:]) / lam + intS / lam
        return m0, m1


def resolvent_kernel(rate: float, gamma: float) -> KernelSpec:
    """Scalar solution kernel for rate ``a/m``: ``exp(-rate t)`` when ``gamma = 1``."""
    if gamma == 1.0:
        return ScalarFamily.exponential(rate)
    return SubordinatedKernel(rate, gamma)


# --- condition (P) ---------------------------------------------------------------------


@dataclass
class ConditionPReport:
    c: float
    beta: float
    M: float
    passed: bool
    samples: int
    witness: complex | None = None
    real_axis_limit: float | None = None
    fit_range: tuple[float, float] = (0.0, 0.0)
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        if self.witness is not None:
            d["witness"] = [self.witness.real, self.witness.imag]
        return _jsonable(d)


def in_region(lam: complex, c: float) -> bool:
    """``Re lambda >= -c (|Im lambda| + 1)``."""
    return lam.real >= -c * (abs(lam.imag) + 1.0)


def check_condition_P(model: PencilModel, c: float, samples: int = 60, n_angles: int = 9,
                      r_max: float = 1e6, fit_from: float = 1e3) -> ConditionPReport:
    """Sample ``||(lambda - A)^{-1}||`` over the region and fit ``M (1 + |lambda|)**-beta``.

    Rays run from angle 0 up to just inside the asymptotic boundary angle
    ``pi/2 + atan(c)``; radii are log-spaced up to ``r_max``.  ``beta`` is the
    decay rate of the worst ray over ``|lambda| >= fit_from``, and ``M`` the
    smallest constant making the bound hold at every sample.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    # poles of the resolvent sit at -a_i/m_i
    for r in np.sort(model.rates[np.isfinite(model.rates)]):
        if in_region(complex(-r, 0.0), c):
            return ConditionPReport(c, math.nan, math.inf, False, 0, witness=complex(-r, 0.0))
    theta_max = 0.5 * math.pi + math.atan(c)
    thetas = np.linspace(0.0, 0.999 * theta_max, n_angles)
    radii = np.logspace(-3, math.log10(r_max), samples)
    # the region also contains the segment [-c, 0] of the real axis
    points = [r * complex(math.cos(th), math.sin(th)) for th in thetas for r in radii]
    points += list(np.linspace(-c, 0.0, 25) + 0j)
    points = [p for p in points if in_region(p, c)]
    norms = np.empty(len(points))
    for i, lam in enumerate(points):
        try:
            norms[i] = model.resolvent_norm(lam)
        except ZeroDivisionError:
            return ConditionPReport(c, math.nan, math.inf, False, i, witness=lam)
    mods = np.abs(np.array(points))
    # singular-slot proximity: a_i/m_i inside the region makes the norm blow up
    bad = np.flatnonzero(~np.isfinite(norms) | (norms > 1e12))
    if len(bad):
        return ConditionPReport(c, math.nan, math.inf, False, len(points), witness=points[bad[0]])
    worst = []
    for r in radii[radii >= fit_from]:
        sel = np.isclose(mods, r, rtol=1e-9)
        worst.append(norms[sel].max())
    rr = radii[radii >= fit_from]
    if len(rr) < 2:
        raise DomainError("not enough radii above fit_from")
    slope = np.polyfit(np.log1p(rr), np.log(worst), 1)[0]
    beta = float(-slope)
    M = float(np.max(norms * (1.0 + mods) ** beta))
    lim = float(model.resolvent_norm(r_max) * r_max)
    return ConditionPReport(c, beta, M, bool(beta > 0 and math.isfinite(M)), len(points),
                            real_axis_limit=lim, fit_range=(float(rr[0]), float(rr[-1])),
                            detail={"max_norm": float(norms.max())})


# --- family traces and estimates -----------------------------------------------------------


@dataclass
class OperatorFamilyTrace:
    """Sampled operator family with its norm along the time grid."""

    tag: str
    gamma: float
    t: np.ndarray
    values: np.ndarray
    nu: float = 0.0
    fitted: dict = field(default_factory=dict)

    @property
    def norms(self) -> np.ndarray:
        return np.max(np.abs(self.values), axis=1)

    def to_dict(self) -> dict:
        return _jsonable({"tag": self.tag, "gamma": self.gamma, "nu": self.nu, "t": self.t,
                          "norm": self.norms, "fitted": self.fitted})


def family_trace(model: PencilModel, tag: str, gamma: float, t, nu: float = 0.0) -> OperatorFamilyTrace:
    t = np.asarray(t, dtype=float)
    return OperatorFamilyTrace(tag, gamma, t, family_values(model, tag, gamma, t, nu), nu)


def _growth(t: np.ndarray, y: np.ndarray, toward_zero: bool) -> float:
    """Log-log slope over the decade closest to the limit point, signed as growth."""
    pos = y > 0
    t, y = t[pos], y[pos]
    if len(t) < 2:
        return 0.0
    lt = np.log10(t)
    sel = lt <= lt.min() + 1.0 if toward_zero else lt >= lt.max() - 1.0
    if sel.sum() < 2:
        sel = np.ones_like(lt, dtype=bool)
    slope = np.polyfit(lt[sel], np.log10(y[sel]), 1)[0]
    return float(-slope if toward_zero else slope)


def verify_family_estimates(trace: OperatorFamilyTrace, beta: float = 1.0,
                            slope_tol: float = 0.05) -> dict:
    """Fit the growth constants of the semigroup or resolvent family estimates.

    For ``tag="T"``: ``||T(t)|| <= M0 exp(-c t) t**(beta-1)``, with ``c`` from a
    least-squares fit and ``M0`` the smallest constant that makes the bound hold.
    For ``tag="R"``: ``||R(t)|| t**(1 - gamma beta)`` on ``(0, 1]`` and
    ``||R(t)|| t**(1 + gamma)`` on ``[1, inf)`` must be finite and show no
    growth toward the respective limit point; growth is the log-log slope
    over the sampled decade nearest to ``0`` or to ``inf``.
    """
    t, nrm = trace.t, trace.norms
    out: dict = {"tag": trace.tag}
    if trace.tag == "T":
        y = nrm / t ** (beta - 1.0)
        pos = y > 0
        if not pos.any():
            out.update(M0=0.0, c=0.0, passed=True)
            return out
        A = np.vstack([np.ones(pos.sum()), -t[pos]]).T
        coef, *_ = np.linalg.lstsq(A, np.log(y[pos]), rcond=None)
        cfit = float(coef[1])
        M0 = float(np.max(y[pos] * np.exp(cfit * t[pos])))
        out.update(M0=M0, c=cfit, passed=bool(cfit > 0 and math.isfinite(M0)))
    elif trace.tag == "R":
        g = trace.gamma
        near = t <= 1.0
        far = t >= 1.0
        y1 = nrm[near] * t[near] ** (1.0 - g * beta)
        y2 = nrm[far] * t[far] ** (1.0 + g)
        M1 = float(y1.max()) if near.any() else 0.0
        M2 = float(y2.max()) if far.any() else 0.0
        g1 = _growth(t[near], y1, True) if near.any() else 0.0
        g2 = _growth(t[far], y2, False) if far.any() else 0.0
        ok = math.isfinite(M1) and math.isfinite(M2) and g1 <= slope_tol and g2 <= slope_tol
        out.update(M1=M1, M2=M2, growth_near_zero=g1, growth_at_infinity=g2, passed=bool(ok))
    else:
        raise DomainError("estimates are stated for the T and R families")
    trace.fitted.update({k: v for k, v in out.items() if k not in ("tag", "passed")})
    return out


def scalar_model(lam: float) -> PencilModel:
    return PencilModel(np.array([1.0]), np.array([float(lam)]), f"scalar:{lam:g}")


def diagonal_model(m: Sequence[float], a: Sequence[float], name: str = "diagonal") -> PencilModel:
    return PencilModel(np.asarray(m, float), np.asarray(a, float), name)
