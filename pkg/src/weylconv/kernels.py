"""Kernel growth laws and exact scalar/diagonal resolvent families.

Two bounding envelopes are supported, both with an integrable power singularity
``t**(beta - 1)`` at the origin:

* :class:`ExpLaw` -- ``M exp(-c t) t**(beta-1)``
* :class:`AlgLaw` -- ``M t**(beta-1) / (1 + t**gamma)``

:class:`ScalarFamily` and :class:`DiagonalFamily` hold actual kernels.  Every
kernel factors as ``s**e * h(s)`` with a known singular exponent ``e`` and a
smooth ``h``; the convolution engine integrates against that factorisation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize, special

from .errors import DivergenceError, DomainError, IntegrabilityError
from .funcspace import Exponent, _jsonable

_GL_ORDER = 10


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return special.roots_legendre(n)


@lru_cache(maxsize=None)
def _gauss_jacobi(n: int, e: float):
    # weight (1 + x)**e on [-1, 1]
    return special.roots_jacobi(n, 0.0, e)


class KernelSpec:
    """Base class: a scalar kernel ``R(s) = s**e h(s)`` on ``s > 0``.

    Subclasses set ``singular_exponent`` and implement :meth:`_smooth`.
    ``is_envelope`` marks bounding laws as opposed to true families.
    """

    singular_exponent: float = 0.0
    is_envelope: bool = False
    monotone: bool = True
    M: float = 1.0

    def _smooth(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("kernels are evaluated at t > 0 only")
        return t**self.singular_exponent * self._smooth(t)

    def upper_integral(self, s: float) -> float:
        """An upper bound for ``int_s^inf |R|``; ``inf`` when none is known."""
        return math.inf

    def tail_majorant(self, s: float) -> float:
        """Bound on ``sum_{k>=0} sup_{[s+k, s+k+1]} |R|`` for ``s > 0``."""
        if not self.monotone:
            return math.inf
        return float(abs(self(np.array([s]))[0])) + self.upper_integral(s)

    def cell_moments(self, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(int R, int s R)`` over each cell ``[edges[i], edges[i+1]]``.

        A cell starting at zero gets Gauss-Jacobi quadrature for the singular
        factor; other cells use Gauss-Legendre, which is accurate as long as
        ``edges[i+1] / edges[i]`` stays moderate, as on uniform grids.
        """
        edges = np.asarray(edges, dtype=float)
        a, b = edges[:-1], edges[1:]
        m0 = np.zeros(len(a))
        m1 = np.zeros(len(a))
        e = self.singular_exponent
        start = 0
        if len(a) and a[0] == 0.0:
            x, w = _gauss_jacobi(_GL_ORDER, e)
            s = 0.5 * b[0] * (1.0 + x)
            h = self._smooth(s)
            scale = (0.5 * b[0]) ** (e + 1.0)
            m0[0] = scale * np.dot(w, h)
            m1[0] = scale * np.dot(w, s * h)
            start = 1
        if start < len(a):
            x, w = _gauss_legendre(_GL_ORDER)
            aa, bb = a[start:], b[start:]
            half = 0.5 * (bb - aa)
            s = aa[:, None] + half[:, None] * (1.0 + x[None, :])
            r = self(s)
            m0[start:] = half * (r @ w)
            m1[start:] = half * ((r * s) @ w)
        return m0, m1

    def describe(self) -> dict:
        return {"kind": type(self).__name__}


@dataclass(eq=False)
class ExpLaw(KernelSpec):
    """``M exp(-c t) t**(beta - 1)`` with ``c > 0`` and ``beta`` in ``(0, 1]``."""

    M: float = 1.0
    c: float = 1.0
    beta: float = 1.0
    is_envelope = True

    def __post_init__(self):
        if not (self.M > 0 and self.c > 0 and 0 < self.beta <= 1):
            raise DomainError("ExpLaw needs M > 0, c > 0, beta in (0, 1]")

    @property
    def singular_exponent(self):  # type: ignore[override]
        return self.beta - 1.0

    def _smooth(self, s):
        return self.M * np.exp(-self.c * s)

    def upper_integral(self, s):
        if s <= 0:
            return math.inf
        return self.M * s ** (self.beta - 1.0) * math.exp(-self.c * s) / self.c

    def describe(self):
        return {"kind": "ExpLaw", "M": self.M, "c": self.c, "beta": self.beta}


@dataclass(eq=False)
class AlgLaw(KernelSpec):
    """``M t**(beta - 1) / (1 + t**gamma)`` with ``gamma > 1`` and ``beta`` in ``(0, 1]``."""

    M: float = 1.0
    beta: float = 1.0
    gamma: float = 2.0
    is_envelope = True

    def __post_init__(self):
        if not (self.M > 0 and 0 < self.beta <= 1 and self.gamma > 1):
            raise DomainError("AlgLaw needs M > 0, beta in (0, 1], gamma > 1")

    @property
    def singular_exponent(self):  # type: ignore[override]
        return self.beta - 1.0

    def _smooth(self, s):
        return self.M / (1.0 + s**self.gamma)

    def upper_integral(self, s):
        if s <= 0:
            return math.inf
        return self.M * s ** (self.beta - self.gamma) / (self.gamma - self.beta)

    def describe(self):
        return {"kind": "AlgLaw", "M": self.M, "beta": self.beta, "gamma": self.gamma}


@dataclass(eq=False)
class ScalarFamily(KernelSpec):
    """A true scalar kernel given by a callable.

    ``func`` must accept arrays of positive times.  ``singular_exponent`` is
    the power ``e`` with ``func(s) ~ s**e`` near zero; ``integral_from``, if
    given, returns ``int_s^inf |func|`` and enables certified truncation.
    """

    func: Callable[[np.ndarray], np.ndarray] = None  # type: ignore[assignment]
    singular: float = 0.0
    integral_from: Callable[[float], float] | None = None
    name: str = "scalar"
    monotone: bool = True
    params: dict = field(default_factory=dict)

    @property
    def singular_exponent(self):  # type: ignore[override]
        return self.singular

    def _smooth(self, s):
        return self.func(s) * s ** (-self.singular)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("kernels are evaluated at t > 0 only")
        return self.func(t)

    def upper_integral(self, s):
        if self.integral_from is None:
            return math.inf
        return float(self.integral_from(s))

    @property
    def M(self):  # type: ignore[override]
        return 1.0

    @classmethod
    def exponential(cls, lam: float, scale: float = 1.0) -> "ScalarFamily":
        """``scale * exp(-lam s)`` with closed-form cell moments."""
        if lam <= 0:
            raise DomainError("decay rate must be positive")
        return _ExpFamily(lam=lam, scale=scale)

    @classmethod
    def from_law(cls, law: KernelSpec) -> "ScalarFamily":
        """The envelope itself, viewed as a family meeting its bound with equality."""
        fam = cls(func=lambda s: law(s), singular=law.singular_exponent,
                  integral_from=law.upper_integral, name=f"envelope:{type(law).__name__}",
                  params=law.describe())
        fam._law = law
        return fam

    def describe(self):
        return {"kind": "ScalarFamily", "name": self.name, "singular_exponent": self.singular,
                **self.params}


class _ExpFamily(ScalarFamily):
    def __init__(self, lam: float, scale: float = 1.0):
        super().__init__(func=lambda s: scale * np.exp(-lam * np.asarray(s, float)),
                         singular=0.0, integral_from=lambda s: scale * math.exp(-lam * s) / lam,
                         name="exponential", params={"lambda": lam, "scale": scale})
        self.lam = lam
        self.scale = scale

    def cell_moments(self, edges):
        edges = np.asarray(edges, dtype=float)
        lam = self.lam
        ea = np.exp(-lam * edges)
        m0 = (ea[:-1] - ea[1:]) / lam
        prim = -(edges / lam + 1.0 / lam**2) * ea
        m1 = prim[1:] - prim[:-1]
        return self.scale * m0, self.scale * m1


@dataclass(eq=False)
class DiagonalFamily(KernelSpec):
    """Diagonal operator family; entry ``i`` acts on vector component ``i``."""

    entries: list = field(default_factory=list)

    def __post_init__(self):
        if not self.entries:
            raise DomainError("diagonal family needs at least one entry")

    @property
    def singular_exponent(self):  # type: ignore[override]
        return min(k.singular_exponent for k in self.entries)

    def __call__(self, t):
        """Operator norm: the largest entry modulus."""
        vals = np.array([np.abs(k(t)) for k in self.entries])
        return vals.max(axis=0)

    def diagonal(self, t) -> np.ndarray:
        return np.array([k(t) for k in self.entries])

    def upper_integral(self, s):
        return max(k.upper_integral(s) for k in self.entries)

    def tail_majorant(self, s):
        return max(k.tail_majorant(s) for k in self.entries)

    def cell_moments(self, edges):
        pairs = [k.cell_moments(edges) for k in self.entries]
        return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])

    def describe(self):
        return {"kind": "DiagonalFamily", "entries": [k.describe() for k in self.entries]}


# --- evaluation and integrals -------------------------------------------------


def eval_envelope(k: KernelSpec, t: float) -> float:
    """Value of the law (or family norm) at ``t > 0``."""
    if not t > 0:
        raise DomainError("envelope is defined for t > 0")
    return float(np.asarray(k(np.array([float(t)])))[0])


def power_weighted_integral(h: Callable, e: float, a: float, b: float,
                            rtol: float = 1e-12) -> float:
    """``int_a^b s**e h(s) ds`` for ``0 <= a <= b <= inf``.

    Near ``s = 0`` the substitution ``u = s**(e+1)`` removes the singularity;
    infinite upper limits go to QUADPACK's mapped rule.
    """
    if b <= a:
        return 0.0
    if a == 0.0 and e <= -1.0:
        raise IntegrabilityError(f"s**{e} is not integrable at 0")
    total = 0.0
    lo = a
    if a < 1.0 and e != 0.0:
        hi = min(b, 1.0)
        ep1 = e + 1.0

        def g(u):
            s = u ** (1.0 / ep1)
            return float(h(np.array([s]))[0]) / ep1

        val, _ = integrate.quad(g, a**ep1, hi**ep1, epsabs=0.0, epsrel=rtol, limit=400)
        total += val
        lo = hi
    if lo < b:
        def f(s):
            return s**e * float(h(np.array([s]))[0])

        if math.isinf(b):
            if lo < 50.0:
                val, _ = integrate.quad(f, lo, 50.0, epsabs=0.0, epsrel=rtol, limit=400)
                total += val
                lo = 50.0
            val, _ = integrate.quad(f, lo, math.inf, epsabs=0.0, epsrel=rtol, limit=400)
        else:
            val, _ = integrate.quad(f, lo, b, epsabs=0.0, epsrel=rtol, limit=400)
        total += val
    return total


def _qpow_parts(k: KernelSpec, q: float):
    e = q * k.singular_exponent
    h = lambda s: np.abs(k._smooth(s)) ** q  # noqa: E731
    return h, e


def lq_norm_interval(k: KernelSpec, q: float, a: float, b: float) -> float:
    """``||R||_{L^q[a, b]}``; ``q = inf`` gives the supremum."""
    if a < 0 or b < a:
        raise DomainError("need 0 <= a <= b")
    if b == a:
        return 0.0
    if math.isinf(q):
        if a == 0.0 and k.singular_exponent < 0:
            raise IntegrabilityError("kernel is unbounded at 0")
        if k.monotone:
            return float(np.abs(k(np.array([max(a, 1e-300)]))[0]))
        s = np.linspace(max(a, 1e-12), b if math.isfinite(b) else a + 1e3, 4001)
        return float(np.max(np.abs(k(s))))
    if a == 0.0 and q * k.singular_exponent <= -1.0:
        raise IntegrabilityError(f"q(beta-1) = {q * k.singular_exponent} <= -1")
    h, e = _qpow_parts(k, q)
    return power_weighted_integral(h, e, a, b) ** (1.0 / q)


def _unit_lq_norms(k: KernelSpec, q: float, starts: np.ndarray) -> np.ndarray:
    """L^q norms over ``[s, s+1]`` for many ``s > 0`` using fixed Gauss rules."""
    if math.isinf(q):
        return np.abs(k(starts)) if k.monotone else np.array(
            [lq_norm_interval(k, q, s, s + 1) for s in starts])
    out = np.empty(len(starts))
    chunk = 200000
    for i in range(0, len(starts), chunk):
        s0 = starts[i : i + chunk]
        # far intervals see an almost constant integrand
        x, w = _gauss_legendre(20 if s0[0] < 50.0 else 6)
        nodes = s0[:, None] + 0.5 * (1.0 + x[None, :])
        out[i : i + chunk] = (0.5 * (np.abs(k(nodes)) ** q @ w)) ** (1.0 / q)
    return out


def tail_sum(k: KernelSpec, q: float, t: float, atol: float = 1e-7,
             max_terms: int = 100_000_000) -> float:
    """``sum_{k>=0} ||R||_{L^q[t+k, t+k+1]}``.

    Terms are added until the analytic remainder bound drops below ``atol/10``.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    K = _terms_needed(k, t, atol / 10.0, max_terms)
    total = 0.0
    first = 0
    if t < 1.0:
        total += lq_norm_interval(k, q, t, t + 1.0)
        first = 1
    if K > first:
        starts = t + np.arange(first, K, dtype=float)
        total += float(np.sum(_unit_lq_norms(k, q, starts)))
    return total


def _terms_needed(k: KernelSpec, t: float, atol: float, max_terms: int) -> int:
    if math.isinf(k.tail_majorant(max(t, 1.0) + 1.0)):
        raise DivergenceError(f"no summable tail bound known for {k.describe()}")
    lo, hi = 1, 1
    while k.tail_majorant(t + hi) >= atol:
        hi *= 2
        if hi > max_terms:
            raise DivergenceError("tail does not fall below atol within max_terms")
    while lo < hi:
        mid = (lo + hi) // 2
        if k.tail_majorant(t + mid) < atol:
            hi = mid
        else:
            lo = mid + 1
    return hi


# --- admissibility --------------------------------------------------------------


@dataclass
class AdmissibilityReport:
    p: float
    q: float
    condition_value: float | None
    passed: bool
    zeta: float | None = None
    zeta_interval: tuple[float, float] | None = None
    weight_lq_norm: float | None = None
    weight_lp_integral: float | None = None
    constant: float | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return _jsonable(self.__dict__)


def check_admissible(k: KernelSpec, e: Exponent, zeta: float | None = None) -> AdmissibilityReport:
    """Exponent rule for the infinite convolution product.

    Passes iff ``p > 1`` and ``q(beta - 1) > -1``, or ``p = 1`` and ``beta = 1``.
    For :class:`AlgLaw` it also picks ``zeta`` in ``(1/p, 1/p + gamma - beta)``
    (midpoint unless given) and evaluates the two weight integrals whose
    product with ``M`` is the translation-transfer constant.
    """
    if not isinstance(k, (AlgLaw, ExpLaw)):
        raise DomainError("admissibility is defined for the growth laws")
    p, q, beta = e.p, e.q, k.beta
    if p == 1.0:
        passed = beta == 1.0
        cond = None
        reason = "p = 1 requires beta = 1"
    else:
        cond = q * (beta - 1.0)
        passed = cond > -1.0
        reason = f"q(beta-1) = {cond:.6g} {'>' if passed else '<='} -1"
    rep = AdmissibilityReport(p, q, cond, passed, reason=reason)
    if not (passed and isinstance(k, AlgLaw)):
        return rep
    lo, hi = 1.0 / p, 1.0 / p + k.gamma - beta
    z = 0.5 * (lo + hi) if zeta is None else float(zeta)
    if not lo < z < hi:
        raise DomainError(f"zeta must lie strictly inside ({lo}, {hi})")
    rep.zeta, rep.zeta_interval = z, (lo, hi)
    rep.weight_lq_norm = _weight_lq_norm(k.beta, k.gamma, z, q)
    rep.weight_lp_integral = power_weighted_integral(
        lambda s: (1.0 + s**z) ** (-p), 0.0, 0.0, math.inf)
    rep.constant = k.M * rep.weight_lq_norm * rep.weight_lp_integral ** (1.0 / p)
    if not (math.isfinite(rep.weight_lq_norm) and math.isfinite(rep.weight_lp_integral)):
        rep.passed = False
        rep.reason += "; weight integral diverged"
    return rep


def _weight_lq_norm(beta: float, gamma: float, zeta: float, q: float) -> float:
    """``|| s**(beta-1) (1 + s**zeta) / (1 + s**gamma) ||_{L^q(0, inf)}``."""
    smooth = lambda s: (1.0 + s**zeta) / (1.0 + s**gamma)  # noqa: E731
    if math.isinf(q):
        # beta = 1 here; the weight is bounded and tends to 0 at infinity
        res = optimize.minimize_scalar(lambda x: -smooth(math.exp(x)), bounds=(-20, 20),
                                       method="bounded", options={"xatol": 1e-12})
        return float(max(1.0, -res.fun))
    return power_weighted_integral(lambda s: smooth(s) ** q, q * (beta - 1.0), 0.0,
                                   math.inf) ** (1.0 / q)


# --- configuration ----------------------------------------------------------------


def parse_kernel(text: str) -> KernelSpec:
    """Parse ``alg:M,beta,gamma``, ``exp:M,c,beta`` or ``expfam:lambda``."""
    m = re.fullmatch(r"\s*(\w+)\s*:\s*([-+0-9.eE,\s]+)", text)
    if not m:
        raise DomainError(f"cannot parse kernel {text!r}")
    name = m.group(1).lower()
    vals = [float(v) for v in m.group(2).split(",") if v.strip()]
    if name == "alg" and len(vals) == 3:
        return AlgLaw(*vals)
    if name == "exp" and len(vals) == 3:
        return ExpLaw(*vals)
    if name == "expfam" and len(vals) in (1, 2):
        return ScalarFamily.exponential(*vals)
    raise DomainError(f"cannot parse kernel {text!r}")


def kernel_from_config(cfg) -> KernelSpec:
    """Build a kernel from a string or a mapping with a ``law`` key."""
    if isinstance(cfg, str):
        return parse_kernel(cfg)
    cfg = dict(cfg)
    law = str(cfg.pop("law", "")).lower()
    if law == "alg":
        return AlgLaw(float(cfg.get("M", 1.0)), float(cfg["beta"]), float(cfg["gamma"]))
    if law == "exp":
        return ExpLaw(float(cfg.get("M", 1.0)), float(cfg["c"]), float(cfg["beta"]))
    if law in ("expfam", "exponential"):
        return ScalarFamily.exponential(float(cfg["lambda"]), float(cfg.get("scale", 1.0)))
    raise DomainError(f"unknown kernel law {law!r}")
