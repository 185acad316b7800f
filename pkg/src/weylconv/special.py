"""Wright and Mittag-Leffler functions.

Both are entire functions given by power series whose terms grow enormously
before they decay, so the sums are taken in multiple precision with the
working precision set from the largest term.  The Mittag-Leffler function
doubles as an oracle and never feeds the main pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import special

from .errors import AccuracyError, DomainError

_MAX_DPS = 3000


# --- Wright function ------------------------------------------------------------


def _wright_log_terms(gamma: float, s: float, n: np.ndarray) -> np.ndarray:
    """``log |(-s)^n Gamma(gamma (n+1)) / (pi n!)|`` without the sine factor."""
    with np.errstate(divide="ignore"):
        return n * math.log(s) - special.gammaln(n + 1.0) + special.gammaln(gamma * (n + 1.0)) \
            - math.log(math.pi)


def _wright_terms_needed(gamma: float, s: float, target: float) -> tuple[int, float]:
    """Term count for a remainder below ``exp(target)`` and the log of the largest term."""
    n = np.arange(0, 64, dtype=float)
    while True:
        lt = _wright_log_terms(gamma, s, n)
        peak = float(np.max(lt))
        # term ratios decrease once past the peak, so a geometric bound applies
        ratio = np.minimum(lt[1:] - lt[:-1], -1e-12)
        bound = lt[1:] + ratio - np.log1p(-np.exp(ratio))
        ok = np.flatnonzero((bound < target) & (n[1:] > np.argmax(lt)))
        if len(ok):
            return int(n[ok[0] + 1]) + 1, peak
        n = np.arange(0, 2 * len(n), dtype=float)
        if len(n) > 1 << 20:
            raise AccuracyError("Wright series does not settle")


@dataclass
class WrightValue:
    value: float
    regime: str            # "series-float", "series-mp" or "asymptotic"
    remainder: float


def wright_info(gamma: float, s: float, atol: float = 1e-18) -> WrightValue:
    """``Phi_gamma(s) = sum_n (-s)^n / (n! Gamma(1 - gamma - gamma n))`` with diagnostics.

    The reflection formula turns each term into
    ``(-s)^n Gamma(gamma (n+1)) sin(pi gamma (n+1)) / (pi n!)``.  The series is
    summed until a geometric bound on the remainder drops below ``atol``.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError("Wright order must lie in (0, 1)")
    s = float(s)
    if s < 0:
        raise DomainError("Wright function is evaluated at s >= 0")
    if s == 0.0:
        return WrightValue(1.0 / math.gamma(1.0 - gamma), "series-float", 0.0)
    target = math.log(atol)
    N, peak = _wright_terms_needed(gamma, s, target)
    remainder = math.exp(target)
    if peak < math.log(1e2):
        n = np.arange(N, dtype=float)
        terms = np.exp(_wright_log_terms(gamma, s, n)) * np.sin(np.pi * gamma * (n + 1.0))
        terms[1::2] *= -1.0
        return WrightValue(float(np.sum(terms)), "series-float", remainder)
    dps = int(peak / math.log(10.0) - target / math.log(10.0)) + 10
    if dps > _MAX_DPS:
        return WrightValue(wright_asymptotic(gamma, s), "asymptotic", math.nan)
    # coefficients are shared between arguments; round the request up so the cache hits
    dps = 20 * (dps // 20 + 1)
    N = 64 * (N // 64 + 1)
    coeffs = _wright_coeffs(gamma, N, dps)
    with mp.workdps(dps):
        x = -mp.mpf(s)
        total = mp.mpf(0)
        for c in reversed(coeffs):
            total = total * x + c
        return WrightValue(float(total), "series-mp", remainder)


@lru_cache(maxsize=64)
def _wright_coeffs(gamma: float, N: int, dps: int) -> list:
    """``Gamma(gamma (n+1)) sin(pi gamma (n+1)) / (pi n!)`` for ``n < N``."""
    with mp.workdps(dps):
        g = mp.mpf(gamma)
        out = []
        fact = mp.mpf(1)
        for n in range(N):
            if n:
                fact *= n
            out.append(mp.gamma(g * (n + 1)) * mp.sinpi(g * (n + 1)) / (mp.pi * fact))
        return out


def wright_eval(gamma: float, s: float, atol: float = 1e-18) -> float:
    """Value of the Wright density ``Phi_gamma`` at ``s >= 0``."""
    return wright_info(gamma, s, atol).value


def wright_asymptotic(gamma: float, s: float) -> float:
    """Leading saddle-point term ``A Y**(gamma - 1/2) exp(-Y)`` for large ``s``.

    ``Y = (1 - gamma) (gamma**gamma s)**(1/(1 - gamma))``; exact for ``gamma = 1/2``.
    """
    Y = (1.0 - gamma) * (gamma**gamma * s) ** (1.0 / (1.0 - gamma))
    A = 1.0 / math.sqrt(2.0 * math.pi * (1.0 - gamma))
    return A * Y ** (gamma - 0.5) * math.exp(-Y)


@dataclass(frozen=True)
class WrightNodes:
    """Quadrature nodes on ``[0, S]`` with the density values attached.

    Dyadic panels accumulate at zero so that ``Phi(s) exp(-x s)`` is resolved for
    any ``x`` up to ``2**50``; half-unit panels cover ``[1, S]``.
    """

    gamma: float
    s: np.ndarray
    w: np.ndarray
    phi: np.ndarray
    s_max: float


def _wright_cutoff(gamma: float, tol: float = 1e-22) -> float:
    s = 1.0
    while True:
        v = abs(wright_asymptotic(gamma, s)) * (1.0 + s) ** 3
        if s > 2.0 and v < tol:
            return s
        s += 1.0
        if s > 1e4:
            raise AccuracyError("Wright density cutoff not found")


@lru_cache(maxsize=32)
def wright_nodes(gamma: float, order: int = 16, dyadic: int = 50) -> WrightNodes:
    if not 0.0 < gamma < 1.0:
        raise DomainError("Wright order must lie in (0, 1)")
    S = _wright_cutoff(gamma)
    edges = [0.0] + [2.0 ** (-k) for k in range(dyadic, -1, -1)]
    edges += list(np.arange(1.5, S + 0.25, 0.5))
    edges = np.array(edges)
    x, w = special.roots_legendre(order)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (a[:, None] + half[:, None] * (1.0 + x[None, :])).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    phi = np.array([wright_eval(gamma, float(v)) for v in nodes])
    return WrightNodes(gamma, nodes, weights, phi, float(edges[-1]))


def wright_moment(gamma: float, nu: float) -> float:
    """``int_0^inf s**nu Phi_gamma(s) ds`` by quadrature on the cached nodes."""
    nd = wright_nodes(float(gamma))
    return float(np.sum(nd.w * nd.s**nu * nd.phi))


# --- Mittag-Leffler function -------------------------------------------------------


def _ml_log_terms(alpha: float, beta: float, x: float, n: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        lg = special.gammaln(alpha * n + beta)
    return n * math.log(x) - lg if x > 0 else np.where(n == 0, -lg, -np.inf)


def _ml_asymptotic(alpha: float, beta: float, x: float) -> tuple[float, float]:
    """``E(-x) ~ -sum_{k>=1} (-x)**(-k) / Gamma(beta - alpha k)`` and its error estimate.

    Terms are summed while the envelope ``x**-k Gamma(alpha k + 1 - beta) / pi``
    (a bound for ``|x**-k / Gamma(beta - alpha k)|`` by reflection) decreases;
    the first envelope value not used is the error estimate.
    """
    total = 0.0
    prev = math.inf
    for k in range(1, 2000):
        arg = alpha * k + 1.0 - beta
        if arg > 0:
            env = math.exp(special.gammaln(arg) - k * math.log(x)) / math.pi
            # 1/Gamma(beta - alpha k) = Gamma(arg) sin(pi (beta - alpha k)) / pi
            term = env * math.sin(math.pi * (beta - alpha * k))
        else:
            term = float(special.rgamma(beta - alpha * k)) * x ** (-k)
            env = abs(term)
        if env > prev or env < 1e-300:
            return total, env
        total -= (-1.0) ** k * term
        prev = env
    return total, prev


def mittag_leffler(alpha: float, beta: float, z: float, tol: float = 1e-15) -> float:
    """``E_{alpha,beta}(z) = sum_n z**n / Gamma(alpha n + beta)`` for real ``z``.

    Negative arguments of large modulus use the algebraic asymptotic expansion
    when its smallest term is below ``tol``; otherwise the series is summed in
    precision raised to cover the largest term.  Raises :class:`AccuracyError`
    when neither route is reliable.
    """
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    z = float(z)
    if z == 0.0:
        return float(special.rgamma(beta))
    if alpha == 1.0 and beta == 1.0:
        return math.exp(z)
    x = abs(z)
    if z < 0 and alpha < 2.0 and x > 1.0:
        val, err = _ml_asymptotic(alpha, beta, x)
        if err < tol * max(abs(val), 1e-300) or err < tol * 1e-3:
            return val
    # series with a geometric remainder bound once term ratios decrease below one
    n = np.arange(0, 128, dtype=float)
    while True:
        lt = _ml_log_terms(alpha, beta, x, n)
        ratio = np.minimum(lt[1:] - lt[:-1], -1e-12)
        bound = lt[1:] + ratio - np.log1p(-np.exp(ratio))
        peak = float(np.max(lt))
        ok = np.flatnonzero((bound < math.log(tol) - 12.0) & (n[1:] > np.argmax(lt)))
        if len(ok):
            N = int(n[ok[0] + 1]) + 1
            break
        n = np.arange(0, 2 * len(n), dtype=float)
        if len(n) > 1 << 22:
            raise AccuracyError("Mittag-Leffler series does not settle")
    dps = int(peak / math.log(10.0) - math.log10(tol)) + 20
    if dps > _MAX_DPS:
        raise AccuracyError(f"|z| = {x} is beyond the reliable range of the series")
    with mp.workdps(dps):
        a, b, zz = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
        total = mp.mpf(0)
        p = mp.mpf(1)
        for k in range(N):
            total += p * mp.rgamma(a * k + b)
            p *= zz
        return float(total)
