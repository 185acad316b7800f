"""Sampled functions and Stepanov/Weyl seminorms.

A :class:`GridFunction` stores one sample per cell ``[t0 + i*dt, t0 + (i+1)*dt]``,
taken at the cell midpoint.  Window integrals are composite midpoint sums over
whole cells, so indicator functions with grid-aligned jumps integrate exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .errors import DomainError, GridMismatchError, SpanError

VERDICTS = ("C0", "Stepanov-vanishing", "equi-Weyl-vanishing", "Weyl-vanishing", "none")

_SNAP = 1e-9


@dataclass(frozen=True)
class Exponent:
    """Integrability exponent ``p`` with its conjugate ``q``."""

    p: float

    def __post_init__(self):
        if not (1.0 <= self.p < math.inf):
            raise DomainError(f"exponent p must lie in [1, inf), got {self.p}")

    @property
    def q(self) -> float:
        if self.p == 1.0:
            return math.inf
        return self.p / (self.p - 1.0)

    @property
    def q_infinite(self) -> bool:
        return self.p == 1.0


@dataclass
class GridFunction:
    """Uniformly sampled representative of a locally integrable function.

    Parameters
    ----------
    t0 : float
        Left edge of the first cell.
    dt : float
        Cell width.
    samples : array_like
        Shape ``(n,)`` for scalar or ``(n, d)`` for vector values.
    domain : {"half", "full"}
        Whether the function lives on ``[0, inf)`` or on the line.
    interp : {"linear", "step"}
        Reconstruction used by the convolution engine between samples.
    func : callable, optional
        Exact source, used for off-grid translation.
    """

    t0: float
    dt: float
    samples: np.ndarray
    domain: str = "half"
    interp: str = "linear"
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if self.samples.ndim not in (1, 2) or self.samples.shape[0] == 0:
            raise DomainError("samples must be a nonempty 1-D or 2-D array")
        if self.domain not in ("half", "full"):
            raise DomainError(f"unknown domain tag {self.domain!r}")
        if self.interp not in ("linear", "step"):
            raise DomainError(f"unknown interpolation {self.interp!r}")

    @classmethod
    def from_callable(cls, func, t0: float, t_end: float, dt: float, **kw) -> "GridFunction":
        n = int(round((t_end - t0) / dt))
        if n <= 0:
            raise DomainError("empty grid")
        t = t0 + (np.arange(n) + 0.5) * dt
        return cls(t0, dt, np.asarray(func(t), dtype=np.float64), func=func, **kw)

    @classmethod
    def full_line(cls, center: float, dt: float, samples, **kw) -> "GridFunction":
        """Samples laid out symmetrically about ``center``."""
        samples = np.asarray(samples, dtype=np.float64)
        t0 = center - 0.5 * len(samples) * dt
        return cls(t0, dt, samples, domain="full", **kw)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def t_end(self) -> float:
        return self.t0 + len(self) * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + (np.arange(len(self)) + 0.5) * self.dt

    @property
    def edges(self) -> np.ndarray:
        return self.t0 + np.arange(len(self) + 1) * self.dt

    def slopes(self) -> np.ndarray:
        """Centred difference slopes; end cells use the exact source if attached."""
        y = self.samples
        n = len(self)
        if n == 1:
            return np.zeros_like(y)
        sl = np.empty_like(y)
        sl[1:-1] = (y[2:] - y[:-2]) / (2.0 * self.dt)
        if self.func is not None:
            ghost = np.asarray(self.func(np.array([self.t0 - 0.5 * self.dt,
                                                   self.t_end + 0.5 * self.dt])), dtype=float)
            sl[0] = (y[1] - ghost[0]) / (2.0 * self.dt)
            sl[-1] = (ghost[1] - y[-2]) / (2.0 * self.dt)
        else:
            sl[0] = (y[1] - y[0]) / self.dt
            sl[-1] = (y[-1] - y[-2]) / self.dt
        return sl

    @property
    def vector_dim(self) -> int:
        return 1 if self.samples.ndim == 1 else self.samples.shape[1]

    def norms(self) -> np.ndarray:
        """Pointwise Euclidean norm of the samples."""
        if self.samples.ndim == 1:
            return np.abs(self.samples)
        return np.sqrt(np.einsum("ij,ij->i", self.samples, self.samples))

    def index_of(self, t: float) -> int:
        """Index of the sample nearest to ``t``; ties go to the later sample."""
        i = math.floor((t - self.t0) / self.dt + _SNAP)
        if not 0 <= i < len(self):
            raise SpanError(f"t={t} lies outside [{self.t0}, {self.t_end})")
        return i

    def edge_index(self, x: float) -> int:
        """Index of the cell edge nearest to ``x``."""
        return int(math.floor((x - self.t0) / self.dt + 0.5))

    def cells(self, length: float) -> int:
        """Number of whole cells in a window of the given length (at least one)."""
        if length < self.dt * (1 - _SNAP):
            raise SpanError(f"window length {length} shorter than dt={self.dt}")
        return max(1, int(round(length / self.dt)))

    def same_grid(self, other: "GridFunction") -> bool:
        return (
            len(self) == len(other)
            and math.isclose(self.dt, other.dt, rel_tol=1e-12)
            and abs(self.t0 - other.t0) <= 1e-9 * self.dt
        )

    def _like(self, samples, func=None) -> "GridFunction":
        return GridFunction(self.t0, self.dt, samples, self.domain, self.interp, func)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_grid(self, other)
        func = None
        if self.func is not None and other.func is not None:
            f, g = self.func, other.func
            func = lambda t: f(t) - g(t)  # noqa: E731
        out = self._like(self.samples - other.samples, func)
        if self.interp == "step" or other.interp == "step":
            out.interp = "step"
        return out

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self - other.scaled(-1.0)

    def scaled(self, c: float) -> "GridFunction":
        func = None
        if self.func is not None:
            f = self.func
            func = lambda t: c * f(t)  # noqa: E731
        return self._like(c * self.samples, func)

    def zeros_like(self) -> "GridFunction":
        return self._like(np.zeros_like(self.samples), lambda t: np.zeros_like(np.asarray(t, float)))

    def translated(self, tau: float) -> "GridFunction":
        """``t -> f(t + tau)`` on the same grid.

        Uses the exact source when one is attached, otherwise requires
        ``tau`` to be a whole number of cells and shrinks nothing: samples
        shifted past the span raise :class:`SpanError`.
        """
        if self.func is not None:
            f = self.func
            g = lambda t: f(np.asarray(t, dtype=float) + tau)  # noqa: E731
            return self._like(np.asarray(g(self.times), dtype=np.float64), g)
        k = tau / self.dt
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
            raise SpanError("off-grid translation needs an exact source")
        k = int(round(k))
        if k == 0:
            return self._like(self.samples.copy())
        raise SpanError("translation of a sampled function shrinks its span; use window()")

    def window(self, t_lo: float, t_hi: float) -> "GridFunction":
        """Restriction to the cells covering ``[t_lo, t_hi]`` (edges snapped)."""
        i0 = self.edge_index(t_lo)
        i1 = self.edge_index(t_hi)
        if i0 < 0 or i1 > len(self) or i1 <= i0:
            raise SpanError(f"window [{t_lo}, {t_hi}] outside [{self.t0}, {self.t_end}]")
        return GridFunction(
            self.t0 + i0 * self.dt, self.dt, self.samples[i0:i1].copy(),
            self.domain, self.interp, self.func,
        )


def _check_grid(f: GridFunction, g: GridFunction) -> None:
    if not f.same_grid(g):
        raise GridMismatchError(
            f"grids differ: (t0={f.t0}, dt={f.dt}, n={len(f)}) vs (t0={g.t0}, dt={g.dt}, n={len(g)})"
        )


@dataclass
class SeminormParams:
    """Window length, Weyl schedule and the probe range for suprema over ``x``.

    ``probe_step`` is fixed to the cell width; a coarser probe would miss
    suprema of indicator functions.
    """

    l: float = 1.0
    schedule: Sequence[float] = ()
    x_min: float | None = None
    x_max: float | None = None
    probe_step: float | None = None

    def __post_init__(self):
        if not self.l > 0:
            raise DomainError("window length must be positive")
        s = list(self.schedule)
        if any(b <= a for a, b in zip(s, s[1:])):
            raise DomainError("window schedule must be strictly increasing")
        if any(v <= 0 for v in s):
            raise DomainError("window lengths must be positive")

    def check_probe(self, dt: float) -> None:
        if self.probe_step is not None and self.probe_step > dt * (1 + _SNAP):
            raise DomainError("probe step must not exceed the sample step")


@dataclass
class TranslationSearch:
    """Candidate translation numbers and the acceptance tolerance."""

    eps: float
    interval: tuple[float, float]
    step: float | None = None
    L: float | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise DomainError("eps must be positive")
        if self.L is not None and not self.L > 0:
            raise DomainError("inclusion length must be positive")
        lo, hi = self.interval
        if hi < lo:
            raise DomainError("empty search interval")


@dataclass
class WeylReport:
    """Seminorm values along a window schedule and the extrapolated limit."""

    l_values: list[float]
    seminorm_per_l: list[float]
    weyl_limit: float
    uncertainty: float
    converged: bool
    verdict: str | None = None
    argmax_x: list[float] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "l_values": [float(v) for v in self.l_values],
            "seminorm_per_l": [float(v) for v in self.seminorm_per_l],
            "weyl_limit": float(self.weyl_limit),
            "uncertainty": float(self.uncertainty),
            "converged": bool(self.converged),
            "verdict": self.verdict,
            "argmax_x": [float(v) for v in self.argmax_x],
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# --- windowed suprema ------------------------------------------------------


def _pow_norms(vals: np.ndarray, p: float) -> np.ndarray:
    if p == 1.0:
        return vals
    if p == 2.0:
        return vals * vals
    return vals**p


def _window_sums(d: np.ndarray, win: int) -> np.ndarray:
    c = np.concatenate(([0.0], np.cumsum(d)))
    return c[win:] - c[:-win]


def _probe_range(f: GridFunction, win: int, sp: SeminormParams | None, extra: int = 0):
    """First window start and number of starts allowed by span and probe limits."""
    lo = 0
    hi = len(f) - win - extra  # last admissible start
    if f.domain == "half" and f.t0 < 0:
        lo = max(lo, f.edge_index(0.0))
    if sp is not None:
        if sp.x_min is not None:
            lo = max(lo, f.edge_index(sp.x_min))
        if sp.x_max is not None:
            hi = min(hi, f.edge_index(sp.x_max))
    if hi < lo:
        raise SpanError("window exceeds the sampled span")
    return lo, hi - lo + 1


def _stepanov_sup(diffnorm: np.ndarray, f: GridFunction, p: float, l: float,
                  sp: SeminormParams | None = None):
    win = f.cells(l)
    lo, count = _probe_range(f, win, sp)
    sums = _window_sums(_pow_norms(diffnorm, p), win)[lo : lo + count]
    i = int(np.argmax(sums))
    length = win * f.dt
    value = (max(sums[i], 0.0) * f.dt / length) ** (1.0 / p)
    return value, f.t0 + (lo + i) * f.dt


def stepanov_metric(f: GridFunction, g: GridFunction, e: Exponent, l: float,
                    sp: SeminormParams | None = None) -> float:
    """``sup_x ((1/l) int_x^{x+l} |f - g|^p)^{1/p}`` over the probe grid.

    The window length snaps to a whole number of cells.
    """
    return stepanov_metric_at(f, g, e, l, sp)[0]


def stepanov_metric_at(f: GridFunction, g: GridFunction, e: Exponent, l: float,
                       sp: SeminormParams | None = None) -> tuple[float, float]:
    """Like :func:`stepanov_metric` but also returns the maximising ``x``."""
    _check_grid(f, g)
    if sp is not None:
        sp.check_probe(f.dt)
    return _stepanov_sup((f - g).norms(), f, e.p, l, sp)


def stepanov_norm(f: GridFunction, e: Exponent, l: float = 1.0,
                  sp: SeminormParams | None = None) -> float:
    """Stepanov norm ``D_{S_l}[f, 0]``; ``l = 1`` gives the usual ``S^p`` norm."""
    if sp is not None:
        sp.check_probe(f.dt)
    return _stepanov_sup(f.norms(), f, e.p, l, sp)[0]


# --- limits -----------------------------------------------------------------


def extrapolate_limit(values: Sequence[float], rtol: float = 1e-2, atol: float = 1e-3,
                      nonnegative: bool = True) -> tuple[float, float, bool]:
    """Estimate the limit of a sequence sampled on a geometric schedule.

    Aitken's delta-squared step on the last three values when the tail is
    monotone and contracting, else the last value.  Returns
    ``(limit, uncertainty, converged)`` where ``converged`` means the last two
    values agree to ``rtol * |last| + atol``.
    """
    v = [float(x) for x in values]
    if not v:
        raise DomainError("empty sequence")
    last = v[-1]
    if len(v) == 1:
        return last, math.inf, False
    d2 = v[-1] - v[-2]
    converged = abs(d2) < rtol * abs(last) + atol
    limit = last
    if len(v) >= 3:
        d1 = v[-2] - v[-3]
        if d2 != 0.0 and d1 * d2 > 0 and abs(d2) < abs(d1):
            r = d2 / d1
            limit = last + d2 * r / (1.0 - r)
        elif d1 * d2 < 0:
            converged = False
    if nonnegative and limit < 0.0:
        limit = 0.0
    unc = max(abs(limit - v[-1]), abs(limit - v[-2]))
    return limit, unc, converged


def weyl_seminorm(f: GridFunction, e: Exponent, sp: SeminormParams,
                  rtol: float = 1e-2, atol: float = 1e-3) -> WeylReport:
    """Stepanov seminorms along ``sp.schedule`` and their ``l -> inf`` limit."""
    return _weyl_report(f.norms(), f, e, sp, rtol, atol)


def weyl_distance(f: GridFunction, g: GridFunction, e: Exponent, sp: SeminormParams,
                  rtol: float = 1e-2, atol: float = 1e-3) -> WeylReport:
    """Weyl distance of ``f`` and ``g``: the seminorm report of ``f - g``."""
    _check_grid(f, g)
    return _weyl_report((f - g).norms(), f, e, sp, rtol, atol)


def _weyl_report(diffnorm, f, e, sp, rtol, atol) -> WeylReport:
    schedule = list(sp.schedule) or [sp.l]
    sp.check_probe(f.dt)
    vals, xs = [], []
    for l in schedule:
        v, x = _stepanov_sup(diffnorm, f, e.p, l, sp)
        vals.append(v)
        xs.append(x)
    limit, unc, conv = extrapolate_limit(vals, rtol, atol)
    return WeylReport(schedule, vals, limit, unc, conv, argmax_x=xs,
                      diagnostics={"p": e.p, "dt": f.dt})


# --- translation numbers ------------------------------------------------------


@dataclass
class TranslationResult:
    tau: float
    defect: float
    trace: list[float]


@dataclass
class TranslationReport:
    accepted: list[TranslationResult]
    candidates: int
    largest_gap: float
    density_ok: bool
    L: float | None
    mode: str
    l_used: float

    @property
    def taus(self) -> np.ndarray:
        return np.array([r.tau for r in self.accepted])

    def to_dict(self) -> dict:
        return _jsonable({
            "mode": self.mode,
            "l": self.l_used,
            "candidates": self.candidates,
            "accepted_tau": [r.tau for r in self.accepted],
            "accepted_defect": [r.defect for r in self.accepted],
            "largest_gap": self.largest_gap,
            "inclusion_length": self.L,
            "density_ok": self.density_ok,
        })


def translation_defects(f: GridFunction, shifts: np.ndarray, e: Exponent, l: float,
                        sp: SeminormParams | None = None) -> tuple[np.ndarray, float]:
    """``D_{S_l}[f(. + k dt), f]`` for integer cell shifts ``k``.

    Every shift is probed over the same ``x`` range, chosen so all shifted
    windows stay inside the span.  Returns ``(defects, x_first)``.
    """
    shifts = np.asarray(shifts, dtype=np.int64)
    win = f.cells(l)
    kmin = int(min(shifts.min(), 0))
    kmax = int(max(shifts.max(), 0))
    lo, count = _probe_range(f, win, sp, extra=kmax)
    lo = max(lo, -kmin)
    count = min(count, len(f) - win - kmax - lo + 1)
    if count <= 0:
        raise SpanError("span too short for the requested shifts")
    data = f.samples if f.samples.ndim == 2 else f.samples[:, None]
    out = np.empty(len(shifts))
    pos = shifts >= 0
    if pos.any():
        sums, _ = _backend.shift_window_sup(data[lo:], shifts[pos], win, e.p, count)
        out[pos] = sums
    for a in np.flatnonzero(~pos):
        k = -int(shifts[a])
        # |f(t) - f(t - k)| over windows starting at lo, i.e. shift k from lo - k
        sums, _ = _backend.shift_window_sup(data[lo - k:], np.array([k]), win, e.p, count)
        out[a] = sums[0]
    defects = (np.maximum(out, 0.0) / win) ** (1.0 / e.p)
    return defects, f.t0 + lo * f.dt


def find_translation_numbers(f: GridFunction, e: Exponent, ts: TranslationSearch,
                             sp: SeminormParams, mode: str = "equi",
                             rtol: float = 1e-2, atol: float = 1e-3) -> TranslationReport:
    """All candidate shifts in ``ts.interval`` whose translation defect is at most ``eps``.

    ``mode="equi"`` measures the defect at the largest window in the schedule;
    ``mode="weyl"`` uses the extrapolated ``l -> inf`` limit.
    """
    if mode not in ("equi", "weyl"):
        raise DomainError(f"unknown mode {mode!r}")
    step_cells = 1 if ts.step is None else max(1, int(round(ts.step / f.dt)))
    lo, hi = ts.interval
    k_lo = int(math.ceil(lo / f.dt - _SNAP))
    k_hi = int(math.floor(hi / f.dt + _SNAP))
    ks = np.arange(k_lo, k_hi + 1, step_cells, dtype=np.int64)
    if 0 not in ks and k_lo <= 0 <= k_hi:
        ks = np.sort(np.append(ks, 0))
    schedule = list(sp.schedule) or [sp.l]
    ls = schedule if mode == "weyl" else [schedule[-1]]
    traces = np.array([translation_defects(f, ks, e, l, sp)[0] for l in ls])
    if mode == "weyl":
        final = np.array([extrapolate_limit(traces[:, j], rtol, atol)[0] for j in range(len(ks))])
    else:
        final = traces[-1]
    accepted = [
        TranslationResult(float(k * f.dt), float(final[j]), traces[:, j].tolist())
        for j, k in enumerate(ks) if final[j] <= ts.eps
    ]
    taus = [r.tau for r in accepted]
    if taus:
        gaps = [taus[0] - lo, hi - taus[-1]] + list(np.diff(taus))
        largest = float(max(gaps))
    else:
        largest = float(hi - lo)
    density_ok = bool(taus) and (ts.L is None or largest <= ts.L + _SNAP)
    return TranslationReport(accepted, len(ks), largest, density_ok, ts.L, mode, float(ls[-1]))


# --- vanishing classes --------------------------------------------------------


def _suffix_max(a: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(a[::-1])[::-1]


def tail_window_sup(q: GridFunction, e: Exponent, l: float, horizons: Sequence[float]) -> np.ndarray:
    """``s(t, l) = sup_{x >= 0} ((1/l) int_x^{x+l} |q(t+s)|^p ds)^{1/p}`` at each ``t``."""
    win = q.cells(l)
    if win > len(q):
        raise SpanError(f"window {l} exceeds span")
    sums = _window_sums(_pow_norms(q.norms(), e.p), win)
    smax = _suffix_max(sums)
    out = []
    for t in horizons:
        i = q.edge_index(t)
        if i < 0 or i >= len(sums):
            raise SpanError(f"horizon {t} leaves no room for a window of length {l}")
        out.append((max(smax[i], 0.0) / win) ** (1.0 / e.p))
    return np.array(out)


def classify_vanishing(q: GridFunction, e: Exponent, sp: SeminormParams,
                       horizons: Sequence[float], rtol: float = 1e-2,
                       atol: float = 1e-3) -> WeylReport:
    """Place a half-line function in the strongest vanishing class it numerically meets.

    Boundedness in the Stepanov sense is assumed, not tested.  Each class
    limit is estimated with :func:`extrapolate_limit`; the t-limit is taken
    first for the equi-Weyl class and the l-limit first for the Weyl class.
    Stronger classes imply the weaker ones; ``diagnostics["raw_pass"]`` keeps
    the individual numerical outcomes.
    """
    horizons = list(horizons)
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise DomainError("horizon schedule must be strictly increasing")
    schedule = list(sp.schedule) or [sp.l]
    diag: dict = {"horizons": horizons, "l_values": schedule, "p": e.p}
    try:
        norms = q.norms()
        tail = _suffix_max(norms)
        c0_trace = [float(tail[q.index_of(t)]) for t in horizons]
        s1 = tail_window_sup(q, e, 1.0, horizons)
        grid = np.array([tail_window_sup(q, e, l, horizons) for l in schedule])  # [l, t]
    except SpanError as exc:
        diag["error"] = str(exc)
        return WeylReport(schedule, [], math.nan, math.inf, False, "inconclusive",
                          diagnostics=diag)

    def lim(seq):
        return extrapolate_limit(seq, rtol, atol)

    c0 = lim(c0_trace)
    stp = lim(s1)
    equi_inner = [lim(grid[i])[0] for i in range(len(schedule))]
    equi = lim(equi_inner)
    weyl_inner = [lim(grid[:, j])[0] for j in range(len(horizons))]
    weyl = lim(weyl_inner)

    limits = {"C0": c0[0], "Stepanov-vanishing": stp[0],
              "equi-Weyl-vanishing": equi[0], "Weyl-vanishing": weyl[0]}
    raw = {k: bool(v <= atol) for k, v in limits.items()}
    verdict = "none"
    for name in VERDICTS[:-1]:
        if raw[name]:
            verdict = name
            break
    rank = VERDICTS.index(verdict)
    member = {name: VERDICTS.index(name) >= rank for name in VERDICTS[:-1]}
    diag.update({
        "c0_trace": c0_trace,
        "stepanov_trace": s1.tolist(),
        "s_grid": grid.tolist(),
        "equi_inner_limits": equi_inner,
        "weyl_inner_limits": weyl_inner,
        "limits": limits,
        "raw_pass": raw,
        "membership": member,
    })
    return WeylReport(schedule, list(equi_inner), equi[0], equi[1], equi[2], verdict,
                      diagnostics=diag)


# --- gallery ------------------------------------------------------------------


def _chi_squares(t):
    t = np.asarray(t, dtype=float)
    n = np.floor(np.sqrt(np.maximum(t, 0.0)))
    return ((t >= 0) & (t <= n * n + 1.0)).astype(float)


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def _mollified_chi_squares(width):
    def q(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        base = np.floor(np.sqrt(np.maximum(t + 1.0, 0.0)))
        for dn in (-1.0, 0.0, 1.0):
            n = base + dn
            ok = n >= 0
            start = n * n
            rise = _smoothstep((t - start + width / 2) / width)
            fall = _smoothstep((start + 1.0 + width / 2 - t) / width)
            out += np.where(ok, rise * fall, 0.0)
        return out
    return q


def make_example(name: str, *, span: tuple[float, float] = (0.0, 100.0), dt: float = 0.01,
                 domain: str | None = None, **params) -> GridFunction:
    """Synthesize a gallery function on a cell grid over ``span``.

    Names: ``constant`` (c), ``zero``, ``bump`` (a, b), ``chi_squares``,
    ``mollified_chi_squares`` (width), ``quasi_periodic`` (omegas, amps,
    phases), ``sin`` (omega, phase), ``exp_decay`` (rate).
    """
    t0, t1 = span
    if domain is None:
        domain = "full" if t0 < 0 else "half"
    interp = "linear"
    if name == "constant":
        c = float(params.get("c", 1.0))
        func = lambda t: np.full(np.shape(t), c)  # noqa: E731
    elif name == "zero":
        func = lambda t: np.zeros(np.shape(t))  # noqa: E731
    elif name == "bump":
        a, b = float(params.get("a", 0.0)), float(params.get("b", 1.0))
        func = lambda t: ((np.asarray(t) >= a) & (np.asarray(t) <= b)).astype(float)  # noqa: E731
        interp = "step"
    elif name == "chi_squares":
        func = _chi_squares
        interp = "step"
    elif name == "mollified_chi_squares":
        width = float(params.get("width", 0.25))
        if not 0 < width <= 0.5:
            raise DomainError("mollifier width must lie in (0, 0.5]")
        func = _mollified_chi_squares(width)
    elif name == "quasi_periodic":
        om = np.asarray(params.get("omegas", (1.0, math.sqrt(2.0))), dtype=float)
        amps = np.asarray(params.get("amps", np.ones_like(om)), dtype=float)
        ph = np.asarray(params.get("phases", np.zeros_like(om)), dtype=float)
        if not (om.shape == amps.shape == ph.shape):
            raise DomainError("omegas, amps and phases must have equal length")

        def func(t):
            t = np.asarray(t, dtype=float)
            return np.sum(amps * np.sin(np.multiply.outer(t, om) + ph), axis=-1)
    elif name == "sin":
        om = float(params.get("omega", 1.0))
        ph = float(params.get("phase", 0.0))
        func = lambda t: np.sin(om * np.asarray(t, dtype=float) + ph)  # noqa: E731
    elif name == "exp_decay":
        rate = float(params.get("rate", 1.0))
        func = lambda t: np.exp(-rate * np.asarray(t, dtype=float))  # noqa: E731
    else:
        raise KeyError(f"unknown example {name!r}")
    return GridFunction.from_callable(func, t0, t1, dt, domain=domain, interp=interp)
