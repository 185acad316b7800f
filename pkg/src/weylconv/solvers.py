"""Mild solutions of degenerate fractional relaxation problems.

Every solver works slot by slot on a diagonal pencil ``(M, A)``: a slot with
``m_i > 0`` is a scalar problem with rate ``a_i / m_i`` whose solution is a
convolution with the scalar solution kernel, and a slot with ``m_i = 0``
reduces to the algebraic relation ``a_i u_i = f_i``.  Residuals are taken
with operators that are discretized independently of the convolution engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .convolution import (
    ConvolutionJob,
    finite_conv,
    infinite_conv,
    verify_decomposition,
)
from .errors import AdmissibilityError, ConsistencyError, DomainError
from .fracops import (
    PencilModel,
    SubordinatedKernel,
    caputo_derivative,
    diagonal_model,
    family_trace,
    resolvent_kernel,
    verify_family_estimates,
    weyl_liouville_derivative,
)
from .funcspace import (
    Exponent,
    GridFunction,
    SeminormParams,
    TranslationSearch,
    _jsonable,
    find_translation_numbers,
    make_example,
    translation_defects,
)


# --- problem types ---------------------------------------------------------------


def default_exponent(gamma: float) -> Exponent:
    """An exponent whose conjugate keeps ``t**(gamma - 1)`` locally ``q``-integrable."""
    return Exponent(max(2.0, 2.0 / gamma))


@dataclass
class LineProblem:
    """``D^gamma (M u) = -A u + f`` on the whole line, solved in the bounded class.

    ``gamma = 1`` selects the semigroup ``T`` as kernel, ``gamma < 1`` the
    subordinated resolvent family ``R_gamma``.  ``f`` has shape ``(nt,)`` for a
    single slot or ``(nt, n)``; an exact source lets the solver pull in the
    history it needs.  ``atol`` bounds the truncated kernel tail.
    """

    model: PencilModel
    f: GridFunction
    gamma: float = 1.0
    t_out: tuple[float, float] | None = None
    exponent: Exponent | None = None
    atol: float | None = None
    check_residual: bool = True
    residual_atol: float = 1e-2

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise DomainError("gamma must lie in (0, 1]")
        _check_slots(self.model, self.f)
        if self.atol is None:
            # the resolvent tail decays like t**-gamma, so tight budgets are out of reach
            self.atol = 1e-6 if self.gamma == 1.0 else 1e-2
        if self.exponent is None:
            self.exponent = default_exponent(self.gamma)


@dataclass
class IVProblem:
    """``D^gamma_C (M u) = -A u + f`` on ``[0, T]`` with ``u(0) = x0``.

    ``f`` is gridded from ``t = 0``.  ``split = (g, q)`` with ``g + q = f``
    requests the asymptotic decomposition check in class ``target``.
    """

    model: PencilModel
    f: GridFunction
    x0: np.ndarray | float = 0.0
    gamma: float = 1.0
    consistency_tol: float = 1e-8
    check_residual: bool = True
    residual_layer: float = 0.0
    split: tuple[GridFunction, GridFunction] | None = None
    target: str = "C0"
    sp: SeminormParams | None = None
    horizons: tuple = ()

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise DomainError("gamma must lie in (0, 1]")
        _check_slots(self.model, self.f)
        if abs(self.f.t0) > 1e-9 * self.f.dt:
            raise DomainError("initial-value forcing must be gridded from t = 0")
        self.x0 = np.broadcast_to(np.asarray(self.x0, dtype=float), (self.model.n,)).copy()


@dataclass
class SolutionTrace:
    """Solution samples with the residual and diagnostics attached."""

    u: GridFunction
    residual: GridFunction | None = None
    residual_max: float = math.nan
    degenerate_defect: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        checks = self.diagnostics.get("checks", {})
        return "pass" if all(bool(v) for v in checks.values()) else "fail"

    def to_dict(self) -> dict:
        return _jsonable({
            "verdict": self.verdict,
            "t0": self.u.t0, "dt": self.u.dt, "samples": len(self.u),
            "residual_max": self.residual_max,
            "degenerate_defect": self.degenerate_defect,
            "diagnostics": self.diagnostics,
        })


def _check_slots(model: PencilModel, f: GridFunction) -> None:
    d = f.vector_dim if f.samples.ndim == 2 else 1
    if d != model.n:
        raise DomainError(f"forcing has {d} components, the pencil has {model.n} slots")


def _slot(f: GridFunction, i: int, scale: float = 1.0) -> GridFunction:
    """Component ``i`` of ``f`` times ``scale``, keeping the exact source."""
    vec = f.samples.ndim == 2
    samples = scale * (f.samples[:, i] if vec else f.samples)
    func = None
    if f.func is not None:
        src = f.func

        def func(t, src=src):
            v = np.asarray(src(t), dtype=float)
            return scale * (v.reshape(np.shape(t) + (-1,))[..., i] if vec else v)
    return GridFunction(f.t0, f.dt, samples, f.domain, f.interp, func)


def _stack(cols: list[np.ndarray], t0: float, dt: float, domain: str, scalar: bool) -> GridFunction:
    data = cols[0] if scalar else np.column_stack(cols)
    return GridFunction(t0, dt, data, domain, "linear")


def _values_on(f: GridFunction, t0: float, n: int) -> np.ndarray:
    """Samples of ``f`` on ``n`` cells from ``t0``, via the exact source when present."""
    if f.func is not None:
        return np.asarray(f.func(t0 + (np.arange(n) + 0.5) * f.dt), dtype=float)
    return f.window(t0, t0 + n * f.dt).samples


# --- family estimates ----------------------------------------------------------------


def check_family(model: PencilModel, gamma: float) -> dict:
    """Verify the growth estimates of the solution family on the nondegenerate part."""
    nd = ~model.degenerate
    sub = diagonal_model(model.m[nd], model.a[nd], model.name)
    if gamma == 1.0:
        t = np.logspace(-3, 2, 51)
        rep = verify_family_estimates(family_trace(sub, "T", 1.0, t))
    else:
        # sample deep enough into both asymptotic regimes of every slot
        r = model.a[nd] / model.m[nd]
        lo = math.log10((1e-4 / r.max()) ** (1.0 / gamma))
        hi = math.log10((1e4 / r.min()) ** (1.0 / gamma))
        t = np.logspace(lo, hi, int(10 * (hi - lo)) + 1)
        rep = verify_family_estimates(family_trace(sub, "R", gamma, t))
    return rep


# --- line problem ---------------------------------------------------------------------


def solve_line(p: LineProblem) -> SolutionTrace:
    """Bounded solution ``u(t) = int_{-inf}^t R(t - s) f(s) ds`` slot by slot.

    Nondegenerate slots convolve ``f_i / m_i`` with the kernel of rate
    ``a_i / m_i``; degenerate slots return ``f_i / a_i``.  The residual
    ``D^gamma u + (a_i/m_i) u - f_i/m_i`` uses the Weyl-Liouville derivative
    (``+d/dt`` when ``gamma = 1``), which needs the solution over a history
    window; the solution is therefore computed on the extended window and
    cut back to ``t_out``.
    """
    model, f, gamma = p.model, p.f, p.gamma
    fam = check_family(model, gamma)
    if not fam["passed"]:
        raise AdmissibilityError(f"family estimates fail: {fam}")
    dt = f.dt
    a, b = p.t_out if p.t_out is not None else (f.t0, f.t_end)
    a = f.t0 + round((a - f.t0) / dt) * dt
    b = f.t0 + round((b - f.t0) / dt) * dt
    nout = int(round((b - a) / dt))
    scalar = f.samples.ndim == 1
    cols, res_cols, metas = [], [], []
    res_max = 0.0
    deg_defect = 0.0
    for i in range(model.n):
        if model.degenerate[i]:
            fi = _values_on(_slot(f, i), a, nout)
            ui = fi / model.a[i]
            deg_defect = max(deg_defect, float(np.max(np.abs(model.a[i] * ui - fi))))
            cols.append(ui)
            res_cols.append(np.zeros(nout))
            metas.append({"slot": i, "degenerate": True})
            continue
        rate = model.a[i] / model.m[i]
        fi = _slot(f, i, 1.0 / model.m[i])
        kernel = resolvent_kernel(rate, gamma)
        lo = a
        if p.check_residual:
            lo = a - dt
            if gamma < 1.0:
                bound = _sup_bound(fi, rate)
                H = (bound / (p.residual_atol * math.gamma(1.0 - gamma))) ** (1.0 / gamma)
                lo = a - (math.ceil(H / dt) + 2) * dt
        job = ConvolutionJob(kernel, fi, None, p.exponent, (lo, b + dt), p.atol)
        U = infinite_conv(job)
        k0 = int(round((a - U.t0) / dt))
        cols.append(U.samples[k0 : k0 + nout])
        metas.append({"slot": i, "rate": rate, **U.meta})
        if p.check_residual:
            if gamma == 1.0:
                d = U.slopes()[k0 : k0 + nout]
            else:
                Ug = GridFunction(U.t0, dt, U.samples, "full", "linear")
                d = weyl_liouville_derivative(Ug, gamma, p.residual_atol, (a, b)).samples
            fv = _values_on(fi, a, nout)
            r = d + rate * U.samples[k0 : k0 + nout] - fv
            res_cols.append(r)
            res_max = max(res_max, float(np.max(np.abs(r))))
    u = _stack(cols, a, dt, "full", scalar)
    residual = _stack(res_cols, a, dt, "full", scalar) if p.check_residual else None
    checks = {"family_estimates": fam["passed"]}
    if p.check_residual:
        checks["residual"] = res_max <= p.residual_atol
    diag = {"family": fam, "slots": metas, "checks": checks, "gamma": gamma,
            "model": model.to_dict()}
    return SolutionTrace(u, residual, res_max if p.check_residual else math.nan, deg_defect, diag)


def _sup_bound(f: GridFunction, rate: float) -> float:
    """A priori bound of ``sup |u|``: ``sup |f| int R = sup |f| / rate``."""
    return max(float(np.max(np.abs(f.samples))), 1e-300) / rate


def line_ap_diagnostics(trace: SolutionTrace, f: GridFunction, ts: TranslationSearch,
                        sp: SeminormParams, e: Exponent | None = None) -> dict:
    """Translation numbers of the forcing against the defects they leave in ``u``.

    Each slot is a convolution with a kernel of ``L^1`` norm ``1/rate`` (or a
    division by ``a_i``), so ``D[u(. + tau), u] <= C D[f(. + tau), f]`` with
    ``C = max_i ||R_i||_{L^1} / m_i`` in the Euclidean sense bounded by the sum.
    """
    e = e or Exponent(2.0)
    u = trace.u
    fw = GridFunction(u.t0, u.dt, _values_on(f, u.t0, len(u)), "full", f.interp)
    wit = find_translation_numbers(fw, e, ts, sp)
    out: dict = {"witness": wit.to_dict()}
    if not wit.accepted:
        out["passed"] = False
        return out
    rates = trace.diagnostics["model"]
    m, a = np.asarray(rates["m"]), np.asarray(rates["a"])
    # L^1 norm of the slot map f_i -> u_i
    C = float(np.sum(np.where(m > 0, 1.0 / np.where(m > 0, a, 1.0), 1.0 / a)))
    shifts = np.array([int(round(r.tau / u.dt)) for r in wit.accepted])
    du, _ = translation_defects(u, shifts, e, wit.l_used, sp)
    df = np.array([r.defect for r in wit.accepted])
    slack = 2.0 * sum(s.get("tail_bound", 0.0) for s in trace.diagnostics["slots"]) + 1e-6
    out.update(constant=C, defect_f=df, defect_u=du, bound=C * df + slack,
               passed=bool(np.all(du <= C * df + slack)))
    return out


# --- initial-value problem ---------------------------------------------------------------


def _f_at_zero(f: GridFunction, i: int) -> float:
    fi = _slot(f, i)
    if fi.func is not None:
        return float(np.asarray(fi.func(np.array([0.0])))[0])
    # extrapolate the first two cell values to t = 0
    s = fi.samples
    return float(1.5 * s[0] - 0.5 * s[1]) if len(s) > 1 else float(s[0])


def check_initial_value(p: IVProblem) -> dict:
    """Consistency of ``x0`` on degenerate slots: ``a_i x0_i = f_i(0)``.

    Also reports whether ``x0`` is a point of continuity of ``S_gamma``, which
    needs ``x0`` to vanish on degenerate slots.
    """
    model = p.model
    bad = []
    for i in np.flatnonzero(model.degenerate):
        want = _f_at_zero(p.f, i) / model.a[i]
        if abs(p.x0[i] - want) > p.consistency_tol * max(1.0, abs(want)):
            bad.append((int(i), float(p.x0[i]), float(want)))
    if bad:
        raise ConsistencyError(
            "initial value inconsistent on degenerate slots (slot, x0, f(0)/a): " + repr(bad))
    cont = bool(np.all(p.x0[model.degenerate] == 0.0))
    return {"consistent": True, "continuity_at_zero": cont}


def _S_values(rate: float, gamma: float, t: np.ndarray) -> np.ndarray:
    if gamma == 1.0:
        return np.exp(-rate * t)
    return SubordinatedKernel(rate, gamma).S(t)


def solve_ivp(p: IVProblem) -> SolutionTrace:
    """``u(t) = S_gamma(t) x0 + int_0^t R_gamma(t - s) f(s) ds`` slot by slot.

    The residual ``D^gamma_C u + (a_i/m_i) u - f_i/m_i`` uses the L1 scheme on
    the solution grid, reported over ``t >= residual_layer``.
    """
    model, f, gamma = p.model, p.f, p.gamma
    init = check_initial_value(p)
    fam = check_family(model, gamma)
    if not fam["passed"]:
        raise AdmissibilityError(f"family estimates fail: {fam}")
    dt, n = f.dt, len(f)
    t = f.times
    scalar = f.samples.ndim == 1
    cols, res_cols, metas = [], [], []
    res_max = 0.0
    deg_defect = 0.0
    keep = t >= p.residual_layer
    sx_end = 0.0
    for i in range(model.n):
        if model.degenerate[i]:
            fi = _slot(f, i).samples
            ui = fi / model.a[i]
            deg_defect = max(deg_defect, float(np.max(np.abs(model.a[i] * ui - fi))))
            cols.append(ui)
            res_cols.append(np.zeros(n))
            metas.append({"slot": i, "degenerate": True})
            continue
        rate = model.a[i] / model.m[i]
        fi = _slot(f, i, 1.0 / model.m[i])
        kernel = resolvent_kernel(rate, gamma)
        conv = finite_conv(ConvolutionJob(kernel, q=fi)).samples
        Sx = _S_values(rate, gamma, t) * p.x0[i]
        ui = Sx + conv
        sx_end = max(sx_end, abs(float(Sx[-1])))
        cols.append(ui)
        meta = {"slot": i, "rate": rate, "S_x0_end": float(Sx[-1])}
        if p.split is not None:
            g, q = p.split
            rep = verify_decomposition(_slot(g, i, 1.0 / model.m[i]), _slot(q, i, 1.0 / model.m[i]),
                                kernel, default_exponent(gamma), p.target,
                                p.sp or SeminormParams(), p.horizons)
            meta["decomposition"] = rep.to_dict()
        metas.append(meta)
        if p.check_residual:
            ug = GridFunction(0.0, dt, ui, "half", "linear")
            d = caputo_derivative(ug, gamma, u0=p.x0[i]).samples
            r = d + rate * ui - fi.samples
            res_cols.append(r)
            res_max = max(res_max, float(np.max(np.abs(r[keep]))) if keep.any() else 0.0)
    u = _stack(cols, 0.0, dt, "half", scalar)
    residual = _stack(res_cols, 0.0, dt, "half", scalar) if p.check_residual else None
    checks = {"family_estimates": fam["passed"]}
    for s in metas:
        if "decomposition" in s:
            checks[f"decomposition_slot{s['slot']}"] = s["decomposition"]["verdict"] in (
                "pass", "hypothesis-not-met")
    diag = {"initial_value": init, "family": fam, "slots": metas, "checks": checks,
            "gamma": gamma, "S_x0_end": sx_end, "model": model.to_dict()}
    return SolutionTrace(u, residual, res_max if p.check_residual else math.nan, deg_defect, diag)


def variation_of_constants(rate: float, x0: float, f: Callable, t: np.ndarray) -> np.ndarray:
    """``exp(-rate t) x0 + int_0^t exp(-rate (t - s)) f(s) ds`` by adaptive quadrature."""
    from scipy.integrate import quad

    out = np.empty(len(t))
    for k, tk in enumerate(t):
        val, _ = quad(lambda s: math.exp(-rate * (tk - s)) * float(f(s)), 0.0, tk,
                      epsabs=1e-13, epsrel=1e-12, limit=500)
        out[k] = math.exp(-rate * tk) * x0 + val
    return out


# --- 1D degenerate heat equation ----------------------------------------------------------


HEAT_DEFAULTS = {
    "n": 49,
    "b": 1.0,
    "gamma": 1.0,
    "m": "uniform",
    "forcing": {"name": "sin", "omega": 1.0},
    "variant": "line",
    "span": [0.0, 50.0],
    "dt": 0.005,
    "atol": None,
    "u0": 0.0,
    "diagnostics": {"eps": 0.2, "tau_max": 200.0, "l": 20.0},
}


def _m_profile(spec, x: np.ndarray) -> np.ndarray:
    if isinstance(spec, str):
        if spec == "uniform":
            return np.ones_like(x)
        if spec == "degenerate-mid":
            return np.where((x >= 0.4 - 1e-12) & (x <= 0.6 + 1e-12), 0.0, 1.0)
        raise DomainError(f"unknown m profile {spec!r}")
    if isinstance(spec, dict) and "zero_on" in spec:
        lo, hi = spec["zero_on"]
        return np.where((x >= lo - 1e-12) & (x <= hi + 1e-12), 0.0, float(spec.get("value", 1.0)))
    m = np.asarray(spec, dtype=float)
    if m.shape != x.shape:
        raise DomainError("m profile must have one value per interior node")
    return m


def _time_forcing(cfg: dict, span, dt) -> GridFunction:
    cfg = dict(cfg)
    name = cfg.pop("name")
    return make_example(name, span=tuple(span), dt=dt, domain="full", **cfg)


@dataclass
class HeatSetup:
    """Discrete pencil of the heat demo and its modal reduction."""

    x: np.ndarray
    h: float
    m: np.ndarray
    A: np.ndarray
    N: np.ndarray              # nondegenerate node mask
    mu: np.ndarray             # generalized eigenvalues
    phi: np.ndarray            # M-orthonormal eigenvectors on the nondegenerate nodes
    coef: np.ndarray           # modal weights of the spatial forcing profile
    profile: np.ndarray
    lift: np.ndarray           # full-space image of each mode
    static: np.ndarray         # full-space response to the profile on degenerate nodes
    condition: float

    def assemble(self, c: np.ndarray, tau: np.ndarray) -> np.ndarray:
        """``v(t, x)`` from modal amplitudes ``c`` (nt, k) and forcing amplitude ``tau``."""
        return c @ self.lift.T + np.outer(tau, self.static)


def heat_setup(n: int, b: float, m_spec) -> HeatSetup:
    if n < 3 or not b > 0:
        raise DomainError("need n >= 3 interior nodes and b > 0")
    h = 1.0 / (n + 1)
    x = h * np.arange(1, n + 1)
    m = _m_profile(m_spec, x)
    if np.any(m < 0):
        raise DomainError("m must be nonnegative")
    A = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h**2
    A += b * np.eye(n)
    N = m > 0
    D = ~N
    if not N.any():
        raise DomainError("m vanishes at every node")
    X = np.sin(np.pi * x)
    ANN, AND, ADN, ADD = A[np.ix_(N, N)], A[np.ix_(N, D)], A[np.ix_(D, N)], A[np.ix_(D, D)]
    if D.any():
        K = scipy.linalg.solve(ADD, ADN, assume_a="pos")
        S = ANN - AND @ K
        Xt = X[N] - AND @ scipy.linalg.solve(ADD, X[D], assume_a="pos")
    else:
        K = np.zeros((0, N.sum()))
        S, Xt = ANN, X[N]
    S = 0.5 * (S + S.T)
    mu, phi = scipy.linalg.eigh(S, np.diag(m[N]))
    cond = float(np.linalg.cond(phi))
    if not np.isfinite(cond) or cond > 1e12:
        raise DomainError(f"discrete pencil is not diagonalizable reliably (cond = {cond:.3g})")
    coef = phi.T @ Xt
    lift = np.zeros((n, len(mu)))
    lift[N] = phi
    lift[D] = -K @ phi
    static = np.zeros(n)
    if D.any():
        static[D] = scipy.linalg.solve(ADD, X[D], assume_a="pos")
    return HeatSetup(x, h, m, A, N, mu, phi, coef, X, lift, static, cond)


def _resolve(config: dict | None) -> dict:
    cfg = {k: (dict(v) if isinstance(v, dict) else v) for k, v in HEAT_DEFAULTS.items()}
    for k, v in (config or {}).items():
        if isinstance(v, dict) and isinstance(cfg.get(k), dict):
            cfg[k] = {**cfg[k], **v} if k != "forcing" else dict(v)
        else:
            cfg[k] = v
    return cfg


def heat1d_demo(config: dict | None = None) -> tuple[SolutionTrace, dict]:
    """Degenerate fractional heat equation on ``(0, 1)`` with Dirichlet data.

    ``D^gamma (m v) = (Delta_h - b) v + tau(t) sin(pi x)`` is reduced to
    scalar modal problems through the generalized eigenbasis of the Schur
    complement on the nodes where ``m > 0``; degenerate nodes follow from the
    algebraic rows.  Returns the trace of ``v`` (time by node) and a report.
    """
    cfg = _resolve(config)
    gamma = float(cfg["gamma"])
    dt = float(cfg["dt"])
    setup = heat_setup(int(cfg["n"]), float(cfg["b"]), cfg["m"])
    k = len(setup.mu)
    model = diagonal_model(np.ones(k), setup.mu, "heat1d-modes")
    variant = cfg["variant"]
    span = [float(v) for v in cfg["span"]]
    report: dict = {"config": cfg, "modes": k, "mu_min": float(setup.mu[0]),
                    "mu_max": float(setup.mu[-1]), "eigen_condition": setup.condition}
    if variant == "line":
        tau = _time_forcing(cfg["forcing"], span, dt)
        f = _modal_forcing(tau, setup.coef)
        trace = solve_line(LineProblem(model, f, gamma, tuple(span), atol=cfg["atol"],
                                       check_residual=False))
    elif variant == "ivp":
        span[0] = 0.0
        tau = _time_forcing(cfg["forcing"], span, dt)
        tau = GridFunction(0.0, dt, tau.samples, "half", tau.interp, tau.func)
        f = _modal_forcing(tau, setup.coef)
        v0 = float(cfg["u0"]) * setup.profile
        # modal initial amplitudes: c(0) = phi^T M_N v0_N
        x0 = setup.phi.T @ (setup.m[setup.N] * v0[setup.N])
        trace = solve_ivp(IVProblem(model, f, x0, gamma, check_residual=False))
    else:
        raise DomainError(f"unknown variant {variant!r}")
    c = trace.u.samples if trace.u.samples.ndim == 2 else trace.u.samples[:, None]
    tt = trace.u.times
    tv = _values_on(tau, trace.u.t0, len(trace.u))
    V = setup.assemble(c, tv)
    v = GridFunction(trace.u.t0, dt, V, trace.u.domain, "linear")
    checks: dict = {}
    D = ~setup.N
    if D.any():
        resid = V @ setup.A[D].T - np.outer(tv, setup.profile[D])
        report["constraint_error"] = float(np.max(np.abs(resid)))
        checks["algebraic_constraint"] = report["constraint_error"] <= 1e-8
    fc = cfg["forcing"]
    if (gamma == 1.0 and variant == "line" and fc.get("name") == "sin"
            and float(fc.get("phase", 0.0)) == 0.0):
        w = float(fc.get("omega", 1.0))
        mu = setup.mu
        exact = np.outer(np.sin(w * tt), setup.coef * mu / (mu**2 + w**2)) \
            - np.outer(np.cos(w * tt), setup.coef * w / (mu**2 + w**2))
        report["closed_form_error"] = float(np.max(np.abs(c - exact)))
        checks["closed_form"] = report["closed_form_error"] <= 1e-6
    nv = GridFunction(v.t0, dt, np.sqrt(setup.h * np.sum(V**2, axis=1)), v.domain, "linear")
    report["norm_final"] = float(nv.samples[-1])
    report["norm_max"] = float(np.max(nv.samples))
    dg = cfg.get("diagnostics") or {}
    if variant == "line" and dg and np.max(np.abs(tv)) > 0:
        report["almost_periodicity"] = heat_ap_diagnostics(setup, trace, tau, nv, dg)
        checks["translation_transfer"] = report["almost_periodicity"]["passed"]
    if variant == "ivp" and fc.get("name") == "zero":
        checks["decay"] = report["norm_final"] <= 1e-3 * max(report["norm_max"], 1e-300)
    report["checks"] = checks
    report["verdict"] = "pass" if all(checks.values()) else "fail"
    trace = SolutionTrace(v, None, math.nan, report.get("constraint_error", 0.0),
                          {"checks": checks, "modal": trace.diagnostics})
    trace.diagnostics["norm_trace"] = nv
    return trace, report


def _modal_forcing(tau: GridFunction, coef: np.ndarray) -> GridFunction:
    src = tau.func
    func = None
    if src is not None:
        def func(t):
            return np.multiply.outer(np.asarray(src(t), dtype=float), coef)
    return GridFunction(tau.t0, tau.dt, np.outer(tau.samples, coef), tau.domain, tau.interp, func)


def heat_ap_diagnostics(setup: HeatSetup, trace: SolutionTrace, tau: GridFunction,
                        nv: GridFunction, dg: dict) -> dict:
    """Translation defects of ``t -> ||v(t)||`` against those of the forcing amplitude.

    ``v(t) = sum_k c_k(t) lift_k + tau(t) static`` with ``c_k = coef_k R_k * tau``
    and ``||R_k||_{L^1} = 1/mu_k``, so every shift obeys
    ``D[||v||(. + s), ||v||] <= C D[tau(. + s), tau]`` with
    ``C = sum_k |coef_k| ||lift_k|| / mu_k + ||static||``.
    """
    e = Exponent(float(dg.get("p", 2.0)))
    nrm = lambda w: math.sqrt(setup.h * float(np.sum(w**2)))  # noqa: E731
    lift_n = np.array([nrm(setup.lift[:, j]) for j in range(setup.lift.shape[1])])
    C = float(np.sum(np.abs(setup.coef) * lift_n / setup.mu) + nrm(setup.static))
    tw = GridFunction(nv.t0, nv.dt, _values_on(tau, nv.t0, len(nv)), "full", tau.interp)
    l = float(dg.get("l", 20.0))
    # shifts and windows must fit into the span: keep half of it for the probes
    tau_max = min(float(dg.get("tau_max", 200.0)), 0.5 * (len(nv) * nv.dt - l))
    if tau_max <= 0:
        return {"constant": C, "passed": False, "skipped": "span shorter than the window"}
    ts = TranslationSearch(float(dg.get("eps", 0.2)), (0.0, tau_max))
    sp = SeminormParams(l)
    wit = find_translation_numbers(tw, e, ts, sp)
    out: dict = {"constant": C, "witness": wit.to_dict()}
    if not wit.accepted:
        out["passed"] = False
        return out
    shifts = np.array([int(round(r.tau / nv.dt)) for r in wit.accepted])
    dv, _ = translation_defects(nv, shifts, e, wit.l_used, sp)
    df = np.array([r.defect for r in wit.accepted])
    tails = np.array([s.get("tail_bound", 0.0) for s in trace.diagnostics["slots"]])
    slack = 2.0 * float(np.sum(tails * lift_n)) + 1e-6
    bound = C * df + slack
    out.update(defect_forcing=df, defect_norm=dv, bound=bound, slack=slack,
               eps_bound=C * ts.eps, max_ratio=float(np.max(dv / np.maximum(C * df, 1e-300))),
               passed=bool(np.all(dv <= bound)))
    return out
