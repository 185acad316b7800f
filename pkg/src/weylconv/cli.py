"""Command-line interface.

Every subcommand writes a JSON report with a ``verdict`` field and the fully
resolved configuration, plus CSV traces where there is something to trace.
Exit codes: 0 on success (including ``hypothesis-not-met``), 1 when a check
fails, 2 on invalid input and 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .convolution import (
    ConvolutionJob,
    _law_of,
    decompose,
    finite_conv,
    infinite_conv,
    verify_decomposition,
    verify_translation_transfer,
)
from .errors import (
    AccuracyError,
    AdmissibilityError,
    ConsistencyError,
    DivergenceError,
    DomainError,
    GridMismatchError,
    IntegrabilityError,
    SpanError,
)
from .fracops import PencilModel
from .funcspace import (
    Exponent,
    GridFunction,
    SeminormParams,
    TranslationSearch,
    classify_vanishing,
    find_translation_numbers,
    make_example,
    stepanov_norm,
    weyl_seminorm,
)
from .kernels import check_admissible, parse_kernel
from .solvers import IVProblem, LineProblem, heat1d_demo, solve_ivp, solve_line

log = logging.getLogger("weylconv")

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3

GALLERY_ALIASES = {"quasi": "quasi_periodic", "chi": "chi_squares", "const": "constant"}


# --- argument helpers ---------------------------------------------------------------


def _floats(text) -> list[float]:
    if text is None or text == "":
        return []
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _pair(text) -> tuple[float, float] | None:
    vals = _floats(text)
    if not vals:
        return None
    if len(vals) != 2:
        raise DomainError(f"expected two comma-separated numbers, got {text!r}")
    return vals[0], vals[1]


def _params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise DomainError(f"parameter {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        vals = _floats(v)
        out[k.strip()] = vals[0] if len(vals) == 1 else tuple(vals)
    return out


def _function(spec: str, span, dt: float, params: dict | None = None) -> GridFunction:
    """A CSV path or a gallery name sampled on ``span``."""
    if Path(spec).suffix == ".csv" or Path(spec).is_file():
        return io.read_csv(spec)
    name = GALLERY_ALIASES.get(spec, spec)
    try:
        return make_example(name, span=tuple(span), dt=dt, **(params or {}))
    except KeyError as exc:
        raise DomainError(str(exc)) from None


def _config_of(args) -> dict:
    skip = {"func", "out", "force", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _apply_config(args, parser) -> None:
    """Values from ``--config`` override the command-line flags."""
    if not getattr(args, "config", None):
        return
    cfg = io.load_config(args.config)
    known = set(vars(args))
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise DomainError(f"unknown config key {key!r}")
        setattr(args, dest, value)


class _Outputs:
    def __init__(self, args, stem: str):
        self.dir = io.output_dir(args.out)
        self.force = bool(args.force)
        self.stem = stem
        self.files: list[str] = []

    def csv(self, suffix: str, columns: dict) -> None:
        p = io.write_csv(self.dir / f"{self.stem}{suffix}.csv", columns, self.force)
        self.files.append(p.name)

    def report(self, report: dict, args) -> dict:
        report = dict(report)
        report["config"] = _config_of(args)
        report["command"] = self.stem
        report["outputs"] = sorted(self.files)
        io.write_report(self.dir / f"{self.stem}_report.json", report, self.force)
        return report


def _exit_for(verdict: str) -> int:
    return EXIT_FAIL if verdict == "fail" else EXIT_OK


# --- subcommands ----------------------------------------------------------------------


def cmd_norm(args) -> int:
    f = io.read_csv(args.input)
    e = Exponent(args.p)
    span = len(f) * f.dt
    # without a schedule, double the window while it fits into half the span
    sched = _floats(args.schedule) or [args.l * 2.0**k for k in range(4)
                                       if args.l * 2.0**k <= max(0.5 * span, args.l)]
    sp = SeminormParams(args.l, sched, args.x_min, args.x_max)
    rep = weyl_seminorm(f, e, sp)
    out = _Outputs(args, "norm")
    out.csv("", {"l": rep.l_values, "seminorm": rep.seminorm_per_l})
    body = rep.to_dict()
    body["stepanov_norm"] = stepanov_norm(f, e, args.l, SeminormParams(args.l, (), args.x_min,
                                                                      args.x_max))
    body["verdict"] = "pass" if rep.converged else "inconclusive"
    out.report(body, args)
    print(f"weyl_limit={rep.weyl_limit:.10g} converged={rep.converged}")
    return EXIT_OK


def _default_horizons(f: GridFunction) -> list[float]:
    T = f.t_end
    return [T / 64.0 * 2.0**k for k in range(5)]


def cmd_classify(args) -> int:
    f = io.read_csv(args.input, domain="half")
    e = Exponent(args.p)
    sched = _floats(args.schedule)
    sp = SeminormParams(sched[0] if sched else 1.0, sched)
    horizons = _floats(args.horizons) or _default_horizons(f)
    rep = classify_vanishing(f, e, sp, horizons, atol=args.atol)
    out = _Outputs(args, "classify")
    d = rep.diagnostics
    if "c0_trace" in d:
        cols = {"horizon": horizons, "sup_tail": d["c0_trace"], "stepanov_tail": d["stepanov_trace"]}
        for l, row in zip(d["l_values"], d["s_grid"]):
            cols[f"window_{l:g}"] = row
        out.csv("", cols)
    out.report(rep.to_dict(), args)
    print(f"verdict={rep.verdict}")
    return EXIT_OK


def cmd_translate(args) -> int:
    f = io.read_csv(args.input)
    e = Exponent(args.p)
    sp = SeminormParams(args.l, _floats(args.schedule), args.x_min, args.x_max)
    ts = TranslationSearch(args.eps, (args.tau_min, args.tau_max), args.step, args.L)
    rep = find_translation_numbers(f, e, ts, sp, mode=args.mode)
    out = _Outputs(args, "translate")
    out.csv("", {"tau": [r.tau for r in rep.accepted], "defect": [r.defect for r in rep.accepted]})
    body = rep.to_dict()
    body["verdict"] = "pass" if rep.density_ok else "fail"
    out.report(body, args)
    print(f"accepted={len(rep.accepted)} largest_gap={rep.largest_gap:.6g}")
    return _exit_for(body["verdict"])


def cmd_convolve(args) -> int:
    kernel = parse_kernel(args.kernel)
    e = Exponent(args.p)
    g = io.read_csv(args.input) if args.input else None
    q = io.read_csv(args.q, domain="half") if args.q else None
    out = _Outputs(args, "convolve")
    law = _law_of(kernel)
    body: dict = {"kernel": kernel.describe(), "mode": args.mode}
    if law is not None and args.mode != "finite":
        adm = check_admissible(law, e)
        body["admissibility"] = adm.to_dict()
        if not adm.passed:
            body["verdict"] = "hypothesis-not-met"
            out.report(body, args)
            print("verdict=hypothesis-not-met")
            return EXIT_OK
    job = ConvolutionJob(kernel, g, q, e, _pair(args.t_out), args.atol)
    if args.mode == "infinite":
        G = infinite_conv(job)
        out.csv("", io.grid_columns(G, "G"))
        body["meta"] = G.meta
    elif args.mode == "finite":
        H = finite_conv(job)
        out.csv("", io.grid_columns(H, "value"))
    elif args.mode == "decompose":
        dec = decompose(job)
        n = len(dec.F)
        cols = {"t": dec.F.times}
        for name in ("G", "Q", "tail", "F", "H"):
            cols[name] = getattr(dec, name).samples[:n]
        out.csv("", cols)
        body["decomposition"] = dec.to_dict()
    else:
        raise DomainError(f"unknown mode {args.mode!r}")
    body["verdict"] = "pass"
    out.report(body, args)
    print(f"wrote {', '.join(out.files)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    kernel = parse_kernel(args.kernel)
    e = Exponent(args.p)
    span = _pair(args.span)
    if args.which == "transfer":
        g = _function(args.g, span, args.dt, _params(args.g_param))
        x_max = args.x_max if args.x_max is not None else g.t_end - args.l - args.tau_max
        sp = SeminormParams(args.l, (), args.x_min if args.x_min is not None else g.t0, x_max)
        ts = TranslationSearch(args.eps, (0.0, args.tau_max))
        rep = verify_translation_transfer(g, kernel, e, ts, sp, mode=args.mode, atol=args.atol,
                               control_taus=_floats(args.control_taus))
        out = _Outputs(args, "verify_transfer")
        det = rep.details
        if "tau" in det:
            out.csv("", {"tau": det["tau"], "defect_g": det["defect_g"], "defect_G": det["defect_G"]})
    else:
        g = _function(args.g, span, args.dt, _params(args.g_param))
        q = _function(args.q, span, args.dt, _params(args.q_param))
        sched = _floats(args.schedule) or [1.0, 10.0, 100.0]
        sp = SeminormParams(sched[0], sched)
        horizons = _floats(args.horizons) or _default_horizons(q)
        rep = verify_decomposition(g, q, kernel, e, args.target, sp, horizons, atol=args.atol,
                            class_atol=args.class_atol)
        out = _Outputs(args, "verify_decomposition")
    body = rep.to_dict()
    out.report(body, args)
    print(f"verdict={rep.verdict}")
    return _exit_for(rep.verdict)


def _broadcast_forcing(f: GridFunction, n: int) -> GridFunction:
    if n == 1:
        return f
    src = f.func
    func = None
    if src is not None:
        def func(t):
            return np.multiply.outer(np.asarray(src(t), dtype=float), np.ones(n))
    return GridFunction(f.t0, f.dt, np.outer(f.samples, np.ones(n)), f.domain, f.interp, func)


def cmd_solve(args) -> int:
    model = PencilModel(np.asarray(_floats(args.m)), np.asarray(_floats(args.a)), "cli")
    span = _pair(args.span)
    if args.problem == "line":
        f = _function(args.forcing, span, args.dt, _params(args.forcing_param))
        f = GridFunction(f.t0, f.dt, f.samples, "full", f.interp, f.func)
        f = _broadcast_forcing(f, model.n)
        trace = solve_line(LineProblem(model, f, args.gamma, span, atol=args.atol,
                                       check_residual=not args.no_residual))
    elif args.problem == "ivp":
        if span[0] != 0.0:
            raise DomainError("initial-value problems start at t = 0")
        f = _broadcast_forcing(_function(args.forcing, span, args.dt, _params(args.forcing_param)),
                               model.n)
        x0 = np.asarray(_floats(args.x0) or [0.0], dtype=float)
        trace = solve_ivp(IVProblem(model, f, x0, args.gamma, check_residual=not args.no_residual,
                                    residual_layer=args.residual_layer))
    else:
        raise DomainError(f"unknown problem {args.problem!r}")
    out = _Outputs(args, "solve")
    cols = io.grid_columns(trace.u, "u")
    if trace.residual is not None:
        cols.update({k: v for k, v in io.grid_columns(trace.residual, "residual").items() if k != "t"})
    out.csv("", cols)
    body = trace.to_dict()
    if trace.residual is not None and math.isfinite(trace.residual_max):
        body["residual_tolerance"] = args.residual_tol
        body["diagnostics"]["checks"]["residual"] = trace.residual_max <= args.residual_tol
        body["verdict"] = "pass" if all(body["diagnostics"]["checks"].values()) else "fail"
    out.report(body, args)
    print(f"verdict={body['verdict']} residual_max={trace.residual_max:.3g}")
    return _exit_for(body["verdict"])


def cmd_demo(args) -> int:
    if args.which != "heat1d":
        raise DomainError(f"unknown demo {args.which!r}")
    forcing = {"name": GALLERY_ALIASES.get(args.forcing, args.forcing), **_params(args.forcing_param)}
    cfg = {"n": args.n, "b": args.b, "gamma": args.gamma, "m": args.m, "forcing": forcing,
           "variant": args.variant, "span": list(_pair(args.span)), "dt": args.dt,
           "u0": args.u0, "diagnostics": {"eps": args.eps, "tau_max": args.tau_max, "l": args.l}}
    if args.atol is not None:
        cfg["atol"] = args.atol
    trace, report = heat1d_demo(cfg)
    out = _Outputs(args, "heat1d")
    v = trace.u
    every = args.every or max(1, len(v) // 500)
    idx = np.arange(0, len(v), every)
    x = np.arange(1, args.n + 1) / (args.n + 1)
    tt = np.repeat(v.times[idx], len(x))
    xx = np.tile(x, len(idx))
    out.csv("", {"t": tt, "x": xx, "v": v.samples[idx].ravel()})
    nv = trace.diagnostics["norm_trace"]
    out.csv("_norm", {"t": nv.times[idx], "norm": nv.samples[idx]})
    report = dict(report)
    report.pop("config", None)
    report["resolved"] = cfg
    out.report(report, args)
    print(f"verdict={report['verdict']}")
    return _exit_for(report["verdict"])


def cmd_make_example(args) -> int:
    f = _function(args.name, _pair(args.span), args.dt, _params(args.param))
    path = Path(args.file) if args.file else io.output_dir(args.out) / f"{args.name}.csv"
    io.write_csv(path, io.grid_columns(f), args.force)
    print(f"wrote {path}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, with_p: bool = True) -> None:
    p.add_argument("--out", help="output directory (default: $WEYLCONV_OUT or .)")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.add_argument("--config", help="YAML file whose keys override the flags")
    if with_p:
        p.add_argument("--p", type=float, default=2.0, help="integrability exponent")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weylconv", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="Stepanov and Weyl seminorms of a CSV trace")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--schedule", help="comma-separated window lengths")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("classify", help="vanishing class of a half-line trace")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--schedule", default="1,10,100")
    p.add_argument("--horizons", help="comma-separated t-horizons (default: span/64 ... span/4)")
    p.add_argument("--atol", type=float, default=1e-3)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("translate", help="search for eps-translation numbers")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tau-min", type=float, default=0.0)
    p.add_argument("--tau-max", type=float, required=True)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--schedule")
    p.add_argument("--mode", choices=("equi", "weyl"), default="equi")
    p.add_argument("--step", type=float)
    p.add_argument("--L", type=float, help="inclusion length for the density check")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("convolve", help="infinite or finite convolution products")
    _common(p)
    p.add_argument("--input", help="line input g (CSV)")
    p.add_argument("--q", help="half-line input q (CSV)")
    p.add_argument("--kernel", required=True, help="alg:M,beta,gamma | exp:M,c,beta | expfam:lambda")
    p.add_argument("--mode", choices=("infinite", "finite", "decompose"), default="infinite")
    p.add_argument("--t-out", help="output window a,b")
    p.add_argument("--atol", type=float, default=1e-6)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("verify", help="end-to-end verification harnesses")
    _common(p)
    p.add_argument("which", choices=("transfer", "decomposition"))
    p.add_argument("--g", default="quasi", help="gallery name or CSV path")
    p.add_argument("--g-param", action="append", help="gallery parameter key=value")
    p.add_argument("--q", default="chi_squares")
    p.add_argument("--q-param", action="append")
    p.add_argument("--kernel", default="alg:1,0.6,2")
    p.add_argument("--span", default=None)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--tau-max", type=float, default=200.0)
    p.add_argument("--l", type=float, default=1000.0)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--mode", choices=("equi", "weyl"), default="equi")
    p.add_argument("--control-taus")
    p.add_argument("--target", default="equi-Weyl-vanishing")
    p.add_argument("--schedule")
    p.add_argument("--horizons")
    p.add_argument("--atol", type=float, default=1e-6)
    p.add_argument("--class-atol", type=float, default=1e-3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="line or initial-value problem for a diagonal pencil")
    _common(p, with_p=False)
    p.add_argument("--problem", choices=("line", "ivp"), default="ivp")
    p.add_argument("--m", default="1")
    p.add_argument("--a", default="1")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--forcing", default="sin")
    p.add_argument("--forcing-param", action="append")
    p.add_argument("--x0")
    p.add_argument("--span", default="0,50")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--atol", type=float)
    p.add_argument("--residual-tol", type=float, default=1e-2)
    p.add_argument("--residual-layer", type=float, default=1.0)
    p.add_argument("--no-residual", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("demo", help="worked applications")
    _common(p, with_p=False)
    p.add_argument("which", choices=("heat1d",))
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--m", default="uniform", help="uniform | degenerate-mid")
    p.add_argument("--variant", choices=("line", "ivp"), default="line")
    p.add_argument("--n", type=int, default=49)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--forcing", default="quasi_periodic")
    p.add_argument("--forcing-param", action="append")
    p.add_argument("--span", default="0,600")
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--u0", type=float, default=0.0)
    p.add_argument("--atol", type=float)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--tau-max", type=float, default=200.0)
    p.add_argument("--l", type=float, default=20.0)
    p.add_argument("--every", type=int, help="time stride of the (t, x, v) CSV")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("make-example", help="write a gallery function as CSV")
    _common(p, with_p=False)
    p.add_argument("name")
    p.add_argument("--span", default="0,100")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--param", action="append", help="key=value (comma lists allowed)")
    p.add_argument("--file", help="output file (default: <out>/<name>.csv)")
    p.set_defaults(func=cmd_make_example)
    return ap


_INVALID = (DomainError, SpanError, GridMismatchError, AdmissibilityError, ConsistencyError,
            FileNotFoundError, FileExistsError, ValueError, KeyError)
_NUMERIC = (AccuracyError, DivergenceError, IntegrabilityError, ArithmeticError,
            FloatingPointError, np.linalg.LinAlgError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _apply_config(args, parser)
        if args.command == "verify" and args.span is None:
            args.span = "0,2200" if args.which == "transfer" else "0,40000"
        return args.func(args)
    except _NUMERIC as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
