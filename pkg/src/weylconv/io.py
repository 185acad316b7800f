"""CSV traces, JSON reports and structured-text configs."""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np
import yaml

from .errors import DomainError
from .funcspace import GridFunction, _jsonable


def read_csv(path, domain: str | None = None, interp: str = "linear",
             rtol: float = 1e-6) -> GridFunction:
    """Load a ``t,value[,value2,...]`` file sampled at uniformly spaced cell centres.

    The first cell starts half a step before the first time stamp.  The
    domain defaults to ``"full"`` when that edge is negative.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise DomainError(f"malformed CSV {path}: {exc}") from None
    if data.shape[0] < 2 or data.shape[1] < 2:
        raise DomainError(f"{path} needs a time column, a value column and two rows")
    if not np.all(np.isfinite(data)):
        raise DomainError(f"{path} contains non-finite entries")
    t = data[:, 0]
    steps = np.diff(t)
    dt = float(np.mean(steps))
    if not dt > 0 or np.max(np.abs(steps - dt)) > rtol * max(dt, abs(t[-1])):
        raise DomainError(f"{path}: time column must be increasing and uniform")
    values = data[:, 1] if data.shape[1] == 2 else data[:, 1:]
    t0 = float(t[0]) - 0.5 * dt
    if domain is None:
        domain = "full" if t0 < -1e-9 * dt else "half"
    return GridFunction(t0, dt, values, domain, interp)


def write_csv(path, columns: dict, force: bool = False) -> Path:
    """Write equal-length columns with a header row; refuses to overwrite unless ``force``."""
    path = Path(path)
    _guard(path, force)
    names = list(columns)
    arr = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, arr, delimiter=",", header=",".join(names), comments="", fmt="%.17g")
    return path


def grid_columns(f: GridFunction, name: str = "value") -> dict:
    cols = {"t": f.times}
    if f.samples.ndim == 1:
        cols[name] = f.samples
    else:
        for j in range(f.samples.shape[1]):
            cols[f"{name}{j}"] = f.samples[:, j]
    return cols


def dumps_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, non-finite values as strings."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def write_report(path, report: dict, force: bool = False) -> Path:
    path = Path(path)
    _guard(path, force)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report))
    return path


def load_config(path) -> dict:
    """Read a YAML (or JSON) mapping."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such config: {path}")
    try:
        cfg = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise DomainError(f"malformed config {path}: {exc}") from None
    if cfg is None:
        return {}
    if not isinstance(cfg, dict):
        raise DomainError(f"config {path} must be a mapping")
    return cfg


def output_dir(flag: str | None, env: str = "WEYLCONV_OUT") -> Path:
    return Path(flag or os.environ.get(env) or ".")


def _guard(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; pass --force to overwrite")
