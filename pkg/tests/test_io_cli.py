from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from weylconv import io
from weylconv.cli import EXIT_FAIL, EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, main
from weylconv.errors import DomainError
from weylconv.funcspace import make_example


# --- io ------------------------------------------------------------------------------


def test_csv_round_trip_is_exact(tmp_path):
    f = make_example("quasi_periodic", span=(-5, 5), dt=0.01)
    p = io.write_csv(tmp_path / "f.csv", io.grid_columns(f))
    g = io.read_csv(p)
    assert g.domain == "full"
    assert g.t0 == pytest.approx(f.t0, abs=1e-12)
    assert g.dt == pytest.approx(f.dt, rel=1e-12)
    assert np.array_equal(g.samples, f.samples)


def test_csv_half_line_detected(tmp_path):
    f = make_example("exp_decay", span=(0, 5), dt=0.01)
    g = io.read_csv(io.write_csv(tmp_path / "q.csv", io.grid_columns(f)))
    assert g.domain == "half"


def test_csv_refuses_overwrite(tmp_path):
    cols = {"t": [0.5, 1.5], "v": [1.0, 2.0]}
    io.write_csv(tmp_path / "a.csv", cols)
    with pytest.raises(FileExistsError):
        io.write_csv(tmp_path / "a.csv", cols)
    io.write_csv(tmp_path / "a.csv", cols, force=True)


def test_csv_rejects_bad_input(tmp_path):
    with pytest.raises(FileNotFoundError):
        io.read_csv(tmp_path / "missing.csv")
    p = tmp_path / "nonuniform.csv"
    p.write_text("t,v\n0,1\n1,2\n3,3\n")
    with pytest.raises(DomainError):
        io.read_csv(p)
    p = tmp_path / "nan.csv"
    p.write_text("t,v\n0,1\n1,nan\n")
    with pytest.raises(DomainError):
        io.read_csv(p)


def test_report_serialisation_is_canonical():
    a = io.dumps_report({"b": np.float64(1.5), "a": np.arange(3), "c": {"z": 1, "y": np.bool_(True)}})
    b = io.dumps_report({"c": {"y": True, "z": 1}, "a": [0, 1, 2], "b": 1.5})
    assert a == b
    assert json.loads(a)["a"] == [0, 1, 2]


def test_config_loader(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("l: 2.5\nschedule: '2,4'\n")
    assert io.load_config(p) == {"l": 2.5, "schedule": "2,4"}


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("WEYLCONV_OUT", str(tmp_path / "env"))
    assert io.output_dir(None) == tmp_path / "env"
    assert io.output_dir(str(tmp_path / "flag")) == tmp_path / "flag"


# --- command line --------------------------------------------------------------------


def _example(tmp_path, name="sin", span="0,100"):
    path = tmp_path / f"{name}.csv"
    assert main(["make-example", name, f"--span={span}", "--dt", "0.01", "--file", str(path)]) == EXIT_OK
    return path


def test_norm_writes_report(tmp_path):
    src = _example(tmp_path, "constant")
    out = tmp_path / "out"
    assert main(["norm", "--input", str(src), "--p", "2", "--out", str(out)]) == EXIT_OK
    rep = json.loads((out / "norm_report.json").read_text())
    assert rep["command"] == "norm"
    assert rep["config"]["p"] == 2.0
    assert rep["stepanov_norm"] == pytest.approx(1.0, abs=1e-12)
    assert (out / "norm.csv").is_file()


def test_outputs_are_deterministic_and_guarded(tmp_path):
    src = _example(tmp_path, "quasi_periodic")
    out = tmp_path / "out"
    args = ["norm", "--input", str(src), "--out", str(out)]
    assert main(args) == EXIT_OK
    first = (out / "norm_report.json").read_bytes()
    assert main(args) == EXIT_INVALID
    assert main(args + ["--force"]) == EXIT_OK
    assert (out / "norm_report.json").read_bytes() == first


def test_config_overrides_flags(tmp_path):
    src = _example(tmp_path, "sin")
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("l: 2.0\nschedule: '2,4'\n")
    out = tmp_path / "out"
    rc = main(["norm", "--input", str(src), "--l", "1", "--config", str(cfg), "--out", str(out)])
    assert rc == EXIT_OK
    rep = json.loads((out / "norm_report.json").read_text())
    assert rep["config"]["l"] == 2.0
    assert rep["l_values"] == [2.0, 4.0]


def test_unknown_config_key(tmp_path):
    src = _example(tmp_path, "sin")
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("bogus: 1\n")
    assert main(["norm", "--input", str(src), "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_INVALID


def test_invalid_inputs_exit_two(tmp_path):
    assert main(["norm"]) == EXIT_INVALID
    assert main(["norm", "--input", str(tmp_path / "nope.csv")]) == EXIT_INVALID
    assert main(["make-example", "nope", "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["solve", "--m", "1,0", "--a", "1", "--out", str(tmp_path)]) == EXIT_INVALID


def test_inconsistent_initial_value_exit_two(tmp_path):
    # sin(0) = 0, so x0 on the degenerate slot must vanish
    rc = main(["solve", "--m", "1,0", "--a", "1,1", "--x0", "0,1", "--gamma", "1",
               "--span", "0,5", "--out", str(tmp_path)])
    assert rc == EXIT_INVALID


def test_inadmissible_kernel_is_not_a_failure(tmp_path):
    src = _example(tmp_path, "sin", span="0,50")
    out = tmp_path / "out"
    rc = main(["convolve", "--input", str(src), "--kernel", "alg:1,0.5,2", "--out", str(out)])
    assert rc == EXIT_OK
    rep = json.loads((out / "convolve_report.json").read_text())
    assert rep["verdict"] == "hypothesis-not-met"


def test_numeric_failure_exit_three(tmp_path):
    src = _example(tmp_path, "sin", span="0,50")
    rc = main(["convolve", "--input", str(src), "--kernel", "alg:1,0.6,2", "--atol", "1e-9",
               "--t-out", "0,10", "--out", str(tmp_path)])
    assert rc == EXIT_NUMERIC


def test_solve_verdict_drives_exit_code(tmp_path):
    base = ["solve", "--problem", "ivp", "--gamma", "0.5", "--span", "0,10", "--x0", "1"]
    assert main(base + ["--out", str(tmp_path / "a")]) == EXIT_OK
    # an unreachable residual tolerance turns the verdict into a failure
    assert main(base + ["--residual-tol", "1e-12", "--out", str(tmp_path / "b")]) == EXIT_FAIL
    rep = json.loads((tmp_path / "b" / "solve_report.json").read_text())
    assert rep["verdict"] == "fail"


def test_convolve_finite_mode(tmp_path):
    q = _example(tmp_path, "exp_decay", span="0,20")
    out = tmp_path / "out"
    assert main(["convolve", "--q", str(q), "--kernel", "expfam:1", "--mode", "finite",
                 "--out", str(out)]) == EXIT_OK
    H = io.read_csv(out / "convolve.csv")
    # (e^-s * e^-s)(t) = t e^-t
    t = H.times
    assert np.max(np.abs(H.samples - t * np.exp(-t))) < 1e-4


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "weylconv.cli", "make-example", "constant",
                        "--span", "0,1", "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0
    assert (tmp_path / "constant.csv").is_file()
