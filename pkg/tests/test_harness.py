from __future__ import annotations

import json
import subprocess
import sys

import pytest

from rrgcouple.cli import main
from rrgcouple.experiments import (
    EXIT_GATE_FAILURE,
    SEED_ENV,
    ConfigError,
    load_config,
    parse_config_text,
    run_experiment,
)
from rrgcouple.io import load


def write(path, text):
    path.write_text(text)
    return path


# -- configuration ---------------------------------------------------------


def test_parse_config_text_types_and_comments():
    vals = parse_config_text("kind = moments  # what to run\n\nn = 100\np = 0.25\nmodel = gnp\n")
    assert vals == {"kind": "moments", "n": 100, "p": 0.25, "model": "gnp"}
    with pytest.raises(ConfigError, match="unknown config key"):
        parse_config_text("colour = red\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("n = 3\nnot a pair\n")
    with pytest.raises(ConfigError, match="bad value"):
        parse_config_text("n = three\n")


def test_precedence_flags_over_file_over_env(tmp_path):
    cfg_file = write(tmp_path / "c.cfg", "kind = sample\nn = 6\nd = 3\nseed = 11\n")
    assert load_config(cfg_file, env={}).seed == 11
    assert load_config(cfg_file, {"seed": 12, "n": 8}, env={SEED_ENV: "13"}).seed == 12
    assert load_config(cfg_file, {"n": 8}, env={SEED_ENV: "13"}).n == 8
    assert load_config(cfg_file, env={SEED_ENV: "13"}).seed == 11
    no_seed = write(tmp_path / "d.cfg", "kind = sample\nn = 6\nd = 3\n")
    assert load_config(no_seed, env={SEED_ENV: "13"}).seed == 13
    with pytest.raises(ConfigError, match="seed is required"):
        load_config(no_seed, env={})


def test_config_validation():
    with pytest.raises(ConfigError):
        load_config(None, {"kind": "dance", "seed": 1}, env={})
    with pytest.raises(ConfigError):
        load_config(None, {"kind": "moments", "seed": 1, "model": "nope"}, env={})
    with pytest.raises(ConfigError):
        load_config(None, {"kind": "couple", "seed": 1, "mode": "teleport"}, env={})
    with pytest.raises(ConfigError):
        load_config(None, {"kind": "moments", "seed": 1, "statistics": "doubles,bogus"}, env={})


# -- experiments -----------------------------------------------------------


def test_sample_is_byte_identical_on_rerun(tmp_path):
    outs = []
    for k in range(2):
        cfg = load_config(None, {"kind": "sample", "seed": 5, "model": "loopless-pairing", "n": 10, "d": 3,
                                 "trials": 4, "out": str(tmp_path / f"run{k}")}, env={})
        run_experiment(cfg)
        outs.append(tmp_path / f"run{k}")
    names = sorted(p.name for p in outs[0].iterdir())
    assert "sample_0000.pairing" in names and "results.json" in names
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    P = load(outs[0] / "sample_0003.pairing", "pairing")
    assert P.n == 10 and not P.has_loop()


def test_sample_of_graph_model(tmp_path):
    cfg = load_config(None, {"kind": "sample", "seed": 5, "model": "grd", "n": 8, "d": 3, "trials": 2,
                             "out": str(tmp_path)}, env={})
    run_experiment(cfg)
    G = load(tmp_path / "sample_0001.graph", "multigraph")
    assert G.is_simple() and set(G.degrees()) == {3}


def test_micro_study_gate_and_files(tmp_path):
    cfg_file = write(tmp_path / "m.cfg", "\n".join([
        "kind = micro-study", "seed = 1", "n = 4",
        "law_a = pairing-plus-matchings(2,1)", "law_b = loopless-pairing", "d_b = 3",
        f"out = {tmp_path / 'out'}",
    ]))
    res = run_experiment(load_config(cfg_file, env={}))
    assert res.gates == {"failure_equals_tv": True}
    rows = {r["name"]: r["mean"] for r in res.rows}
    assert abs(rows["min_failure"] - rows["tv"]) < 1e-9
    J = load(tmp_path / "out" / "coupling.txt", "coupling")
    assert abs(float(J.failure_mass) - rows["tv"]) < 1e-12
    doc = json.loads((tmp_path / "out" / "results.json").read_text())
    assert doc["format"] == "rrgcouple-results/1" and doc["passed"]


def test_enumerate_writes_law(tmp_path):
    cfg = load_config(None, {"kind": "enumerate", "seed": 0, "model": "grd", "n": 6, "d": 3,
                             "out": str(tmp_path)}, env={})
    res = run_experiment(cfg)
    assert res.rows[0]["mean"] == 70
    assert len(load(tmp_path / "law.dist", "distribution")) == 70


def test_sandwich_rows_at_large_even_n(tmp_path):
    cfg = load_config(None, {"kind": "sandwich", "seed": 2, "n": 10000, "d": 2, "x": 4.0, "trials": 2,
                             "out": str(tmp_path)}, env={})
    res = run_experiment(cfg)
    names = [r["name"] for r in res.rows]
    assert names == ["containment", "decoupled"]
    assert all(0 <= r["mean"] <= 1 for r in res.rows)
    header = (tmp_path / "results.csv").read_text().splitlines()[0]
    assert header == "name,n,d,p,trials,mean,se,predicted,z,seed"


def test_moments_are_worker_independent(tmp_path):
    csvs = []
    for w in (1, 2):
        cfg = load_config(None, {"kind": "moments", "seed": 3, "model": "loopless-pairing", "n": 60, "d": 3,
                                 "trials": 30, "workers": w, "out": str(tmp_path / f"w{w}")}, env={})
        run_experiment(cfg)
        csvs.append((tmp_path / f"w{w}" / "results.csv").read_text())
    assert csvs[0] == csvs[1]


def test_moment_gate_failure_sets_flag(tmp_path):
    cfg_file = write(tmp_path / "g.cfg", "\n".join([
        "kind = moments", "seed = 4", "model = gnp", "n = 50", "p = 0.5", "statistics = edges",
        "trials = 50", "gate_rel = 0.0", f"out = {tmp_path / 'o'}",
    ]))
    res = run_experiment(load_config(cfg_file, env={}))
    assert not res.passed


# -- command line ----------------------------------------------------------


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)
    assert main(["sample", "--n", "6", "--d", "3", "--out", str(tmp_path / "a")]) == 2
    assert "seed is required" in capsys.readouterr().err
    assert main(["sample", "--n", "6", "--d", "3", "--seed", "1", "--out", str(tmp_path / "a")]) == 0
    assert main(["sample", "--config", str(tmp_path / "missing.cfg"), "--seed", "1"]) == 2
    gate = write(tmp_path / "g.cfg", "kind = moments\nmodel = gnp\nn = 20\np = 0.5\nstatistics = edges\n"
                 f"trials = 20\ngate_rel = 0.0\nout = {tmp_path / 'g'}\n")
    assert main(["moments", "--config", str(gate), "--seed", "1"]) == EXIT_GATE_FAILURE
    with pytest.raises(SystemExit) as err:
        main(["sample", "--n", "notanumber"])
    assert err.value.code == 2


def test_console_entry_point_runs(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "rrgcouple.cli", "micro-study", "--seed", "1", "--n", "4", "--config",
         str(write(tmp_path / "m.cfg", "law_a = matching-superpose(2)\nlaw_b = loopless-pairing\nd_b = 2\n")),
         "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert out.returncode == 0, out.stderr
    assert "gate failure_equals_tv: pass" in out.stdout
