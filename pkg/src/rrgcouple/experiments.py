"""Experiment configuration, dispatch and result files.

A config is a flat ``key = value`` document (``#`` starts a comment).  Trial
``i`` of every experiment draws from stream ``(seed, i)``, so results do not
depend on the worker count.  Output files carry no timestamps: rerunning a
config reproduces them byte for byte.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import io as rio
from .coupling.dout import dout_gnp_embed
from .coupling.flow import build_optimal_coupling, inequality, strassen_deficiency
from .coupling.rejection import rejection_embed
from .coupling.report import _plain
from .coupling.sandwich import sandwich_run
from .enumeration.laws import exact_model_distribution
from .models import MODEL_NAMES, ModelSpec, sample_pairing
from .rng import rng_stream
from .stats import STATISTICS, empirical_summary, predicted_moments, tv_distance

FORMAT_TAG = "rrgcouple-results/1"
KINDS = ("sample", "enumerate", "couple", "moments", "sandwich", "micro-study")
COUPLE_MODES = ("dout", "rejection")
SEED_ENV = "RRGCOUPLE_SEED"
EXIT_GATE_FAILURE = 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    model: str = "loopless-pairing"
    n: int = 4
    d: int | None = None
    p: float | None = None
    x: float | None = None
    trials: int = 1
    out: str = "results"
    mode: str = "dout"
    statistics: str = "doubles,triangles"
    doubles: int | None = None
    tau: int | None = None
    fn: float | None = None
    workers: int = 1
    law_a: str | None = None
    law_b: str | None = None
    d_a: int | None = None
    d_b: int | None = None
    gate_z: float | None = None
    gate_rel: float | None = None
    gate_rate: float | None = None
    gate_tol: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.kind in ("sample", "moments") and self.model not in MODEL_NAMES:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.kind == "couple" and self.mode not in COUPLE_MODES:
            raise ConfigError(f"unknown couple mode {self.mode!r}; choose from {', '.join(COUPLE_MODES)}")
        for s in self.stat_names:
            if s not in STATISTICS:
                raise ConfigError(f"unknown statistic {s!r}")

    @property
    def stat_names(self) -> list[str]:
        return [s.strip() for s in self.statistics.split(",") if s.strip()]

    @property
    def edge_p(self) -> float:
        """``p`` directly, or ``x log n / n``."""
        if self.p is not None:
            return self.p
        if self.x is not None:
            return self.x * math.log(self.n) / self.n
        raise ConfigError("need p or x")

    def echo(self) -> dict:
        # the output directory does not affect results, so it is left out of the echo
        return {k: v for k, v in asdict(self).items() if v is not None and k != "out"}


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in types:
        raise ConfigError(f"unknown config key {name!r}")
    t = str(types[name])
    try:
        if t.startswith("int"):
            return int(raw)
        if t.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = _coerce(k, v)
    return out


def load_config(path: str | Path | None = None, overrides: dict | None = None, env=None) -> ExperimentConfig:
    """File values, then flag overrides; the environment seed only fills a missing seed."""
    env = os.environ if env is None else env
    values = parse_config_text(Path(path).read_text()) if path else {}
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    if "seed" not in values and env.get(SEED_ENV):
        values["seed"] = _coerce("seed", env[SEED_ENV])
    if "kind" not in values:
        raise ConfigError("config needs a kind")
    if "seed" not in values:
        raise ConfigError(f"a seed is required (config, --seed or {SEED_ENV})")
    return ExperimentConfig(**values)


@dataclass
class ResultSet:
    config: dict
    rows: list[dict] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    gates: dict[str, bool] = field(default_factory=dict)
    files: list[str] = field(default_factory=list)
    format: str = FORMAT_TAG

    @property
    def passed(self) -> bool:
        return all(self.gates.values())

    def to_json(self) -> str:
        body = {"format": self.format, "config": self.config, "rows": self.rows, "records": self.records,
                "gates": self.gates, "passed": self.passed}
        return json.dumps(_plain(body), indent=2, sort_keys=True) + "\n"


CSV_FIELDS = ("name", "n", "d", "p", "trials", "mean", "se", "predicted", "z", "seed")


def _row(cfg: ExperimentConfig, name: str, mean, se=None, predicted=None, trials=None, **extra) -> dict:
    z = None
    if predicted is not None and se:
        z = (mean - predicted) / se
    row = {"name": name, "n": cfg.n, "d": cfg.d, "p": cfg.p if cfg.p is not None else (cfg.edge_p if cfg.x else None),
           "trials": cfg.trials if trials is None else trials, "mean": mean, "se": se, "predicted": predicted,
           "z": z, "seed": cfg.seed}
    row.update(extra)
    return row


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in CSV_FIELDS])
    return buf.getvalue()


def _rate_row(cfg, name, hits: int, trials: int) -> dict:
    rate = hits / trials
    se = math.sqrt(rate * (1 - rate) / trials)
    return _row(cfg, name, rate, se, trials=trials)


# -- experiment kinds ------------------------------------------------------


def _model(cfg: ExperimentConfig) -> ModelSpec:
    return ModelSpec(cfg.model, cfg.n, cfg.d, cfg.p, cfg.doubles)


def _sample(cfg: ExperimentConfig, out: Path, res: ResultSet) -> None:
    pairing_models = {"pairing": "none", "loopless-pairing": "loopless", "disjoint-doubles": "disjoint-doubles"}
    for i in range(cfg.trials):
        gen = rng_stream(cfg.seed, i).generator
        if cfg.model in pairing_models:
            obj = sample_pairing(cfg.n, cfg.d, pairing_models[cfg.model], gen, doubles=cfg.doubles or 0)
            path = out / f"sample_{i:04d}.pairing"
        else:
            obj = _model(cfg).sample(gen)
            path = out / f"sample_{i:04d}.graph"
        rio.save(obj, path)
        res.files.append(path.name)


def _enumerate(cfg: ExperimentConfig, out: Path, res: ResultSet) -> None:
    law = exact_model_distribution(cfg.model, cfg.n, cfg.d)
    path = rio.save(law, out / "law.dist")
    res.files.append(path.name)
    simple = law.mass(lambda g: g.is_simple())
    res.rows.append(_row(cfg, "support_size", len(law), trials=0))
    res.rows.append(_row(cfg, "simple_mass", float(simple), trials=0))
    res.records.append({"support_size": len(law), "simple_mass": str(simple)})


def _couple(cfg: ExperimentConfig, out: Path, res: ResultSet) -> None:
    hits = empty = 0
    if cfg.mode == "dout":
        p = cfg.edge_p
        edge_hits = 0
        npairs = cfg.n * (cfg.n - 1) // 2
        for i in range(cfg.trials):
            rep = dout_gnp_embed(cfg.n, p, cfg.d, rng_stream(cfg.seed, i))
            hits += rep.contained and not rep.decoupled
            edge_hits += rep.outer.num_pairs
            if not np.all(rep.inner.out_degrees() == cfg.d):
                raise AssertionError("inner out-degree differs from d")
            res.records.append({"trial": i, "contained": rep.contained, "decoupled": rep.decoupled,
                                **rep.diagnostics})
        res.rows.append(_rate_row(cfg, "containment", hits, cfg.trials))
        freq = edge_hits / (cfg.trials * npairs)
        se = math.sqrt(p * (1 - p) / (cfg.trials * npairs))
        res.rows.append(_row(cfg, "outer_edge_freq", freq, se, p))
    else:
        tau = cfg.tau if cfg.tau is not None else 10 * cfg.d
        fn = cfg.fn if cfg.fn is not None else 5.0
        target = cfg.model if cfg.model in ("loopless-pairing", "grd") else "loopless-pairing"
        for i in range(cfg.trials):
            rep = rejection_embed(cfg.n, cfg.d, tau, fn, rng_stream(cfg.seed, i), target=target)
            if rep.empty:
                empty += 1
            else:
                hits += rep.contained
            res.records.append({"trial": i, "empty": rep.empty, "contained": rep.contained,
                                "accepted_at": rep.diagnostics["accepted_at"],
                                "output": None if rep.empty else rio.graph_to_record(rep.inner)})
        res.rows.append(_rate_row(cfg, "empty", empty, cfg.trials))
        nonempty = cfg.trials - empty
        if nonempty:
            res.rows.append(_rate_row(cfg, "containment_nonempty", hits, nonempty))
        res.gates["containment_nonempty"] = hits == nonempty
        if cfg.gate_rate is not None:
            se = math.sqrt(max(1 / fn * (1 - 1 / fn), 0) / cfg.trials)
            res.gates["empty_rate"] = empty / cfg.trials <= 1 / fn + 3 * se
        return
    if cfg.gate_rate is not None:
        res.gates["containment_rate"] = hits / cfg.trials >= cfg.gate_rate


def _moments(cfg: ExperimentConfig, out: Path, res: ResultSet) -> None:
    names = cfg.stat_names
    summ = empirical_summary(_model(cfg), names, cfg.trials, rng_stream(cfg.seed, 0), cfg.workers)
    pred = {}
    if cfg.model in ("loopless-pairing", "pairing") and cfg.d is not None and cfg.d >= 3:
        mp = predicted_moments(cfg.n, cfg.d)
        pred = {"doubles": mp.EX, "multi": mp.EX, "triangles": mp.EW}
        res.records.append({"prediction": mp})
    if cfg.model == "gnp":
        pred = {"edges": cfg.edge_p * cfg.n * (cfg.n - 1) / 2, "pairs": cfg.edge_p * cfg.n * (cfg.n - 1) / 2}
    for k, name in enumerate(names):
        row = _row(cfg, name, float(summ.mean[k]), float(summ.se[k]), pred.get(name))
        res.rows.append(row)
        if name in pred:
            if cfg.gate_z is not None:
                res.gates[f"{name}_z"] = abs(row["z"] or 0.0) <= cfg.gate_z
            if cfg.gate_rel is not None:
                res.gates[f"{name}_rel"] = abs(row["mean"] - pred[name]) <= cfg.gate_rel * pred[name]


def _sandwich(cfg: ExperimentConfig, out: Path, res: ResultSet) -> None:
    if cfg.x is None:
        raise ConfigError("sandwich needs x")
    hits = decoupled = 0
    for i in range(cfg.trials):
        rep = sandwich_run(cfg.n, cfg.d, cfg.x, rng_stream(cfg.seed, i), tau=cfg.tau, fn=cfg.fn)
        hits += rep.contained
        decoupled += rep.decoupled
        res.records.append({"trial": i, "contained": rep.contained, "decoupled": rep.decoupled,
                            "stages": rep.stages})
    res.rows.append(_rate_row(cfg, "containment", hits, cfg.trials))
    res.rows.append(_rate_row(cfg, "decoupled", decoupled, cfg.trials))
    if cfg.gate_rate is not None:
        res.gates["containment_rate"] = hits / cfg.trials >= cfg.gate_rate


def _micro_study(cfg: ExperimentConfig, out: Path, res: ResultSet) -> None:
    if not cfg.law_a or not cfg.law_b:
        raise ConfigError("micro-study needs law_a and law_b")
    A = exact_model_distribution(cfg.law_a, cfg.n, cfg.d_a if cfg.d_a is not None else cfg.d)
    B = exact_model_distribution(cfg.law_b, cfg.n, cfg.d_b if cfg.d_b is not None else cfg.d)
    deficiency = strassen_deficiency(A, B, inequality).value
    tv = tv_distance(A, B).value
    J = build_optimal_coupling(A, B, inequality)
    for name, obj in (("law_a.dist", A), ("law_b.dist", B), ("coupling.txt", J)):
        rio.save(obj, out / name)
        res.files.append(name)
    res.rows.append(_row(cfg, "min_failure", float(deficiency), trials=0, predicted=None))
    res.rows.append(_row(cfg, "tv", float(tv), trials=0))
    res.records.append({"min_failure": str(deficiency), "tv": str(tv), "failure_mass": str(J.failure_mass)})
    tol = cfg.gate_tol if cfg.gate_tol is not None else 1e-9
    res.gates["failure_equals_tv"] = abs(float(deficiency) - float(tv)) <= tol


_DISPATCH = {
    "sample": _sample,
    "enumerate": _enumerate,
    "couple": _couple,
    "moments": _moments,
    "sandwich": _sandwich,
    "micro-study": _micro_study,
}


def run_experiment(cfg: ExperimentConfig) -> ResultSet:
    """Run one experiment and write its files (plus results.csv/json) under ``cfg.out``."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    res = ResultSet(cfg.echo())
    _DISPATCH[cfg.kind](cfg, out, res)
    (out / "results.csv").write_text(rows_to_csv(res.rows))
    (out / "results.json").write_text(res.to_json())
    res.files += ["results.csv", "results.json"]
    return res
