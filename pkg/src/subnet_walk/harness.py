"""Reproducible experiment runner: seed aggregation, config handling, reports.

Every experiment is identified by a string id, validates its configuration
against a typed schema, runs once per seed (optionally in parallel, capped by
the SUBNET_WALK_THREADS environment variable), aggregates per-seed metrics
with Student-t 95% confidence intervals, and emits deterministic JSON/CSV
artifacts: rerunning with the same config reproduces every byte outside the
metadata block.
"""

from __future__ import annotations

import csv
import json
import math
import os
import socket
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from scipy import stats

from .exceptions import ConfigError

THREADS_ENV_VAR = "SUBNET_WALK_THREADS"


@dataclass(frozen=True)
class SeedAggregate:
    """Per-seed values with mean, sample std (n-1), and two-sided 95% CI half-width."""

    values: list
    mean: float
    std: float | None
    ci95: float | None


def aggregate_seeds(values) -> SeedAggregate:
    """Aggregate one metric across seeds; std/ci95 are absent for a single value.

    ci95 = t_{0.975, n-1} * std / sqrt(n); for 5 seeds the critical value is
    2.7764.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("cannot aggregate an empty list")
    n = len(vals)
    mean = sum(vals) / n
    if n < 2:
        return SeedAggregate(vals, mean, None, None)
    var = sum((v - mean) ** 2 for v in vals) / (n - 1)
    std = math.sqrt(var)
    t_crit = float(stats.t.ppf(0.975, n - 1))
    return SeedAggregate(vals, mean, std, t_crit * std / math.sqrt(n))


def map_seeds(seeds, fn):
    """Apply fn to each seed, in parallel when SUBNET_WALK_THREADS > 1.

    Results come back in seed order; each fn call must use only its own RNG
    streams, so the thread count never affects the numbers.
    """
    threads = int(os.environ.get(THREADS_ENV_VAR, "1") or "1")
    if threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, seeds))
    return [fn(s) for s in seeds]


# ---------------------------------------------------------------------------
# Config schema machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """One schema entry: value type, default, and a one-line description."""

    kind: str  # int | float | bool | str | int_list | float_list
    default: object
    help: str = ""


def _coerce_scalar(kind, value, name):
    try:
        if kind == "int":
            if isinstance(value, bool):
                raise ValueError
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("true", "1", "yes"):
                return True
            if text in ("false", "0", "no"):
                return False
            raise ValueError
        if kind == "str":
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected {kind}, got {value!r}") from None
    raise ConfigError(name, f"unknown field kind {kind!r}")


def coerce_field(spec: FieldSpec, value, name):
    if spec.kind.endswith("_list"):
        inner = spec.kind[: -len("_list")]
        if isinstance(value, str):
            parts = [p.strip() for p in value.split(",") if p.strip()]
        elif isinstance(value, (list, tuple)):
            parts = list(value)
        else:
            raise ConfigError(name, f"expected a list, got {value!r}")
        return [_coerce_scalar(inner, p, name) for p in parts]
    return _coerce_scalar(spec.kind, value, name)


def parse_config_file(path) -> dict:
    """Parse a flat ``key = value`` text file; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}", f"expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def validate_config(schema: dict, overrides: dict | None, experiment_id: str) -> dict:
    overrides = dict(overrides or {})
    cfg = {}
    for name, spec in schema.items():
        if name in overrides:
            cfg[name] = coerce_field(spec, overrides.pop(name), name)
        else:
            cfg[name] = spec.default
    if overrides:
        unknown = ", ".join(sorted(overrides))
        raise ConfigError(unknown, f"unknown field(s) for experiment {experiment_id!r}")
    return cfg


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class ExperimentOutcome:
    """What an experiment implementation hands back to the runner."""

    per_seed: list  # one dict per seed, "seed" key plus metrics
    passed: bool
    claim: str
    csv_tables: list = field(default_factory=list)  # (name, columns, rows)
    json_artifacts: list = field(default_factory=list)  # (name, jsonable dict)


@dataclass
class ExperimentReport:
    experiment_id: str
    claim: str
    config_echo: dict
    per_seed: list
    aggregates: dict  # metric name -> SeedAggregate
    passed: bool
    artifacts: list  # file names relative to the report directory
    metadata: dict


def _aggregate_rows(per_seed: list) -> dict:
    """Aggregate every metric that is numeric (and present) in all seed rows."""
    if not per_seed:
        return {}
    aggregates = {}
    for key in per_seed[0]:
        if key == "seed":
            continue
        values = [row.get(key) for row in per_seed]
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            aggregates[key] = aggregate_seeds(values)
    return aggregates


def build_report(experiment_id: str, cfg: dict, outcome: ExperimentOutcome) -> ExperimentReport:
    metadata = {
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "hostname": socket.gethostname(),
    }
    return ExperimentReport(
        experiment_id=experiment_id,
        claim=outcome.claim,
        config_echo=dict(cfg),
        per_seed=outcome.per_seed,
        aggregates=_aggregate_rows(outcome.per_seed),
        passed=outcome.passed,
        artifacts=[],
        metadata=metadata,
    )


def _jsonable(value):
    if isinstance(value, SeedAggregate):
        return {
            "values": value.values,
            "mean": value.mean,
            "std": value.std,
            "ci95": value.ci95,
        }
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_as_dict(report: ExperimentReport) -> dict:
    return {
        "experiment_id": report.experiment_id,
        "claim": report.claim,
        "config_echo": _jsonable(report.config_echo),
        "per_seed": _jsonable(report.per_seed),
        "aggregates": _jsonable(report.aggregates),
        "pass": report.passed,
        "artifacts": list(report.artifacts),
        "metadata": dict(report.metadata),
    }


def _format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest round-trip decimal, full precision
    if value is None:
        return ""
    return str(value)


def emit_report(report: ExperimentReport, out_dir, formats=("json", "csv"),
                csv_tables=(), json_artifacts=()) -> list[str]:
    """Write report.json plus per-experiment CSV/JSON artifacts; returns the paths.

    The JSON document has sorted keys and full-precision floats, so reruns
    with the same config are byte-identical outside the ``metadata`` block.
    Artifact names inside the report are relative to the report directory.
    """
    formats = set(formats)
    bad = formats - {"json", "csv"}
    if bad:
        raise ValueError(f"unknown formats: {sorted(bad)}")
    out = Path(out_dir) / report.experiment_id
    out.mkdir(parents=True, exist_ok=True)
    names = []
    if "csv" in formats:
        for name, columns, rows in csv_tables:
            fname = f"{name}.csv"
            with open(out / fname, "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([_format_cell(v) for v in row])
            names.append(fname)
    if "json" in formats:
        for name, obj in json_artifacts:
            fname = f"{name}.json"
            with open(out / fname, "w") as f:
                json.dump(_jsonable(obj), f, indent=2, sort_keys=True)
                f.write("\n")
            names.append(fname)
        names.append("report.json")
        report.artifacts = names
        with open(out / "report.json", "w") as f:
            json.dump(report_as_dict(report), f, indent=2, sort_keys=True)
            f.write("\n")
    else:
        report.artifacts = names
    return [str(out / n) for n in names]


def run_experiment(experiment_id: str, cfg_overrides: dict | None = None,
                   out_dir="runs", formats=("json", "csv")) -> ExperimentReport:
    """Validate config, run one experiment over its seeds, and emit artifacts."""
    from .experiments import EXPERIMENTS, SCHEMAS  # late import: experiments import harness

    if experiment_id not in EXPERIMENTS:
        valid = ", ".join(sorted(EXPERIMENTS))
        raise ValueError(f"unknown experiment id {experiment_id!r}; valid ids: {valid}")
    bad = set(formats) - {"json", "csv"}
    if bad:
        raise ValueError(f"unknown formats: {sorted(bad)}")
    cfg = validate_config(SCHEMAS[experiment_id], cfg_overrides, experiment_id)
    outcome = EXPERIMENTS[experiment_id](cfg)
    report = build_report(experiment_id, cfg, outcome)
    emit_report(report, out_dir, formats, outcome.csv_tables, outcome.json_artifacts)
    return report
