"""Seeded multi-trial campaigns, aggregation, and CSV/SVG output.

Trial ``t`` of a campaign uses seed ``base_seed + t`` for the problem
instance (synthetic minimum location or corridor world). Each algorithm's
PRNG is derived from the same seed with its own tag, so every algorithm
in a trial faces the identical instance.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ctlsearch import charts
from ctlsearch.robot import RobotHeuristic, robot_control_space
from ctlsearch.search import (
    ALGORITHMS,
    ConfigurationError,
    StopRule,
    exhaustive_minimum,
    run_algorithm,
)
from ctlsearch.space import (
    ALGORITHM_TAGS,
    TAG_INSTANCE,
    ControlSpace,
    config_count,
    default_max_cycles,
    make_rng,
)
from ctlsearch.synthetic import make_synthetic
from ctlsearch.world import WorldParams, generate_world

SCENARIOS = ("synthetic", "robot")
SWEEPS = {
    "dim": (1, 2, 3, 4),
    "precision": (2, 3, 4, 5, 6, 7, 8),
    "complexity": (2, 4, 6, 8, 10, 12),
}
BENCH_MIN = "min"  # per-trial exhaustive minimum
EXHAUSTIVE_LIMIT = 10**6

AGGREGATE_FIELDS = (
    "scenario", "sweep_param", "sweep_value", "algorithm", "benchmark",
    "trials", "censored", "mean_cycles", "normalized_mean",
)
CURVE_FIELDS = ("cycle", "algorithm", "mean_best_cost")
TRIAL_FIELDS = (
    "sweep_value", "algorithm", "trial", "seed", "benchmark", "cycles_to_benchmark",
    "cycles", "final_best_cost", "instance",
)


@dataclass(frozen=True)
class CampaignSpec:
    scenario: str
    algorithms: tuple[str, ...] = ALGORITHMS
    trials: int = 100
    benchmarks: tuple = (0.0, 0.05)
    # synthetic sweeps; the swept parameter overrides its base value below
    sweep_param: str = "dim"
    sweep_values: tuple = ()
    n_dim: int = 3
    n_div: int = 6
    f: float = 6.0
    # robot scenario
    kind: str = "wide"
    precision: str = "coarse"
    base_seed: int = 0
    max_cycles: int | None = None
    horizon: int = 5000
    jobs: int = 1

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"unknown scenario {self.scenario!r}")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.algorithms:
            raise ConfigurationError("at least one algorithm is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigurationError(f"unknown algorithm {a!r}")
        if self.max_cycles is not None and self.max_cycles < 1:
            raise ConfigurationError("max_cycles must be >= 1")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        for b in self.benchmarks:
            if b == BENCH_MIN:
                continue
            if isinstance(b, str) or not math.isfinite(b):
                raise ConfigurationError(f"benchmark must be a number or {BENCH_MIN!r}, got {b!r}")
        if self.scenario == "synthetic":
            if self.sweep_param not in SWEEPS:
                raise ConfigurationError(
                    f"unknown sweep {self.sweep_param!r}; expected one of {', '.join(SWEEPS)}"
                )
            for v in self.resolved_sweep_values():
                if self.sweep_param in ("dim", "precision") and (int(v) != v or v < 1):
                    raise ConfigurationError(f"{self.sweep_param} values must be positive integers")
                if self.sweep_param == "complexity" and not v > 0:
                    raise ConfigurationError("complexity (frequency) values must be positive")
        else:
            try:
                WorldParams.preset(self.kind)
                robot_control_space(self.precision)
            except ValueError as exc:
                raise ConfigurationError(str(exc)) from None
        for point in self.points():
            count = config_count(point.space)
            if BENCH_MIN in self.benchmarks and count > EXHAUSTIVE_LIMIT:
                raise ConfigurationError(
                    f"benchmark {BENCH_MIN!r} needs an exhaustive sweep of {count} configurations "
                    f"(limit {EXHAUSTIVE_LIMIT})"
                )

    def resolved_sweep_values(self) -> tuple:
        return tuple(self.sweep_values) or SWEEPS[self.sweep_param]

    def points(self) -> list["SweepPoint"]:
        if self.scenario == "robot":
            space = robot_control_space(self.precision)
            return [SweepPoint("world", f"{self.kind}-{self.precision}", space, None)]
        out = []
        for v in self.resolved_sweep_values():
            n_dim, n_div, f = self.n_dim, self.n_div, self.f
            if self.sweep_param == "dim":
                n_dim = v = int(v)
            elif self.sweep_param == "precision":
                n_div = v = int(v)
            else:
                f = v = float(v)
            out.append(SweepPoint(self.sweep_param, v, ControlSpace.uniform(n_dim, n_div), f))
        return out


@dataclass(frozen=True)
class SweepPoint:
    param: str
    value: object
    space: ControlSpace
    f: float | None


@dataclass(frozen=True)
class TrialRecord:
    sweep_value: object
    algorithm: str
    trial_index: int
    seed: int
    benchmarks: tuple  # resolved numeric thresholds, aligned with the campaign's benchmark list
    cycles_to_benchmark: tuple  # int, or None when censored
    curve: tuple  # (cycle, best_cost) change-points
    final_best_cost: float
    cycles: int
    max_cycles: int
    config_count: int
    fingerprint: str
    instance_min: float | None = None


@dataclass(frozen=True)
class AggregateRow:
    scenario: str
    sweep_param: str
    sweep_value: object
    algorithm: str
    benchmark: object
    trials: int
    censored: int
    mean_cycles: float | None
    normalized_mean: float | None
    config_count: int
    mean_final_cost: float = field(default=math.nan, compare=False)


def _build_instance(spec: CampaignSpec, point: SweepPoint, seed: int):
    if spec.scenario == "synthetic":
        return make_synthetic(point.space, point.f, make_rng(seed, TAG_INSTANCE))
    return RobotHeuristic(generate_world(WorldParams.preset(spec.kind), seed))


def _run_unit(args) -> list[TrialRecord]:
    spec, point, t = args
    seed = spec.base_seed + t
    space = point.space
    h = _build_instance(spec, point, seed)
    instance_min = None
    resolved = []
    for b in spec.benchmarks:
        if b == BENCH_MIN:
            if instance_min is None:
                instance_min, _ = exhaustive_minimum(space, h)
            resolved.append(instance_min)
        else:
            resolved.append(float(b))
    if spec.max_cycles is not None:
        cap = spec.max_cycles
    elif resolved:
        cap = default_max_cycles(space)
    else:
        cap = spec.horizon
    stop = StopRule(min(resolved) if resolved else None, cap)
    records = []
    for alg in spec.algorithms:
        rng = make_rng(seed, ALGORITHM_TAGS[alg])
        sess = run_algorithm(alg, space, h, stop, rng, record=False)
        records.append(
            TrialRecord(
                sweep_value=point.value,
                algorithm=alg,
                trial_index=t,
                seed=seed,
                benchmarks=tuple(resolved),
                cycles_to_benchmark=tuple(sess.cycles_to(b) for b in resolved),
                curve=tuple(sess.curve),
                final_best_cost=sess.best_cost,
                cycles=sess.cycles,
                max_cycles=cap,
                config_count=config_count(space),
                fingerprint=h.fingerprint(),
                instance_min=instance_min,
            )
        )
    return records


def run_campaign(spec: CampaignSpec) -> tuple[list[TrialRecord], list[AggregateRow]]:
    spec.validate()
    units = [(spec, point, t) for point in spec.points() for t in range(spec.trials)]
    if spec.jobs > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunks = list(pool.map(_run_unit, units))
    else:
        chunks = [_run_unit(u) for u in units]
    records = [r for chunk in chunks for r in chunk]
    return records, aggregate(spec, records)


def aggregate(spec: CampaignSpec, records: Sequence[TrialRecord]) -> list[AggregateRow]:
    rows = []
    for point in spec.points():
        for alg in spec.algorithms:
            group = [r for r in records if r.sweep_value == point.value and r.algorithm == alg]
            if not group:
                continue
            final = sum(r.final_best_cost for r in group) / len(group)
            for k, label in enumerate(spec.benchmarks):
                done = [r.cycles_to_benchmark[k] for r in group if r.cycles_to_benchmark[k] is not None]
                mean = sum(done) / len(done) if done else None
                count = group[0].config_count
                rows.append(
                    AggregateRow(
                        scenario=spec.scenario,
                        sweep_param=point.param,
                        sweep_value=point.value,
                        algorithm=alg,
                        benchmark=label,
                        trials=len(group),
                        censored=len(group) - len(done),
                        mean_cycles=mean,
                        normalized_mean=None if mean is None else mean / count,
                        config_count=count,
                        mean_final_cost=final,
                    )
                )
    return rows


def average_cost_curve(records: Sequence[TrialRecord], horizon: int) -> list[tuple[int, float]]:
    """Mean best-so-far cost at cycles 1..horizon; each trial is a step function
    held at its last value after it stops."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if not records:
        raise ValueError("no records")
    cycles = np.arange(1, horizon + 1)
    total = np.zeros(horizon)
    for r in records:
        cc = np.array([c for c, _ in r.curve], dtype=np.int64)
        cv = np.array([v for _, v in r.curve], dtype=np.float64)
        pos = np.searchsorted(cc, cycles, side="right") - 1
        vals = np.where(pos >= 0, cv[np.maximum(pos, 0)], np.inf)
        total += vals
    mean = total / len(records)
    return [(int(c), float(v)) for c, v in zip(cycles, mean)]


# --------------------------------------------------------------------------
# output


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.9f}"


def _float(v):
    return None if v is None else float(v)


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_num(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(data, path) -> None:
    """Write aggregates (list of AggregateRow), curves (``{algorithm: [(cycle, cost)]}``)
    or trial records (list of TrialRecord) with 9-digit fixed decimals."""
    if isinstance(data, dict):
        rows = [(c, alg, v) for alg, curve in data.items() for c, v in curve]
        _write_csv(path, CURVE_FIELDS, rows)
        return
    data = list(data)
    if data and isinstance(data[0], TrialRecord):
        rows = []
        for r in data:
            for b, c in zip(r.benchmarks, r.cycles_to_benchmark):
                rows.append((r.sweep_value, r.algorithm, r.trial_index, r.seed, b, c,
                             r.cycles, r.final_best_cost, r.fingerprint))
            if not r.benchmarks:
                rows.append((r.sweep_value, r.algorithm, r.trial_index, r.seed, None, None,
                             r.cycles, r.final_best_cost, r.fingerprint))
        _write_csv(path, TRIAL_FIELDS, rows)
        return
    rows = [
        (r.scenario, r.sweep_param, r.sweep_value, r.algorithm, r.benchmark, r.trials,
         r.censored, _float(r.mean_cycles), _float(r.normalized_mean))
        for r in data
    ]
    _write_csv(path, AGGREGATE_FIELDS, rows)


def emit_chart(data, path, *, title: str = "", benchmark=None) -> None:
    """Curves dict -> mean best cost vs cycle; aggregate rows -> normalized cycles vs
    sweep value for one ``benchmark``."""
    if isinstance(data, dict):
        if not data:
            raise ValueError("no curves to chart")
        charts.line_chart(
            data, path, title=title or "Mean best cost", x_label="search cycles",
            y_label="mean best cost", log_x=True, log_y=True,
        )
        return
    rows = [r for r in data if benchmark is None or r.benchmark == benchmark]
    if not rows:
        raise ValueError("no aggregate rows to chart")
    series: dict[str, list] = {}
    for r in rows:
        x = float(r.sweep_value)
        series.setdefault(r.algorithm, []).append((x, r.normalized_mean))
    param = rows[0].sweep_param
    charts.line_chart(
        series, path, title=title or f"benchmark {benchmark}",
        x_label={"dim": "dimensions", "precision": "n_div (2^n_div divisions)",
                 "complexity": "wave frequency f"}.get(param, param),
        y_label="mean cycles / configurations", log_y=True,
    )
