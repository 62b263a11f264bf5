"""Random-restart hill climbing, grid refinement and random search.

All three share one accounting convention: a *cycle* is one heuristic
evaluation of a configuration not seen before in the session. Repeat
visits are served from the session cache and cost nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from ctlsearch import _backend, _pure
from ctlsearch._pure import BENCH_EPS, NonFiniteCost
from ctlsearch.space import ControlSpace, GridConfig, config_count, default_max_cycles

ALGORITHMS = ("rrhc", "grid", "random")

STOP_REASONS = {
    _pure.STOP_BENCHMARK: "benchmark",
    _pure.STOP_MAX_CYCLES: "max_cycles",
    _pure.STOP_EXHAUSTED: "exhausted",
}


class Heuristic(Protocol):
    """Cost of a real-valued control vector. Lower is better."""

    def __call__(self, values: Sequence[float]) -> float: ...


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class StopRule:
    """Stop once best cost <= benchmark (+1e-9), or after ``max_cycles`` cycles.

    ``benchmark=None`` never triggers; ``max_cycles=None`` means ten times the
    configuration count, capped at 1e8.
    """

    benchmark: float | None = None
    max_cycles: int | None = None

    def __post_init__(self):
        if self.max_cycles is not None and self.max_cycles < 1:
            raise ConfigurationError(f"max_cycles must be >= 1, got {self.max_cycles}")

    def resolve(self, space: ControlSpace) -> tuple[float, int]:
        bench = -math.inf if self.benchmark is None else float(self.benchmark)
        cap = default_max_cycles(space) if self.max_cycles is None else int(self.max_cycles)
        return bench, cap


@dataclass
class SearchSession:
    space: ControlSpace
    algorithm: str
    cycles: int
    draws: int
    best_cost: float
    best_config: GridConfig | None
    curve: list[tuple[int, float]]
    stop_reason: str
    order: np.ndarray = field(repr=False)
    costs: np.ndarray = field(repr=False)
    restarts: list[GridConfig] = field(default_factory=list, repr=False)
    path: list[tuple[GridConfig, str]] = field(default_factory=list, repr=False)

    @property
    def cache(self) -> dict[GridConfig, float]:
        """Every evaluated configuration and its cost, in evaluation order.

        Empty when the run was made with ``record=False``.
        """
        conv = self.space.from_flat
        return {conv(int(f)): float(c) for f, c in zip(self.order, self.costs)}

    @property
    def visit_order(self) -> list[GridConfig]:
        return [self.space.from_flat(int(f)) for f in self.order]

    def best_at(self, cycle: int) -> float:
        """Best cost known after ``cycle`` cycles (inf before the first)."""
        best = math.inf
        for c, v in self.curve:
            if c > cycle:
                break
            best = v
        return best

    def cycles_to(self, benchmark: float) -> int | None:
        """First cycle at which best cost met ``benchmark``; None if never."""
        for c, v in self.curve:
            if v <= benchmark + BENCH_EPS:
                return c
        return None


_PATH_KINDS = {_pure.PATH_START: "start", _pure.PATH_MOVE: "move", _pure.PATH_RESTART: "restart"}


def _session(space: ControlSpace, algorithm: str, raw: dict) -> SearchSession:
    conv = space.from_flat
    best_flat = raw["best_flat"]
    return SearchSession(
        space=space,
        algorithm=algorithm,
        cycles=raw["cycles"],
        draws=raw["draws"],
        best_cost=raw["best_cost"],
        best_config=conv(best_flat) if best_flat >= 0 else None,
        curve=[(int(c), float(v)) for c, v in zip(raw["curve_cycles"], raw["curve_costs"])],
        stop_reason=STOP_REASONS.get(raw["stop"], "running"),
        order=raw["order"],
        costs=raw["costs"],
        restarts=[conv(int(f)) for f in raw["restarts"]],
        path=[(conv(int(f)), _PATH_KINDS[int(k)]) for f, k in zip(raw["path"], raw["path_kind"])],
    )


def _resolve(h: Heuristic | Callable, backend: str | None):
    impl = _backend.impl if backend is None else _backend.get(backend)
    make = getattr(h, "kernel", None)
    if make is not None:
        return impl, make(impl)
    # arbitrary callables can only run through the Python loops
    return _pure, h


def _bitgen(rng):
    if rng is None:
        raise ConfigurationError("this algorithm needs a seeded PRNG")
    return rng.bit_generator if isinstance(rng, np.random.Generator) else rng


def rrhc_run(
    space: ControlSpace,
    h: Heuristic,
    stop: StopRule,
    rng,
    *,
    start: Sequence[int] | None = None,
    record: bool = True,
    backend: str | None = None,
) -> SearchSession:
    """Steepest-descent hill climbing with uniform random restarts.

    Each step evaluates the current configuration's full axis-aligned
    neighborhood, then moves to the cheapest neighbor if it is strictly
    cheaper (ties go to the first in neighbor order), else restarts at a
    random configuration. ``start`` overrides the random initial point.
    """
    impl, kernel = _resolve(h, backend)
    bench, cap = stop.resolve(space)
    first = -1 if start is None else space.to_flat(start)
    raw = impl.rrhc(kernel, space.n_dim, space.n_div, space.lo, space.hi, bench, cap,
                    _bitgen(rng), first, record)
    return _session(space, "rrhc", raw)


def grid_refinement_run(
    space: ControlSpace,
    h: Heuristic,
    stop: StopRule,
    *,
    record: bool = True,
    backend: str | None = None,
) -> SearchSession:
    """Coarse-to-fine sweep: level i covers indices that are multiples of
    ``2**(n_div - i)``, skipping points already seen; lexicographic within a level."""
    impl, kernel = _resolve(h, backend)
    bench, cap = stop.resolve(space)
    raw = impl.grid(kernel, space.n_dim, space.n_div, space.lo, space.hi, bench, cap, record)
    return _session(space, "grid", raw)


def random_search_run(
    space: ControlSpace,
    h: Heuristic,
    stop: StopRule,
    rng,
    *,
    record: bool = True,
    backend: str | None = None,
) -> SearchSession:
    """Uniform sampling with replacement; repeated draws are free but still consume the PRNG."""
    impl, kernel = _resolve(h, backend)
    bench, cap = stop.resolve(space)
    raw = impl.random_search(kernel, space.n_dim, space.n_div, space.lo, space.hi, bench, cap,
                             _bitgen(rng), record)
    return _session(space, "random", raw)


def run_algorithm(
    name: str,
    space: ControlSpace,
    h: Heuristic,
    stop: StopRule,
    rng=None,
    *,
    record: bool = True,
    backend: str | None = None,
) -> SearchSession:
    if name == "rrhc":
        return rrhc_run(space, h, stop, rng, record=record, backend=backend)
    if name == "grid":
        return grid_refinement_run(space, h, stop, record=record, backend=backend)
    if name == "random":
        return random_search_run(space, h, stop, rng, record=record, backend=backend)
    raise ConfigurationError(f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}")


def exhaustive_minimum(space: ControlSpace, h: Heuristic, *, backend: str | None = None):
    """(min cost, first configuration attaining it) over every grid point."""
    impl, kernel = _resolve(h, backend)
    config_count(space)
    best, flat = impl.exhaustive(kernel, space.n_dim, space.n_div, space.lo, space.hi)
    return best, space.from_flat(flat)


__all__ = [
    "ALGORITHMS",
    "ConfigurationError",
    "Heuristic",
    "NonFiniteCost",
    "SearchSession",
    "StopRule",
    "exhaustive_minimum",
    "grid_refinement_run",
    "random_search_run",
    "rrhc_run",
    "run_algorithm",
]
