from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctlsearch.search import (
    ConfigurationError,
    NonFiniteCost,
    StopRule,
    exhaustive_minimum,
    grid_refinement_run,
    random_search_run,
    rrhc_run,
    run_algorithm,
)
from ctlsearch.space import ControlSpace, make_rng, neighbors


class Table:
    """Heuristic looked up by grid index; counts calls."""

    def __init__(self, space: ControlSpace, costs):
        self.space = space
        self.costs = list(costs)
        self.calls = 0

    def index(self, values):
        flat = 0
        for v, (lo, hi) in zip(values, self.space.bounds):
            flat = flat * self.space.points_per_dim + round((v - lo) / (hi - lo) * self.space.divisions)
        return flat

    def __call__(self, values):
        self.calls += 1
        return self.costs[self.index(values)]


LINE = ControlSpace.uniform(1, 2)


def test_rrhc_hand_trace_reaches_minimum():
    h = Table(LINE, [3, 2, 4, 1, 0])
    s = rrhc_run(LINE, h, StopRule(0.0), make_rng(0), start=[3])
    assert s.visit_order == [(3,), (2,), (4,)]
    assert s.cycles == 3 and h.calls == 3
    assert s.best_cost == 0 and s.best_config == (4,)
    assert s.stop_reason == "benchmark"
    assert s.draws == 0


def test_rrhc_hand_trace_restart():
    h = Table(LINE, [3, 2, 4, 1, 0])
    s = rrhc_run(LINE, h, StopRule(0.0), make_rng(0), start=[1])
    assert s.visit_order[:3] == [(1,), (0,), (2,)]
    assert s.restarts[0] == (1,)
    assert [k for _, k in s.path[:2]] == ["start", "restart"]
    assert s.draws >= 1
    assert s.best_cost == 0


def test_immediate_satisfaction(backend):
    space = ControlSpace.uniform(3, 2)
    h = Table(space, [float(i) for i in range(125)])
    for name in ("rrhc", "grid", "random"):
        s = run_algorithm(name, space, h, StopRule(1e9), make_rng(3), backend=backend)
        assert s.cycles == 1


def test_grid_order_1d():
    h = Table(LINE, [5, 4, 3, 2, 1])
    s = grid_refinement_run(LINE, h, StopRule(None))
    assert [c[0] for c in s.visit_order] == [0, 2, 4, 1, 3]
    assert s.cycles == 5 and s.stop_reason == "exhausted"


def test_grid_single_level_lexicographic():
    space = ControlSpace.uniform(2, 1)
    h = Table(space, [1.0] * 9)
    s = grid_refinement_run(space, h, StopRule(-1.0))
    assert s.visit_order == list(space.configs())


def test_grid_level_structure_2d():
    space = ControlSpace.uniform(2, 2)
    h = Table(space, [1.0] * 25)
    order = grid_refinement_run(space, h, StopRule(-1.0)).visit_order
    first = order[:9]
    assert first == [(a, b) for a in (0, 2, 4) for b in (0, 2, 4)]
    assert order[9:] == sorted(order[9:])
    assert len(set(order)) == 25


def test_run_algorithm_dispatch():
    h = Table(LINE, [3, 2, 4, 1, 0])
    a = run_algorithm("grid", LINE, h, StopRule(0.0))
    b = grid_refinement_run(LINE, h, StopRule(0.0))
    assert a.visit_order == b.visit_order and a.curve == b.curve
    space = ControlSpace.uniform(2, 3)
    h2 = Table(space, [((i * 37) % 81) / 7 for i in range(81)])
    a = run_algorithm("rrhc", space, h2, StopRule(-1.0, 50), make_rng(8))
    b = rrhc_run(space, h2, StopRule(-1.0, 50), make_rng(8))
    assert a.visit_order == b.visit_order
    with pytest.raises(ConfigurationError):
        run_algorithm("foo", LINE, h, StopRule(0.0))


def test_stop_rule_validation():
    with pytest.raises(ConfigurationError):
        StopRule(0.0, 0)


def test_max_cycles_cap():
    space = ControlSpace.uniform(2, 3)
    h = Table(space, [float(i) + 1 for i in range(81)])
    s = random_search_run(space, h, StopRule(0.0, 10), make_rng(1))
    assert s.cycles == 10 and s.stop_reason == "max_cycles"
    assert s.cycles_to(0.0) is None


def test_non_finite_cost_aborts():
    h = Table(LINE, [1.0, math.nan, 1.0, 1.0, 1.0])
    with pytest.raises(NonFiniteCost):
        grid_refinement_run(LINE, h, StopRule(-1.0))


def test_random_search_requires_rng():
    with pytest.raises(ConfigurationError):
        random_search_run(LINE, Table(LINE, [0] * 5), StopRule(0.0), None)


def test_random_redraws_are_free():
    space = ControlSpace.uniform(1, 1)
    h = Table(space, [3.0, 2.0, 1.0])
    s = random_search_run(space, h, StopRule(-1.0), make_rng(4))
    assert s.cycles == 3 == h.calls
    assert s.draws >= 3


# ---- properties over random cost tables ---------------------------------

tables = st.integers(1, 3).flatmap(
    lambda n_dim: st.integers(1, 3).flatmap(
        lambda n_div: st.tuples(
            st.just(ControlSpace.uniform(n_dim, n_div)),
            st.lists(
                st.integers(0, 20).map(float),
                min_size=(2**n_div + 1) ** n_dim,
                max_size=(2**n_div + 1) ** n_dim,
            ),
        )
    )
)


def _check_session(space, h, s):
    cache = s.cache
    assert s.cycles == len(cache) == h.calls
    assert len(s.visit_order) == len(set(s.visit_order))
    assert s.best_cost == min(cache.values())
    assert cache[s.best_config] == s.best_cost
    cyc = [c for c, _ in s.curve]
    costs = [v for _, v in s.curve]
    assert cyc == sorted(set(cyc))
    assert all(a > b for a, b in zip(costs, costs[1:]))


@given(tables, st.integers(0, 2**32), st.sampled_from(["rrhc", "grid", "random"]))
def test_session_invariants(table, seed, name):
    space, costs = table
    h = Table(space, costs)
    s = run_algorithm(name, space, h, StopRule(-1.0, len(costs)), make_rng(seed))
    _check_session(space, h, s)
    best, _ = exhaustive_minimum(space, h)
    assert s.best_cost >= best


@given(tables, st.integers(0, 2**32))
def test_rrhc_descent_and_restart_soundness(table, seed):
    space, costs = table
    h = Table(space, costs)
    s = rrhc_run(space, h, StopRule(-1.0, len(costs)), make_rng(seed))
    cost = {c: costs[space.to_flat(c)] for c in space.configs()}
    for r in s.restarts:
        assert all(cost[r] <= cost[n] for n in neighbors(space, r))
    run = []
    for cfg, kind in s.path:
        if kind != "move":
            run = []
        run.append(cost[cfg])
        assert all(a > b for a, b in zip(run, run[1:]))
    for (a, _), (b, kind) in zip(s.path, s.path[1:]):
        if kind == "move":
            assert b in neighbors(space, a)
            assert cost[b] == min(cost[n] for n in neighbors(space, a))


@given(tables)
def test_grid_completeness(table):
    space, costs = table
    h = Table(space, costs)
    s = grid_refinement_run(space, h, StopRule(-1.0))
    assert sorted(s.visit_order) == list(space.configs())
    assert s.best_cost == min(costs)
    assert s.stop_reason == "exhausted"


@given(tables, st.integers(0, 2**32), st.sampled_from(["rrhc", "random"]))
def test_determinism(table, seed, name):
    space, costs = table
    a = run_algorithm(name, space, Table(space, costs), StopRule(-1.0, 30), make_rng(seed))
    b = run_algorithm(name, space, Table(space, costs), StopRule(-1.0, 30), make_rng(seed))
    assert a.visit_order == b.visit_order and a.path == b.path and a.draws == b.draws


def test_exhaustive_minimum_first_attaining():
    h = Table(LINE, [2, 0, 1, 0, 3])
    assert exhaustive_minimum(LINE, h) == (0, (1,))
