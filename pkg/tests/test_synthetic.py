from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctlsearch import _backend
from ctlsearch.search import exhaustive_minimum
from ctlsearch.space import ControlSpace, make_rng, to_values
from ctlsearch.synthetic import SyntheticHeuristic, make_synthetic


def test_zero_at_center():
    h = SyntheticHeuristic((0.3, 0.7, 0.1), 6.0)
    assert h([0.3, 0.7, 0.1]) == 0.0


def test_fixtures():
    h = SyntheticHeuristic((0.5,), 6.0)
    assert h([0.5 - 1 / 6]) == pytest.approx(0.05, abs=1e-12)
    assert h([0.25]) == pytest.approx(2.1125, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("f", [2.0, 6.0, 12.0])
def test_local_minimum_ladder(k, f):
    h = SyntheticHeuristic((0.5, 0.5), f)
    assert abs(h([0.5 + k / f, 0.5]) - 0.05 * k * k) < 1e-9


def test_rejects_bad_frequency_and_length():
    with pytest.raises(ValueError):
        SyntheticHeuristic((0.5,), 0.0)
    with pytest.raises(ValueError):
        SyntheticHeuristic((0.5,), 1.0)([0.1, 0.2])


@given(
    st.lists(st.floats(0, 1), min_size=1, max_size=5).flatmap(
        lambda d: st.tuples(
            st.just(d),
            st.lists(st.floats(-1, 1), min_size=len(d), max_size=len(d)),
            st.floats(0.5, 20),
        )
    )
)
def test_separable_symmetric_nonnegative(args):
    d, x, f = args
    h = SyntheticHeuristic(tuple(d), f)
    plus = [a + b for a, b in zip(d, x)]
    minus = [a - b for a, b in zip(d, x)]
    v = h(plus)
    assert v >= 0
    assert math.isclose(v, sum(h.term(j, c) for j, c in enumerate(plus)), rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(v, h(minus), rel_tol=1e-9, abs_tol=1e-12)


def test_backends_agree_on_cost():
    from ctlsearch import _pure

    impls = [_pure] + ([_backend.get("compiled")] if _backend.COMPILED else [])
    for impl in impls:
        assert impl.synthetic_cost((0.5,), 6.0, [0.25]) == _pure.synthetic_cost((0.5,), 6.0, [0.25])


def test_make_synthetic_on_grid_and_deterministic():
    space = ControlSpace.uniform(1, 3)
    grid = {to_values(space, [i])[0] for i in range(9)}
    for seed in range(1000):
        h = make_synthetic(space, 6.0, make_rng(seed))
        assert h.center[0] in grid
        assert h(list(h.center)) == 0.0
    s3 = ControlSpace.uniform(3, 5)
    assert make_synthetic(s3, 6.0, make_rng(42)) == make_synthetic(s3, 6.0, make_rng(42))


@pytest.mark.parametrize("n_dim,n_div,f", [(1, 6, 6.0), (2, 4, 6.0), (3, 3, 12.0), (2, 5, 2.0)])
def test_unique_global_minimum(n_dim, n_div, f):
    space = ControlSpace.uniform(n_dim, n_div)
    for seed in range(3):
        h = make_synthetic(space, f, make_rng(seed))
        zeros = [c for c in space.configs() if h(to_values(space, c)) < 1e-12]
        assert len(zeros) == 1
        assert to_values(space, zeros[0]) == list(h.center)
        assert exhaustive_minimum(space, h) == (0.0, zeros[0])
