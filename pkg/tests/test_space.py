from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctlsearch.space import (
    ConfigOverflowError,
    ControlSpace,
    config_count,
    make_rng,
    neighbors,
    random_config,
    to_values,
)


@pytest.mark.parametrize(
    "n_dim,n_div,expected", [(4, 3, 6561), (4, 5, 1185921), (1, 1, 3)]
)
def test_config_count(n_dim, n_div, expected):
    assert config_count(ControlSpace.uniform(n_dim, n_div)) == expected


def test_config_count_overflow():
    with pytest.raises(ConfigOverflowError):
        config_count(ControlSpace.uniform(64, 8))


@pytest.mark.parametrize("bad", [(0, 3), (2, 0)])
def test_space_rejects_bad_shape(bad):
    with pytest.raises(ValueError):
        ControlSpace.uniform(*bad)


def test_space_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        ControlSpace(1, 2, ((1.0, 1.0),))


@pytest.mark.parametrize("idx,value", [(0, -2.1), (8, 2.1), (4, 0.0)])
def test_to_values_fixtures(idx, value):
    space = ControlSpace.uniform(1, 3, -2.1, 2.1)
    assert to_values(space, [idx]) == [value]


def test_to_values_rejects_out_of_range():
    space = ControlSpace.uniform(2, 2)
    with pytest.raises(ValueError):
        to_values(space, [0, 5])
    with pytest.raises(ValueError):
        to_values(space, [0])


def test_neighbor_fixtures():
    s2 = ControlSpace.uniform(2, 2)
    assert neighbors(s2, [2, 2]) == [(1, 2), (3, 2), (2, 1), (2, 3)]
    assert neighbors(s2, [0, 0]) == [(1, 0), (0, 1)]
    assert neighbors(ControlSpace.uniform(1, 2), [3]) == [(2,), (4,)]


spaces = st.builds(
    ControlSpace.uniform,
    st.integers(1, 4),
    st.integers(1, 3),
    st.floats(-5, 0, allow_nan=False),
    st.floats(0.5, 5, allow_nan=False),
)


@given(spaces, st.data())
def test_neighbor_properties(space, data):
    m = space.points_per_dim
    cfg = tuple(data.draw(st.integers(0, m - 1)) for _ in range(space.n_dim))
    nb = neighbors(space, cfg)
    assert space.n_dim <= len(nb) <= 2 * space.n_dim
    for b in nb:
        diff = [abs(x - y) for x, y in zip(cfg, b)]
        assert sorted(diff)[-1] == 1 and sum(diff) == 1
        assert cfg in neighbors(space, b)


@given(spaces)
def test_endpoints_exact(space):
    top = [space.divisions] * space.n_dim
    assert to_values(space, [0] * space.n_dim) == space.lo
    assert to_values(space, top) == space.hi


@given(st.integers(1, 3), st.integers(1, 3))
def test_count_matches_enumeration(n_dim, n_div):
    space = ControlSpace.uniform(n_dim, n_div)
    configs = list(space.configs())
    assert len(configs) == config_count(space)
    # flat index follows lexicographic order
    assert [space.to_flat(c) for c in configs] == list(range(len(configs)))
    assert all(space.from_flat(space.to_flat(c)) == c for c in configs)


def test_random_config_range_and_determinism():
    space = ControlSpace.uniform(1, 1)
    for seed in range(20):
        assert random_config(space, make_rng(seed))[0] in (0, 1, 2)
    s3 = ControlSpace.uniform(3, 4)
    assert random_config(s3, make_rng(99)) == random_config(s3, make_rng(99))
    assert random_config(s3, np.random.Generator(make_rng(99))) == random_config(s3, make_rng(99))


def test_random_config_uniform(backend):
    from ctlsearch import _backend as be

    space = ControlSpace.uniform(1, 1)
    impl = be.get(backend)
    bg = make_rng(12345)
    counts = [0, 0, 0]
    for _ in range(30000):
        counts[impl.random_flat(bg, 1, 3)] += 1
    assert all(9000 <= c <= 11000 for c in counts), counts


def test_random_config_covers_multidim():
    space = ControlSpace.uniform(2, 1)
    rng = make_rng(5)
    seen = {random_config(space, rng) for _ in range(400)}
    assert seen == set(itertools.product(range(3), repeat=2))
