"""Discretized hyper-rectangular control spaces."""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ctlsearch import _backend

GridConfig = tuple[int, ...]

# seed-derivation tags: every stochastic consumer of a trial seed gets its own stream
TAG_INSTANCE = 0
ALGORITHM_TAGS = {"rrhc": 1, "grid": 2, "random": 3}


class ConfigOverflowError(OverflowError):
    """Configuration count does not fit a signed 64-bit integer."""


@dataclass(frozen=True)
class ControlSpace:
    """``n_dim`` dimensions, each split into ``2**n_div`` divisions over ``bounds``."""

    n_dim: int
    n_div: int
    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.n_dim < 1 or self.n_div < 1:
            raise ValueError(f"n_dim and n_div must be >= 1 (got {self.n_dim}, {self.n_div})")
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if len(bounds) != self.n_dim:
            raise ValueError(f"expected {self.n_dim} bound pairs, got {len(bounds)}")
        for lo, hi in bounds:
            if not lo < hi:
                raise ValueError(f"bounds must satisfy lo < hi, got ({lo}, {hi})")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def uniform(cls, n_dim: int, n_div: int, lo: float = 0.0, hi: float = 1.0) -> "ControlSpace":
        return cls(n_dim, n_div, ((lo, hi),) * n_dim)

    @property
    def divisions(self) -> int:
        return 1 << self.n_div

    @property
    def points_per_dim(self) -> int:
        return self.divisions + 1

    @property
    def lo(self) -> list[float]:
        return [b[0] for b in self.bounds]

    @property
    def hi(self) -> list[float]:
        return [b[1] for b in self.bounds]

    def validate(self, cfg: Sequence[int]) -> GridConfig:
        cfg = tuple(int(i) for i in cfg)
        if len(cfg) != self.n_dim:
            raise ValueError(f"config has {len(cfg)} indices, space has {self.n_dim} dimensions")
        for i in cfg:
            if not 0 <= i <= self.divisions:
                raise ValueError(f"index {i} outside [0, {self.divisions}]")
        return cfg

    def to_flat(self, cfg: Sequence[int]) -> int:
        flat = 0
        for i in self.validate(cfg):
            flat = flat * self.points_per_dim + i
        return flat

    def from_flat(self, flat: int) -> GridConfig:
        m = self.points_per_dim
        out = [0] * self.n_dim
        for j in range(self.n_dim - 1, -1, -1):
            out[j] = flat % m
            flat //= m
        return tuple(out)

    def configs(self) -> Iterator[GridConfig]:
        """All configurations, lexicographic (dimension 0 slowest)."""
        return itertools.product(range(self.points_per_dim), repeat=self.n_dim)


def config_count(space: ControlSpace) -> int:
    """(2**n_div + 1) ** n_dim; raises ConfigOverflowError past int64."""
    n = space.points_per_dim**space.n_dim
    if n > sys.maxsize:
        raise ConfigOverflowError(
            f"{space.points_per_dim}^{space.n_dim} configurations exceed the 64-bit range"
        )
    return n


def to_values(space: ControlSpace, cfg: Sequence[int]) -> list[float]:
    cfg = space.validate(cfg)
    scale = space.divisions
    out = []
    for (lo, hi), idx in zip(space.bounds, cfg):
        # endpoints exact; affine form avoids drift from cumulative stepping
        out.append(hi if idx == scale else lo + (hi - lo) * idx / scale)
    return out


def neighbors(space: ControlSpace, cfg: Sequence[int]) -> list[GridConfig]:
    """Axis-aligned neighbors: dimension 0 first, -1 before +1, clipped at the boundary."""
    cfg = space.validate(cfg)
    out = []
    for j, idx in enumerate(cfg):
        if idx > 0:
            out.append(cfg[:j] + (idx - 1,) + cfg[j + 1 :])
        if idx < space.divisions:
            out.append(cfg[:j] + (idx + 1,) + cfg[j + 1 :])
    return out


def make_rng(seed: int, tag: int = TAG_INSTANCE) -> np.random.PCG64:
    """Independent PCG64 stream for (seed, tag)."""
    return np.random.PCG64(np.random.SeedSequence([int(seed) & ((1 << 64) - 1), int(tag)]))


def _bitgen(rng) -> np.random.BitGenerator:
    return rng.bit_generator if isinstance(rng, np.random.Generator) else rng


def random_config(space: ControlSpace, rng) -> GridConfig:
    """Uniform over all configurations; one bounded draw per dimension, dimension 0 first."""
    flat = _backend.impl.random_flat(_bitgen(rng), space.n_dim, space.points_per_dim)
    return space.from_flat(flat)


def default_max_cycles(space: ControlSpace) -> int:
    return min(10 * config_count(space), 10**8)


__all__ = [
    "ControlSpace",
    "GridConfig",
    "ConfigOverflowError",
    "config_count",
    "to_values",
    "neighbors",
    "random_config",
    "make_rng",
    "default_max_cycles",
    "TAG_INSTANCE",
    "ALGORITHM_TAGS",
]
