"""Quadratic bowl with a superimposed cosine wave.

Per dimension the cost is ``0.05 f^2 x^2 - cos(2 pi f x) + 1`` with
``x = d - c``. The bowl gives a single zero at ``d``; the wave adds local
minima near offsets ``k/f`` costing about ``0.05 k^2``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ctlsearch import _backend
from ctlsearch.space import ControlSpace, random_config, to_values


@dataclass(frozen=True)
class SyntheticHeuristic:
    center: tuple[float, ...]
    f: float

    def __post_init__(self):
        if not self.f > 0:
            raise ValueError(f"frequency must be positive, got {self.f}")
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))

    @property
    def n_dim(self) -> int:
        return len(self.center)

    def __call__(self, values: Sequence[float]) -> float:
        if len(values) != self.n_dim:
            raise ValueError(f"expected {self.n_dim} values, got {len(values)}")
        return _backend.impl.synthetic_cost(self.center, self.f, [float(v) for v in values])

    def kernel(self, impl):
        return impl.SyntheticKernel(self.center, self.f)

    def term(self, j: int, value: float) -> float:
        """Contribution of dimension ``j`` alone."""
        return _backend.impl.synthetic_cost((self.center[j],), self.f, [float(value)])

    def fingerprint(self) -> str:
        data = np.asarray(self.center + (self.f,), dtype="<f8").tobytes()
        return hashlib.sha256(data).hexdigest()[:16]


def make_synthetic(space: ControlSpace, f: float, rng) -> SyntheticHeuristic:
    """Center drawn uniformly from the grid, so a zero-cost configuration is reachable."""
    cfg = random_config(space, rng)
    return SyntheticHeuristic(tuple(to_values(space, cfg)), f)
