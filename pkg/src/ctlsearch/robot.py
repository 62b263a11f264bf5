"""Point-robot rollouts through corridor worlds and the travel/clearance cost.

A plan is a sequence of constant-curvature arcs, one per control
dimension, each ``segment_length`` metres long. The cost rewards distance
travelled and penalizes the running minimum clearance; the smallest value
along the rollout is returned.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

from ctlsearch import _backend
from ctlsearch._pure import D_OBS_FLOOR
from ctlsearch.space import ControlSpace
from ctlsearch.world import MAX_CURVATURE, CorridorWorld, OutOfExtentError

SEGMENT_LENGTH = 0.3
N_SEGMENTS = 4
DS_SIM = 0.005
START_S = 0.5
PRECISIONS = {"coarse": 3, "fine": 5}


def wrap_angle(theta: float) -> float:
    """Map to (-pi, pi]."""
    t = math.remainder(theta, 2.0 * math.pi)
    return math.pi if t == -math.pi else t


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))


@dataclass(frozen=True)
class ControlPlan:
    curvatures: tuple[float, ...]
    segment_length: float = SEGMENT_LENGTH

    def __post_init__(self):
        curv = tuple(float(k) for k in self.curvatures)
        if len(curv) != N_SEGMENTS:
            raise ValueError(f"plan needs {N_SEGMENTS} curvatures, got {len(curv)}")
        for k in curv:
            if abs(k) > MAX_CURVATURE:
                raise ValueError(f"curvature {k} exceeds +/-{MAX_CURVATURE} rad/m")
        object.__setattr__(self, "curvatures", curv)


@dataclass(frozen=True)
class RolloutSample:
    d_travel: float
    pose: RobotState
    clearance: float


@dataclass(frozen=True)
class RolloutTrace:
    samples: tuple[RolloutSample, ...]
    truncated_at: int | None = None  # first sample index beyond the corridor ends


def integrate_arc(pose: RobotState, kappa: float, ds: float) -> RobotState:
    if ds < 0:
        raise ValueError("ds must be non-negative")
    return RobotState(*_backend.impl.integrate_arc(pose.x, pose.y, pose.theta, float(kappa), float(ds)))


def start_pose(world: CorridorWorld, s: float = START_S) -> RobotState:
    """On the centerline at arc length ``s``, facing along the local tangent."""
    i = world.sample_index(s)
    return RobotState(float(world.x[i]), float(world.y[i]), float(world.theta[i]))


def rollout(start: RobotState, plan: ControlPlan, world: CorridorWorld) -> RolloutTrace:
    impl = _backend.impl
    steps = int(round(plan.segment_length / DS_SIM))
    arrays = world.kernel_arrays()
    # raw (unwrapped) headings keep positions identical to the compiled kernel
    seg = [(start.x, start.y, start.theta)]
    for g, kappa in enumerate(plan.curvatures):
        seg.append(impl.integrate_arc(*seg[g], kappa, steps * DS_SIM))
    samples = []
    truncated_at = None
    for k in range(len(plan.curvatures) * steps + 1):
        if k == 0:
            x, y, th = seg[0]
        else:
            g = (k - 1) // steps
            x, y, th = impl.integrate_arc(*seg[g], plan.curvatures[g], (k - g * steps) * DS_SIM)
        if truncated_at is None:
            c = impl.clearance_raw(*arrays, x, y)
            if c < 0:
                truncated_at = k
                c = 0.0
        else:
            c = 0.0
        samples.append(RolloutSample(k * DS_SIM, RobotState(x, y, th), c))
    return RolloutTrace(tuple(samples), truncated_at)


def sample_costs(trace: RolloutTrace, n_dim: int = N_SEGMENTS) -> list[float]:
    """Per-sample cost with the running, floored minimum clearance."""
    dmin = math.inf
    out = []
    for smp in trace.samples:
        dmin = min(dmin, smp.clearance)
        r = 0.01 / max(dmin, D_OBS_FLOOR)
        out.append((0.3 * n_dim - smp.d_travel) + 0.1 * r * r)
    return out


def heuristic_cost(world: CorridorWorld, start: RobotState, plan: ControlPlan) -> float:
    return min(sample_costs(rollout(start, plan, world), len(plan.curvatures)))


def robot_control_space(precision: str) -> ControlSpace:
    try:
        n_div = PRECISIONS[precision]
    except KeyError:
        raise ValueError(f"precision must be coarse or fine, got {precision!r}") from None
    return ControlSpace.uniform(N_SEGMENTS, n_div, -MAX_CURVATURE, MAX_CURVATURE)


class RobotHeuristic:
    """Cost of a curvature vector for a fixed world and start pose."""

    def __init__(self, world: CorridorWorld, start: RobotState | None = None):
        self.world = world
        self.start = start_pose(world) if start is None else start
        self._kernels = {}

    def kernel(self, impl):
        k = self._kernels.get(impl.__name__)
        if k is None:
            x, y, ct, st, w, ds = self.world.kernel_arrays()
            k = impl.RobotKernel(x, y, ct, st, w, ds, (self.start.x, self.start.y, self.start.theta),
                                 N_SEGMENTS, SEGMENT_LENGTH, DS_SIM)
            if hasattr(k, "set_candidate_grid"):
                k.set_candidate_grid(*self.world.candidate_grid())
            self._kernels[impl.__name__] = k
        return k

    def __call__(self, values: Sequence[float]) -> float:
        return float(self.kernel(_backend.impl)([float(v) for v in values]))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for arr in self.world.kernel_arrays()[:5]:
            h.update(arr.tobytes())
        h.update(repr((self.start.x, self.start.y, self.start.theta)).encode())
        return h.hexdigest()[:16]


__all__ = [
    "ControlPlan",
    "OutOfExtentError",
    "RobotHeuristic",
    "RobotState",
    "RolloutTrace",
    "heuristic_cost",
    "integrate_arc",
    "robot_control_space",
    "rollout",
    "start_pose",
]
