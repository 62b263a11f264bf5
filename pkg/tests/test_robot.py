from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctlsearch.robot import (
    ControlPlan,
    RobotHeuristic,
    RobotState,
    heuristic_cost,
    integrate_arc,
    robot_control_space,
    rollout,
    sample_costs,
    start_pose,
    wrap_angle,
)
from ctlsearch.space import config_count, to_values
from ctlsearch.world import CorridorWorld, WorldParams, generate_world

STRAIGHT = CorridorWorld.straight(3.0, 0.2)
ZERO = ControlPlan((0.0, 0.0, 0.0, 0.0))
curvature = st.floats(-2.1, 2.1)
plans = st.tuples(curvature, curvature, curvature, curvature).map(ControlPlan)


def euler(pose: RobotState, kappa: float, length: float, step: float):
    n = int(round(length / step))
    th = pose.theta + kappa * step * np.arange(n)
    return pose.x + step * np.cos(th).sum(), pose.y + step * np.sin(th).sum(), pose.theta + kappa * length


def test_state_wraps_heading():
    assert RobotState(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)
    assert RobotState(0, 0, -math.pi).theta == math.pi
    assert -math.pi < wrap_angle(-7.0) <= math.pi


def test_plan_validation():
    with pytest.raises(ValueError):
        ControlPlan((0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        ControlPlan((0.0, 0.0, 0.0, 2.2))


def test_arc_fixtures():
    p = integrate_arc(RobotState(0, 0, 0), 0.0, 0.3)
    assert (p.x, p.y, p.theta) == (0.3, 0.0, 0.0)
    p = integrate_arc(RobotState(0, 0, 0), 2.1, 0.3)
    assert p.x == pytest.approx(math.sin(0.63) / 2.1, abs=1e-15)
    assert p.y == pytest.approx((1 - math.cos(0.63)) / 2.1, abs=1e-15)
    # closed form gives 0.2805451; a commonly quoted 0.280542 is off in the sixth decimal
    assert (p.x, p.y, p.theta) == pytest.approx((0.280545, 0.091415, 0.63), abs=1e-6)
    with pytest.raises(ValueError):
        integrate_arc(RobotState(0, 0, 0), 1.0, -0.1)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-3, 3), curvature)
def test_arc_composition(x, y, th, k):
    start = RobotState(x, y, th)
    once = integrate_arc(start, k, 0.3)
    twice = integrate_arc(integrate_arc(start, k, 0.15), k, 0.15)
    assert abs(once.x - twice.x) < 1e-12 and abs(once.y - twice.y) < 1e-12


@pytest.mark.parametrize("k", [-2.1, -0.7, 0.0, 1e-10, 1.3, 2.1])
@pytest.mark.parametrize("th", [0.0, 2.5])
def test_arc_matches_fine_euler(k, th):
    start = RobotState(0.2, -0.1, th)
    p = integrate_arc(start, k, 0.3)
    ex, ey, _ = euler(start, k, 0.3, 1e-6)
    assert math.hypot(p.x - ex, p.y - ey) < 1e-6


def test_rollout_shape():
    start = start_pose(STRAIGHT)
    plan = ControlPlan((0.5, -1.0, 2.1, -2.1))
    tr = rollout(start, plan, STRAIGHT)
    assert len(tr.samples) == 241
    assert tr.samples[-1].d_travel == pytest.approx(1.2)
    assert all(b.d_travel - a.d_travel == pytest.approx(0.005) for a, b in zip(tr.samples, tr.samples[1:]))
    pose = start
    for g, k in enumerate(plan.curvatures):
        pose = integrate_arc(pose, k, 0.3)
        smp = tr.samples[60 * (g + 1)].pose
        assert (smp.x, smp.y) == pytest.approx((pose.x, pose.y), abs=1e-12)


def test_zero_plan_clearances():
    tr = rollout(start_pose(STRAIGHT), ZERO, STRAIGHT)
    assert all(abs(s.clearance - 0.1) < 1e-12 for s in tr.samples)
    assert tr.truncated_at is None


def test_heuristic_fixtures():
    assert abs(heuristic_cost(STRAIGHT, start_pose(STRAIGHT), ZERO) - 0.001) < 1e-9
    assert abs(heuristic_cost(STRAIGHT, RobotState(0.5, 0.05, 0.0), ZERO) - 0.004) < 1e-9
    sliver = CorridorWorld.straight(3.0, 1e-12)
    assert abs(heuristic_cost(sliver, start_pose(sliver), ZERO) - 1000.0) < 1e-9


def test_heuristic_matches_kernel():
    world = generate_world(WorldParams.preset("thin"), 2)
    h = RobotHeuristic(world)
    space = robot_control_space("coarse")
    rng = np.random.default_rng(0)
    for _ in range(200):
        cfg = rng.integers(0, 9, 4)
        vals = to_values(space, cfg)
        assert h(vals) == heuristic_cost(world, h.start, ControlPlan(vals))


def test_control_space():
    coarse, fine = robot_control_space("coarse"), robot_control_space("fine")
    assert config_count(coarse) == 6561 and config_count(fine) == 1185921
    vals = [to_values(coarse, [i, 0, 0, 0])[0] for i in range(9)]
    assert vals == pytest.approx([-2.1 + 0.525 * i for i in range(9)], abs=1e-15)
    with pytest.raises(ValueError):
        robot_control_space("medium")


WORLDS = [generate_world(WorldParams.preset(k), s) for k in ("wide", "thin") for s in (0, 1)]


@given(st.sampled_from(WORLDS), plans)
def test_cost_bounds_and_running_min(world, plan):
    start = start_pose(world)
    tr = rollout(start, plan, world)
    costs = sample_costs(tr)
    cost = min(costs)
    assert cost >= 0
    if tr.truncated_at is None:
        # clearance never exceeds 0.075 m in the presets
        assert cost >= 0.001
    dmin = math.inf
    run = []
    for s in tr.samples:
        dmin = min(dmin, s.clearance)
        run.append(dmin)
    assert all(a >= b for a, b in zip(run, run[1:]))
    # once clearance hits zero every later sample is dominated by the clamp
    zero = next((i for i, s in enumerate(tr.samples) if s.clearance == 0), None)
    if zero is not None:
        assert all(c >= 1000 - 1.2 for c in costs[zero:])


def test_touching_wall_at_start_dominates():
    start = RobotState(0.5, 0.1, 0.0)  # on the wall of a 0.2 m corridor
    assert heuristic_cost(STRAIGHT, start, ZERO) >= 1000 - 1.2


def _mirror(world: CorridorWorld) -> CorridorWorld:
    return CorridorWorld(world.s, world.x, -world.y, -world.theta, -world.kappa, world.w,
                         world.params, world.seed)


@given(st.sampled_from(WORLDS), plans)
def test_mirror_symmetry(world, plan):
    start = start_pose(world)
    m = _mirror(world)
    mstart = RobotState(start.x, -start.y, -start.theta)
    mplan = ControlPlan(tuple(-k for k in plan.curvatures))
    assert abs(heuristic_cost(world, start, plan) - heuristic_cost(m, mstart, mplan)) < 1e-9


def test_out_of_extent_truncates():
    short = CorridorWorld.straight(0.8, 0.2)
    tr = rollout(start_pose(short), ZERO, short)
    assert tr.truncated_at is not None
    assert all(s.clearance == 0 for s in tr.samples[tr.truncated_at:])
    costs = sample_costs(tr)
    assert all(c >= 1000 - 1.2 for c in costs[tr.truncated_at:])
    assert heuristic_cost(short, start_pose(short), ZERO) == min(costs[: tr.truncated_at])
