"""Discrete control-space search: random-restart hill climbing versus grid
refinement and random search, on a synthetic heuristic and a corridor robot."""
from __future__ import annotations

from ctlsearch._backend import COMPILED, NAME as BACKEND
from ctlsearch.harness import (
    AggregateRow,
    CampaignSpec,
    TrialRecord,
    average_cost_curve,
    emit_chart,
    emit_csv,
    run_campaign,
)
from ctlsearch.robot import (
    ControlPlan,
    RobotHeuristic,
    RobotState,
    heuristic_cost,
    integrate_arc,
    robot_control_space,
    rollout,
    start_pose,
)
from ctlsearch.search import (
    ALGORITHMS,
    ConfigurationError,
    SearchSession,
    StopRule,
    exhaustive_minimum,
    grid_refinement_run,
    random_search_run,
    rrhc_run,
    run_algorithm,
)
from ctlsearch.space import (
    ControlSpace,
    config_count,
    make_rng,
    neighbors,
    random_config,
    to_values,
)
from ctlsearch.synthetic import SyntheticHeuristic, make_synthetic
from ctlsearch.world import (
    CorridorWorld,
    OutOfExtentError,
    WorldParams,
    clearance,
    generate_world,
    load_world,
    save_world,
)

__version__ = "0.1.0"
