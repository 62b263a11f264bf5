"""Command-line entry point: ``ctlsearch {synthetic,robot,world,eval}``."""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from ctlsearch import _backend
from ctlsearch.harness import (
    BENCH_MIN,
    SWEEPS,
    CampaignSpec,
    average_cost_curve,
    emit_chart,
    emit_csv,
    run_campaign,
)
from ctlsearch.robot import PRECISIONS, RobotHeuristic, robot_control_space, start_pose
from ctlsearch.search import ALGORITHMS, ConfigurationError
from ctlsearch.space import TAG_INSTANCE, ControlSpace, make_rng, to_values
from ctlsearch.synthetic import make_synthetic
from ctlsearch.world import WorldFormatError, WorldParams, generate_world, load_world, save_world

OUT_ENV = "CTLSEARCH_OUT"
EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one-line diagnostic, then usage, exit 2
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        self.print_usage(sys.stderr)
        sys.exit(EXIT_USAGE)


def _csv_list(kind):
    def parse(text: str):
        items = [t.strip() for t in text.split(",") if t.strip()]
        try:
            return [kind(t) for t in items]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def _benchmark(text: str):
    return text if text == BENCH_MIN else float(text)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _default_out() -> str:
    return os.environ.get(OUT_ENV, "results")


def _add_campaign_flags(p: argparse.ArgumentParser, bench_help: str) -> None:
    p.add_argument("--seed", type=int, default=0,
                   help="base seed (integer); trial t uses seed+t (default: %(default)s)")
    p.add_argument("--trials", type=_positive_int, default=5,
                   help="trials per sweep value and algorithm (count, default: %(default)s)")
    p.add_argument("--algorithms", type=_csv_list(str), default=list(ALGORITHMS),
                   help="comma list from rrhc,grid,random (default: all three)")
    p.add_argument("--benchmarks", type=_csv_list(_benchmark), default=None, help=bench_help)
    p.add_argument("--max-cycles", type=_positive_int, default=None,
                   help="cycle cap per search (heuristic evaluations; default: 10x config count, "
                        "capped at 1e8, or --cycles when no benchmark is set)")
    p.add_argument("--out", default=None,
                   help=f"output directory, created if absent (default: ${OUT_ENV} or 'results')")
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1,
                   help="worker processes (count, default: CPU count = %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctlsearch", description="Discrete control-space search experiments.")
    sub = parser.add_subparsers(dest="command", metavar="{synthetic,robot,world,eval}",
                                parser_class=_Parser)
    sub.required = True

    syn = sub.add_parser("synthetic", help="synthetic-heuristic parameter sweeps",
                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_campaign_flags(syn, "comma list of cost thresholds (cost units) or 'min' "
                             "(default: 0.0,0.05)")
    syn.add_argument("--sweep", choices=sorted(SWEEPS), default="dim",
                     help="swept parameter: dim (control dimensions), precision (n_div, "
                          "2^n_div divisions per dimension) or complexity (wave frequency f)")
    syn.add_argument("--values", type=_csv_list(float), default=None,
                     help="comma list of sweep values (default: dim 1-4, precision 2-8, "
                          "complexity 2,4,...,12)")
    syn.add_argument("--n-dim", type=_positive_int, default=3,
                     help="control dimensions when not swept (count)")
    syn.add_argument("--n-div", type=_positive_int, default=6,
                     help="precision when not swept (2^n_div divisions per dimension)")
    syn.add_argument("--f", type=float, default=6.0,
                     help="wave frequency when not swept (cycles per unit control range)")

    rob = sub.add_parser("robot", help="corridor-following robot scenario",
                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_campaign_flags(rob, "comma list of cost thresholds (cost units) or 'min' for the "
                             "per-trial exhaustive minimum (default: min for coarse, none for fine)")
    rob.add_argument("--kind", choices=("wide", "thin"), default="wide",
                     help="corridor preset (width 0.05-0.15 m or 0.01-0.15 m)")
    rob.add_argument("--precision", choices=sorted(PRECISIONS), default="coarse",
                     help="control precision: coarse 9 or fine 33 curvatures per segment")
    rob.add_argument("--cycles", type=_positive_int, default=5000,
                     help="horizon of the mean cost curve (search cycles)")

    wld = sub.add_parser("world", help="generate, save or validate a corridor world",
                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    wld.add_argument("--kind", choices=("wide", "thin"), default="wide", help="corridor preset")
    wld.add_argument("--seed", type=int, default=0, help="world seed (integer)")
    wld.add_argument("--out", default=None,
                     help=f"output directory (default: ${OUT_ENV} or 'results')")
    wld.add_argument("--validate", metavar="FILE", default=None,
                     help="load and check an existing world file instead of generating one")

    ev = sub.add_parser("eval", help="print one heuristic evaluation (debug aid)",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ev.add_argument("config", type=int, nargs="+", help="grid indices, one per dimension")
    ev.add_argument("--scenario", choices=("synthetic", "robot"), default="synthetic",
                    help="which heuristic to evaluate")
    ev.add_argument("--seed", type=int, default=0, help="instance seed (integer)")
    ev.add_argument("--n-div", type=_positive_int, default=6,
                    help="synthetic precision (2^n_div divisions per dimension)")
    ev.add_argument("--f", type=float, default=6.0, help="synthetic wave frequency")
    ev.add_argument("--kind", choices=("wide", "thin"), default="wide", help="robot corridor preset")
    ev.add_argument("--precision", choices=sorted(PRECISIONS), default="coarse",
                    help="robot control precision")
    ev.add_argument("--world", metavar="FILE", default=None,
                    help="robot world file (default: generate from --kind/--seed)")
    return parser


def _out_dir(arg: str | None) -> Path:
    out = Path(arg if arg is not None else _default_out())
    out.mkdir(parents=True, exist_ok=True)
    return out


def _bench_label(b) -> str:
    return b if isinstance(b, str) else f"{b:g}"


def _summary(rows) -> None:
    for r in rows:
        mean = "censored" if r.mean_cycles is None else f"{r.mean_cycles:.1f}"
        print(f"  {r.sweep_param}={r.sweep_value} {r.algorithm:<6} bench={_bench_label(r.benchmark):<5} "
              f"mean_cycles={mean} censored={r.censored}/{r.trials}")


def cmd_synthetic(args) -> int:
    spec = CampaignSpec(
        scenario="synthetic",
        algorithms=tuple(args.algorithms),
        trials=args.trials,
        benchmarks=tuple(args.benchmarks) if args.benchmarks is not None else (0.0, 0.05),
        sweep_param=args.sweep,
        sweep_values=tuple(args.values or ()),
        n_dim=args.n_dim,
        n_div=args.n_div,
        f=args.f,
        base_seed=args.seed,
        max_cycles=args.max_cycles,
        jobs=args.jobs,
    )
    spec.validate()
    out = _out_dir(args.out)
    t0 = time.perf_counter()
    records, rows = run_campaign(spec)
    emit_csv(rows, out / "aggregates.csv")
    emit_csv(records, out / "trials.csv")
    for b in spec.benchmarks:
        sel = [r for r in rows if r.benchmark == b and r.normalized_mean is not None]
        if sel:
            emit_chart(sel, out / f"chart_{args.sweep}_bench_{_bench_label(b)}.svg",
                       title=f"{args.sweep} sweep, benchmark {_bench_label(b)}", benchmark=b)
    print(f"synthetic {args.sweep} sweep: {len(records)} searches in {time.perf_counter() - t0:.1f} s "
          f"[{_backend.NAME}] -> {out}")
    _summary(rows)
    return EXIT_OK


def cmd_robot(args) -> int:
    if args.benchmarks is not None:
        benchmarks = tuple(args.benchmarks)
    else:
        benchmarks = (BENCH_MIN,) if args.precision == "coarse" else ()
    spec = CampaignSpec(
        scenario="robot",
        algorithms=tuple(args.algorithms),
        trials=args.trials,
        benchmarks=benchmarks,
        kind=args.kind,
        precision=args.precision,
        base_seed=args.seed,
        max_cycles=args.max_cycles,
        horizon=args.cycles,
        jobs=args.jobs,
    )
    spec.validate()
    out = _out_dir(args.out)
    t0 = time.perf_counter()
    records, rows = run_campaign(spec)
    curves = {
        alg: average_cost_curve([r for r in records if r.algorithm == alg], args.cycles)
        for alg in spec.algorithms
    }
    emit_csv(rows, out / "aggregates.csv")
    emit_csv(curves, out / "curves.csv")
    emit_csv(records, out / "trials.csv")
    emit_chart(curves, out / "chart.svg", title=f"{args.kind} corridor, {args.precision} control")
    print(f"robot {args.kind}/{args.precision}: {len(records)} searches in "
          f"{time.perf_counter() - t0:.1f} s [{_backend.NAME}] -> {out}")
    _summary(rows)
    for alg, curve in curves.items():
        print(f"  {alg:<6} mean best cost at cycle {curve[-1][0]}: {curve[-1][1]:.6f}")
    return EXIT_OK


def cmd_world(args) -> int:
    if args.validate:
        world = load_world(args.validate)
        print(f"{args.validate}: valid {world.params.kind} world, seed {world.seed}, "
              f"{world.n_samples} samples, width {world.w.min():.4f}-{world.w.max():.4f} m")
        return EXIT_OK
    world = generate_world(WorldParams.preset(args.kind), args.seed)
    out = _out_dir(args.out) / f"world_{args.kind}_{args.seed}.txt"
    save_world(world, out)
    print(f"wrote {out}: {world.n_samples} samples, width {world.w.min():.4f}-{world.w.max():.4f} m, "
          f"end ({world.x[-1]:.3f}, {world.y[-1]:.3f}) m")
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.scenario == "synthetic":
        space = ControlSpace.uniform(len(args.config), args.n_div)
        h = make_synthetic(space, args.f, make_rng(args.seed, TAG_INSTANCE))
    else:
        space = robot_control_space(args.precision)
        world = load_world(args.world) if args.world else generate_world(WorldParams.preset(args.kind), args.seed)
        h = RobotHeuristic(world, start_pose(world))
    try:
        cfg = space.validate(args.config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    values = to_values(space, cfg)
    print(f"config {list(cfg)} values {[round(v, 9) for v in values]} cost {h(values):.9f}")
    return EXIT_OK


COMMANDS = {"synthetic": cmd_synthetic, "robot": cmd_robot, "world": cmd_world, "eval": cmd_eval}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, UsageError) as exc:
        sys.stderr.write(f"ctlsearch {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (OSError, WorldFormatError, ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"ctlsearch {args.command}: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
