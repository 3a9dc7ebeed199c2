"""Command-line entry point.

Subcommands mirror the experiment suite:

    staghunt analyze          equilibrium grid sweep -> analyze.csv
    staghunt matrix-selfplay  initial-probability sweep -> sweep.csv, sweep_cells.csv
    staghunt tournament       group tournament -> tournament.csv
    staghunt gridworld        grid-world comparison -> gridworld.csv

Every run writes a manifest.json recording the config hash, base seed and
package version so results can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    build_gridworld_spec,
    build_sweep_spec,
    build_tournament_spec,
    config_hash,
    load_config,
)
from .equilibrium import equilibrium_grid_rows
from .experiments import (
    TRACE_COLUMNS,
    gridworld_threshold_summary,
    make_matrix_agent,
    run_gridworld_comparison,
    run_gridworld_detail,
    run_match,
    run_sweep,
    run_tournament,
    sweep_cell_means,
    tournament_means,
)
from .game import PayoffMatrix

ANALYZE_COLUMNS = ("phi", "theta", "n_pure_ne", "unique_cc", "threshold_theta")


def _write_manifest(out_dir: Path, command: str, config: dict, seed: int, extra: dict | None = None):
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config_hash": config_hash(config),
        "base_seed": seed,
        "package_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)


def _write_rows(path: Path, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def _frange(lo: float, hi: float, step: float) -> list[float]:
    values = []
    k = 1
    v = lo
    while v <= hi + 1e-12:
        values.append(round(v, 10))
        v = lo + k * step
        k += 1
    return values


def cmd_analyze(args, config: dict) -> int:
    matrix = PayoffMatrix(h=args.h, c=args.c, m=args.m, g=args.g)
    phi_lo = args.phi_min if args.phi_min is not None else matrix.m + args.phi_step
    phi_hi = args.phi_max if args.phi_max is not None else matrix.h
    phi_grid = _frange(phi_lo, phi_hi, args.phi_step)
    theta_grid = _frange(args.theta_min, args.theta_max, args.theta_step)
    out_dir = Path(args.out)
    rows = list(equilibrium_grid_rows(matrix, phi_grid, theta_grid))
    _write_rows(out_dir / "analyze.csv", ANALYZE_COLUMNS, rows)
    _write_manifest(out_dir, "analyze", config, args.seed, {
        "matrix": matrix.as_dict(),
        "phi_grid": [phi_lo, phi_hi, args.phi_step],
        "theta_grid": [args.theta_min, args.theta_max, args.theta_step],
    })
    print(f"wrote {len(rows)} rows to {out_dir / 'analyze.csv'}")
    return 0


def cmd_matrix_selfplay(args, config: dict) -> int:
    overrides = {
        "iterations": args.iterations,
        "repetitions": args.repetitions,
        "variants": tuple(args.variants) if args.variants else None,
    }
    if args.grid_step is not None:
        n = round(1.0 / args.grid_step)
        overrides["probabilities"] = tuple(round(i * args.grid_step, 10) for i in range(n + 1))
    spec = build_sweep_spec(config, **overrides)
    if args.theta is not None:
        spec = replace(spec, agent_params=replace(spec.agent_params, theta=args.theta))

    out_dir = Path(args.out)
    result = run_sweep(spec, base_seed=args.seed, jobs=args.jobs)
    result.write_csv(out_dir / "sweep.csv")
    cells = sweep_cell_means(result)
    cell_rows = [
        (variant, p0, p1, mean)
        for (variant, p0, p1), mean in sorted(cells.items())
    ]
    _write_rows(out_dir / "sweep_cells.csv", ("variant", "p_init_0", "p_init_1", "mean_final_coop"), cell_rows)

    if args.trace_cell is not None:
        p0, p1 = args.trace_cell
        trace: list = []
        agents = (
            make_matrix_agent(spec.variants[0], spec.agent_params, p0),
            make_matrix_agent(spec.variants[0], spec.agent_params, p1),
        )
        run_match(agents, spec.matrix, spec.iterations, np.random.default_rng(args.seed), trace=trace)
        _write_rows(out_dir / "trace.csv", TRACE_COLUMNS, trace)

    _write_manifest(out_dir, "matrix-selfplay", config, args.seed, {"spec": result.meta["spec"]})
    print(f"wrote {len(result.rows)} rows to {out_dir / 'sweep.csv'}")
    return 0


def cmd_tournament(args, config: dict) -> int:
    overrides = {
        "rounds": args.rounds,
        "repetitions": args.repetitions,
        "group_sizes": tuple(args.sizes) if args.sizes else None,
        "compositions": tuple(args.compositions) if args.compositions else None,
    }
    spec = build_tournament_spec(config, **overrides)
    if args.theta is not None:
        spec = replace(spec, agent_params=replace(spec.agent_params, theta=args.theta))
    out_dir = Path(args.out)
    result = run_tournament(spec, base_seed=args.seed, jobs=args.jobs)
    result.write_csv(out_dir / "tournament.csv")
    means = tournament_means(result)
    _write_rows(
        out_dir / "tournament_means.csv",
        ("composition", "group_size", "mean_common_reward"),
        [(comp, size, mean) for (comp, size), mean in sorted(means.items())],
    )
    _write_manifest(out_dir, "tournament", config, args.seed, {"spec": result.meta["spec"]})
    print(f"wrote {len(result.rows)} rows to {out_dir / 'tournament.csv'}")
    return 0


def cmd_gridworld(args, config: dict) -> int:
    overrides = {
        "scenarios": tuple(args.scenario) if args.scenario else None,
        "variants": tuple(args.agent) if args.agent else None,
        "seeds": args.seeds,
        "iterations": args.iterations,
        "theta": args.theta,
    }
    spec = build_gridworld_spec(config, **overrides)
    out_dir = Path(args.out)
    result = run_gridworld_comparison(spec, base_seed=args.seed, jobs=args.jobs)
    result.write_csv(out_dir / "gridworld.csv")

    if args.detail is not None:
        from .gridworld import EPISODE_LOG_COLUMNS

        scenario, variant, seed_index = args.detail
        episode_log: list = []
        detail = run_gridworld_detail(
            spec, scenario, variant, int(seed_index),
            base_seed=args.seed, episode_log=episode_log,
        )
        detail.write_csv(out_dir / "gridworld_detail.csv")
        _write_rows(
            out_dir / "gridworld_episodes.csv",
            ("iteration", *EPISODE_LOG_COLUMNS),
            episode_log,
        )
    summary = gridworld_threshold_summary(result)
    _write_rows(
        out_dir / "gridworld_summary.csv",
        ("scenario", "variant", "median_iterations_to_threshold", "n_reached", "n_runs"),
        [
            (scenario, variant, s["median_iterations"], s["n_reached"], s["n_runs"])
            for (scenario, variant), s in sorted(summary.items())
        ],
    )
    _write_manifest(out_dir, "gridworld", config, args.seed, {"spec": result.meta["spec"]})
    print(f"wrote {len(result.rows)} rows to {out_dir / 'gridworld.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="staghunt", description=__doc__)
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="equilibrium grid analysis")
    p.add_argument("--h", type=float, default=40.0)
    p.add_argument("--c", type=float, default=30.0)
    p.add_argument("--m", type=float, default=20.0)
    p.add_argument("--g", type=float, default=0.0)
    p.add_argument("--phi-min", type=float, default=None, help="default: m + phi-step")
    p.add_argument("--phi-max", type=float, default=None, help="default: h")
    p.add_argument("--phi-step", type=float, default=0.05)
    p.add_argument("--theta-min", type=float, default=0.05)
    p.add_argument("--theta-max", type=float, default=50.0)
    p.add_argument("--theta-step", type=float, default=0.05)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("matrix-selfplay", help="initial-probability self-play sweep")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--repetitions", type=int, default=None)
    p.add_argument("--grid-step", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--variants", nargs="+", default=None)
    p.add_argument("--trace-cell", nargs=2, type=float, default=None, metavar=("P0", "P1"),
                   help="also write a per-iteration trace for one match at this cell")
    p.set_defaults(func=cmd_matrix_selfplay)

    p = sub.add_parser("tournament", help="randomly matched group tournament")
    p.add_argument("--sizes", nargs="+", type=int, default=None)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--repetitions", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--compositions", nargs="+", default=None)
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("gridworld", help="grid-world agent comparison")
    p.add_argument("--scenario", nargs="+", default=None, choices=["near-stag", "near-hares"])
    p.add_argument("--agent", nargs="+", default=None,
                   choices=["individual", "inequity", "ga-no-tom", "tomaga"])
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--detail", nargs=3, default=None, metavar=("SCENARIO", "VARIANT", "SEED"),
                   help="also log one run per-iteration (beliefs, shaping, labels) "
                        "plus its episode transition logs")
    p.set_defaults(func=cmd_gridworld)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config)
    return args.func(args, config)


if __name__ == "__main__":
    raise SystemExit(main())
