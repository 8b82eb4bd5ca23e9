"""Command line interface for the simulator.

Subcommands cover the pipeline stages: ``cluster`` writes a client to
cluster assignment, ``schedule`` writes a schedule export, ``simulate``
runs one full pipeline into an output directory, and ``compare`` sweeps
all clustering methods over many seeds. Outputs are deterministic and
written atomically; reruns with the same inputs produce byte-identical
files. Exit codes: 0 on success, 1 on validation or feasibility
errors, 2 on configuration or usage errors. Errors are reported as a
single JSON line on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .dag import validate_and_layer
from .errors import CodaFlError, ConfigError
from .experiment import (
    CLUSTERERS,
    POLICIES,
    cluster_clients,
    compare_baselines,
    generate_scenario,
    run_pipeline,
)
from .reporting import (
    plot_accuracy_curves,
    plot_layer_times,
    plot_makespan_bars,
    write_assignment_csv,
    write_compare_rows_csv,
    write_compare_summary_csv,
    write_curves_csv,
    write_run_json,
    write_schedule_json,
)

_THREADS_ENV = "CODA_SIM_THREADS"


def _load_config(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        with open(path, encoding="utf-8") as handle:
            config = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"scenario file {path!r} must hold a JSON object")
    return config


def _max_workers() -> int:
    raw = os.environ.get(_THREADS_ENV)
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{_THREADS_ENV} must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise ConfigError(f"{_THREADS_ENV} must be >= 1, got {workers}")
    return workers


def _cmd_cluster(args: argparse.Namespace) -> int:
    scenario = generate_scenario(_load_config(args.scenario), seed=args.seed)
    assignment = cluster_clients(scenario, args.method)
    write_assignment_csv(args.out, assignment)
    sizes = ",".join(str(int(s)) for s in assignment.sizes())
    print(f"wrote {args.out} ({assignment.n_clusters} clusters, sizes {sizes})")
    return 0


def _cmd_schedule(args: argparse.Namespace) -> int:
    scenario = generate_scenario(_load_config(args.scenario), seed=args.seed)
    result = run_pipeline(scenario, args.clusterer, args.policy)
    layering = validate_and_layer(scenario.graph)
    write_schedule_json(args.out, result.schedule, layering)
    print(f"wrote {args.out} (makespan {result.makespan_s:.6g} s)")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = generate_scenario(_load_config(args.scenario), seed=args.seed)
    result = run_pipeline(scenario, args.clusterer, args.policy)
    os.makedirs(args.out, exist_ok=True)
    run_path = os.path.join(args.out, "run.json")
    curves_path = os.path.join(args.out, "curves.csv")
    figure_path = os.path.join(args.out, "accuracy.png")
    write_run_json(run_path, result)
    write_curves_csv(curves_path, result)
    targets = {t.id: t.target_accuracy for t in scenario.tasks}
    plot_accuracy_curves(figure_path, result, targets)
    print(f"wrote {run_path}, {curves_path}, {figure_path}")
    print(f"makespan {result.makespan_s:.6g} s over {len(result.layer_times_s)} layers")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = _load_config(args.scenario)
    comparison = compare_baselines(
        config, args.seeds, policy=args.policy, max_workers=_max_workers()
    )
    os.makedirs(args.out, exist_ok=True)
    rows_path = os.path.join(args.out, "compare_rows.csv")
    summary_path = os.path.join(args.out, "compare_summary.csv")
    bars_path = os.path.join(args.out, "makespan.png")
    layers_path = os.path.join(args.out, "layer_times.png")
    write_compare_rows_csv(rows_path, comparison)
    write_compare_summary_csv(summary_path, comparison)
    plot_makespan_bars(bars_path, comparison)
    plot_layer_times(layers_path, comparison)
    print(f"wrote {rows_path}, {summary_path}, {bars_path}, {layers_path}")
    for entry in comparison["summary"]:
        print(
            f"{entry['method']}: {entry['mean_makespan_s']:.6g}"
            f" +/- {entry['ci95_s']:.6g} s over {entry['n_seeds']} seeds"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coda-sim",
        description="dependency-aware federated learning simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", help="path to a JSON scenario config")
        p.add_argument("--seed", type=int, help="override the scenario seed")

    p_cluster = sub.add_parser("cluster", help="write a client clustering as CSV")
    add_common(p_cluster)
    p_cluster.add_argument("--method", choices=CLUSTERERS, default="coda")
    p_cluster.add_argument("--out", required=True, help="output CSV path")
    p_cluster.set_defaults(func=_cmd_cluster)

    p_schedule = sub.add_parser("schedule", help="write a task schedule as JSON")
    add_common(p_schedule)
    p_schedule.add_argument("--clusterer", choices=CLUSTERERS, default="coda")
    p_schedule.add_argument("--policy", choices=POLICIES, default="greedy")
    p_schedule.add_argument("--out", required=True, help="output JSON path")
    p_schedule.set_defaults(func=_cmd_schedule)

    p_simulate = sub.add_parser(
        "simulate", help="run one pipeline and write results plus figures"
    )
    add_common(p_simulate)
    p_simulate.add_argument("--clusterer", choices=CLUSTERERS, default="coda")
    p_simulate.add_argument("--policy", choices=POLICIES, default="greedy")
    p_simulate.add_argument("--out", required=True, help="output directory")
    p_simulate.set_defaults(func=_cmd_simulate)

    p_compare = sub.add_parser(
        "compare", help="sweep clustering methods over seeds and summarize"
    )
    add_common(p_compare)
    p_compare.add_argument("--seeds", type=int, default=10)
    p_compare.add_argument("--policy", choices=POLICIES, default="greedy")
    p_compare.add_argument("--out", required=True, help="output directory")
    p_compare.set_defaults(func=_cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 2
    except CodaFlError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
