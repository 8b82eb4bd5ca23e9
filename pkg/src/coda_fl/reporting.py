"""Delimited output and figure rendering for simulation results.

All writers are atomic (temp file + rename in the target directory) and
deterministic: the same inputs produce byte-identical CSV, JSON, and
PNG files, so reruns can be diffed directly.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import matplotlib

matplotlib.use("Agg")

from matplotlib import pyplot as plt

from .clustering import ClusterAssignment
from .dag import Layering
from .experiment import RunResult
from .scheduler import Schedule, schedule_to_json

# stable method -> color mapping so figures do not depend on ordering
_METHOD_COLORS = {
    "coda": "tab:blue",
    "eb": "tab:orange",
    "kc": "tab:green",
    "rc": "tab:red",
}
_PNG_METADATA = {"Software": "coda-sim"}
_DPI = 120


def atomic_write_bytes(path: str, data: bytes) -> None:
    """Write bytes so readers never observe a partially written file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def atomic_write_text(path: str, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_assignment_csv(path: str, assignment: ClusterAssignment) -> None:
    rows = [[u, int(assignment.labels[u])] for u in range(assignment.n_clients)]
    atomic_write_text(path, _csv_text(["client", "cluster"], rows))


def write_schedule_json(path: str, schedule: Schedule, layering: Layering) -> None:
    payload = schedule_to_json(schedule, layering)
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def write_run_json(path: str, result: RunResult) -> None:
    atomic_write_text(path, json.dumps(result.to_dict(), indent=2) + "\n")


def write_curves_csv(path: str, result: RunResult) -> None:
    rows = [
        [task, r, f"{acc:.10g}", f"{t:.10g}"]
        for task, points in result.curves.items()
        for r, acc, t in points
    ]
    atomic_write_text(
        path, _csv_text(["task", "round", "accuracy", "time_s"], rows)
    )


def write_compare_rows_csv(path: str, comparison: dict) -> None:
    n_layers = len(comparison["rows"][0]["layer_times_s"])
    header = ["method", "seed", "makespan_s"] + [
        f"layer{k + 1}_s" for k in range(n_layers)
    ]
    rows = [
        [r["method"], r["seed"], f"{r['makespan_s']:.10g}"]
        + [f"{t:.10g}" for t in r["layer_times_s"]]
        for r in comparison["rows"]
    ]
    atomic_write_text(path, _csv_text(header, rows))


def write_compare_summary_csv(path: str, comparison: dict) -> None:
    n_layers = len(comparison["summary"][0]["mean_layer_times_s"])
    header = ["method", "n_seeds", "mean_makespan_s", "ci95_s"] + [
        f"mean_layer{k + 1}_s" for k in range(n_layers)
    ]
    rows = [
        [
            s["method"],
            s["n_seeds"],
            f"{s['mean_makespan_s']:.10g}",
            f"{s['ci95_s']:.10g}",
        ]
        + [f"{t:.10g}" for t in s["mean_layer_times_s"]]
        for s in comparison["summary"]
    ]
    atomic_write_text(path, _csv_text(header, rows))


def _save_figure(fig: plt.Figure, path: str) -> None:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def _color(method: str) -> str:
    return _METHOD_COLORS.get(method, "tab:gray")


def plot_makespan_bars(path: str, comparison: dict) -> None:
    """Mean total completion time per method with 95% CI error bars."""
    summary = comparison["summary"]
    methods = [s["method"] for s in summary]
    means = [s["mean_makespan_s"] for s in summary]
    errs = [s["ci95_s"] for s in summary]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(
        range(len(methods)),
        means,
        yerr=errs,
        capsize=4,
        color=[_color(m) for m in methods],
    )
    ax.set_xticks(range(len(methods)))
    ax.set_xticklabels(methods)
    ax.set_ylabel("total completion time (s)")
    ax.set_title(f"mean makespan over {summary[0]['n_seeds']} seeds")
    fig.tight_layout()
    _save_figure(fig, path)


def plot_layer_times(path: str, comparison: dict) -> None:
    """Grouped bars: mean per-layer completion time for each method."""
    summary = comparison["summary"]
    methods = [s["method"] for s in summary]
    n_layers = len(summary[0]["mean_layer_times_s"])
    width = 0.8 / len(methods)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for j, s in enumerate(summary):
        offsets = [k + (j - (len(methods) - 1) / 2) * width for k in range(n_layers)]
        ax.bar(
            offsets,
            s["mean_layer_times_s"],
            width=width,
            label=s["method"],
            color=_color(s["method"]),
        )
    ax.set_xticks(range(n_layers))
    ax.set_xticklabels([f"layer {k + 1}" for k in range(n_layers)])
    ax.set_ylabel("mean layer time (s)")
    ax.set_title("per-layer completion time")
    ax.legend()
    fig.tight_layout()
    _save_figure(fig, path)


def plot_accuracy_curves(path: str, result: RunResult, targets: dict | None = None) -> None:
    """Modeled accuracy versus wall-clock time for every task in a run."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    cycle = ["tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple", "tab:brown"]
    for j, (task, points) in enumerate(result.curves.items()):
        times = [t for _, _, t in points]
        accs = [acc for _, acc, _ in points]
        color = cycle[j % len(cycle)]
        ax.plot(times, accs, label=task, color=color)
        if targets and task in targets:
            ax.axhline(targets[task], color=color, linestyle="--", linewidth=0.8)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("modeled accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.set_title(f"{result.clusterer} / {result.policy} accuracy trajectories")
    ax.legend()
    fig.tight_layout()
    _save_figure(fig, path)
