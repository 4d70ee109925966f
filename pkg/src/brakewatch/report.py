"""File reports: delimited tables with matplotlib figures alongside.

Each section writes a CSV and a PNG with the same stem so the numbers behind
every figure stay inspectable. Rendering uses the Agg backend; no display is
required.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analysis import feature_distribution, feature_scatter, global_importance
from .config import Runtime
from .errors import ConfigError
from .features import NamedContributions, to_interpretable
from .kpi import Window, baseline_report, report_to_dict
from .shapley import local_contributions


def _fold(scores, runtime: Runtime) -> dict[str, float]:
    carrier = NamedContributions(
        base_value=0.0,
        contributions=dict(zip(runtime.catalog.names, (float(s) for s in scores))),
        predicted_margin=0.0,
    )
    return to_interpretable(carrier, runtime.catalog, runtime.transforms).contributions


def _interpretable_importances(runtime: Runtime) -> dict[str, dict[str, float]]:
    gain = _fold(global_importance(runtime.model, None, None, "gain").scores, runtime)

    rows = runtime.dataset.matrix()
    per_row = [
        to_interpretable(local_contributions(runtime.model, rows[i], runtime.background),
                         runtime.catalog, runtime.transforms).contributions
        for i in range(rows.shape[0])
    ]
    names = list(gain.keys())
    stacked = np.array([[r[name] for name in names] for r in per_row])
    mean_abs = np.abs(stacked).mean(axis=0)
    total = float(mean_abs.sum())
    if total > 0:
        mean_abs = mean_abs / total
    signed = stacked.mean(axis=0)
    return {
        "gain": gain,
        "mean_abs_shap": dict(zip(names, (float(v) for v in mean_abs))),
        "signed_mean_shap": dict(zip(names, (float(v) for v in signed))),
    }


def write_importance_report(runtime: Runtime, out_dir: str, top: int = 15) -> dict[str, str]:
    tables = _interpretable_importances(runtime)
    names = list(tables["gain"].keys())

    csv_path = os.path.join(out_dir, "importance.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "gain", "mean_abs_shap", "signed_mean_shap"])
        for name in names:
            writer.writerow([name, repr(tables["gain"][name]),
                             repr(tables["mean_abs_shap"][name]),
                             repr(tables["signed_mean_shap"][name])])

    ranked = sorted(names, key=lambda n: tables["gain"][n], reverse=True)[:top]
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 0.4 * len(ranked) + 2))
    y = np.arange(len(ranked))[::-1]
    left.barh(y, [tables["gain"][n] for n in ranked], color="#4878a8")
    left.set_yticks(y, ranked)
    left.set_title("Gain importance (normalized)")
    signed = [tables["signed_mean_shap"][n] for n in ranked]
    right.barh(y, signed, color=["#a84848" if v < 0 else "#48a868" for v in signed])
    right.set_yticks(y, ["" for _ in ranked])
    right.axvline(0.0, color="black", linewidth=0.8)
    right.set_title("Signed mean contribution (margin)")
    fig.tight_layout()
    png_path = os.path.join(out_dir, "importance.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"importance_csv": csv_path, "importance_png": png_path}


def write_feature_report(runtime: Runtime, feature: str, out_dir: str) -> dict[str, str]:
    """Scatter and distribution for one scalar feature (machine or renamed name)."""
    renamed = {v: k for k, v in runtime.transforms.rename_of().items()}
    feature = renamed.get(feature, feature)
    column = runtime.catalog.index_of(feature)
    points = feature_scatter(runtime.model, runtime.dataset, column, runtime.background)
    stats = feature_distribution(runtime.dataset, column)

    scatter_csv = os.path.join(out_dir, f"scatter_{feature}.csv")
    with open(scatter_csv, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_id", "row_id", "value", "contribution", "probability"])
        for p in points:
            writer.writerow([p.row_ref[0], p.row_ref[1],
                             "" if p.value is None else repr(p.value),
                             repr(p.contribution), repr(p.probability)])

    dist_csv = os.path.join(out_dir, f"distribution_{feature}.csv")
    with open(dist_csv, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["minimum", "q1", "median", "q3", "maximum", "count"])
        writer.writerow([repr(stats.minimum), repr(stats.q1), repr(stats.median),
                         repr(stats.q3), repr(stats.maximum), stats.count])

    fig, (top_ax, bottom_ax) = plt.subplots(
        2, 1, figsize=(8, 7), height_ratios=[3, 1], sharex=True)
    xs = [p.value for p in points if p.value is not None]
    ys = [p.contribution for p in points if p.value is not None]
    labels = [1 if runtime.dataset.get_row(*p.row_ref).label == 1 else 0
              for p in points if p.value is not None]
    colors = ["#a84848" if flag else "#4878a8" for flag in labels]
    top_ax.scatter(xs, ys, s=14, c=colors, alpha=0.7)
    top_ax.axhline(0.0, color="black", linewidth=0.8)
    top_ax.set_ylabel("contribution (margin)")
    top_ax.set_title(f"{feature}: value vs. contribution")
    bottom_ax.bxp([{
        "med": stats.median, "q1": stats.q1, "q3": stats.q3,
        "whislo": stats.minimum, "whishi": stats.maximum, "fliers": [],
    }], orientation="horizontal", positions=[0])
    bottom_ax.set_yticks([])
    bottom_ax.set_xlabel(feature)
    fig.tight_layout()
    png_path = os.path.join(out_dir, f"feature_{feature}.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"scatter_csv": scatter_csv, "distribution_csv": dist_csv, "feature_png": png_path}


def write_kpi_report(runtime: Runtime, eval_window: Window, historic: list[Window],
                     out_dir: str) -> dict[str, str]:
    report = baseline_report(runtime.event_log, eval_window, historic)

    json_path = os.path.join(out_dir, "kpi_report.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=1)
        fh.write("\n")

    csv_path = os.path.join(out_dir, "kpi_report.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window", "start", "end", "kpi1_total_downtime_hours",
                         "kpi2_failures", "kpi2_investigations", "kpi3_alert_followup_rate"])

        def row(tag, values):
            rate = values.kpi3_alert_followup_rate
            writer.writerow([tag, values.window.start, values.window.end,
                             repr(values.kpi1_total_downtime_hours),
                             values.kpi2_failures, values.kpi2_investigations,
                             "" if rate is None else repr(rate)])

        row("evaluation", report.evaluation)
        for i, baseline in enumerate(report.baselines, start=1):
            row(f"baseline_{i}", baseline)

    windows = [report.evaluation] + list(report.baselines)
    tags = ["evaluation"] + [f"baseline {i}" for i in range(1, len(report.baselines) + 1)]
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    x = np.arange(len(windows))
    axes[0].bar(x, [w.kpi1_total_downtime_hours for w in windows], color="#4878a8")
    axes[0].set_title("Downtime (h)")
    width = 0.38
    axes[1].bar(x - width / 2, [w.kpi2_failures for w in windows], width, label="failures",
                color="#a84848")
    axes[1].bar(x + width / 2, [w.kpi2_investigations for w in windows], width,
                label="investigations", color="#48a868")
    axes[1].set_title("Failures vs investigations")
    axes[1].legend(fontsize=8)
    rates = [w.kpi3_alert_followup_rate for w in windows]
    axes[2].bar(x, [0.0 if r is None else r for r in rates],
                color=["#cccccc" if r is None else "#4878a8" for r in rates])
    axes[2].set_ylim(0, 1)
    axes[2].set_title("Alert follow-up rate")
    for ax in axes:
        ax.set_xticks(x, tags, rotation=30, ha="right", fontsize=8)
    fig.tight_layout()
    png_path = os.path.join(out_dir, "kpi_windows.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"kpi_csv": csv_path, "kpi_json": json_path, "kpi_png": png_path}


def write_full_report(runtime: Runtime, out_dir: str, feature: str | None = None,
                      eval_window: Window | None = None,
                      historic: list[Window] | None = None) -> dict[str, str]:
    """Importance, one feature deep-dive, and (when windows given) KPIs."""
    os.makedirs(out_dir, exist_ok=True)
    outputs = dict(write_importance_report(runtime, out_dir))

    if feature is None:
        scalars = [e.name for e in runtime.catalog if e.value_type == "numeric"]
        if not scalars:
            raise ConfigError("no numeric feature available for the feature report")
        fold = _fold(global_importance(runtime.model, None, None, "gain").scores, runtime)
        renames = runtime.transforms.rename_of()
        feature = max(scalars, key=lambda n: fold.get(renames.get(n, n), 0.0))
    outputs.update(write_feature_report(runtime, feature, out_dir))

    if eval_window is not None:
        outputs.update(write_kpi_report(runtime, eval_window, historic or [], out_dir))
    return outputs
