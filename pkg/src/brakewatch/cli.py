"""Command line entry points: serve, train, report, demo, synthesize."""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np
import yaml

from .config import load_config, load_runtime
from .errors import BrakewatchError
from .kpi import (Alert, Decision, EventLog, Outcome, Window, save_event_log)
from .report import write_full_report
from .store import write_dataset_csv
from .synthetic import (SyntheticParams, default_catalog, default_transforms,
                        generate_synthetic)
from .training import TrainParams, train_reference
from .trees import predict_proba, save_model_file


@click.group()
def main():
    """Brakepad failure monitoring: model, explanations, service, reports."""


def _load_params_file(path: str) -> tuple[SyntheticParams, str]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise BrakewatchError(f"params file {path} must hold a JSON object")
    out_dir = raw.pop("out_dir", None) or os.path.dirname(os.path.abspath(path))
    allowed = {"n_turbines", "n_days", "readings_per_day",
               "failure_rate_per_month", "seed", "label_window_days"}
    unknown = set(raw) - allowed
    if unknown:
        raise BrakewatchError(f"params file {path}: unknown key {sorted(unknown)[0]!r}")
    return SyntheticParams(**raw), out_dir


def _write_synthetic(params: SyntheticParams, out_dir: str) -> dict[str, str]:
    from .features import save_catalog_csv, save_transform_spec

    os.makedirs(out_dir, exist_ok=True)
    catalog = default_catalog()
    dataset = generate_synthetic(params, catalog)
    paths = {
        "data": os.path.join(out_dir, "data.csv"),
        "catalog": os.path.join(out_dir, "catalog.csv"),
        "transforms": os.path.join(out_dir, "transforms.json"),
    }
    write_dataset_csv(dataset, paths["data"])
    save_catalog_csv(catalog, paths["catalog"])
    save_transform_spec(default_transforms(), paths["transforms"])
    return paths


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Service configuration YAML.")
@click.option("--port", type=int, default=None, help="Override the configured port.")
@click.option("--generate-synthetic", "params_file", type=click.Path(exists=True),
              default=None, help="Write a synthetic dataset from a params JSON and exit.")
def serve(config_path, port, params_file):
    """Run the REST service (or just emit synthetic data with --generate-synthetic)."""
    try:
        if params_file is not None:
            params, out_dir = _load_params_file(params_file)
            paths = _write_synthetic(params, out_dir)
            for tag, path in paths.items():
                click.echo(f"{tag}: {path}")
            return
        if config_path is None:
            raise click.UsageError("--config is required to serve")
        config = load_config(config_path)
        from .service import serve as run_service
        click.echo(f"serving on {config.listen_address}:{port or config.port}")
        run_service(config, port=port)
    except BrakewatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--n-trees", type=int, default=20, show_default=True)
@click.option("--max-depth", type=int, default=3, show_default=True)
@click.option("--learning-rate", type=float, default=0.3, show_default=True)
@click.option("--l2-lambda", type=float, default=1.0, show_default=True)
@click.option("--gamma", type=float, default=0.0, show_default=True)
@click.option("--min-child-weight", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train(data_path, catalog_path, out_path, n_trees, max_depth, learning_rate,
          l2_lambda, gamma, min_child_weight, seed):
    """Fit the reference boosted-tree model on labeled rows of a dataset."""
    from .features import load_catalog_csv
    from .store import ingest

    try:
        catalog = load_catalog_csv(catalog_path)
        dataset = ingest(data_path, catalog)
        features, labels = dataset.training_arrays()
        params = TrainParams(n_trees=n_trees, max_depth=max_depth,
                             learning_rate=learning_rate, l2_lambda=l2_lambda,
                             gamma=gamma, min_child_weight=min_child_weight, seed=seed)
        model = train_reference(features, labels, params)
        save_model_file(model, out_path)
        probs = predict_proba(model, features)
        accuracy = float(np.mean((probs >= 0.5) == (labels == 1)))
        click.echo(f"trained {len(model.trees)} trees on {features.shape[0]} rows, "
                   f"training accuracy {accuracy:.3f}")
        click.echo(f"model: {out_path}")
    except BrakewatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _parse_window(text: str) -> Window:
    parts = text.split("-")
    if len(parts) != 2:
        raise BrakewatchError(f"window {text!r} must look like start-end")
    return Window(start=int(parts[0]), end=int(parts[1]))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--feature", default=None, help="Scalar feature for the deep-dive section.")
@click.option("--window", "window_text", default=None,
              help="Evaluation window start-end (epoch seconds) for the KPI section.")
@click.option("--baseline", "baseline_texts", multiple=True,
              help="Historic window start-end; may repeat.")
def report(config_path, out_dir, feature, window_text, baseline_texts):
    """Write CSV tables and PNG figures for importances, one feature, and KPIs."""
    try:
        runtime = load_runtime(load_config(config_path))
        eval_window = _parse_window(window_text) if window_text else None
        historic = [_parse_window(t) for t in baseline_texts]
        outputs = write_full_report(runtime, out_dir, feature=feature,
                                    eval_window=eval_window, historic=historic)
        for tag, path in sorted(outputs.items()):
            click.echo(f"{tag}: {path}")
    except (BrakewatchError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--seed", type=int, default=11, show_default=True)
def demo(out_dir, seed):
    """Build a ready-to-serve workspace: data, model, config, sample events."""
    from .synthetic import DAY_SECONDS, START_EPOCH

    try:
        params = SyntheticParams(n_turbines=5, n_days=25, readings_per_day=4,
                                 failure_rate_per_month=8.0, seed=seed)
        paths = _write_synthetic(params, out_dir)
        catalog = default_catalog()
        from .store import ingest
        dataset = ingest(paths["data"], catalog)
        features, labels = dataset.training_arrays()
        model = train_reference(features, labels, TrainParams(seed=seed))
        model_path = os.path.join(out_dir, "model.json")
        save_model_file(model, model_path)

        log = _demo_events(dataset, model, START_EPOCH, DAY_SECONDS, params.n_days)
        events_path = os.path.join(out_dir, "events.ndjson")
        save_event_log(log, events_path)

        config_path = os.path.join(out_dir, "config.yaml")
        with open(config_path, "w", encoding="utf-8") as fh:
            yaml.safe_dump({
                "model_path": "model.json",
                "dataset_path": "data.csv",
                "catalog_path": "catalog.csv",
                "transforms_path": "transforms.json",
                "background_size": 64,
                "background_seed": 0,
                "listen_address": "127.0.0.1",
                "port": 8000,
                "event_log_path": "events.ndjson",
            }, fh, sort_keys=False)
        click.echo(f"workspace ready: {out_dir}")
        click.echo(f"next: brakewatch serve --config {config_path}")
    except BrakewatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _demo_events(dataset, model, start_epoch, day_seconds, n_days) -> EventLog:
    """Alerts on the riskiest reading per turbine, mixed follow-up, outcomes."""
    log = EventLog()
    horizon_end = start_epoch + n_days * day_seconds
    matrix = dataset.matrix()
    probs = predict_proba(model, matrix)
    for i, entity_id in enumerate(dataset.entity_ids()):
        best_pos = max((pos for pos, row in enumerate(dataset.rows)
                        if row.entity_id == entity_id),
                       key=lambda pos: probs[pos])
        row = dataset.rows[best_pos]
        alert_id = f"A{i + 1:03d}"
        log.record(Alert(alert_id=alert_id, entity_id=entity_id,
                         time=row.row_id, score=float(probs[best_pos])))
        investigated = probs[best_pos] >= 0.5
        log.record(Decision(alert_id=alert_id, investigated=bool(investigated),
                            time=min(row.row_id + day_seconds, horizon_end - 1)))
        if row.label == 1:
            log.record(Outcome(entity_id=entity_id,
                               time=min(row.row_id + 2 * day_seconds, horizon_end - 1),
                               failed=True, downtime_hours=float(18 + 6 * i)))
    return log


if __name__ == "__main__":
    main()
