"""Service configuration: one YAML file naming every artifact.

Paths in the file resolve relative to the file's own directory so a config
can travel with its artifacts. Loading the runtime cross-validates the
pieces against each other (catalog vs dataset vs model width) and draws the
seeded background sample used for every explanation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError
from .features import (FeatureCatalog, TransformSpec, load_catalog_csv,
                       load_transform_spec, validate_catalog)
from .kpi import EventLog, load_event_log
from .neighbors import DistanceConfig
from .store import Dataset, ingest
from .trees import TreeEnsemble, load_model_file

CONFIG_KEYS = {
    "model_path", "dataset_path", "catalog_path", "transforms_path",
    "background_size", "background_seed", "distance",
    "listen_address", "port", "event_log_path",
}
DISTANCE_KEYS = {"feature_subset", "weights", "standardize"}


@dataclass(frozen=True)
class AppConfig:
    model_path: str
    dataset_path: str
    catalog_path: str
    transforms_path: str
    background_size: int = 64
    background_seed: int = 0
    distance: DistanceConfig = field(default_factory=DistanceConfig)
    listen_address: str = "127.0.0.1"
    port: int = 8000
    event_log_path: str | None = None


def _parse_distance(raw) -> DistanceConfig:
    if raw is None:
        return DistanceConfig()
    if not isinstance(raw, dict):
        raise ConfigError("distance section must be a mapping")
    unknown = set(raw) - DISTANCE_KEYS
    if unknown:
        raise ConfigError(f"unknown distance key {sorted(unknown)[0]!r}")
    subset = raw.get("feature_subset")
    weights = raw.get("weights")
    return DistanceConfig(
        feature_subset=tuple(subset) if subset else None,
        weights=dict(weights) if weights else None,
        standardize=bool(raw.get("standardize", True)),
    )


def load_config(path) -> AppConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"config {path}: unknown key {sorted(unknown)[0]!r}")
    for key in ("model_path", "dataset_path", "catalog_path", "transforms_path"):
        if key not in raw or not raw[key]:
            raise ConfigError(f"config {path}: missing required key {key!r}")

    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    size = int(raw.get("background_size", 64))
    if size < 1:
        raise ConfigError("background_size must be >= 1")
    port = int(raw.get("port", 8000))
    if not 1 <= port <= 65535:
        raise ConfigError(f"port {port} out of range")
    event_log = raw.get("event_log_path")
    return AppConfig(
        model_path=resolve(raw["model_path"]),
        dataset_path=resolve(raw["dataset_path"]),
        catalog_path=resolve(raw["catalog_path"]),
        transforms_path=resolve(raw["transforms_path"]),
        background_size=size,
        background_seed=int(raw.get("background_seed", 0)),
        distance=_parse_distance(raw.get("distance")),
        listen_address=str(raw.get("listen_address", "127.0.0.1")),
        port=port,
        event_log_path=resolve(event_log) if event_log else None,
    )


def sample_background(dataset: Dataset, size: int, seed: int) -> np.ndarray:
    """Fixed background sample: seeded choice without replacement."""
    if len(dataset) == 0:
        raise ConfigError("cannot sample a background from an empty dataset")
    rng = np.random.default_rng(seed)
    n = min(size, len(dataset))
    picks = np.sort(rng.choice(len(dataset), size=n, replace=False))
    return dataset.matrix()[picks]


@dataclass
class Runtime:
    """Everything the service needs, loaded and cross-checked."""

    config: AppConfig
    model: TreeEnsemble
    catalog: FeatureCatalog
    transforms: TransformSpec
    dataset: Dataset
    background: np.ndarray
    event_log: EventLog


def load_runtime(config: AppConfig) -> Runtime:
    for key in ("model_path", "dataset_path", "catalog_path", "transforms_path"):
        path = getattr(config, key)
        if not os.path.exists(path):
            raise ConfigError(f"{key} does not exist: {path}")

    catalog = load_catalog_csv(config.catalog_path)
    transforms = load_transform_spec(config.transforms_path)
    dataset = ingest(config.dataset_path, catalog)
    model = load_model_file(config.model_path)

    diagnostics = validate_catalog(catalog, transforms, dataset)
    if diagnostics:
        raise ConfigError("catalog validation failed: " + "; ".join(diagnostics))
    if model.n_features != len(catalog):
        raise ConfigError(
            f"model expects {model.n_features} features, catalog has {len(catalog)}"
        )

    if config.event_log_path and os.path.exists(config.event_log_path):
        event_log = load_event_log(config.event_log_path)
    else:
        event_log = EventLog()

    background = sample_background(dataset, config.background_size, config.background_seed)
    return Runtime(config=config, model=model, catalog=catalog, transforms=transforms,
                   dataset=dataset, background=background, event_log=event_log)
