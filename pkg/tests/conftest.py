"""Shared builders: hand-made models, random models, and a small fleet."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from brakewatch.trees import Tree, TreeEnsemble, TreeNode


def leaf(node_id: int, value: float) -> TreeNode:
    return TreeNode(node_id=node_id, leaf_value=float(value))


def split(node_id: int, feature: int, threshold: float, left: int, right: int,
          missing: str = "left", gain: float = 1.0) -> TreeNode:
    return TreeNode(node_id=node_id, feature_index=feature, threshold=threshold,
                    left_child=left, right_child=right, missing_direction=missing,
                    split_gain=float(gain))


def step_model(threshold: float = 10.0, low: float = -1.0, high: float = 1.0,
               base: float = 0.0, n_features: int = 1) -> TreeEnsemble:
    """Single split on f0: value < threshold gives ``low``, else ``high``."""
    tree = Tree([split(0, 0, threshold, 1, 2), leaf(1, low), leaf(2, high)])
    return TreeEnsemble([tree], base_score=base, n_features=n_features)


def two_feature_model() -> TreeEnsemble:
    """f0 below 0.75 gives 0; otherwise f1 below 0.75 gives 2, else 4."""
    tree = Tree([
        split(0, 0, 0.75, 1, 2),
        leaf(1, 0.0),
        split(2, 1, 0.75, 3, 4),
        leaf(3, 2.0),
        leaf(4, 4.0),
    ])
    return TreeEnsemble([tree], base_score=0.0, n_features=2)


def random_model(rng: np.random.Generator, n_features: int | None = None,
                 max_trees: int = 5, max_depth: int = 3) -> TreeEnsemble:
    """Random small ensemble with mixed missing directions."""
    if n_features is None:
        n_features = int(rng.integers(1, 9))
    trees = []
    for _ in range(int(rng.integers(1, max_trees + 1))):
        nodes: list[TreeNode] = []
        counter = itertools.count()

        def grow(depth: int) -> int:
            nid = next(counter)
            if depth >= max_depth or (depth > 0 and rng.random() < 0.35):
                nodes.append(leaf(nid, float(rng.normal())))
                return nid
            f = int(rng.integers(n_features))
            t = float(np.round(rng.normal() * 2.0, 2))
            left = grow(depth + 1)
            right = grow(depth + 1)
            nodes.append(split(nid, f, t, left, right,
                               missing="left" if rng.random() < 0.5 else "right",
                               gain=float(rng.random())))
            return nid

        grow(0)
        trees.append(Tree(sorted(nodes, key=lambda n: n.node_id)))
    return TreeEnsemble(trees, base_score=float(rng.normal()), n_features=n_features)


def random_rows(rng: np.random.Generator, n_rows: int, n_features: int,
                missing_rate: float = 0.15) -> np.ndarray:
    rows = rng.normal(size=(n_rows, n_features)) * 2.0
    if missing_rate > 0:
        rows[rng.random(size=rows.shape) < missing_rate] = np.nan
    return rows


FLEET_PARAMS = dict(n_turbines=5, n_days=25, readings_per_day=4,
                    failure_rate_per_month=8.0, seed=11)


@pytest.fixture(scope="session")
def fleet():
    """500-row synthetic fleet with both outcome classes present."""
    from brakewatch.synthetic import SyntheticParams, generate_synthetic

    dataset = generate_synthetic(SyntheticParams(**FLEET_PARAMS))
    assert len(dataset) == 500
    return dataset


@pytest.fixture(scope="session")
def fleet_model(fleet):
    from brakewatch.training import TrainParams, train_reference

    features, labels = fleet.training_arrays()
    return train_reference(features, labels, TrainParams(seed=11))


@pytest.fixture(scope="session")
def fleet_background(fleet):
    from brakewatch.config import sample_background

    return sample_background(fleet, 64, 0)


@pytest.fixture(scope="session")
def workspace(tmp_path_factory, fleet, fleet_model):
    """Directory with every service artifact plus a config file naming them."""
    from brakewatch.features import save_catalog_csv, save_transform_spec
    from brakewatch.store import write_dataset_csv
    from brakewatch.synthetic import default_transforms
    from brakewatch.trees import save_model_file

    root = tmp_path_factory.mktemp("workspace")
    save_catalog_csv(fleet.catalog, root / "catalog.csv")
    save_transform_spec(default_transforms(), root / "transforms.json")
    write_dataset_csv(fleet, root / "data.csv")
    save_model_file(fleet_model, root / "model.json")
    (root / "config.yaml").write_text(
        "model_path: model.json\n"
        "dataset_path: data.csv\n"
        "catalog_path: catalog.csv\n"
        "transforms_path: transforms.json\n"
        "background_size: 64\n"
        "background_seed: 0\n"
        "event_log_path: events.ndjson\n"
    )
    return root
