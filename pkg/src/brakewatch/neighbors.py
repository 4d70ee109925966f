"""Similar-readings search over the historic dataset.

Distance is weighted Euclidean over a configurable subset of numeric and
boolean columns, each difference optionally divided by the column's
training-set standard deviation, plus a flat mismatch cost of 1 per
differing categorical column. Missing values never manufacture distance: a
numeric term with a missing side contributes 0, a categorical term costs 1
only when both sides are present and differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .store import Dataset, EntityRow


@dataclass(frozen=True)
class DistanceConfig:
    feature_subset: tuple[str, ...] | None = None  # None: every non-categorical column
    weights: dict[str, float] | None = None        # per column, default 1.0
    standardize: bool = True


@dataclass(frozen=True)
class Neighbor:
    entity_id: str
    row_id: int
    distance: float
    label: int | None


def _resolve(dataset: Dataset, config: DistanceConfig):
    catalog = dataset.catalog
    if config.feature_subset is None:
        names = catalog.numeric_names()
    else:
        names = list(config.feature_subset)
    if not names:
        raise ConfigError("distance feature subset is empty")
    indices = [catalog.index_of(name) for name in names]

    weights = np.ones(len(names))
    if config.weights is not None:
        for name, w in config.weights.items():
            catalog.index_of(name)  # unknown names should fail loudly
            if w < 0:
                raise ConfigError(f"negative weight for feature {name!r}")
        for j, name in enumerate(names):
            weights[j] = config.weights.get(name, 1.0)
    if not np.any(weights > 0):
        raise ConfigError("all distance weights are zero")

    kinds = [catalog.entries[i].value_type for i in indices]
    return names, indices, weights, kinds


def _query_values(dataset: Dataset, query) -> tuple:
    if isinstance(query, EntityRow):
        return query.values
    values = tuple(query)
    if len(values) != len(dataset.catalog):
        raise ConfigError(
            f"query has {len(values)} values, catalog has {len(dataset.catalog)} columns"
        )
    return values


def _is_missing(value) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value))


def distance_between(dataset: Dataset, values_a, values_b, config: DistanceConfig = DistanceConfig()) -> float:
    """Distance between two full catalog-ordered value tuples."""
    names, indices, weights, kinds = _resolve(dataset, config)
    _, stds = dataset.column_stats()
    total = 0.0
    for j, i in enumerate(indices):
        a, b = values_a[i], values_b[i]
        if _is_missing(a) or _is_missing(b):
            continue
        if kinds[j] == "categorical":
            total += weights[j] * (1.0 if a != b else 0.0)
            continue
        diff = float(a) - float(b)
        if config.standardize:
            s = stds[i]
            if not np.isfinite(s) or s == 0.0:
                continue
            diff /= s
        total += weights[j] * diff * diff
    return math.sqrt(total)


def nearest_neighbors(dataset: Dataset, query, k: int,
                      config: DistanceConfig = DistanceConfig()) -> list[Neighbor]:
    """The k stored rows closest to the query, ascending by distance.

    Ties resolve by (entity_id, row_id) ascending; k larger than the dataset
    returns every row.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    if len(dataset) == 0:
        raise ConfigError("dataset is empty")
    names, indices, weights, kinds = _resolve(dataset, config)
    query_values = _query_values(dataset, query)

    numeric_pos = [j for j, kind in enumerate(kinds) if kind != "categorical"]
    cat_pos = [j for j, kind in enumerate(kinds) if kind == "categorical"]

    matrix = dataset.matrix()
    cols = [indices[j] for j in numeric_pos]
    data_numeric = matrix[:, cols] if cols else np.zeros((len(dataset), 0))
    q_numeric = np.array(
        [np.nan if _is_missing(query_values[indices[j]]) else float(query_values[indices[j]])
         for j in numeric_pos]
    )

    scale = np.ones(len(numeric_pos))
    if config.standardize and numeric_pos:
        _, stds = dataset.column_stats()
        scale = stds[cols]
    diffs = data_numeric - q_numeric
    with np.errstate(invalid="ignore", divide="ignore"):
        scaled = diffs / scale
    # missing on either side, or zero spread under standardization: term drops out
    scaled = np.where(np.isfinite(scaled), scaled, 0.0)
    squared = scaled * scaled @ np.array([weights[j] for j in numeric_pos])

    if cat_pos:
        for row_pos, row in enumerate(dataset.rows):
            extra = 0.0
            for j in cat_pos:
                a = query_values[indices[j]]
                b = row.values[indices[j]]
                if _is_missing(a) or _is_missing(b):
                    continue
                if a != b:
                    extra += weights[j]
            squared[row_pos] += extra

    distances = np.sqrt(squared)
    order = sorted(range(len(dataset)),
                   key=lambda i: (distances[i], dataset.rows[i].entity_id, dataset.rows[i].row_id))
    out = []
    for i in order[:k]:
        row = dataset.rows[i]
        out.append(Neighbor(entity_id=row.entity_id, row_id=row.row_id,
                            distance=float(distances[i]), label=row.label))
    return out
