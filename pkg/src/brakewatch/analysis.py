"""Dataset-level views: global importance, feature scatter, distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyDistributionError
from .shapley import local_contributions
from .store import Dataset
from .trees import TreeEnsemble, gain_totals, logistic

IMPORTANCE_METHODS = ("gain", "mean_abs_shap", "signed_mean_shap")


@dataclass(frozen=True)
class ImportanceTable:
    method: str
    scores: np.ndarray
    normalized: bool


@dataclass(frozen=True)
class ScatterPoint:
    row_ref: tuple[str, int]
    value: float | None  # None marks a missing reading
    contribution: float
    probability: float


@dataclass(frozen=True)
class BoxStats:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    count: int


def _normalized(scores: np.ndarray) -> np.ndarray:
    total = float(scores.sum())
    if total > 0.0:
        return scores / total
    return scores.copy()


def global_importance(model: TreeEnsemble, dataset, background, method: str) -> ImportanceTable:
    """Per-feature importance over a dataset.

    gain: normalized training-gain totals (dataset and background unused).
    mean_abs_shap: dataset mean of |contribution|, normalized.
    signed_mean_shap: dataset mean of signed contributions, kept unnormalized
    because the sign carries the direction of a feature's typical effect.
    """
    if method not in IMPORTANCE_METHODS:
        raise ConfigError(f"unknown importance method {method!r}")
    if method == "gain":
        return ImportanceTable(method="gain", scores=_normalized(gain_totals(model)), normalized=True)

    if isinstance(dataset, Dataset):
        rows = dataset.matrix()
    else:
        rows = np.asarray(dataset, dtype=np.float64) if dataset is not None else None
    if rows is None or rows.shape[0] == 0:
        raise ConfigError(f"method {method!r} needs a non-empty dataset")

    phis = np.stack([local_contributions(model, row, background).contributions for row in rows])
    if method == "mean_abs_shap":
        return ImportanceTable(method=method,
                               scores=_normalized(np.abs(phis).mean(axis=0)),
                               normalized=True)
    return ImportanceTable(method=method, scores=phis.mean(axis=0), normalized=False)


def feature_scatter(model: TreeEnsemble, dataset: Dataset, feature: int | str,
                    background) -> list[ScatterPoint]:
    """One (value, contribution, probability) point per dataset row."""
    index = dataset.catalog.index_of(feature) if isinstance(feature, str) else int(feature)
    if not 0 <= index < len(dataset.catalog):
        raise ConfigError(f"feature index {index} out of range")
    if len(dataset) == 0:
        raise ConfigError("dataset is empty")
    matrix = dataset.matrix()
    points = []
    for i, row in enumerate(dataset.rows):
        contribs = local_contributions(model, matrix[i], background, row_ref=row.ref)
        x = matrix[i, index]
        points.append(ScatterPoint(
            row_ref=row.ref,
            value=None if np.isnan(x) else float(x),
            contribution=float(contribs.contributions[index]),
            probability=float(logistic(contribs.predicted_margin)),
        ))
    return points


def quantile_type7(sorted_values: np.ndarray, p: float) -> float:
    """Linear interpolation of order statistics at position p*(n-1)."""
    n = sorted_values.shape[0]
    position = p * (n - 1)
    lower = int(np.floor(position))
    fraction = position - lower
    if lower + 1 >= n:
        return float(sorted_values[n - 1])
    return float(sorted_values[lower] + fraction * (sorted_values[lower + 1] - sorted_values[lower]))


def feature_distribution(dataset: Dataset, feature: int | str) -> BoxStats:
    """Five-number summary of one numeric column, missing values excluded."""
    index = dataset.catalog.index_of(feature) if isinstance(feature, str) else int(feature)
    entry = dataset.catalog.entries[index]
    if entry.value_type == "categorical":
        raise ConfigError(f"feature {entry.name!r} is categorical, distribution needs numbers")
    column = dataset.matrix()[:, index]
    values = np.sort(column[~np.isnan(column)])
    if values.shape[0] == 0:
        raise EmptyDistributionError(f"feature {entry.name!r} has no recorded values")
    return BoxStats(
        minimum=float(values[0]),
        q1=quantile_type7(values, 0.25),
        median=quantile_type7(values, 0.50),
        q3=quantile_type7(values, 0.75),
        maximum=float(values[-1]),
        count=int(values.shape[0]),
    )
