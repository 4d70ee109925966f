"""Exact background-conditioned feature contributions for tree ensembles.

A contribution set attributes one prediction's margin to individual features
against a background sample: hiding a feature means taking its value from a
background row instead of the explained row. Contributions are Shapley values
of that hide/reveal game, so they are signed, they sum (with the base value)
to the predicted margin, and features the model never touches get exactly 0.

The production path exploits tree structure. Against a single background row,
each leaf's indicator depends on a path feature in one of four ways: both rows
satisfy the path constraint (feature irrelevant), only the explained row does
(the leaf needs that feature revealed), only the background row does (the leaf
needs it hidden), or neither (the leaf is unreachable for every mixed row).
The Shapley value of such an all-or-nothing game has a closed form in the
counts of must-reveal and must-hide features, so each (leaf, background row)
pair contributes in O(path length). :func:`shapley_oracle` computes the same
quantity by brute-force subset enumeration and exists to cross-check this.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import ConfigError, OracleCapError
from .trees import TreeEnsemble, as_matrix, as_row_array, logistic, predict_margin, predict_margin_batch

ORACLE_FEATURE_CAP = 14


@dataclass(frozen=True)
class ContributionSet:
    """Per-feature signed contributions on the margin scale.

    Invariant: ``base_value + contributions.sum() == predicted_margin`` up to
    float rounding.
    """

    base_value: float
    contributions: np.ndarray
    predicted_margin: float
    row_ref: tuple[str, int] | None = None

    @property
    def predicted_probability(self) -> float:
        return float(logistic(self.predicted_margin))

    def reconstruction_error(self) -> float:
        return abs(self.base_value + float(self.contributions.sum()) - self.predicted_margin)


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side explanation of two rows against the same background.

    ``delta_contribution`` is exactly ``contributions_b - contributions_a``.
    """

    row_ref_a: tuple[str, int] | None
    row_ref_b: tuple[str, int] | None
    values_a: np.ndarray
    values_b: np.ndarray
    contributions_a: np.ndarray
    contributions_b: np.ndarray
    delta_contribution: np.ndarray
    margin_a: float
    margin_b: float
    probability_a: float
    probability_b: float


@lru_cache(maxsize=None)
def _leaf_weight_tables(max_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form Shapley weights for an all-or-nothing leaf game.

    With ``a`` features that must be revealed and ``r`` that must be hidden,
    a must-reveal feature is worth ``(a-1)! r! / (a+r)!`` of the leaf value
    and a must-hide feature ``-a! (r-1)! / (a+r)!``. Indexed as [a, r].
    """
    size = max_count + 1
    pos = np.zeros((size, size))
    neg = np.zeros((size, size))
    for a in range(size):
        for r in range(size):
            if a + r == 0:
                continue
            if a >= 1:
                pos[a, r] = factorial(a - 1) * factorial(r) / factorial(a + r)
            if r >= 1:
                neg[a, r] = factorial(a) * factorial(r - 1) / factorial(a + r)
    return pos, neg


def _background_matrix(model: TreeEnsemble, background) -> np.ndarray:
    bg = as_matrix(background, model.n_features)
    if bg.shape[0] == 0:
        raise ConfigError("background set must contain at least one row")
    return bg


def local_contributions(model: TreeEnsemble, row, background,
                        row_ref: tuple[str, int] | None = None) -> ContributionSet:
    """Exact per-feature contributions of one row's predicted margin."""
    x = as_row_array(row, model.n_features)
    bg = _background_matrix(model, background)
    n_bg = bg.shape[0]
    phi = np.zeros(model.n_features)

    for tree in model.trees:
        for region in tree.leaf_regions:
            if region.features.size == 0:
                continue
            x_pass = region.pass_mask(x[region.features])      # (k,)
            bg_pass = region.pass_mask(bg[:, region.features])  # (n_bg, k)
            must_reveal = x_pass & ~bg_pass
            must_hide = ~x_pass & bg_pass
            alive = ~(~x_pass & ~bg_pass).any(axis=1)
            if not alive.any():
                continue
            reveal_count = must_reveal.sum(axis=1)
            hide_count = must_hide.sum(axis=1)
            pos, neg = _leaf_weight_tables(region.features.size)
            w_pos = np.where(alive, pos[reveal_count, hide_count], 0.0)
            w_neg = np.where(alive, neg[reveal_count, hide_count], 0.0)
            per_feature = (must_reveal * w_pos[:, None] - must_hide * w_neg[:, None]).sum(axis=0)
            phi[region.features] += region.value * per_feature

    phi /= n_bg
    base_value = float(predict_margin_batch(model, bg).mean())
    return ContributionSet(
        base_value=base_value,
        contributions=phi,
        predicted_margin=predict_margin(model, x),
        row_ref=row_ref,
    )


def shapley_oracle(model: TreeEnsemble, row, background,
                   row_ref: tuple[str, int] | None = None) -> ContributionSet:
    """Brute-force contributions by enumerating every feature subset.

    Test oracle only: cost is exponential in the number of features the model
    actually splits on, capped at :data:`ORACLE_FEATURE_CAP`.
    """
    used = model.used_features()
    if len(used) > ORACLE_FEATURE_CAP:
        raise OracleCapError(
            f"oracle refuses {len(used)} participating features (cap {ORACLE_FEATURE_CAP})"
        )
    x = as_row_array(row, model.n_features)
    bg = _background_matrix(model, background)

    n_used = len(used)
    n_subsets = 1 << n_used
    subset_value = np.empty(n_subsets)
    for mask in range(n_subsets):
        composite = bg.copy()
        for j in range(n_used):
            if mask >> j & 1:
                composite[:, used[j]] = x[used[j]]
        subset_value[mask] = predict_margin_batch(model, composite).mean()

    phi = np.zeros(model.n_features)
    if n_used:
        weight = [factorial(s) * factorial(n_used - s - 1) / factorial(n_used)
                  for s in range(n_used)]
        for j, f in enumerate(used):
            bit = 1 << j
            total = 0.0
            for mask in range(n_subsets):
                if mask & bit:
                    continue
                total += weight[mask.bit_count()] * (subset_value[mask | bit] - subset_value[mask])
            phi[f] = total

    return ContributionSet(
        base_value=float(subset_value[0]),
        contributions=phi,
        predicted_margin=predict_margin(model, x),
        row_ref=row_ref,
    )


def compare_rows(model: TreeEnsemble, row_a, row_b, background,
                 ref_a: tuple[str, int] | None = None,
                 ref_b: tuple[str, int] | None = None) -> ComparisonReport:
    """Explain two rows and difference their contributions feature by feature."""
    set_a = local_contributions(model, row_a, background, row_ref=ref_a)
    set_b = local_contributions(model, row_b, background, row_ref=ref_b)
    return ComparisonReport(
        row_ref_a=ref_a,
        row_ref_b=ref_b,
        values_a=as_row_array(row_a, model.n_features),
        values_b=as_row_array(row_b, model.n_features),
        contributions_a=set_a.contributions,
        contributions_b=set_b.contributions,
        delta_contribution=set_b.contributions - set_a.contributions,
        margin_a=set_a.predicted_margin,
        margin_b=set_b.predicted_margin,
        probability_a=set_a.predicted_probability,
        probability_b=set_b.predicted_probability,
    )
