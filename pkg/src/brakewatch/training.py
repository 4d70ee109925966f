"""Reference trainer: second-order boosting for binary logistic loss.

Desk-scale by design: exact greedy split search over sorted unique values,
single-threaded, fully deterministic. Missing values are handled by trying
both routing directions at each candidate split and keeping the better one.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import TrainingError
from .trees import Tree, TreeEnsemble, TreeNode, as_matrix

_NEG_INF = -math.inf


@dataclass(frozen=True)
class TrainParams:
    n_trees: int = 20
    max_depth: int = 3
    learning_rate: float = 0.3
    l2_lambda: float = 1.0
    gamma: float = 0.0
    min_child_weight: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise TrainingError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.max_depth < 1:
            raise TrainingError(f"max_depth must be >= 1, got {self.max_depth}")
        if not 0.0 < self.learning_rate <= 1.0:
            raise TrainingError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        for name in ("l2_lambda", "gamma", "min_child_weight"):
            if getattr(self, name) < 0:
                raise TrainingError(f"{name} must be >= 0, got {getattr(self, name)}")


def logistic_loss(margins: np.ndarray, labels: np.ndarray) -> float:
    """Mean binary cross-entropy on the margin scale, numerically stable."""
    margins = np.asarray(margins, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    return float(np.mean(np.logaddexp(0.0, margins) - labels * margins))


def staged_margins(model: TreeEnsemble, rows) -> np.ndarray:
    """Margins after 0, 1, ..., n_trees boosting stages; shape (n_trees+1, n_rows)."""
    mat = as_matrix(rows, model.n_features)
    stages = np.empty((len(model.trees) + 1, mat.shape[0]))
    stages[0] = model.base_score
    for i, tree in enumerate(model.trees):
        stages[i + 1] = stages[i] + tree.leaf_values_batch(mat)
    return stages


def _leaf_weight(G: float, H: float, params: TrainParams) -> float:
    denom = H + params.l2_lambda
    if denom <= 0.0:
        return 0.0
    return -G / denom * params.learning_rate


def _score(G, H, lam):
    denom = H + lam
    return np.where(denom > 0.0, G * G / np.where(denom > 0.0, denom, 1.0), 0.0)


def _best_split(X, g, h, idx, G, H, params: TrainParams):
    """Best (gain, feature, threshold, missing_left) for the rows in ``idx``.

    Candidate thresholds are the sorted unique present values of each feature;
    rows strictly below the threshold go left. Ties resolve to the lowest
    feature index, then the lowest threshold, then missing-goes-left.
    """
    lam = params.l2_lambda
    parent_score = _score(np.float64(G), np.float64(H), lam)
    best = None  # (gain, feature, threshold, missing_left)
    for f in range(X.shape[1]):
        col = X[idx, f]
        present = ~np.isnan(col)
        if not present.any():
            continue
        pv = col[present]
        order = np.argsort(pv, kind="stable")
        sv = pv[order]
        sg = g[idx][present][order]
        sh = h[idx][present][order]
        g_miss = float(g[idx][~present].sum())
        h_miss = float(h[idx][~present].sum())

        cum_g = np.concatenate(([0.0], np.cumsum(sg)))
        cum_h = np.concatenate(([0.0], np.cumsum(sh)))
        thresholds, first_pos = np.unique(sv, return_index=True)
        gl_base = cum_g[first_pos]
        hl_base = cum_h[first_pos]

        gains_by_dir = []
        for missing_left in (True, False):
            GL = gl_base + (g_miss if missing_left else 0.0)
            HL = hl_base + (h_miss if missing_left else 0.0)
            GR = G - GL
            HR = H - HL
            gains = 0.5 * (_score(GL, HL, lam) + _score(GR, HR, lam) - parent_score) - params.gamma
            invalid = (HL < params.min_child_weight) | (HR < params.min_child_weight)
            gains[invalid] = _NEG_INF
            gains_by_dir.append(gains)

        gains_left, gains_right = gains_by_dir
        cand = np.maximum(gains_left, gains_right)
        k = int(np.argmax(cand))  # first max: lowest threshold wins ties
        if cand[k] > 0.0 and (best is None or cand[k] > best[0]):
            best = (float(cand[k]), f, float(thresholds[k]), bool(gains_left[k] >= gains_right[k]))
    return best


def _grow_tree(X, g, h, params: TrainParams, tree_index: int) -> Tree:
    nodes: list[TreeNode] = []
    queue: deque = deque()
    queue.append((0, np.arange(X.shape[0]), 1))
    next_id = 1
    while queue:
        node_id, idx, depth = queue.popleft()
        G = float(g[idx].sum())
        H = float(h[idx].sum())
        split = _best_split(X, g, h, idx, G, H, params) if depth <= params.max_depth else None
        if split is None:
            nodes.append(TreeNode(node_id=node_id, leaf_value=_leaf_weight(G, H, params)))
            continue
        gain, feature, threshold, missing_left = split
        col = X[idx, feature]
        go_left = (col < threshold) | (np.isnan(col) & missing_left)
        left_id, right_id = next_id, next_id + 1
        next_id += 2
        nodes.append(TreeNode(
            node_id=node_id,
            feature_index=feature,
            threshold=threshold,
            left_child=left_id,
            right_child=right_id,
            missing_direction="left" if missing_left else "right",
            split_gain=gain,
        ))
        queue.append((left_id, idx[go_left], depth + 1))
        queue.append((right_id, idx[~go_left], depth + 1))
    nodes.sort(key=lambda n: n.node_id)
    return Tree(nodes, tree_index=tree_index)


def train_reference(features, labels, params: TrainParams) -> TreeEnsemble:
    """Train a boosted logistic ensemble on a labeled matrix.

    ``features`` is row-major with NaN (or None) marking missing readings;
    ``labels`` must contain both classes, encoded as 0 and 1.
    """
    y = np.asarray(labels, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise TrainingError("training requires a non-empty label vector")
    X = as_matrix(features)
    if X.shape[0] != y.size:
        raise TrainingError(f"feature rows ({X.shape[0]}) and labels ({y.size}) disagree")
    if X.shape[0] < 2:
        raise TrainingError("training requires at least 2 rows")
    if not np.isin(y, (0.0, 1.0)).all():
        raise TrainingError("labels must be binary 0/1")
    p = float(y.mean())
    if p <= 0.0 or p >= 1.0:
        raise TrainingError("training requires both classes present")

    base_score = math.log(p / (1.0 - p))
    margins = np.full(X.shape[0], base_score)
    trees = []
    for m in range(params.n_trees):
        prob = 1.0 / (1.0 + np.exp(-margins))
        g = prob - y
        h = prob * (1.0 - prob)
        tree = _grow_tree(X, g, h, params, tree_index=m)
        trees.append(tree)
        margins = margins + tree.leaf_values_batch(X)
    return TreeEnsemble(trees=trees, base_score=base_score, n_features=X.shape[1])
