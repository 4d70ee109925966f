"""Portable gradient-boosted-tree model: document format, validation, inference.

The model is an additive ensemble of binary decision trees on the raw margin
(log-odds) scale. Routing convention is fixed: ``value < threshold`` goes
left, ``value >= threshold`` goes right, and a missing value follows the
node's stored missing direction. Inference is deterministic and models are
immutable after construction, so they are safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ModelFormatError

MODEL_FORMAT_VERSION = 1
OBJECTIVE_BINARY_LOGISTIC = "binary_logistic"

_NODE_INTERNAL_KEYS = {"id", "feature", "threshold", "left", "right", "missing", "gain"}
_NODE_LEAF_KEYS = {"id", "leaf"}
_TOP_KEYS = {"version", "objective", "base_score", "n_features", "trees"}


@dataclass(frozen=True)
class TreeNode:
    """One node of a decision tree, either an internal split or a leaf."""

    node_id: int
    feature_index: int | None = None
    threshold: float | None = None
    left_child: int | None = None
    right_child: int | None = None
    missing_direction: str = "left"
    leaf_value: float | None = None
    split_gain: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf_value is not None


@dataclass(frozen=True)
class LeafRegion:
    """Axis-aligned region of one leaf: per-feature half-open interval [lo, hi)
    plus whether a missing value for that feature routes onto this path."""

    value: float
    features: np.ndarray  # int, deduplicated features tested on the path
    lows: np.ndarray
    highs: np.ndarray
    missing_ok: np.ndarray  # bool

    def pass_mask(self, values: np.ndarray) -> np.ndarray:
        """Whether each column of ``values`` satisfies this region's constraint.

        ``values`` has one column per region feature (last axis) and may carry
        NaN for missing readings.
        """
        missing = np.isnan(values)
        inside = (values >= self.lows) & (values < self.highs)
        return np.where(missing, self.missing_ok, inside)


class Tree:
    """A validated binary tree compiled to flat arrays for fast routing."""

    def __init__(self, nodes: list[TreeNode], tree_index: int = 0):
        self.nodes = tuple(nodes)
        self._tree_index = tree_index
        self._validate_structure()
        self._compile()
        self.leaf_regions = tuple(self._extract_regions())

    def _err(self, node_id, message) -> ModelFormatError:
        return ModelFormatError(f"tree {self._tree_index} node {node_id}: {message}")

    def _validate_structure(self) -> None:
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise self._err(dup, "duplicate node id")
        by_id = {n.node_id: n for n in self.nodes}
        if 0 not in by_id:
            raise ModelFormatError(f"tree {self._tree_index}: missing root node 0")

        for n in self.nodes:
            internal_fields = (n.feature_index, n.threshold, n.left_child, n.right_child)
            if n.is_leaf:
                if any(v is not None for v in internal_fields) or n.split_gain is not None:
                    raise self._err(n.node_id, "leaf carries split fields")
            else:
                if any(v is None for v in internal_fields):
                    raise self._err(n.node_id, "internal node is missing split fields")
                if n.split_gain is None:
                    raise self._err(n.node_id, "internal node is missing split gain")
                if n.split_gain < 0:
                    raise self._err(n.node_id, f"negative split gain {n.split_gain}")
                if n.missing_direction not in ("left", "right"):
                    raise self._err(n.node_id, f"bad missing direction {n.missing_direction!r}")
                for child in (n.left_child, n.right_child):
                    if child not in by_id:
                        raise self._err(n.node_id, f"dangling child id {child}")

        # Proper binary tree: every non-root node has exactly one parent and
        # everything is reachable from the root (which also excludes cycles).
        parents: dict[int, int] = {}
        for n in self.nodes:
            if n.is_leaf:
                continue
            for child in (n.left_child, n.right_child):
                if child == 0:
                    raise self._err(n.node_id, "root listed as a child")
                if child in parents:
                    raise self._err(child, "node has two parents")
                parents[child] = n.node_id
        reached = set()
        stack = [0]
        while stack:
            nid = stack.pop()
            if nid in reached:
                raise self._err(nid, "cycle detected")
            reached.add(nid)
            node = by_id[nid]
            if not node.is_leaf:
                stack.extend((node.left_child, node.right_child))
        if reached != set(ids):
            orphan = min(set(ids) - reached)
            raise self._err(orphan, "node unreachable from root")

    def _compile(self) -> None:
        slot = {n.node_id: i for i, n in enumerate(self.nodes)}
        n = len(self.nodes)
        self._slot_of_root = slot[0]
        self._feature = np.full(n, -1, dtype=np.int64)
        self._threshold = np.zeros(n)
        self._left = np.full(n, -1, dtype=np.int64)
        self._right = np.full(n, -1, dtype=np.int64)
        self._miss_left = np.ones(n, dtype=bool)
        self._value = np.zeros(n)
        self._gain = np.zeros(n)
        for i, node in enumerate(self.nodes):
            if node.is_leaf:
                self._value[i] = node.leaf_value
            else:
                self._feature[i] = node.feature_index
                self._threshold[i] = node.threshold
                self._left[i] = slot[node.left_child]
                self._right[i] = slot[node.right_child]
                self._miss_left[i] = node.missing_direction == "left"
                self._gain[i] = node.split_gain

    def _extract_regions(self) -> list[LeafRegion]:
        regions: list[LeafRegion] = []

        def visit(slot: int, constraints: dict[int, tuple[float, float, bool]]):
            if self._feature[slot] < 0:
                feats = sorted(constraints)
                regions.append(
                    LeafRegion(
                        value=float(self._value[slot]),
                        features=np.array(feats, dtype=np.int64),
                        lows=np.array([constraints[f][0] for f in feats]),
                        highs=np.array([constraints[f][1] for f in feats]),
                        missing_ok=np.array([constraints[f][2] for f in feats], dtype=bool),
                    )
                )
                return
            f = int(self._feature[slot])
            t = float(self._threshold[slot])
            miss_left = bool(self._miss_left[slot])
            lo, hi, ok = constraints.get(f, (-math.inf, math.inf, True))
            visit(int(self._left[slot]), {**constraints, f: (lo, min(hi, t), ok and miss_left)})
            visit(int(self._right[slot]), {**constraints, f: (max(lo, t), hi, ok and not miss_left)})

        visit(self._slot_of_root, {})
        return regions

    def route(self, row: np.ndarray) -> int:
        """Index (slot) of the leaf this row lands in."""
        slot = self._slot_of_root
        while self._feature[slot] >= 0:
            v = row[self._feature[slot]]
            if np.isnan(v):
                go_left = self._miss_left[slot]
            else:
                go_left = v < self._threshold[slot]
            slot = self._left[slot] if go_left else self._right[slot]
        return int(slot)

    def leaf_value(self, row: np.ndarray) -> float:
        return float(self._value[self.route(row)])

    def leaf_values_batch(self, rows: np.ndarray) -> np.ndarray:
        cur = np.full(rows.shape[0], self._slot_of_root, dtype=np.int64)
        while True:
            feat = self._feature[cur]
            active = np.nonzero(feat >= 0)[0]
            if active.size == 0:
                break
            slots = cur[active]
            vals = rows[active, feat[active]]
            missing = np.isnan(vals)
            go_left = np.where(missing, self._miss_left[slots], vals < self._threshold[slots])
            cur[active] = np.where(go_left, self._left[slots], self._right[slots])
        return self._value[cur]

    def max_feature_index(self) -> int:
        internal = self._feature >= 0
        return int(self._feature[internal].max()) if internal.any() else -1


class TreeEnsemble:
    """Immutable additive tree model with a margin-scale base score."""

    def __init__(self, trees: list[Tree], base_score: float, n_features: int,
                 objective: str = OBJECTIVE_BINARY_LOGISTIC):
        if objective != OBJECTIVE_BINARY_LOGISTIC:
            raise ModelFormatError(f"unsupported objective {objective!r}")
        if n_features < 1:
            raise ModelFormatError(f"n_features must be >= 1, got {n_features}")
        for ti, tree in enumerate(trees):
            if tree.max_feature_index() >= n_features:
                raise ModelFormatError(
                    f"tree {ti}: feature index {tree.max_feature_index()} out of range "
                    f"for n_features={n_features}"
                )
        self.trees = tuple(trees)
        self.base_score = float(base_score)
        self.n_features = int(n_features)
        self.objective = objective

    def used_features(self) -> list[int]:
        """Sorted indices of features that appear in at least one split."""
        used: set[int] = set()
        for tree in self.trees:
            used.update(int(f) for f in tree._feature[tree._feature >= 0])
        return sorted(used)


def as_row_array(row, n_features: int) -> np.ndarray:
    """Normalize a feature vector to float64 with NaN for missing values."""
    if isinstance(row, np.ndarray) and row.dtype == np.float64 and row.ndim == 1:
        arr = row
    else:
        arr = np.array([math.nan if v is None else float(v) for v in row], dtype=np.float64)
    if arr.shape[0] != n_features:
        raise DimensionError(f"row has {arr.shape[0]} features, model expects {n_features}")
    return arr


def as_matrix(rows, n_features: int | None = None) -> np.ndarray:
    """Normalize a collection of feature vectors to a (n, width) float64 matrix.

    When ``n_features`` is given the width is validated against it; otherwise
    the width is taken from the data.
    """
    if isinstance(rows, np.ndarray) and rows.dtype == np.float64 and rows.ndim == 2:
        mat = rows
    else:
        converted = [
            np.array([math.nan if v is None else float(v) for v in r], dtype=np.float64)
            for r in rows
        ]
        widths = {arr.shape[0] for arr in converted}
        if len(widths) > 1:
            raise DimensionError(f"rows have inconsistent widths {sorted(widths)}")
        mat = np.vstack(converted) if converted else np.empty((0, n_features or 0))
    if n_features is not None and mat.shape[1] != n_features:
        raise DimensionError(f"matrix has {mat.shape[1]} columns, model expects {n_features}")
    return mat


def predict_margin(model: TreeEnsemble, row) -> float:
    """Raw margin (log-odds) for one row: base score plus routed leaf values."""
    arr = as_row_array(row, model.n_features)
    margin = model.base_score
    for tree in model.trees:
        margin += tree.leaf_value(arr)
    return margin


def predict_margin_batch(model: TreeEnsemble, rows) -> np.ndarray:
    """Vectorized margins; accumulation order matches :func:`predict_margin`."""
    mat = as_matrix(rows, model.n_features)
    margins = np.full(mat.shape[0], model.base_score)
    for tree in model.trees:
        margins += tree.leaf_values_batch(mat)
    return margins


def logistic(margin):
    return 1.0 / (1.0 + np.exp(-np.asarray(margin, dtype=np.float64)))


def predict_proba(model: TreeEnsemble, rows):
    """Positive-class (failure) probability for one row or a matrix of rows."""
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        return logistic(predict_margin_batch(model, rows))
    return float(logistic(predict_margin(model, rows)))


def gain_totals(model: TreeEnsemble) -> np.ndarray:
    """Total recorded split gain per feature, summed across all trees."""
    totals = np.zeros(model.n_features)
    for tree in model.trees:
        internal = tree._feature >= 0
        np.add.at(totals, tree._feature[internal], tree._gain[internal])
    return totals


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ModelFormatError(message)


def _parse_node(raw: dict, tree_index: int) -> TreeNode:
    if not isinstance(raw, dict):
        raise ModelFormatError(f"tree {tree_index}: node entry is not an object")
    node_id = raw.get("id")
    where = f"tree {tree_index} node {node_id}"
    _require(isinstance(node_id, int) and not isinstance(node_id, bool), f"{where}: bad or missing id")
    keys = set(raw)
    if "leaf" in keys:
        _require(keys <= _NODE_LEAF_KEYS, f"{where}: unknown fields {sorted(keys - _NODE_LEAF_KEYS)}")
        _require(isinstance(raw["leaf"], (int, float)) and not isinstance(raw["leaf"], bool),
                 f"{where}: leaf value must be a number")
        return TreeNode(node_id=node_id, leaf_value=float(raw["leaf"]))
    _require(keys <= _NODE_INTERNAL_KEYS, f"{where}: unknown fields {sorted(keys - _NODE_INTERNAL_KEYS)}")
    missing_keys = {"feature", "threshold", "left", "right", "gain"} - keys
    _require(not missing_keys, f"{where}: missing fields {sorted(missing_keys)}")
    for k in ("feature", "left", "right"):
        _require(isinstance(raw[k], int) and not isinstance(raw[k], bool), f"{where}: field {k!r} must be an integer")
    for k in ("threshold", "gain"):
        _require(isinstance(raw[k], (int, float)) and not isinstance(raw[k], bool),
                 f"{where}: field {k!r} must be a number")
    _require(raw["feature"] >= 0, f"{where}: negative feature index")
    missing = raw.get("missing", "left")
    _require(missing in ("left", "right"), f"{where}: missing direction must be 'left' or 'right'")
    return TreeNode(
        node_id=node_id,
        feature_index=raw["feature"],
        threshold=float(raw["threshold"]),
        left_child=raw["left"],
        right_child=raw["right"],
        missing_direction=missing,
        split_gain=float(raw["gain"]),
    )


def load_model(document: dict) -> TreeEnsemble:
    """Build a validated ensemble from a parsed model document."""
    _require(isinstance(document, dict), "model document is not an object")
    unknown = set(document) - _TOP_KEYS
    _require(not unknown, f"unknown top-level fields {sorted(unknown)}")
    missing = _TOP_KEYS - set(document)
    _require(not missing, f"missing top-level fields {sorted(missing)}")
    _require(document["version"] == MODEL_FORMAT_VERSION,
             f"unsupported model format version {document['version']!r}")
    _require(isinstance(document["base_score"], (int, float)) and not isinstance(document["base_score"], bool),
             "base_score must be a number")
    _require(isinstance(document["n_features"], int) and not isinstance(document["n_features"], bool),
             "n_features must be an integer")
    _require(isinstance(document["trees"], list), "trees must be a list")
    trees = []
    for ti, raw_tree in enumerate(document["trees"]):
        _require(isinstance(raw_tree, dict) and set(raw_tree) == {"nodes"},
                 f"tree {ti}: expected an object with a 'nodes' list")
        _require(isinstance(raw_tree["nodes"], list) and raw_tree["nodes"],
                 f"tree {ti}: 'nodes' must be a non-empty list")
        nodes = [_parse_node(raw, ti) for raw in raw_tree["nodes"]]
        trees.append(Tree(nodes, tree_index=ti))
    return TreeEnsemble(
        trees=trees,
        base_score=float(document["base_score"]),
        n_features=document["n_features"],
        objective=document["objective"],
    )


def save_model(model: TreeEnsemble) -> dict:
    """Serialize an ensemble back to the model document structure."""
    trees = []
    for tree in model.trees:
        nodes = []
        for node in tree.nodes:
            if node.is_leaf:
                nodes.append({"id": node.node_id, "leaf": node.leaf_value})
            else:
                nodes.append({
                    "id": node.node_id,
                    "feature": node.feature_index,
                    "threshold": node.threshold,
                    "left": node.left_child,
                    "right": node.right_child,
                    "missing": node.missing_direction,
                    "gain": node.split_gain,
                })
        trees.append({"nodes": nodes})
    return {
        "version": MODEL_FORMAT_VERSION,
        "objective": model.objective,
        "base_score": model.base_score,
        "n_features": model.n_features,
        "trees": trees,
    }


def model_to_json(model: TreeEnsemble) -> str:
    return json.dumps(save_model(model), indent=1)


def load_model_file(path) -> TreeEnsemble:
    with open(path, encoding="utf-8") as fh:
        try:
            document = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file {path} is not valid JSON: {exc}") from exc
    return load_model(document)


def save_model_file(model: TreeEnsemble, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))
        fh.write("\n")
