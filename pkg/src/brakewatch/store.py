"""Row store for per-turbine readings, with CSV ingest and column stats.

Rows are keyed by (entity_id, row_id). Values line up with the feature
catalog; numeric and boolean columns feed the model matrix as floats with
NaN for missing, categorical columns stay as strings and are NaN in model
space (tree splits never see them).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConflictError, DimensionError, NotFoundError, SchemaError
from .features import FeatureCatalog

FIXED_COLUMNS = ["entity_id", "row_id", "label"]


@dataclass(frozen=True)
class EntityRow:
    entity_id: str
    row_id: int
    values: tuple
    label: int | None = None

    @property
    def ref(self) -> tuple[str, int]:
        return (self.entity_id, self.row_id)


class Dataset:
    """Immutable collection of rows sharing one catalog."""

    def __init__(self, rows, catalog: FeatureCatalog):
        self.catalog = catalog
        self.rows = tuple(rows)
        self._position: dict[tuple[str, int], int] = {}
        for i, row in enumerate(self.rows):
            if len(row.values) != len(catalog):
                raise DimensionError(
                    f"row {row.ref} has {len(row.values)} values, catalog has {len(catalog)} columns"
                )
            if row.ref in self._position:
                raise ConflictError(f"duplicate row key {row.ref}")
            self._position[row.ref] = i
        self._matrix = self._build_matrix()
        self._means, self._stds = self._compute_stats()

    def _build_matrix(self) -> np.ndarray:
        numeric = [e.value_type in ("numeric", "boolean") for e in self.catalog]
        matrix = np.full((len(self.rows), len(self.catalog)), np.nan, dtype=np.float64)
        for i, row in enumerate(self.rows):
            for j, value in enumerate(row.values):
                if not numeric[j] or value is None:
                    continue
                matrix[i, j] = float(value)
        return matrix

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column_names(self) -> list[str]:
        return self.catalog.names

    def matrix(self) -> np.ndarray:
        """Model-space matrix, one row per stored row. Treat as read-only."""
        return self._matrix

    def get_row(self, entity_id: str, row_id: int) -> EntityRow:
        return self.rows[self.row_index(entity_id, row_id)]

    def model_row(self, entity_id: str, row_id: int) -> np.ndarray:
        return self._matrix[self.row_index(entity_id, row_id)]

    def row_index(self, entity_id: str, row_id: int) -> int:
        key = (entity_id, int(row_id))
        if key not in self._position:
            raise NotFoundError(
                f"no row for entity {entity_id!r} with row id {row_id}",
                entity_id=entity_id, row_id=row_id,
            )
        return self._position[key]

    def entity_ids(self) -> list[str]:
        return sorted({row.entity_id for row in self.rows})

    def rows_for_entity(self, entity_id: str) -> list[EntityRow]:
        found = [row for row in self.rows if row.entity_id == entity_id]
        if not found:
            raise NotFoundError(f"no rows for entity {entity_id!r}", entity_id=entity_id)
        return sorted(found, key=lambda r: r.row_id)

    def training_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Feature matrix and label vector over the labeled rows only."""
        keep = [i for i, row in enumerate(self.rows) if row.label is not None]
        labels = np.array([self.rows[i].label for i in keep], dtype=np.float64)
        return self._matrix[keep], labels

    def _compute_stats(self) -> tuple[np.ndarray, np.ndarray]:
        with np.errstate(invalid="ignore"):
            counts = np.sum(~np.isnan(self._matrix), axis=0)
            means = np.full(len(self.catalog), np.nan)
            stds = np.full(len(self.catalog), np.nan)
            observed = counts > 0
            if self._matrix.size:
                means[observed] = np.nanmean(self._matrix[:, observed], axis=0)
                stds[observed] = np.nanstd(self._matrix[:, observed], axis=0)
        return means, stds

    def column_stats(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-column mean and population standard deviation, missing skipped.

        Computed once at load; columns with no observed values are NaN in
        both arrays.
        """
        return self._means, self._stds


def _parse_cell(text: str, value_type: str, where: str):
    if text == "":
        return None
    if value_type == "categorical":
        return text
    try:
        value = float(text)
    except ValueError:
        raise SchemaError(f"{where}: {text!r} is not a number") from None
    if math.isnan(value):
        return None
    return value


def ingest(path, catalog: FeatureCatalog) -> Dataset:
    """Load a readings CSV against the catalog.

    Header must be exactly entity_id,row_id,label,<catalog names in order>.
    Empty cells mean missing; labels are blank, 0, or 1.
    """
    expected_header = FIXED_COLUMNS + catalog.names
    rows = []
    seen: set[tuple[str, int]] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"data file {path} is empty") from None
        if header != expected_header:
            raise SchemaError(
                f"data header mismatch: expected {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            where = f"data line {lineno}"
            if len(cells) != len(expected_header):
                raise SchemaError(f"{where}: expected {len(expected_header)} cells, got {len(cells)}")
            entity_id = cells[0].strip()
            if not entity_id:
                raise SchemaError(f"{where}: empty entity_id")
            try:
                row_id = int(cells[1])
            except ValueError:
                raise SchemaError(f"{where}: row_id {cells[1]!r} is not an integer") from None
            label_text = cells[2].strip()
            if label_text == "":
                label = None
            elif label_text in ("0", "1"):
                label = int(label_text)
            else:
                raise SchemaError(f"{where}: label must be blank, 0, or 1, got {label_text!r}")
            key = (entity_id, row_id)
            if key in seen:
                raise ConflictError(f"{where}: duplicate row key {key}")
            seen.add(key)
            values = tuple(
                _parse_cell(cell, entry.value_type, where)
                for cell, entry in zip(cells[3:], catalog.entries)
            )
            rows.append(EntityRow(entity_id=entity_id, row_id=row_id, values=values, label=label))
    return Dataset(rows, catalog)


def write_dataset_csv(dataset: Dataset, path) -> None:
    def cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, float):
            if math.isnan(value):
                return ""
            return repr(value)
        return str(value)

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIXED_COLUMNS + dataset.catalog.names)
        for row in dataset.rows:
            label = "" if row.label is None else str(row.label)
            writer.writerow([row.entity_id, str(row.row_id), label] + [cell(v) for v in row.values])
