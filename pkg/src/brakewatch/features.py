"""Human-readable feature layer: catalog metadata and display transforms.

The model works on raw columns; analysts should not have to. The catalog
carries, per model column, a display name, a category tag, a value type, and
an optional unit. A transform spec maps model space to a readable space:
one-hot indicator columns collapse into a single named feature, affine
records rescale displayed values (never contributions), and renames swap a
machine name for a meaningful one. Contributions stay on the margin scale
throughout, so grouping only ever sums them.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import NotFoundError, SchemaError
from .shapley import ContributionSet
from .trees import logistic

VALUE_TYPES = ("numeric", "categorical", "boolean")
MISSING_TOKEN = "no reading"

CATALOG_HEADER = ["name", "display_name", "category", "type", "unit"]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    display_name: str
    category: str
    value_type: str
    unit: str | None = None


class FeatureCatalog:
    """Ordered per-column metadata; column order defines model feature order."""

    def __init__(self, entries):
        self.entries = tuple(entries)
        self._index = {}
        for i, e in enumerate(self.entries):
            self._index.setdefault(e.name, i)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def index_of(self, name: str) -> int:
        if name not in self._index:
            raise NotFoundError(f"unknown feature {name!r}", feature=name)
        return self._index[name]

    def entry(self, name: str) -> CatalogEntry:
        return self.entries[self.index_of(name)]

    def numeric_names(self) -> list[str]:
        return [e.name for e in self.entries if e.value_type in ("numeric", "boolean")]


@dataclass(frozen=True)
class OneHotGroup:
    name: str
    columns: tuple[str, ...]


@dataclass(frozen=True)
class AffineDisplay:
    column: str
    scale: float
    offset: float


@dataclass(frozen=True)
class Rename:
    column: str
    name: str


TransformRecord = Union[OneHotGroup, AffineDisplay, Rename]


@dataclass(frozen=True)
class TransformSpec:
    transforms: tuple[TransformRecord, ...] = ()

    def group_of(self) -> dict[str, OneHotGroup]:
        """Map model column -> owning group; raises if a column is claimed twice."""
        owner: dict[str, OneHotGroup] = {}
        for t in self.transforms:
            if isinstance(t, OneHotGroup):
                for col in t.columns:
                    if col in owner:
                        raise SchemaError(f"column {col!r} claimed by two one-hot groups")
                    owner[col] = t
        return owner

    def rename_of(self) -> dict[str, str]:
        return {t.column: t.name for t in self.transforms if isinstance(t, Rename)}

    def affine_of(self) -> dict[str, AffineDisplay]:
        return {t.column: t for t in self.transforms if isinstance(t, AffineDisplay)}


EMPTY_SPEC = TransformSpec()


@dataclass(frozen=True)
class NamedContributions:
    """A contribution set keyed by readable feature names."""

    base_value: float
    contributions: dict[str, float]
    predicted_margin: float
    row_ref: tuple[str, int] | None = None

    @property
    def predicted_probability(self) -> float:
        return float(logistic(self.predicted_margin))


def load_catalog_csv(path) -> FeatureCatalog:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"catalog file {path} is empty") from None
        if header != CATALOG_HEADER:
            raise SchemaError(f"catalog header must be {','.join(CATALOG_HEADER)!r}, got {','.join(header)!r}")
        entries = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(CATALOG_HEADER):
                raise SchemaError(f"catalog line {lineno}: expected {len(CATALOG_HEADER)} cells, got {len(cells)}")
            name, display, category, vtype, unit = (c.strip() for c in cells)
            entries.append(CatalogEntry(
                name=name,
                display_name=display,
                category=category,
                value_type=vtype,
                unit=unit or None,
            ))
    catalog = FeatureCatalog(entries)
    problems = validate_catalog(catalog, EMPTY_SPEC, None)
    if problems:
        raise SchemaError(f"catalog file {path}: " + "; ".join(problems))
    return catalog


def save_catalog_csv(catalog: FeatureCatalog, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CATALOG_HEADER)
        for e in catalog:
            writer.writerow([e.name, e.display_name, e.category, e.value_type, e.unit or ""])


def parse_transform_spec(document: dict) -> TransformSpec:
    if not isinstance(document, dict) or set(document) != {"transforms"}:
        raise SchemaError("transform spec must be an object with a single 'transforms' list")
    records = []
    for i, raw in enumerate(document["transforms"]):
        if not isinstance(raw, dict) or "kind" not in raw:
            raise SchemaError(f"transform {i}: missing 'kind'")
        kind = raw["kind"]
        try:
            if kind == "one_hot_group":
                records.append(OneHotGroup(name=str(raw["name"]), columns=tuple(str(c) for c in raw["columns"])))
            elif kind == "affine":
                records.append(AffineDisplay(column=str(raw["column"]), scale=float(raw["scale"]),
                                             offset=float(raw["offset"])))
            elif kind == "rename":
                records.append(Rename(column=str(raw["column"]), name=str(raw["name"])))
            else:
                raise SchemaError(f"transform {i}: unknown kind {kind!r}")
        except KeyError as exc:
            raise SchemaError(f"transform {i} ({kind}): missing field {exc.args[0]!r}") from None
    return TransformSpec(tuple(records))


def load_transform_spec(path) -> TransformSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            document = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"transform spec {path} is not valid JSON: {exc}") from exc
    return parse_transform_spec(document)


def save_transform_spec(spec: TransformSpec, path) -> None:
    out = []
    for t in spec.transforms:
        if isinstance(t, OneHotGroup):
            out.append({"kind": "one_hot_group", "name": t.name, "columns": list(t.columns)})
        elif isinstance(t, AffineDisplay):
            out.append({"kind": "affine", "column": t.column, "scale": t.scale, "offset": t.offset})
        else:
            out.append({"kind": "rename", "column": t.column, "name": t.name})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"transforms": out}, fh, indent=1)
        fh.write("\n")


def interpretable_order(catalog: FeatureCatalog, spec: TransformSpec) -> list[str]:
    """Readable feature names, in catalog order with groups at their first member."""
    owner = spec.group_of()
    renames = spec.rename_of()
    seen_groups: set[str] = set()
    out: list[str] = []
    for e in catalog:
        group = owner.get(e.name)
        if group is not None:
            if group.name not in seen_groups:
                seen_groups.add(group.name)
                out.append(group.name)
            continue
        out.append(renames.get(e.name, e.name))
    return out


def to_interpretable(contribs: ContributionSet | NamedContributions,
                     catalog: FeatureCatalog,
                     spec: TransformSpec) -> NamedContributions:
    """Fold model-space contributions into the readable feature space.

    One-hot group members sum into the group feature; affine and rename
    records never change contribution values. Base value and the total are
    preserved (the output holds the same addends, merely regrouped).
    """
    if isinstance(contribs, NamedContributions):
        items = list(contribs.contributions.items())
    else:
        if len(catalog) != contribs.contributions.shape[0]:
            raise SchemaError(
                f"catalog has {len(catalog)} columns, contributions have {contribs.contributions.shape[0]}"
            )
        items = list(zip(catalog.names, (float(v) for v in contribs.contributions)))

    owner = spec.group_of()
    renames = spec.rename_of()
    out: dict[str, float] = {}
    for name, value in items:
        group = owner.get(name)
        if group is not None:
            out[group.name] = out.get(group.name, 0.0) + value
        else:
            target = renames.get(name, name)
            if target in out:
                out[target] += value
            else:
                out[target] = value
    return NamedContributions(
        base_value=contribs.base_value,
        contributions=out,
        predicted_margin=contribs.predicted_margin,
        row_ref=contribs.row_ref,
    )


def _is_missing(value) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value))


def _format_number(value: float, unit: str | None) -> str:
    text = f"{value:g}"
    return f"{text} {unit}" if unit else text


def display_value(name: str, value, catalog: FeatureCatalog, spec: TransformSpec) -> str:
    """Readable rendition of one scalar feature value.

    ``name`` may be a machine name or its renamed form; for one-hot group
    features use :func:`display_row`, which sees all member columns.
    """
    renames_inv = {v: k for k, v in spec.rename_of().items()}
    column = renames_inv.get(name, name)
    entry = catalog.entry(column)
    if _is_missing(value):
        return MISSING_TOKEN
    if entry.value_type == "categorical":
        return str(value)
    if entry.value_type == "boolean":
        return "yes" if float(value) != 0.0 else "no"
    affine = spec.affine_of().get(column)
    shown = float(value)
    if affine is not None:
        shown = affine.scale * shown + affine.offset
    return _format_number(shown, entry.unit)


def display_row(values, catalog: FeatureCatalog, spec: TransformSpec) -> dict[str, str]:
    """Display values for every readable feature of one row (catalog order)."""
    if len(values) != len(catalog):
        raise SchemaError(f"row has {len(values)} values, catalog has {len(catalog)} columns")
    by_column = dict(zip(catalog.names, values))
    owner = spec.group_of()
    renames = spec.rename_of()
    out: dict[str, str] = {}
    for e in catalog:
        group = owner.get(e.name)
        if group is not None:
            if group.name not in out:
                active = [c for c in group.columns
                          if c in by_column and not _is_missing(by_column[c])
                          and float(by_column[c]) != 0.0]
                out[group.name] = active[0] if active else MISSING_TOKEN
            continue
        out[renames.get(e.name, e.name)] = display_value(e.name, by_column[e.name], catalog, spec)
    return out


def validate_catalog(catalog: FeatureCatalog, spec: TransformSpec, dataset=None) -> list[str]:
    """Cross-check catalog, transform spec, and (optionally) a dataset.

    Returns one human-readable diagnostic per violation; an empty list means
    every invariant holds.
    """
    diagnostics: list[str] = []

    seen: set[str] = set()
    for e in catalog:
        if e.name in seen:
            diagnostics.append(f"duplicate feature name: {e.name}")
        seen.add(e.name)
        if not e.display_name:
            diagnostics.append(f"empty display name for feature: {e.name}")
        if e.value_type not in VALUE_TYPES:
            diagnostics.append(f"bad value type {e.value_type!r} for feature: {e.name}")

    claimed: dict[str, str] = {}
    for t in spec.transforms:
        if isinstance(t, OneHotGroup):
            cols = t.columns
        else:
            cols = (t.column,)
        for col in cols:
            if col not in seen:
                diagnostics.append(f"transform references unknown column: {col}")
            if col in claimed:
                if isinstance(t, OneHotGroup) and claimed[col] == "one_hot_group":
                    diagnostics.append(f"overlapping one-hot groups on column: {col}")
                else:
                    diagnostics.append(f"column in more than one transform record: {col}")
            claimed[col] = "one_hot_group" if isinstance(t, OneHotGroup) else "scalar"
        if isinstance(t, AffineDisplay) and t.scale == 0.0:
            diagnostics.append(f"zero scale in affine transform for column: {t.column}")

    if dataset is not None:
        for name in dataset.column_names():
            if name not in seen:
                diagnostics.append(f"uncataloged column: {name}")

    return diagnostics
