"""REST service exposing predictions, explanations, and KPI reports.

Every explanation leaves the wire in interpretable feature space: one-hot
groups are folded and renames applied before serialization, so clients never
see raw indicator columns. Request bodies are strict; unknown fields are
rejected with the offending field named.
"""

from __future__ import annotations

import threading
from typing import Annotated, Literal, Union

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .analysis import feature_distribution, feature_scatter, global_importance
from .config import AppConfig, Runtime, load_runtime
from .errors import (BrakewatchError, ConflictError, ConfigError,
                     NotFoundError)
from .features import NamedContributions, display_row, to_interpretable
from .kpi import (Alert, Decision, Outcome, Window, baseline_report,
                  event_to_json, report_to_dict)
from .neighbors import DistanceConfig, nearest_neighbors
from .shapley import local_contributions
from .trees import logistic, predict_margin


class RowRefBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    entity_id: str
    row_id: int


class SimilarBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    entity_id: str
    row_id: int
    k: int = Field(ge=1)
    feature_subset: list[str] | None = None
    weights: dict[str, float] | None = None
    standardize: bool | None = None


class CompareBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    entity_id_a: str
    row_id_a: int
    entity_id_b: str
    row_id_b: int


class AlertBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["alert"]
    alert_id: str
    entity_id: str
    time: int
    score: float


class DecisionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["decision"]
    alert_id: str
    investigated: bool
    time: int


class OutcomeBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["outcome"]
    entity_id: str
    time: int
    failed: bool
    downtime_hours: float = Field(ge=0)


EventBody = Annotated[Union[AlertBody, DecisionBody, OutcomeBody], Field(discriminator="kind")]


def _validation_field(exc: RequestValidationError) -> str | None:
    for err in exc.errors():
        loc = [part for part in err.get("loc", ()) if isinstance(part, str)]
        loc = [part for part in loc if part not in ("body", "query", "path")]
        if loc:
            return loc[-1]
    return None


def _named_scores(scores, runtime: Runtime) -> dict[str, float]:
    """Fold per-column scores into interpretable features (groups summed)."""
    carrier = NamedContributions(
        base_value=0.0,
        contributions=dict(zip(runtime.catalog.names, (float(s) for s in scores))),
        predicted_margin=0.0,
    )
    return to_interpretable(carrier, runtime.catalog, runtime.transforms).contributions


def _contribution_payload(runtime: Runtime, entity_id: str, row_id: int) -> dict:
    row = runtime.dataset.get_row(entity_id, row_id)
    x = runtime.dataset.model_row(entity_id, row_id)
    named = to_interpretable(
        local_contributions(runtime.model, x, runtime.background, row_ref=row.ref),
        runtime.catalog, runtime.transforms,
    )
    return {
        "entity_id": row.entity_id,
        "row_id": row.row_id,
        "label": row.label,
        "base_value": named.base_value,
        "margin": named.predicted_margin,
        "probability": named.predicted_probability,
        "contributions": named.contributions,
        "values": display_row(row.values, runtime.catalog, runtime.transforms),
    }


def _scalar_column(runtime: Runtime, name: str) -> int:
    """Resolve a feature name (machine or renamed) to its model column."""
    renamed = {v: k for k, v in runtime.transforms.rename_of().items()}
    column = renamed.get(name, name)
    for group_name in {g.name for g in runtime.transforms.group_of().values()}:
        if name == group_name:
            raise ConfigError(f"feature {name!r} is a one-hot group, not a scalar column")
    return runtime.catalog.index_of(column)


def _interpretable_features(runtime: Runtime) -> list[dict]:
    owner = runtime.transforms.group_of()
    renames = runtime.transforms.rename_of()
    seen: set[str] = set()
    out = []
    for entry in runtime.catalog:
        group = owner.get(entry.name)
        if group is not None:
            if group.name in seen:
                continue
            seen.add(group.name)
            out.append({
                "name": group.name,
                "display_name": group.name.replace("_", " "),
                "category": entry.category,
                "type": "categorical",
                "unit": None,
                "members": list(group.columns),
            })
            continue
        out.append({
            "name": renames.get(entry.name, entry.name),
            "display_name": entry.display_name,
            "category": entry.category,
            "type": entry.value_type,
            "unit": entry.unit,
            "members": [entry.name],
        })
    return out


def _parse_windows(start: int, end: int, baselines: str | None) -> tuple[Window, list[Window]]:
    eval_window = Window(start=start, end=end)
    historic = []
    if baselines:
        for piece in baselines.split(","):
            piece = piece.strip()
            if not piece:
                continue
            parts = piece.split("-")
            if len(parts) != 2:
                raise ConfigError(f"baseline {piece!r} must look like start-end")
            try:
                historic.append(Window(start=int(parts[0]), end=int(parts[1])))
            except ValueError as exc:
                raise ConfigError(f"baseline {piece!r}: {exc}") from exc
    return eval_window, historic


def build_app(runtime: Runtime) -> FastAPI:
    app = FastAPI(title="brakewatch", docs_url=None, redoc_url=None)
    importance_cache: dict[str, dict] = {}
    cache_lock = threading.Lock()
    log_write_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, exc: RequestValidationError):
        message = exc.errors()[0].get("msg", "invalid request") if exc.errors() else "invalid request"
        return JSONResponse(status_code=400,
                            content={"error": message, "field": _validation_field(exc)})

    @app.exception_handler(NotFoundError)
    async def on_not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc), **exc.refs})

    @app.exception_handler(ConflictError)
    async def on_conflict(request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(BrakewatchError)
    async def on_domain_error(request: Request, exc: BrakewatchError):
        return JSONResponse(status_code=400, content={"error": str(exc), "field": None})

    @app.exception_handler(ValueError)
    async def on_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": str(exc), "field": None})

    @app.get("/api/v1/entities")
    def entities():
        return {"entities": runtime.dataset.entity_ids()}

    @app.get("/api/v1/entities/{entity_id}/rows")
    def entity_rows(entity_id: str):
        rows = runtime.dataset.rows_for_entity(entity_id)
        payload = []
        for row in rows:
            payload.append({
                "row_id": row.row_id,
                "label": row.label,
                "values": display_row(row.values, runtime.catalog, runtime.transforms),
            })
        return {"entity_id": entity_id, "rows": payload}

    @app.get("/api/v1/features")
    def features():
        machine = [{
            "name": e.name,
            "display_name": e.display_name,
            "category": e.category,
            "type": e.value_type,
            "unit": e.unit,
        } for e in runtime.catalog]
        return {"features": machine, "interpretable": _interpretable_features(runtime)}

    @app.post("/api/v1/predict")
    def predict(body: RowRefBody):
        row = runtime.dataset.get_row(body.entity_id, body.row_id)
        x = runtime.dataset.model_row(body.entity_id, body.row_id)
        margin = predict_margin(runtime.model, x)
        return {
            "entity_id": row.entity_id,
            "row_id": row.row_id,
            "label": row.label,
            "margin": margin,
            "probability": float(logistic(margin)),
        }

    @app.post("/api/v1/contributions")
    def contributions(body: RowRefBody):
        return _contribution_payload(runtime, body.entity_id, body.row_id)

    @app.post("/api/v1/similar")
    def similar(body: SimilarBody):
        row = runtime.dataset.get_row(body.entity_id, body.row_id)
        if body.feature_subset is None and body.weights is None and body.standardize is None:
            config = runtime.config.distance
        else:
            base = runtime.config.distance
            config = DistanceConfig(
                feature_subset=tuple(body.feature_subset) if body.feature_subset else base.feature_subset,
                weights=body.weights if body.weights is not None else base.weights,
                standardize=base.standardize if body.standardize is None else body.standardize,
            )
        neighbors = nearest_neighbors(runtime.dataset, row, body.k, config)
        return {"neighbors": [{
            "entity_id": n.entity_id,
            "row_id": n.row_id,
            "distance": n.distance,
            "label": n.label,
        } for n in neighbors]}

    @app.post("/api/v1/compare")
    def compare(body: CompareBody):
        a = _contribution_payload(runtime, body.entity_id_a, body.row_id_a)
        b = _contribution_payload(runtime, body.entity_id_b, body.row_id_b)
        records = []
        for feature in a["contributions"]:
            ca = a["contributions"][feature]
            cb = b["contributions"][feature]
            records.append({
                "feature": feature,
                "value_a": a["values"][feature],
                "value_b": b["values"][feature],
                "contribution_a": ca,
                "contribution_b": cb,
                "delta_contribution": cb - ca,
            })
        return {
            "row_a": {"entity_id": body.entity_id_a, "row_id": body.row_id_a,
                      "margin": a["margin"], "probability": a["probability"]},
            "row_b": {"entity_id": body.entity_id_b, "row_id": body.row_id_b,
                      "margin": b["margin"], "probability": b["probability"]},
            "features": records,
        }

    def _importance_body(method: str) -> dict:
        if method == "gain":
            table = global_importance(runtime.model, None, None, "gain")
            scores = _named_scores(table.scores, runtime)
            return {"method": "gain", "normalized": True, "scores": scores}
        rows = runtime.dataset.matrix()
        per_row = [
            to_interpretable(
                local_contributions(runtime.model, rows[i], runtime.background),
                runtime.catalog, runtime.transforms,
            ).contributions
            for i in range(rows.shape[0])
        ]
        names = list(per_row[0].keys()) if per_row else []
        stacked = np.array([[row[name] for name in names] for row in per_row])
        if method == "mean_abs_shap":
            scores = np.abs(stacked).mean(axis=0)
            total = float(scores.sum())
            if total > 0:
                scores = scores / total
            return {"method": method, "normalized": True,
                    "scores": dict(zip(names, (float(s) for s in scores)))}
        scores = stacked.mean(axis=0)
        return {"method": method, "normalized": False,
                "scores": dict(zip(names, (float(s) for s in scores)))}

    @app.get("/api/v1/importance")
    def importance(method: Literal["gain", "mean_abs_shap", "signed_mean_shap"] = "gain"):
        with cache_lock:
            if method not in importance_cache:
                importance_cache[method] = _importance_body(method)
            return importance_cache[method]

    @app.get("/api/v1/feature/{name}/scatter")
    def scatter(name: str):
        column = _scalar_column(runtime, name)
        points = feature_scatter(runtime.model, runtime.dataset, column, runtime.background)
        return {"feature": name, "points": [{
            "entity_id": p.row_ref[0],
            "row_id": p.row_ref[1],
            "value": p.value,
            "contribution": p.contribution,
            "probability": p.probability,
        } for p in points]}

    @app.get("/api/v1/feature/{name}/distribution")
    def distribution(name: str):
        column = _scalar_column(runtime, name)
        stats = feature_distribution(runtime.dataset, column)
        return {
            "feature": name,
            "minimum": stats.minimum,
            "q1": stats.q1,
            "median": stats.median,
            "q3": stats.q3,
            "maximum": stats.maximum,
            "count": stats.count,
        }

    @app.post("/api/v1/events", status_code=201)
    def post_event(body: EventBody):
        if isinstance(body, AlertBody):
            event = Alert(alert_id=body.alert_id, entity_id=body.entity_id,
                          time=body.time, score=body.score)
        elif isinstance(body, DecisionBody):
            event = Decision(alert_id=body.alert_id, investigated=body.investigated,
                             time=body.time)
        else:
            event = Outcome(entity_id=body.entity_id, time=body.time,
                            failed=body.failed, downtime_hours=body.downtime_hours)
        runtime.event_log.record(event)
        if runtime.config.event_log_path:
            with log_write_lock:
                with open(runtime.config.event_log_path, "a", encoding="utf-8") as fh:
                    fh.write(event_to_json(event) + "\n")
        return {"recorded": True, "count": len(runtime.event_log)}

    @app.get("/api/v1/kpi/report")
    def kpi_report(start: int, end: int, baselines: str | None = None):
        eval_window, historic = _parse_windows(start, end, baselines)
        report = baseline_report(runtime.event_log, eval_window, historic)
        return report_to_dict(report)

    return app


def serve(config: AppConfig, port: int | None = None) -> None:
    """Load artifacts, cross-validate, and block serving HTTP."""
    import uvicorn

    runtime = load_runtime(config)
    app = build_app(runtime)
    uvicorn.run(app, host=config.listen_address,
                port=port if port is not None else config.port, log_level="warning")
