"""REST surface: endpoint contracts, strict schemas, wire-level invariants."""

import dataclasses
import json
import math

import pytest
from fastapi.testclient import TestClient

from brakewatch.analysis import feature_distribution
from brakewatch.config import load_config, load_runtime
from brakewatch.service import build_app


@pytest.fixture(scope="module")
def client(workspace):
    runtime = load_runtime(load_config(workspace / "config.yaml"))
    return TestClient(build_app(runtime))


@pytest.fixture()
def event_client(workspace, tmp_path):
    config = load_config(workspace / "config.yaml")
    config = dataclasses.replace(config, event_log_path=str(tmp_path / "events.ndjson"))
    runtime = load_runtime(config)
    return TestClient(build_app(runtime)), tmp_path / "events.ndjson"


def first_row(client, entity="T01"):
    rows = client.get(f"/api/v1/entities/{entity}/rows").json()["rows"]
    return {"entity_id": entity, "row_id": rows[0]["row_id"]}


class TestEntities:
    def test_entity_listing(self, client):
        body = client.get("/api/v1/entities").json()
        assert body == {"entities": ["T01", "T02", "T03", "T04", "T05"]}

    def test_rows_for_entity(self, client):
        body = client.get("/api/v1/entities/T01/rows").json()
        assert body["entity_id"] == "T01"
        assert len(body["rows"]) == 100
        row_ids = [r["row_id"] for r in body["rows"]]
        assert row_ids == sorted(row_ids)
        assert all(r["label"] in (0, 1, None) for r in body["rows"])

    def test_row_values_are_display_strings(self, client):
        row = client.get("/api/v1/entities/T01/rows").json()["rows"][0]
        assert "turbine_mode" in row["values"]
        assert "mode_normal" not in row["values"]
        assert row["values"]["turbine_mode"].startswith("mode_") \
            or row["values"]["turbine_mode"] == "no reading"

    def test_unknown_entity_404(self, client):
        response = client.get("/api/v1/entities/T99/rows")
        assert response.status_code == 404
        assert response.json()["entity_id"] == "T99"


class TestFeatures:
    def test_machine_and_interpretable_lists(self, client):
        body = client.get("/api/v1/features").json()
        assert len(body["features"]) == 15
        assert {"name", "display_name", "category", "type", "unit"} \
            == set(body["features"][0])
        assert len(body["interpretable"]) == 13

    def test_group_entry_carries_members(self, client):
        body = client.get("/api/v1/features").json()
        group = next(f for f in body["interpretable"] if f["name"] == "turbine_mode")
        assert group["members"] == ["mode_normal", "mode_curtailed", "mode_service"]
        assert group["type"] == "categorical"

    def test_renames_applied(self, client):
        names = [f["name"] for f in client.get("/api/v1/features").json()["interpretable"]]
        assert "axial_vibration" in names and "vib_axial_mm_s" not in names


class TestPredict:
    def test_probability_matches_margin(self, client):
        body = client.post("/api/v1/predict", json=first_row(client)).json()
        assert body["probability"] == pytest.approx(
            1.0 / (1.0 + math.exp(-body["margin"])), abs=1e-12)
        assert body["entity_id"] == "T01"
        assert body["label"] in (0, 1, None)

    def test_unknown_row_404_with_both_ids(self, client):
        response = client.post("/api/v1/predict",
                               json={"entity_id": "T01", "row_id": 1})
        assert response.status_code == 404
        body = response.json()
        assert body["entity_id"] == "T01" and body["row_id"] == 1

    def test_unknown_field_named(self, client):
        response = client.post("/api/v1/predict",
                               json={**first_row(client), "foo": 1})
        assert response.status_code == 400
        assert response.json()["field"] == "foo"

    def test_missing_field_named(self, client):
        response = client.post("/api/v1/predict", json={"entity_id": "T01"})
        assert response.status_code == 400
        assert response.json()["field"] == "row_id"


class TestContributions:
    def test_payload_shape(self, client):
        body = client.post("/api/v1/contributions", json=first_row(client)).json()
        assert set(body) == {"entity_id", "row_id", "label", "base_value",
                             "margin", "probability", "contributions", "values"}
        assert set(body["contributions"]) == set(body["values"])
        assert "turbine_mode" in body["contributions"]

    def test_wire_local_accuracy(self, client):
        for entity in ("T01", "T03"):
            ref = first_row(client, entity)
            body = client.post("/api/v1/contributions", json=ref).json()
            total = body["base_value"] + math.fsum(body["contributions"].values())
            assert total == pytest.approx(body["margin"], abs=1e-8)

    def test_matches_predict_margin(self, client):
        ref = first_row(client)
        contributions = client.post("/api/v1/contributions", json=ref).json()
        predict = client.post("/api/v1/predict", json=ref).json()
        assert contributions["margin"] == predict["margin"]
        assert contributions["probability"] == predict["probability"]

    def test_repeated_reads_byte_identical(self, client):
        ref = first_row(client)
        a = client.post("/api/v1/contributions", json=ref).content
        b = client.post("/api/v1/contributions", json=ref).content
        assert a == b

    def test_unknown_row_404(self, client):
        response = client.post("/api/v1/contributions",
                               json={"entity_id": "T07", "row_id": 12})
        assert response.status_code == 404
        assert response.json() == {
            "error": response.json()["error"], "entity_id": "T07", "row_id": 12}


class TestSimilar:
    def test_neighbors_ascending_with_self_first(self, client):
        ref = first_row(client)
        body = client.post("/api/v1/similar", json={**ref, "k": 5}).json()
        neighbors = body["neighbors"]
        assert len(neighbors) == 5
        assert neighbors[0]["entity_id"] == ref["entity_id"]
        assert neighbors[0]["row_id"] == ref["row_id"]
        assert neighbors[0]["distance"] == 0.0
        distances = [n["distance"] for n in neighbors]
        assert distances == sorted(distances)

    def test_k_zero_rejected(self, client):
        response = client.post("/api/v1/similar", json={**first_row(client), "k": 0})
        assert response.status_code == 400
        assert response.json()["field"] == "k"

    def test_distance_overrides_accepted(self, client):
        ref = first_row(client)
        body = client.post("/api/v1/similar", json={
            **ref, "k": 3,
            "feature_subset": ["brake_caliper_temp_c", "rotor_speed_rpm"],
            "weights": {"brake_caliper_temp_c": 3.0},
            "standardize": False,
        }).json()
        assert len(body["neighbors"]) == 3

    def test_unknown_weight_feature_404(self, client):
        response = client.post("/api/v1/similar",
                               json={**first_row(client), "k": 3, "weights": {"ghost": 1.0}})
        assert response.status_code == 404
        assert response.json()["feature"] == "ghost"


class TestCompare:
    def pair(self, client):
        rows = client.get("/api/v1/entities/T01/rows").json()["rows"]
        return {"entity_id_a": "T01", "row_id_a": rows[0]["row_id"],
                "entity_id_b": "T01", "row_id_b": rows[1]["row_id"]}

    def test_per_feature_records(self, client):
        body = client.post("/api/v1/compare", json=self.pair(client)).json()
        assert len(body["features"]) == 13
        for record in body["features"]:
            assert set(record) == {"feature", "value_a", "value_b",
                                   "contribution_a", "contribution_b",
                                   "delta_contribution"}
            assert record["delta_contribution"] == \
                record["contribution_b"] - record["contribution_a"]

    def test_swap_negates_deltas(self, client):
        pair = self.pair(client)
        swapped = {"entity_id_a": pair["entity_id_b"], "row_id_a": pair["row_id_b"],
                   "entity_id_b": pair["entity_id_a"], "row_id_b": pair["row_id_a"]}
        forward = client.post("/api/v1/compare", json=pair).json()
        backward = client.post("/api/v1/compare", json=swapped).json()
        deltas_f = {r["feature"]: r["delta_contribution"] for r in forward["features"]}
        deltas_b = {r["feature"]: r["delta_contribution"] for r in backward["features"]}
        assert deltas_f == {name: -v for name, v in deltas_b.items()}

    def test_same_row_zero_deltas(self, client):
        ref = first_row(client)
        body = client.post("/api/v1/compare", json={
            "entity_id_a": ref["entity_id"], "row_id_a": ref["row_id"],
            "entity_id_b": ref["entity_id"], "row_id_b": ref["row_id"]}).json()
        assert all(r["delta_contribution"] == 0.0 for r in body["features"])
        assert body["row_a"]["margin"] == body["row_b"]["margin"]

    def test_agrees_with_contribution_endpoint(self, client):
        pair = self.pair(client)
        body = client.post("/api/v1/compare", json=pair).json()
        a = client.post("/api/v1/contributions", json={
            "entity_id": pair["entity_id_a"], "row_id": pair["row_id_a"]}).json()
        b = client.post("/api/v1/contributions", json={
            "entity_id": pair["entity_id_b"], "row_id": pair["row_id_b"]}).json()
        for record in body["features"]:
            assert record["contribution_a"] == a["contributions"][record["feature"]]
            assert record["contribution_b"] == b["contributions"][record["feature"]]


class TestImportance:
    def test_gain_normalized_over_interpretable_names(self, client):
        body = client.get("/api/v1/importance?method=gain").json()
        assert body["method"] == "gain" and body["normalized"] is True
        assert math.fsum(body["scores"].values()) == pytest.approx(1.0, abs=1e-12)
        assert "turbine_mode" in body["scores"]

    def test_mean_abs_shap(self, client):
        body = client.get("/api/v1/importance?method=mean_abs_shap").json()
        assert body["normalized"] is True
        assert all(v >= 0 for v in body["scores"].values())
        assert math.fsum(body["scores"].values()) == pytest.approx(1.0, abs=1e-12)

    def test_signed_mean_shap_unnormalized(self, client):
        body = client.get("/api/v1/importance?method=signed_mean_shap").json()
        assert body["normalized"] is False

    def test_default_method_is_gain(self, client):
        assert client.get("/api/v1/importance").json()["method"] == "gain"

    def test_invalid_method_rejected(self, client):
        response = client.get("/api/v1/importance?method=entropy")
        assert response.status_code == 400
        assert response.json()["field"] == "method"

    def test_repeated_reads_byte_identical(self, client):
        a = client.get("/api/v1/importance?method=mean_abs_shap").content
        b = client.get("/api/v1/importance?method=mean_abs_shap").content
        assert a == b


class TestFeatureViews:
    def test_scatter_one_point_per_row(self, client):
        body = client.get("/api/v1/feature/brake_caliper_temp_c/scatter").json()
        assert body["feature"] == "brake_caliper_temp_c"
        assert len(body["points"]) == 500
        assert {"entity_id", "row_id", "value", "contribution", "probability"} \
            == set(body["points"][0])

    def test_scatter_accepts_renamed_feature(self, client):
        body = client.get("/api/v1/feature/axial_vibration/scatter").json()
        assert len(body["points"]) == 500

    def test_scatter_includes_missing_markers(self, client):
        body = client.get("/api/v1/feature/brake_caliper_temp_c/scatter").json()
        assert any(p["value"] is None for p in body["points"])

    def test_scatter_on_group_rejected(self, client):
        response = client.get("/api/v1/feature/turbine_mode/scatter")
        assert response.status_code == 400
        assert "one-hot group" in response.json()["error"]

    def test_scatter_unknown_feature_404(self, client):
        assert client.get("/api/v1/feature/ghost/scatter").status_code == 404

    def test_distribution_matches_engine(self, client, fleet):
        body = client.get("/api/v1/feature/brake_caliper_temp_c/distribution").json()
        stats = feature_distribution(fleet, "brake_caliper_temp_c")
        assert body["minimum"] == stats.minimum
        assert body["q1"] == stats.q1
        assert body["median"] == stats.median
        assert body["q3"] == stats.q3
        assert body["maximum"] == stats.maximum
        assert body["count"] == stats.count

    def test_distribution_on_categorical_rejected(self, client):
        response = client.get("/api/v1/feature/controller_firmware/distribution")
        assert response.status_code == 400
        assert "categorical" in response.json()["error"]


class TestEventsAndKpi:
    def test_event_flow_and_report(self, event_client):
        client, log_path = event_client
        assert client.post("/api/v1/events", json={
            "kind": "alert", "alert_id": "a1", "entity_id": "T01",
            "time": 100, "score": 0.91}).status_code == 201
        assert client.post("/api/v1/events", json={
            "kind": "alert", "alert_id": "a2", "entity_id": "T02",
            "time": 150, "score": 0.77}).status_code == 201
        body = client.post("/api/v1/events", json={
            "kind": "decision", "alert_id": "a1", "investigated": True,
            "time": 170}).json()
        assert body == {"recorded": True, "count": 3}
        assert client.post("/api/v1/events", json={
            "kind": "outcome", "entity_id": "T01", "time": 180,
            "failed": True, "downtime_hours": 12.5}).status_code == 201

        report = client.get("/api/v1/kpi/report?start=0&end=200").json()
        assert report["kpi1_total_downtime_hours"] == 12.5
        assert report["kpi2"] == {"failures": 1, "investigations": 1}
        assert report["kpi3_alert_followup_rate"] == 0.5

        assert len(log_path.read_text().strip().split("\n")) == 4

    def test_report_with_baselines(self, event_client):
        client, _ = event_client
        client.post("/api/v1/events", json={
            "kind": "alert", "alert_id": "a1", "entity_id": "T01",
            "time": 250, "score": 0.9})
        body = client.get(
            "/api/v1/kpi/report?start=200&end=300&baselines=0-100,100-200").json()
        assert body["kpi3_alert_followup_rate"] == 0.0
        assert len(body["baselines"]) == 2
        assert body["baselines"][0]["kpi3_alert_followup_rate"] is None
        assert body["deltas"]["kpi3_alert_followup_rate"] is None
        assert body["deltas"]["kpi1_total_downtime_hours"] == 0.0

    def test_mismatched_baseline_rejected(self, event_client):
        client, _ = event_client
        response = client.get("/api/v1/kpi/report?start=0&end=200&baselines=0-100")
        assert response.status_code == 400
        assert "duration" in response.json()["error"]

    def test_malformed_baseline_rejected(self, event_client):
        client, _ = event_client
        response = client.get("/api/v1/kpi/report?start=0&end=200&baselines=10:20")
        assert response.status_code == 400

    def test_missing_query_param_named(self, event_client):
        client, _ = event_client
        response = client.get("/api/v1/kpi/report?start=0")
        assert response.status_code == 400
        assert response.json()["field"] == "end"

    def test_duplicate_alert_conflict(self, event_client):
        client, log_path = event_client
        alert = {"kind": "alert", "alert_id": "a1", "entity_id": "T01",
                 "time": 100, "score": 0.91}
        assert client.post("/api/v1/events", json=alert).status_code == 201
        response = client.post("/api/v1/events", json=alert)
        assert response.status_code == 409
        assert "duplicate alert_id" in response.json()["error"]
        assert len(log_path.read_text().strip().split("\n")) == 1

    def test_decision_for_unknown_alert_404(self, event_client):
        client, log_path = event_client
        response = client.post("/api/v1/events", json={
            "kind": "decision", "alert_id": "ghost", "investigated": True, "time": 1})
        assert response.status_code == 404
        assert response.json()["alert_id"] == "ghost"
        assert not log_path.exists()

    def test_negative_downtime_rejected(self, event_client):
        client, _ = event_client
        response = client.post("/api/v1/events", json={
            "kind": "outcome", "entity_id": "T01", "time": 1,
            "failed": True, "downtime_hours": -2.0})
        assert response.status_code == 400
        assert response.json()["field"] == "downtime_hours"

    def test_unknown_event_field_rejected(self, event_client):
        client, _ = event_client
        response = client.post("/api/v1/events", json={
            "kind": "alert", "alert_id": "a9", "entity_id": "T01",
            "time": 1, "score": 0.5, "foo": 1})
        assert response.status_code == 400
        assert response.json()["field"] == "foo"

    def test_unknown_kind_rejected(self, event_client):
        client, _ = event_client
        response = client.post("/api/v1/events", json={"kind": "ping"})
        assert response.status_code == 400
