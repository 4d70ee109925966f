"""Synthetic fleet generator: determinism, episode process, label soundness."""

import numpy as np
import pytest

from brakewatch.errors import ConfigError
from brakewatch.features import validate_catalog
from brakewatch.store import write_dataset_csv
from brakewatch.synthetic import (DAY_SECONDS, MODE_COLUMNS, START_EPOCH,
                                  SyntheticParams, default_catalog,
                                  default_transforms, draw_failure_episodes,
                                  entity_name, generate_synthetic)

from conftest import FLEET_PARAMS

SMALL = dict(n_turbines=2, n_days=6, readings_per_day=2,
             failure_rate_per_month=8.0, seed=3)


class TestParams:
    @pytest.mark.parametrize("overrides", [
        {"n_turbines": 0},
        {"n_days": 0},
        {"readings_per_day": 0},
        {"readings_per_day": DAY_SECONDS + 1},
        {"failure_rate_per_month": 0.0},
        {"failure_rate_per_month": -1.0},
        {"label_window_days": 0.0},
    ])
    def test_invalid_params_rejected(self, overrides):
        with pytest.raises(ConfigError):
            SyntheticParams(**{**SMALL, **overrides})

    def test_defaults(self):
        params = SyntheticParams()
        assert params.failure_rate_per_month == 1.0
        assert params.label_window_days == 14.0


class TestEpisodes:
    def test_pinned_counts_per_seed(self):
        # Regression values pinned from one run; rate 1/month over 30 days
        # has expectation 1, and this particular seed draws none.
        quiet = SyntheticParams(n_turbines=10, n_days=30, readings_per_day=4,
                                failure_rate_per_month=1.0, seed=7)
        assert len(draw_failure_episodes(quiet)) == 0
        assert len(draw_failure_episodes(SyntheticParams(**FLEET_PARAMS))) == 6

    def test_higher_rate_never_drops_episodes(self):
        for seed in range(10):
            base = SyntheticParams(n_turbines=4, n_days=30, readings_per_day=2,
                                   failure_rate_per_month=2.0, seed=seed)
            boosted = SyntheticParams(n_turbines=4, n_days=30, readings_per_day=2,
                                      failure_rate_per_month=20.0, seed=seed)
            low = len(draw_failure_episodes(base))
            high = len(draw_failure_episodes(boosted))
            assert high >= low

    def test_tenfold_rate_is_strictly_more_on_pinned_seed(self):
        quiet = SyntheticParams(n_turbines=10, n_days=30, readings_per_day=4,
                                failure_rate_per_month=1.0, seed=7)
        busy = SyntheticParams(n_turbines=10, n_days=30, readings_per_day=4,
                               failure_rate_per_month=10.0, seed=7)
        assert len(draw_failure_episodes(busy)) == 7
        assert len(draw_failure_episodes(busy)) > len(draw_failure_episodes(quiet))

    def test_episode_fields_in_range(self):
        params = SyntheticParams(**FLEET_PARAMS)
        horizon_end = START_EPOCH + params.n_days * DAY_SECONDS
        for ep in draw_failure_episodes(params):
            assert 0 <= ep.turbine_index < params.n_turbines
            assert START_EPOCH <= ep.time < horizon_end


class TestDataset:
    def test_shape_and_keys(self, fleet):
        params = SyntheticParams(**FLEET_PARAMS)
        assert len(fleet) == params.n_turbines * params.n_days * params.readings_per_day
        assert fleet.entity_ids() == [entity_name(i, 5) for i in range(5)]
        first = fleet.rows_for_entity("T01")
        assert first[0].row_id == START_EPOCH
        assert first[1].row_id - first[0].row_id == DAY_SECONDS // params.readings_per_day

    def test_same_seed_byte_identical(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_dataset_csv(generate_synthetic(SyntheticParams(**SMALL)), a)
        write_dataset_csv(generate_synthetic(SyntheticParams(**SMALL)), b)
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_differs(self, tmp_path):
        a = generate_synthetic(SyntheticParams(**SMALL))
        b = generate_synthetic(SyntheticParams(**{**SMALL, "seed": 4}))
        assert any(x.values != y.values for x, y in zip(a, b))

    def test_labels_exactly_mark_prefailure_windows(self, fleet):
        params = SyntheticParams(**FLEET_PARAMS)
        episodes = draw_failure_episodes(params)
        window = params.label_window_days * DAY_SECONDS
        by_turbine = {}
        for ep in episodes:
            eid = entity_name(ep.turbine_index, params.n_turbines)
            by_turbine.setdefault(eid, []).append((ep.time - window, ep.time))
        for row in fleet:
            inside = any(lo <= row.row_id < hi
                         for lo, hi in by_turbine.get(row.entity_id, []))
            assert row.label == int(inside)

    def test_both_classes_present(self, fleet):
        labels = {row.label for row in fleet}
        assert labels == {0, 1}

    def test_brake_channels_drift_before_failure(self, fleet):
        M = fleet.matrix()
        labels = np.array([r.label for r in fleet])
        temp = fleet.catalog.index_of("brake_caliper_temp_c")
        thickness = fleet.catalog.index_of("brake_pad_thickness_mm")
        temp_shift = np.nanmean(M[labels == 1, temp]) - np.nanmean(M[labels == 0, temp])
        thickness_shift = (np.nanmean(M[labels == 1, thickness])
                           - np.nanmean(M[labels == 0, thickness]))
        assert temp_shift > 3.0
        assert thickness_shift < -0.8

    def test_exactly_one_mode_active_per_row(self, fleet):
        idx = [fleet.catalog.index_of(c) for c in MODE_COLUMNS]
        for row in fleet:
            assert sum(row.values[j] for j in idx) == 1.0

    def test_some_values_missing_but_not_many(self, fleet):
        total = len(fleet) * len(fleet.catalog)
        missing = sum(1 for row in fleet for v in row.values if v is None)
        assert 0.005 < missing / total < 0.05

    def test_default_artifacts_validate(self, fleet):
        assert validate_catalog(default_catalog(), default_transforms(), fleet) == []
