"""Importance tables, feature scatter, and distribution statistics."""

import math

import numpy as np
import pytest

from brakewatch.analysis import (IMPORTANCE_METHODS, BoxStats,
                                 feature_distribution, feature_scatter,
                                 global_importance, quantile_type7)
from brakewatch.errors import (ConfigError, EmptyDistributionError,
                               NotFoundError)
from brakewatch.features import CatalogEntry, FeatureCatalog
from brakewatch.store import Dataset, EntityRow
from brakewatch.trees import Tree, TreeEnsemble

from conftest import leaf, split, step_model


def column_dataset(values, value_type="numeric"):
    catalog = FeatureCatalog([CatalogEntry("f0", "Feature 0", "misc", value_type)])
    rows = [EntityRow("T01", i + 1, (v,)) for i, v in enumerate(values)]
    return Dataset(rows, catalog)


class TestGlobalImportance:
    def test_gain_single_split_feature(self):
        trees = [
            Tree([split(0, 2, 1.0, 1, 2, gain=1.5), leaf(1, 0.0), leaf(2, 1.0)]),
            Tree([split(0, 2, 3.0, 1, 2, gain=2.5), leaf(1, 0.0), leaf(2, 1.0)]),
        ]
        model = TreeEnsemble(trees, base_score=0.0, n_features=4)
        table = global_importance(model, None, None, "gain")
        assert table.scores.tolist() == [0.0, 0.0, 1.0, 0.0]
        assert table.normalized is True

    def test_gain_all_zero_stays_zero(self):
        model = TreeEnsemble([Tree([leaf(0, 0.3)])], base_score=0.0, n_features=2)
        table = global_importance(model, None, None, "gain")
        assert table.scores.tolist() == [0.0, 0.0]

    def test_gain_ranking_invariant_to_positive_scaling(self):
        trees = [Tree([split(0, 0, 1.0, 1, 2, gain=0.7), leaf(1, 0.0), leaf(2, 1.0)]),
                 Tree([split(0, 1, 1.0, 1, 2, gain=1.9), leaf(1, 0.0), leaf(2, 1.0)])]

        def ranking(scale):
            scaled = [Tree([split(0, t.nodes[0].feature_index, 1.0, 1, 2,
                                  gain=t.nodes[0].split_gain * scale),
                            leaf(1, 0.0), leaf(2, 1.0)]) for t in trees]
            model = TreeEnsemble(scaled, base_score=0.0, n_features=2)
            return np.argsort(-global_importance(model, None, None, "gain").scores).tolist()

        assert ranking(1.0) == ranking(37.5) == [1, 0]

    def test_mean_abs_shap_example(self):
        model = step_model()  # f0 < 10 ? -1 : +1, base 0
        table = global_importance(model, [[20.0], [20.0]], [[5.0]], "mean_abs_shap")
        assert table.scores.tolist() == [1.0]
        assert table.normalized is True

    def test_signed_mean_shap_example(self):
        model = step_model()
        table = global_importance(model, [[20.0], [2.0]], [[5.0]], "signed_mean_shap")
        assert table.scores.tolist() == [1.0]
        assert table.normalized is False

    def test_signed_mean_keeps_negative_sign(self):
        model = step_model()
        table = global_importance(model, [[2.0], [2.0]], [[20.0]], "signed_mean_shap")
        assert table.scores.tolist() == [-2.0]

    def test_empty_dataset_rejected_for_shap_methods(self):
        with pytest.raises(ConfigError, match="non-empty dataset"):
            global_importance(step_model(), np.empty((0, 1)), [[5.0]], "mean_abs_shap")
        with pytest.raises(ConfigError, match="non-empty dataset"):
            global_importance(step_model(), None, [[5.0]], "signed_mean_shap")

    def test_unknown_method_rejected(self):
        with pytest.raises(ConfigError, match="unknown importance method"):
            global_importance(step_model(), None, None, "splits")

    def test_methods_agree_on_fleet_shapes(self, fleet, fleet_model, fleet_background):
        sample = fleet.matrix()[:25]
        for method in IMPORTANCE_METHODS:
            table = global_importance(fleet_model, sample, fleet_background, method)
            assert table.scores.shape == (len(fleet.catalog),)
            if method != "signed_mean_shap":
                assert table.scores.sum() == pytest.approx(1.0, abs=1e-12)
                assert (table.scores >= 0).all()


class TestFeatureScatter:
    def test_step_model_fixture_points(self):
        ds = column_dataset([5.0, 20.0])
        points = feature_scatter(step_model(), ds, "f0", [[5.0]])
        assert [(p.value, p.contribution) for p in points] == [(5.0, 0.0), (20.0, 2.0)]
        assert points[0].row_ref == ("T01", 1)
        assert points[0].probability == pytest.approx(1 / (1 + math.exp(1.0)))
        assert points[1].probability == pytest.approx(1 / (1 + math.exp(-1.0)))

    def test_one_point_per_row(self, fleet, fleet_model, fleet_background):
        small = Dataset(fleet.rows[:3], fleet.catalog)
        points = feature_scatter(fleet_model, small, "brake_caliper_temp_c", fleet_background)
        assert len(points) == 3

    def test_unused_feature_scatter_is_flat(self):
        ds = column_dataset([1.0, 2.0, 3.0])
        flat_model = TreeEnsemble([Tree([leaf(0, 0.5)])], base_score=0.0, n_features=1)
        points = feature_scatter(flat_model, ds, 0, [[0.0]])
        assert all(p.contribution == 0.0 for p in points)

    def test_missing_value_marked_not_dropped(self):
        ds = column_dataset([5.0, None, 20.0])
        points = feature_scatter(step_model(), ds, "f0", [[5.0]])
        assert len(points) == 3
        assert points[1].value is None

    def test_unknown_feature_name(self, fleet, fleet_model, fleet_background):
        with pytest.raises(NotFoundError):
            feature_scatter(fleet_model, fleet, "ghost", fleet_background)

    def test_out_of_range_index(self):
        ds = column_dataset([1.0])
        with pytest.raises(ConfigError, match="out of range"):
            feature_scatter(step_model(), ds, 5, [[0.0]])

    def test_empty_dataset(self):
        ds = column_dataset([])
        with pytest.raises(ConfigError, match="dataset is empty"):
            feature_scatter(step_model(), ds, 0, [[0.0]])


class TestQuantiles:
    def test_five_values_exact(self):
        stats = feature_distribution(column_dataset([1.0, 2.0, 3.0, 4.0, 5.0]), "f0")
        assert stats == BoxStats(minimum=1.0, q1=2.0, median=3.0, q3=4.0, maximum=5.0, count=5)

    def test_four_values_interpolated(self):
        stats = feature_distribution(column_dataset([4.0, 2.0, 1.0, 3.0]), "f0")
        assert stats.q1 == 1.75
        assert stats.median == 2.5
        assert stats.q3 == 3.25

    def test_single_value_degenerate(self):
        stats = feature_distribution(column_dataset([7.0]), "f0")
        assert stats == BoxStats(7.0, 7.0, 7.0, 7.0, 7.0, 1)

    def test_missing_values_excluded_from_count(self):
        stats = feature_distribution(column_dataset([1.0, None, 5.0, None]), "f0")
        assert stats.count == 2
        assert stats.median == 3.0

    def test_ordering_invariant(self):
        stats = feature_distribution(column_dataset([1.0, 2.0, 3.0, 4.0, 5.0]), "f0")
        assert (stats.minimum <= stats.q1 <= stats.median
                <= stats.q3 <= stats.maximum)

    def test_matches_numpy_reference(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            values = rng.normal(size=int(rng.integers(1, 40)))
            sorted_values = np.sort(values)
            for p in (0.25, 0.5, 0.75, 0.0, 1.0, rng.random()):
                ours = quantile_type7(sorted_values, p)
                ref = float(np.quantile(values, p))
                assert ours == pytest.approx(ref, abs=1e-12)

    def test_all_missing_rejected(self):
        with pytest.raises(EmptyDistributionError, match="no recorded values"):
            feature_distribution(column_dataset([None, None]), "f0")

    def test_categorical_rejected(self):
        ds = column_dataset(["a", "b"], value_type="categorical")
        with pytest.raises(ConfigError, match="categorical"):
            feature_distribution(ds, "f0")
