import math
import os
from pathlib import Path

import numpy as np
import pytest

import dcgkit

DATA = Path(os.environ.get("DCGKIT_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))

QUICK = {
    "protocol.folds": 3,
    "protocol.repeats": 1,
    "knn.k": 1,
    "search.strategy": "grid",
    "search.alpha_min": -1,
    "search.alpha_max": 2,
}


def test_apply_dcg_worked_example():
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    out = dcgkit.apply_dcg(x, [1, 2], 2)
    assert np.array_equal(out, np.array([[-1.0, 0.0], [-1.0, 0.0]]))


def test_separability_and_lpmr():
    x = np.array([[0.0, 0.0], [3.0, 4.0]])
    s = dcgkit.separability(x, [1, 2])
    assert math.isclose(s["min_pair_distance"], 5.0)
    assert s["classes"] == [1, 2]
    for a in dcgkit.scan_lpmr(x, [1, 2], -10, 10):
        assert dcgkit.separability(dcgkit.apply_dcg(x, [1, 2], a), [1, 2])["min_pair_distance"] < 5.0


def test_pca_projection():
    x = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.5], [0.0, -0.5]])
    model = dcgkit.fit_pca(x, 1)
    assert model.out_dim == 1 and model.in_dim == 2
    assert np.allclose(model.eigenvalues, [2.0 / 3.0, 1.0 / 6.0])
    assert np.allclose(dcgkit.project(model, np.array([[2.0, 0.0]])), [[2.0]])
    again = dcgkit.ProjectionModel.from_text(model.to_text())
    assert np.array_equal(again.w, model.w)


def test_srda_and_knn():
    d = dcgkit.synthetic_dataset(classes=3, per_class=20, features=4, separation=4.0, seed=3)
    model = dcgkit.fit_srda(d.features, d.labels)
    assert model.out_dim == 2
    y = dcgkit.project(model, d.features)
    pred = dcgkit.knn_predict(y, d.labels, y, k=1)
    assert pred == d.labels


def test_search_strategies():
    f = lambda a: 100.0 - abs(a - 7)
    assert dcgkit.grid_search(f, -10, 30)["best_alpha"] == 7
    assert dcgkit.hill_climb(f, alpha_min=-10, alpha_max=30)["best_alpha"] == 7
    t = dcgkit.sga_search(f, alpha_min=-10, alpha_max=30, seed=2)
    assert t["strategy"] == "sga"
    assert t["best_fitness"] == max(e[1] for e in t["evaluations"])


def test_evaluate_pipeline_alpha_zero_matches_classical():
    d = dcgkit.synthetic_dataset(classes=2, per_class=15, seed=5)
    a = dcgkit.evaluate_pipeline(d, 0, folds=3, repeats=1, k=1)
    b = dcgkit.evaluate_pipeline(d, None, folds=3, repeats=1, k=1)
    assert a["fold_scores"] == b["fold_scores"]
    assert len(a["fold_scores"]) == 3


def test_errors_are_typed():
    with pytest.raises(dcgkit.ConfigError):
        dcgkit.grid_search(lambda a: 0.0, 3, 2)
    with pytest.raises(dcgkit.DataError):
        dcgkit.make_dataset(np.zeros((2, 2)), [1])
    assert issubclass(dcgkit.NumericalError, dcgkit.Error)


def test_load_csv_haberman():
    d = dcgkit.load_csv(str(DATA / "haberman.csv"), 3)
    assert (d.num_samples, d.num_features, d.num_classes) == (306, 3, 2)


def test_run_comparison_report():
    report = dcgkit.run_comparison(DATA / "haberman.cfg", QUICK)
    assert report["format"] == "dcgkit-report"
    assert report["dataset"]["samples"] == 306
    assert report["metadata"]["baseline_matches_alpha0"] is True
