import json
import math

import numpy as np
import pytest

import locstruct as ls


def small_tree():
    return ls.Taxonomy([("root", ""), ("animal", "root"), ("cat", "animal"), ("bird", "animal"), ("rock", "root")])


def test_taxonomy_and_losses():
    space = ls.OutputSpace(small_tree())
    assert space.is_taxonomy
    assert space.cardinality == 3
    assert space.outputs() == [0, 1, 2]
    assert ls.loss("tree", "cat", "bird", space) == 1.0
    assert ls.loss("tree", 0, 2, space) == 2.0
    assert ls.loss("tree", 1, 1, space) == 0.0


def test_sequence_features_and_predict():
    space = ls.OutputSpace(ls.SequenceSpace(["a", "b"], 3))
    assert ls.feature_dimension(space, 2) == 2 * 2 + 2 * 2
    x = np.arange(6, dtype=float).reshape(3, 2)
    phi = ls.joint_feature(x, [0, 1, 1], space)
    rng = np.random.default_rng(0)
    w = rng.normal(size=phi.shape[0])
    best, value = ls.predict(w, x, space)
    scores = {tuple(y): float(w @ ls.joint_feature(x, y, space)) for y in space.outputs()}
    assert value == pytest.approx(max(scores.values()))
    assert scores[tuple(best)] == pytest.approx(value)
    dp, _ = ls.predict(w, x, space, backend="dp")
    ex, _ = ls.predict(w, x, space, backend="exhaustive")
    assert dp == ex


def test_loss_augmented_bound():
    space = ls.OutputSpace(ls.Taxonomy.balanced(2, 2))
    rng = np.random.default_rng(1)
    x = rng.normal(size=(1, 3))
    w = rng.normal(size=ls.feature_dimension(space, 3))
    z, bound = ls.loss_augmented_argmax(w, x, 2, space)
    pred, _ = ls.predict(w, x, space)
    assert bound >= ls.loss("tree", 2, pred, space)
    assert bound >= 0.0
    y, _ = ls.impute([w, w], [z, z], 2, x, space)
    assert 0 <= y < 4


def test_fit_and_model_roundtrip(tmp_path):
    data = ls.generate_synthetic(clusters=2, points_per_cluster=12, input_dim=3, seed=4)
    assert len(data) == 24
    inputs, truths = data.inputs, data.truths
    semi = ls.Dataset(data.output_space, inputs, truths[:12])
    assert semi.labeled_count == 12
    report = ls.fit(semi, k=4, iterations=10, eta=0.1)
    assert report.iterations_run == 10
    assert len(report.objective_trace) == 11
    assert report.outputs[:12] == truths[:12]
    assert all(math.isfinite(v) for v in report.objective_trace)

    path = tmp_path / "model.json"
    report.model.save(str(path))
    loaded = ls.load_model(str(path))
    for x in inputs:
        assert loaded.predict(x) == report.model.predict(x)

    ls.save_dataset(semi, str(tmp_path / "data.json"))
    back = ls.load_dataset(str(tmp_path / "data.json"))
    assert back.truths == semi.truths


def test_experiment_and_errors(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"synthetic": {"points_per_cluster": 10, "input_dim": 3, "seed": 2},
                               "folds": 2, "iterations": 5, "seed": 3}))
    local = ls.run_experiment(str(cfg))
    glob = ls.run_experiment(str(cfg), baseline=True)
    assert local.method == "local" and glob.method == "global"
    assert len(local.folds) == 2
    assert json.loads(local.to_json())["mean_loss"] == pytest.approx(local.mean_loss)
    assert local.to_csv().startswith("fold,train_size")

    space = ls.OutputSpace(small_tree())
    with pytest.raises(ls.Error):
        ls.loss("tree", "zebra", 0, space)
    with pytest.raises(ls.ValidationError):
        ls.Taxonomy([("a", ""), ("b", "")])
    with pytest.raises(ls.ParseError):
        ls.load_dataset(str(tmp_path / "missing.json"))
