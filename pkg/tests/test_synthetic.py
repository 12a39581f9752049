import numpy as np

from fairboost import FairnessIndicator, fairness_loss, load_csv, train_adaboost
from fairboost.synthetic import SCHEMA, make_disparity_dataset, random_dataset, write_disparity_csv


def test_in_memory_and_csv_agree(tmp_path):
    ds = make_disparity_dataset(300, seed=11)
    path = tmp_path / "synth.csv"
    write_disparity_csv(path, 300, seed=11)
    loaded = load_csv(path, SCHEMA)
    assert loaded.n == ds.n
    assert np.array_equal(loaded.y, ds.y)
    assert np.array_equal(loaded.sensitive, ds.sensitive)
    # float cells round-trip exactly through repr
    assert np.array_equal(loaded.X[:, :3], ds.X[:, :3])
    # segment codes may differ (first-appearance order), decoded values match
    decoded = [loaded.decode_value("segment", c) for c in loaded.X[:, 3]]
    original = [ds.categories["segment"][int(c)] for c in ds.X[:, 3]]
    assert decoded == original


def test_groups_and_labels_present():
    ds = make_disparity_dataset(100, seed=0)
    n0, n1 = ds.group_counts()
    assert n0 > 0 and n1 > 0
    assert set(np.unique(ds.y)) == {-1, 1}


def test_injected_fnr_disparity_is_material():
    ds = make_disparity_dataset(2000, seed=42)
    ens = train_adaboost(ds, 10, indicator=FairnessIndicator.FNR)
    pred = ens.predict_batch(ds.X)
    assert fairness_loss(pred, ds, FairnessIndicator.FNR) > 0.08


def test_random_dataset_shape_and_learnability():
    ds = random_dataset(50, seed=1, n_features=3)
    assert ds.n == 50
    assert ds.n_features == 4  # 3 informative + group column
    assert ds.sensitive_index == 3
    ens = train_adaboost(ds, 5)
    acc = float((ens.predict_batch(ds.X) == ds.y).mean())
    assert acc > 0.7


def test_determinism():
    a = make_disparity_dataset(200, seed=5)
    b = make_disparity_dataset(200, seed=5)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
    c = make_disparity_dataset(200, seed=6)
    assert not np.array_equal(a.X, c.X)
