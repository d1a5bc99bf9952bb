import numpy as np
import pytest

from frdrl import Dataset, load_csv, minmax_normalize, one_hot, stratified_kfold
from frdrl.errors import DataError

from conftest import write_csv


def test_load_csv_reindexes_labels(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text("u,v,label\n0,1,a\n1,0,b\n1,1,a\n", encoding="utf-8")
    data = load_csv(path)
    assert (data.n, data.d, data.c) == (3, 2, 2)
    assert data.y.tolist() == [0, 1, 0]
    assert np.array_equal(data.X, [[0, 1], [1, 0], [1, 1]])
    assert data.feature_names == ["u", "v"]


def test_load_csv_wine_shape(wine_csv):
    data = load_csv(wine_csv)
    assert (data.n, data.d, data.c) == (178, 13, 3)


def test_load_csv_label_only_column(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text("label\na\nb\n", encoding="utf-8")
    with pytest.raises(DataError, match="fewer than 1 feature"):
        load_csv(path)


def test_load_csv_non_numeric_cell_reports_position(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("u,v,label\n0,1,a\n0,oops,b\n", encoding="utf-8")
    with pytest.raises(DataError, match=r"row 3, column 2"):
        load_csv(path)


def test_load_csv_ragged_row(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("u,v,label\n0,1,a\n1,b\n", encoding="utf-8")
    with pytest.raises(DataError, match="ragged"):
        load_csv(path)


def test_load_csv_single_label(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("u,label\n0,a\n1,a\n", encoding="utf-8")
    with pytest.raises(DataError, match="fewer than 2 distinct labels"):
        load_csv(path)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        load_csv(tmp_path / "nope.csv")


def _column_dataset(values):
    return Dataset(X=np.array(values, dtype=float).reshape(-1, 1),
                   y=np.arange(len(values)) % 2, c=2, feature_names=["x"])


def test_minmax_endpoints():
    out = minmax_normalize(_column_dataset([1, 3, 5]))
    assert out.X[:, 0].tolist() == [0.0, 0.5, 1.0]


def test_minmax_constant_column():
    out = minmax_normalize(_column_dataset([7, 7, 7]))
    assert out.X[:, 0].tolist() == [0.0, 0.0, 0.0]


def test_minmax_hand_values():
    # (x - min) / (max - min) on [-1, 0, 3]
    out = minmax_normalize(_column_dataset([-1, 0, 3]))
    assert out.X[:, 0].tolist() == [0.0, 0.25, 1.0]


def test_minmax_range_invariant():
    rng = np.random.default_rng(0)
    data = Dataset(X=rng.normal(size=(30, 4)) * 10, y=rng.integers(0, 2, 30), c=2,
                   feature_names=list("abcd"))
    out = minmax_normalize(data)
    assert out.X.min() >= 0.0 and out.X.max() <= 1.0


def test_minmax_idempotent_exact():
    rng = np.random.default_rng(1)
    data = Dataset(X=rng.normal(size=(20, 3)), y=rng.integers(0, 2, 20), c=2,
                   feature_names=list("abc"))
    once = minmax_normalize(data)
    twice = minmax_normalize(once)
    assert np.array_equal(once.X, twice.X)


def test_stratified_exact_divisibility():
    data = Dataset(X=np.arange(20, dtype=float).reshape(10, 2),
                   y=np.array([0, 1] * 5), c=2, feature_names=["a", "b"])
    plan = stratified_kfold(data, 5, seed=3)
    for _, test in plan.folds:
        assert np.sum(data.y[test] == 0) == 1
        assert np.sum(data.y[test] == 1) == 1


def test_stratified_deterministic():
    rng = np.random.default_rng(2)
    data = Dataset(X=rng.normal(size=(23, 2)), y=rng.integers(0, 3, 23), c=3,
                   feature_names=["a", "b"])
    a = stratified_kfold(data, 4, seed=9)
    b = stratified_kfold(data, 4, seed=9)
    for (tr1, te1), (tr2, te2) in zip(a.folds, b.folds):
        assert np.array_equal(tr1, tr2) and np.array_equal(te1, te2)


def test_stratified_wine_fold_sizes(wine_csv):
    data = load_csv(wine_csv)
    plan = stratified_kfold(data, 5, seed=0)
    sizes = sorted(len(test) for _, test in plan.folds)
    # 178 = 3 * 36 + 2 * 35
    assert all(size in (35, 36) for size in sizes)
    assert sum(sizes) == 178


def test_folds_partition_index_space():
    rng = np.random.default_rng(4)
    data = Dataset(X=rng.normal(size=(31, 2)), y=rng.integers(0, 2, 31), c=2,
                   feature_names=["a", "b"])
    plan = stratified_kfold(data, 4, seed=1)
    tests = np.concatenate([test for _, test in plan.folds])
    assert sorted(tests.tolist()) == list(range(31))
    for train, test in plan.folds:
        assert not set(train) & set(test)
        assert len(train) + len(test) == 31


def test_every_class_in_every_train_set():
    rng = np.random.default_rng(5)
    y = np.concatenate([np.full(5, 0), np.full(9, 1), np.full(7, 2)])
    data = Dataset(X=rng.normal(size=(21, 2)), y=y, c=3, feature_names=["a", "b"])
    plan = stratified_kfold(data, 5, seed=2)
    for train, _ in plan.folds:
        assert set(data.y[train].tolist()) == {0, 1, 2}


def test_stratified_fallback_warns():
    rng = np.random.default_rng(6)
    y = np.array([0] * 10 + [1] * 2)  # class 1 has fewer than k members
    data = Dataset(X=rng.normal(size=(12, 2)), y=y, c=2, feature_names=["a", "b"])
    with pytest.warns(UserWarning, match="falling back"):
        plan = stratified_kfold(data, 5, seed=0)
    tests = np.concatenate([test for _, test in plan.folds])
    assert sorted(tests.tolist()) == list(range(12))


def test_stratified_k_exceeds_n():
    data = Dataset(X=np.zeros((3, 1)), y=np.array([0, 1, 0]), c=2, feature_names=["x"])
    with pytest.raises(DataError, match="exceeds"):
        stratified_kfold(data, 4, seed=0)


def test_one_hot_examples():
    assert one_hot(np.array([0, 1]), 2).tolist() == [[1, 0], [0, 1]]
    assert one_hot(np.array([2]), 3).tolist() == [[0, 0, 1]]


def test_one_hot_row_sums():
    rng = np.random.default_rng(7)
    y = rng.integers(0, 4, 25)
    Y = one_hot(y, 4)
    assert np.array_equal(Y.sum(axis=1), np.ones(25))


def test_one_hot_out_of_range():
    with pytest.raises(DataError, match="out of range"):
        one_hot(np.array([0, 3]), 3)


def test_dataset_invariants_enforced():
    with pytest.raises(DataError):
        Dataset(X=np.zeros((2, 2)), y=np.array([0, 2]), c=2, feature_names=["a", "b"])
    with pytest.raises(DataError):
        Dataset(X=np.array([[np.nan, 0], [0, 1]]), y=np.array([0, 1]), c=2,
                feature_names=["a", "b"])


def test_write_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(8)
    X = rng.normal(size=(6, 3))
    y = rng.integers(0, 2, 6)
    path = write_csv(tmp_path / "rt.csv", X, y)
    data = load_csv(path)
    assert np.allclose(data.X, X)
    # labels re-indexed by first appearance
    first = y[0]
    expected = [0 if v == first else 1 for v in y]
    assert data.y.tolist() == expected
