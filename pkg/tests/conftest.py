import numpy as np
import pytest

from frdrl import Dataset, minmax_normalize


def make_blobs(centers, n_per_blob, sigma, seed):
    """Gaussian blobs around the given centers, labels by blob index."""
    rng = np.random.default_rng(seed)
    parts = [c + sigma * rng.standard_normal((n_per_blob, len(c))) for c in np.atleast_2d(centers)]
    X = np.vstack(parts)
    y = np.repeat(np.arange(len(parts)), n_per_blob)
    return X, y


def blob_dataset(centers, n_per_blob, sigma, seed, normalize=True):
    X, y = make_blobs(centers, n_per_blob, sigma, seed)
    names = [f"f{j + 1}" for j in range(X.shape[1])]
    data = Dataset(X=X, y=y, c=len(np.atleast_2d(centers)), feature_names=names)
    return minmax_normalize(data) if normalize else data


def write_csv(path, X, y, feature_names=None):
    names = feature_names or [f"f{j + 1}" for j in range(X.shape[1])]
    lines = [",".join(names + ["label"])]
    for row, label in zip(X, y):
        lines.append(",".join(repr(float(v)) for v in row) + f",{label}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def wine_csv(tmp_path_factory):
    wine = pytest.importorskip("sklearn.datasets").load_wine()
    path = tmp_path_factory.mktemp("wine") / "wine.csv"
    return write_csv(path, wine.data, wine.target, [str(n) for n in wine.feature_names])


@pytest.fixture(scope="session")
def blob_csv(tmp_path_factory):
    X, y = make_blobs([[0.0, 0.0], [4.0, 4.0]], n_per_blob=20, sigma=0.3, seed=5)
    return write_csv(tmp_path_factory.mktemp("blobs") / "blobs.csv", X, y)
