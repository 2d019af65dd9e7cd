import numpy as np
import pytest


def make_blobs(n_per_class=60, centers=((-4.0, 0.0), (4.0, 0.0)), dim=4, sigma=1.0, seed=0):
    """Two (or more) well-separated Gaussian blobs for smoke training."""
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for label, c in enumerate(centers):
        mu = np.zeros(dim)
        mu[: len(c)] = c
        xs.append(mu + sigma * rng.normal(size=(n_per_class, dim)))
        ys.append(np.full(n_per_class, label))
    x = np.vstack(xs)
    y = np.concatenate(ys)
    order = rng.permutation(x.shape[0])
    return x[order], y[order]


@pytest.fixture
def blob_data():
    return make_blobs()
