import numpy as np
import pytest

from canclust.correlation import DissimilarityMatrix
from canclust.hierarchy import LINKAGES, agglomerate


def random_dissimilarity(rng, n, ids=None):
    """Random symmetric dissimilarity with zero diagonal, entries in (0, 1)."""
    m = rng.uniform(0.05, 1.0, size=(n, n))
    d = (m + m.T) / 2.0
    np.fill_diagonal(d, 0.0)
    if ids is None:
        ids = tuple(f"s{i}" for i in range(n))
    return DissimilarityMatrix(tuple(ids), d)


def random_dendrogram(rng, n, linkage=None):
    if linkage is None:
        linkage = LINKAGES[rng.integers(len(LINKAGES))]
    return agglomerate(random_dissimilarity(rng, n), linkage)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
