import numpy as np
import pytest
from hypothesis import settings

from hyperlap import build_hypergraph
from hyperlap.synthetic import random_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

OH1_ARCS = [([0], [1, 2]), ([1, 2], [3])]


@pytest.fixture
def oh1():
    return build_hypergraph(4, OH1_ARCS)


@pytest.fixture
def path3():
    # pairwise path 0 - 1 - 2 with both orientations per edge
    return build_hypergraph(3, [([0], [1]), ([1], [0]), ([1], [2]), ([2], [1])])


def instances(seed, count, n_range=(3, 30), mode="unit", **kw):
    """Deterministic stream of random (hypergraph, params) pairs."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(*n_range))
        m = int(rng.integers(n, 3 * n + 1))
        yield random_instance(rng, n, m, mode=mode, **kw)


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))
