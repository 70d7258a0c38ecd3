import numpy as np
import pytest

from afflab.config import AffineConfiguration
from afflab.space import PointSet


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def random_pointset(rng, q, n, nonempty=True) -> PointSet:
    size = q**n
    bits = int.from_bytes(rng.bytes((size + 7) // 8), "little") & ((1 << size) - 1)
    if nonempty and bits == 0:
        bits = 1 << int(rng.integers(size))
    return PointSet(q, n, bits)


def random_small_set(rng, q, n, max_size) -> PointSet:
    size = q**n
    k = int(rng.integers(1, min(max_size, size) + 1))
    pts = rng.choice(size, size=k, replace=False)
    return PointSet.from_points(q, n, (int(p) for p in pts))


def random_config(rng, q, m, max_pts) -> AffineConfiguration:
    size = q**m
    k = int(rng.integers(1, min(max_pts, size) + 1))
    pts = rng.choice(size, size=k, replace=False)
    return AffineConfiguration(q, m, [int(p) for p in pts])


@pytest.fixture
def rng():
    return philox(0xAFF1AB)
