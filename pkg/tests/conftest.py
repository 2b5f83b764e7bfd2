import functools
import random

import pytest
from hypothesis import HealthCheck, settings

from surfhomotopy.reduction import preprocess
from surfhomotopy.surface_model import gen_canonical

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def canonical_pre(genus: int, orientable: bool = True):
    return preprocess(gen_canonical(genus, orientable))


def random_walk(rng: random.Random, n_gens: int, k: int) -> list[int]:
    """Freely reduced word over a one-vertex embedding, as darts."""
    w: list[int] = []
    while len(w) < k:
        d = rng.randrange(2 * n_gens)
        if w and d == w[-1] ^ 1:
            continue
        w.append(d)
    return w


def conjugate(g: list[int], c: list[int]) -> list[int]:
    return list(g) + list(c) + [x ^ 1 for x in reversed(g)]


@pytest.fixture
def rng():
    return random.Random(12345)
