import random
from fractions import Fraction

import pytest

from config import Config
from models.distribution import discrete, point_mass
from models.instance import Instance, iid
from services.generators import bernoulli, three_point

F = Fraction


def random_discrete(rng: random.Random, max_atoms: int = 3, denom: int = 10):
    """Law with up to max_atoms values on a 1/denom grid in [0, 1.2]."""
    k = rng.randint(1, max_atoms)
    values = rng.sample(range(0, int(1.2 * denom) + 1), k)
    weights = [rng.randint(1, 4) for _ in values]
    total = sum(weights)
    return discrete((F(v, denom), F(w, total)) for v, w in zip(values, weights))


def random_instance(rng: random.Random, n: int, *, max_atoms: int = 3, penalty=None, same=False) -> Instance:
    C = penalty if penalty is not None else F(rng.choice([2, 5, 10, 50]))
    if same:
        return iid(random_discrete(rng, max_atoms), n, C)
    return Instance(items=tuple(random_discrete(rng, max_atoms) for _ in range(n)), penalty=C)


@pytest.fixture
def rnd():
    return random.Random(20240501)


@pytest.fixture
def tp_law():
    return discrete([(0, F(49, 50)), (F(2, 5), F(1, 100)), (F(61, 100), F(1, 100))])


@pytest.fixture
def tiny_bernoulli():
    return bernoulli(4, 50)


@pytest.fixture
def tiny_three_point():
    return three_point(4, 50)


@pytest.fixture
def halves():
    # two items of 0.6: together they overflow
    return iid(point_mass(F(3, 5)), 2, 50)


@pytest.fixture(autouse=True)
def _single_worker(monkeypatch):
    # process pools are exercised explicitly where a test needs them
    monkeypatch.setattr(Config, "WORKERS", 1)
