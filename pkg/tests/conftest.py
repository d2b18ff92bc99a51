import numpy as np
import pytest

from quasifrac.fracsum import new_params


def log_uniform(rng, size, lo=-2.0, hi=2.0):
    return 10.0 ** rng.uniform(lo, hi, size)


def random_params(rng, n_max=8):
    n = int(rng.integers(1, n_max + 1))
    return new_params(log_uniform(rng, n), log_uniform(rng, n))


def random_instances(seed, count, n_max=8):
    rng = np.random.default_rng(seed)
    return [random_params(rng, n_max) for _ in range(count)]


def rel_err(got, want):
    return abs(got - want) / max(abs(want), np.finfo(float).tiny)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def unit():
    return new_params([1.0], [1.0])


@pytest.fixture
def pair14():
    # c = [1, 4], d = [2, 1]
    return new_params([1.0, 4.0], [2.0, 1.0])


# c = [10, 1e-4], d = [10, 1e-3]: F has two local minima
TWO_MINIMA = ([10.0, 1e-4], [10.0, 1e-3])

# F'' changes sign three times for this instance
THREE_ZERO_F2 = (
    [50.959, 3.085, 0.0293, 0.0284],
    [0.7307, 0.0234, 3.3652, 2.921],
)
