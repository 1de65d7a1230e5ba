import numpy as np
import pytest

from lapmult import Field, ReversibleGenerator, WeightedSpace


@pytest.fixture
def two_state():
    """The 2-state closed-form instance: equal weights 1/2, rate a."""
    a = 0.7
    space = WeightedSpace([0.5, 0.5])
    gen = ReversibleGenerator(space, [[a, -a], [-a, a]])
    return space, gen, a


def random_field(space, seed, real=False):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(space.n)
    if not real:
        values = values + 1j * rng.standard_normal(space.n)
    return Field(space, values)
