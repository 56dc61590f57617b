import numpy as np
import pytest

from xxz_deficit.model import ModelParams


def random_params(rng, t_min=0.05, t_max=5.0):
    return ModelParams(
        J=rng.uniform(-2.0, 2.0),
        Jz=rng.uniform(-2.0, 2.0),
        B=rng.uniform(-3.0, 3.0),
        T=rng.uniform(t_min, t_max),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
