import numpy as np
import pytest

from passivebc import wave1d


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def wave_system(N, **kwargs):
    return wave1d.assemble(wave1d.constant_coefficients(N, **kwargs))


def random_wave_system(N, rng, **kwargs):
    return wave1d.assemble(wave1d.random_coefficients(N, rng, **kwargs))
