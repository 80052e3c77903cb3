import numpy as np
import pytest

from dnlfm_isac.dnlfm import WaveformSpec
from dnlfm_isac.windows import WindowSpec


@pytest.fixture
def spec1024():
    return WaveformSpec(N=1024, delta_f=60e3, f_c=12e9)


@pytest.fixture
def hamming():
    return WindowSpec("hamming")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
