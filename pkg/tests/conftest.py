import numpy as np
import pytest

from unipulse import PulseParams, RationalWaveform


@pytest.fixture
def params():
    """Simplest regular family: c = tau = 1, zeta = 0, so b = 1."""
    return PulseParams(1.0, 1.0, 0.0)


@pytest.fixture
def rational(params):
    """Waveform reproducing the basic closed-form pulse (a = b - zeta)."""
    return RationalWaveform(params.b - params.zeta)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
