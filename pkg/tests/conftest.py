import numpy as np
import pytest

from relayaudit import fileio
from relayaudit.cli import CONFIG_DIR
from relayaudit.core import StochasticMatrix


@pytest.fixture(scope="session")
def network_a():
    """Three-symbol relay network with a slightly biased binary source."""
    return fileio.load_channel(CONFIG_DIR / "certified-channel.yaml")


@pytest.fixture(scope="session")
def network_b():
    """Same relay channels, exactly uniform source (symmetric variant)."""
    return fileio.load_channel(CONFIG_DIR / "symmetric-channel.yaml")


@pytest.fixture(scope="session")
def channel_a(network_a):
    return network_a.observation_channel()


@pytest.fixture(scope="session")
def channel_b(network_b):
    return network_b.observation_channel()


@pytest.fixture(scope="session")
def flip3():
    """Deterministic symbol flip 1 <-> 3 on a 3-symbol alphabet."""
    return StochasticMatrix(np.array([[0.0, 0, 1], [0, 1, 0], [1, 0, 0]]))


def scenario(name, **overrides):
    cfg = fileio.load_scenario(CONFIG_DIR / f"{name}.yaml")
    return cfg.override(**overrides) if overrides else cfg
