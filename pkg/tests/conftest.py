import numpy as np
import pytest

from nskqg.spectral import SpectralWorkspace


@pytest.fixture(scope="session")
def ws16():
    return SpectralWorkspace(16)


@pytest.fixture(scope="session")
def ws32():
    return SpectralWorkspace(32)


@pytest.fixture(scope="session")
def ws64():
    return SpectralWorkspace(64)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
