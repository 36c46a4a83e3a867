import pytest

from zitter import codata, derive_constants


@pytest.fixture(scope="session")
def fc():
    return codata()


@pytest.fixture(scope="session")
def dc(fc):
    return derive_constants(fc)
