import pytest

from gerbes import fixtures
from gerbes.groupoid import named_groups
from gerbes.workspace import builtin_workspace


@pytest.fixture
def workspace():
    return builtin_workspace()


@pytest.fixture
def groups():
    return named_groups()


@pytest.fixture
def v4():
    return named_groups()["Z2xZ2"]


@pytest.fixture
def pillowcase():
    return fixtures.pillowcase()


@pytest.fixture
def sphere():
    return fixtures.sphere()
