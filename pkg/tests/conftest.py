import pytest

from fluxcad.presets import design_preset


@pytest.fixture(scope="session")
def design_a():
    return design_preset("A")


@pytest.fixture(scope="session")
def design_b():
    return design_preset("B")


@pytest.fixture(scope="session")
def params_a(design_a):
    return design_a.params


@pytest.fixture(scope="session")
def params_b(design_b):
    return design_b.params
