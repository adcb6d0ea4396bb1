import numpy as np
import pytest
from hypothesis import settings

from brequant.models import BinaryGaussianModel, ExponentialTernaryModel

settings.register_profile("brequant", max_examples=60, deadline=None)
settings.load_profile("brequant")


@pytest.fixture
def gauss():
    return BinaryGaussianModel(1.0, 1.0, 1.0, 1.0)


@pytest.fixture
def expo():
    return ExponentialTernaryModel(5.0, 4.0, 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
