import numpy as np
import pytest

from qchip.chip import ChipPoint
from qchip.cli import main
from qchip.settings import Settings

SQRT3 = np.sqrt(3.0)


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch):
    """Keep a developer's QCHIP_CONFIG out of the tests."""
    monkeypatch.delenv("QCHIP_CONFIG", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(Settings().seed)


@pytest.fixture
def worked_point():
    return ChipPoint(p=1 / 3, q=2 / 5)


@pytest.fixture
def worked_prob():
    return np.array([2 / 15, 1 / 5, 4 / 15, 2 / 5])


@pytest.fixture
def worked_bloch():
    return np.array([SQRT3 / 5, SQRT3 / 15, 1 / SQRT3])


@pytest.fixture
def physical_bloch(rng):
    """Points uniform in the Bloch ball."""
    directions = rng.normal(size=(200, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions * rng.uniform(size=(200, 1)) ** (1 / 3)


@pytest.fixture
def run_cli(capsys):
    def run(*argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run
