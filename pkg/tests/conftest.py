import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nfsg import default_scenario


@pytest.fixture(scope="session")
def scn():
    return default_scenario()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def db(x):
    return 10.0 ** (x / 10.0)
