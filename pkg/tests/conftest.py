import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from orlimink.verification import random_polytope  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def polygon(rng):
    return random_polytope(rng, 2, 9)


@pytest.fixture
def polytope3(rng):
    return random_polytope(rng, 3, 12)
