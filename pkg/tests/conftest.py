import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import corpus_meshes  # noqa: E402


@pytest.fixture(scope="session")
def meshes():
    return corpus_meshes()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240613)
