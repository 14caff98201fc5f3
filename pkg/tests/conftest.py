import sys
from pathlib import Path

import pytest

# make the sibling oracle helpers importable from every test module
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20260814)
