import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ccd.benchgen import karate, ring_of_cliques  # noqa: E402


@pytest.fixture(scope="session")
def karate_inst():
    return karate()


@pytest.fixture(scope="session")
def rc_fig2():
    return ring_of_cliques(4, 6, bridges=True, center=True)
