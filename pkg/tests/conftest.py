import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dilith import params, ring, scheme


@pytest.fixture(scope="session")
def ctx17():
    return ring.make_ring(17, 4)


@pytest.fixture(scope="session")
def ctx0():
    return ring.make_ring(params.Q0, 512)


@pytest.fixture(scope="session")
def sl2():
    return params.builtin("ours-sl2")


@pytest.fixture(scope="session")
def sl2_keypair(sl2):
    return scheme.keygen(sl2, bytes(range(32)))
