import pathlib
import sys

import pytest

SRC = pathlib.Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    try:
        import latticekms  # noqa: F401
    except ImportError:
        sys.path.insert(0, str(SRC))

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from _systems import (  # noqa: E402
    c2_collapse_id_system,
    c2_collapse_system,
    m2c_system,
    swap_system,
    trivial_system,
)


@pytest.fixture(scope="session")
def sys_trivial1():
    return trivial_system(1)


@pytest.fixture(scope="session")
def sys_trivial2():
    return trivial_system(2)


@pytest.fixture(scope="session")
def sys_c2():
    return c2_collapse_system()


@pytest.fixture(scope="session")
def sys_c2id():
    return c2_collapse_id_system()


@pytest.fixture(scope="session")
def sys_m2c():
    return m2c_system()


@pytest.fixture(scope="session")
def sys_swap():
    return swap_system()
