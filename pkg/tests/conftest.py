import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from helpers import example1, example2


@pytest.fixture(scope="session")
def ex1():
    return example1()


@pytest.fixture(scope="session")
def ex2():
    return example2()


@pytest.fixture(scope="session")
def fixtures_dir():
    return Path(__file__).parent.parent / "fixtures"
