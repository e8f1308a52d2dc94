import os
import random

import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name + ".json")


@pytest.fixture
def rng():
    return random.Random(20260810)


@pytest.fixture
def fig1():
    from hdalang import pcset as pc
    return pc.load_hda(fixture_path("fig1"))


def load(name: str):
    from hdalang import pcset as pc
    return pc.load_hda(fixture_path(name))
