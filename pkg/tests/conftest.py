import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from posetdef.coloring import ColoredPoset
from posetdef.poset import Poset


def diamond() -> Poset:
    return Poset.from_pairs(4, [(0, 1), (1, 3), (0, 2), (2, 3)])


def colored(P: Poset, f, N: int) -> ColoredPoset:
    return ColoredPoset(P, tuple(f), N)


@pytest.fixture
def DIAMOND() -> Poset:
    return diamond()


def lt_of(P: Poset) -> list:
    return P.matrix()
