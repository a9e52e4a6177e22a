import random

import pytest

from starkit.groupring import FiniteAbelianGroup, GroupRingElement

SMALL_GROUPS = [[], [2], [3], [4], [2, 2], [5], [6], [2, 4]]


@pytest.fixture
def rng():
    return random.Random(20240601)


def random_element(G: FiniteAbelianGroup, rng: random.Random, height: int = 3) -> GroupRingElement:
    return GroupRingElement.from_vector(G, [rng.randint(-height, height) for _ in range(G.order)])
