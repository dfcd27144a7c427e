"""Shared builders for random and hand-crafted test instances."""

import string

import numpy as np
import pytest

from twofinger.corpus import Alphabet, FlowMatrix
from twofinger.geometry import KeyboardGeometry
from twofinger.model import Layout, QapInstance

_GRID = [(float(x), float(y)) for x in range(8) for y in range(8)]


def random_zone(rng: np.random.Generator, size: int) -> tuple:
    """Distinct integer-grid key centers, so zones are always valid."""
    picks = rng.choice(len(_GRID), size=size, replace=False)
    return tuple(_GRID[i] for i in picks)


def random_instance(
    rng: np.random.Generator,
    n: int | None = None,
    sizes: tuple[int, ...] | None = None,
    max_flow: int = 100,
) -> QapInstance:
    if sizes is None:
        if n is None:
            n = int(rng.integers(2, 11))
        split = int(rng.integers(1, n))
        sizes = (split, n - split)
    n = sum(sizes)
    alphabet = Alphabet(tuple(string.ascii_lowercase[:n]))
    flow = FlowMatrix(alphabet, rng.integers(0, max_flow + 1, size=(n, n)))
    geometry = KeyboardGeometry(tuple(random_zone(rng, s) for s in sizes))
    return QapInstance.build(flow, geometry)


def random_valid_layout(rng: np.random.Generator, instance: QapInstance) -> Layout:
    return Layout.from_slots(rng.permutation(instance.n).tolist(), instance.zone_sizes)


def line_zone(size: int) -> tuple:
    """`size` collinear unit-spaced key centers."""
    return tuple((float(i), 0.0) for i in range(size))


@pytest.fixture
def hand_instance() -> QapInstance:
    """4 symbols, two 2-key zones of unit-spaced locations, sparse flow.

    With a,b on the left and c,d on the right the cost is 3*1 + 1*1 = 4 on
    the left plus 2*1 = 2 on the right; the a->c mass of 5 crosses zones.
    """
    alphabet = Alphabet(tuple("abcd"))
    counts = np.zeros((4, 4), dtype=np.int64)
    counts[0, 1] = 3  # a -> b
    counts[1, 0] = 1  # b -> a
    counts[0, 2] = 5  # a -> c
    counts[2, 3] = 2  # c -> d
    flow = FlowMatrix(alphabet, counts)
    geometry = KeyboardGeometry((line_zone(2), line_zone(2)))
    return QapInstance.build(flow, geometry)


@pytest.fixture
def hand_layout() -> Layout:
    return Layout.from_parts([[0, 1], [2, 3]])  # a,b left; c,d right
