"""Bundled reference data: the Turkish digraph table and the published
left-zone distance fragment, so the canonical instance runs with no external
files."""

from importlib import resources

import numpy as np

from .corpus import FlowMatrix, load_flow_matrix, turkish_alphabet
from .geometry import canonical_geometry, load_distance_matrix
from .model import QapInstance

_DATA = resources.files("twofinger") / "data"


def _data_path(name: str):
    return resources.as_file(_DATA / name)


def builtin_turkish_flow() -> FlowMatrix:
    """The bundled 29x29 Turkish character-transition table."""
    with _data_path("turkish_digraphs.csv") as path:
        return load_flow_matrix(path, alphabet=turkish_alphabet())


def published_left_distances() -> np.ndarray:
    """The bundled 13x13 left-zone distance fragment (published values, kept
    verbatim; it deviates from the computed staggered geometry on a few
    entries)."""
    with _data_path("left_zone_published_distances.csv") as path:
        return load_distance_matrix(path)


def canonical_turkish_instance() -> QapInstance:
    """Built-in flow + canonical 15/14 geometry with computed distances."""
    return QapInstance.build(builtin_turkish_flow(), canonical_geometry())
