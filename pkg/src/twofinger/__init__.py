"""Split-zone keyboard layout toolkit.

Builds character-transition flow matrices from text, models the two-zone
layout assignment problem as a QAP, evaluates and compares layouts, and
optimizes them with a seeded genetic algorithm backed by an exact
brute-force oracle for small instances.
"""

from .assets import builtin_turkish_flow, canonical_turkish_instance, published_left_distances
from .corpus import Alphabet, FlowMatrix, build_flow_matrix, load_flow_matrix, save_flow_matrix, turkish_alphabet
from .errors import (
    ConfigError,
    DecodeError,
    FormatError,
    GeometryError,
    InvalidLayoutError,
    ToolkitError,
)
from .ga import GaConfig, GaRun, ga_optimize, random_layout, swap_mutation, tournament_select, two_point_crossover
from .geometry import (
    KeyboardGeometry,
    canonical_geometry,
    compute_distance_matrix,
    load_distance_matrix,
    save_distance_matrix,
    zone_distance_matrices,
)
from .model import (
    Layout,
    ObjectiveValue,
    QapInstance,
    evaluate,
    export_instance,
    load_instance,
    load_layout,
    save_instance,
    save_layout,
    swap_delta,
    to_standard_qap,
    validate_layout,
)
from .oracle import OracleResult, brute_force_optimal, oracle_evaluate

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "ConfigError",
    "DecodeError",
    "FlowMatrix",
    "FormatError",
    "GaConfig",
    "GaRun",
    "GeometryError",
    "InvalidLayoutError",
    "KeyboardGeometry",
    "Layout",
    "ObjectiveValue",
    "OracleResult",
    "QapInstance",
    "ToolkitError",
    "brute_force_optimal",
    "build_flow_matrix",
    "builtin_turkish_flow",
    "canonical_geometry",
    "canonical_turkish_instance",
    "compute_distance_matrix",
    "evaluate",
    "export_instance",
    "ga_optimize",
    "load_distance_matrix",
    "load_flow_matrix",
    "load_instance",
    "load_layout",
    "oracle_evaluate",
    "published_left_distances",
    "random_layout",
    "save_distance_matrix",
    "save_flow_matrix",
    "save_instance",
    "save_layout",
    "swap_delta",
    "swap_mutation",
    "to_standard_qap",
    "tournament_select",
    "two_point_crossover",
    "turkish_alphabet",
    "validate_layout",
    "zone_distance_matrices",
]
