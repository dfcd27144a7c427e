"""Keyboard geometry and Euclidean distance matrices.

A geometry is a list of zones; each zone is an ordered list of key-center
coordinates in key-width units. Distances are always within a zone, so each
zone gets its own square matrix.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, GeometryError

Point = tuple[float, float]

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class KeyboardGeometry:
    """Key-center coordinates per zone. The canonical board has a 15-key left
    zone and a 14-key right zone."""

    zones: tuple[tuple[Point, ...], ...]

    def __post_init__(self):
        if not self.zones:
            raise GeometryError("geometry needs at least one zone")
        zones = []
        for z, points in enumerate(self.zones):
            pts = tuple((float(x), float(y)) for x, y in points)
            if not pts:
                raise GeometryError(f"zone {z} has no key locations")
            for x, y in pts:
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise GeometryError(f"zone {z} has a non-finite coordinate")
            if len(set(pts)) != len(pts):
                raise GeometryError(f"zone {z} has duplicate key coordinates")
            zones.append(pts)
        object.__setattr__(self, "zones", tuple(zones))

    @property
    def zone_sizes(self) -> tuple[int, ...]:
        return tuple(len(z) for z in self.zones)

    @property
    def total_locations(self) -> int:
        return sum(self.zone_sizes)


def _staggered_rows(row_lengths, stagger: float = 0.5) -> tuple[Point, ...]:
    # Each lower row shifts +stagger in x relative to the row above; unit pitch both ways.
    points = []
    for r, length in enumerate(row_lengths):
        for c in range(length):
            points.append((c + stagger * r, float(r)))
    return tuple(points)


def canonical_geometry() -> KeyboardGeometry:
    """The built-in 15+14 two-zone board.

    Three rows per zone (5/5/5 left, 5/5/4 right), horizontal and vertical
    pitch of one key width, each lower row offset +0.5 so the adjacent
    diagonal distance is sqrt(1.25).
    """
    return KeyboardGeometry(
        zones=(
            _staggered_rows((5, 5, 5)),
            _staggered_rows((5, 5, 4)),
        )
    )


def compute_distance_matrix(points) -> np.ndarray:
    """Pairwise Euclidean distances between key centers of one zone."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(set(pts)) != len(pts):
        raise GeometryError("duplicate key coordinates in zone")
    coords = np.asarray(pts, dtype=float)
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def zone_distance_matrices(geometry: KeyboardGeometry) -> tuple[np.ndarray, ...]:
    return tuple(compute_distance_matrix(z) for z in geometry.zones)


def validate_distance_matrix(matrix: np.ndarray, *, what: str = "distance matrix") -> np.ndarray:
    """Check symmetry, zero diagonal, and nonnegativity; returns the matrix."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise FormatError(f"{what} is not square: shape {m.shape}")
    if (m < 0).any():
        raise FormatError(f"{what} has a negative entry")
    asym = np.abs(m - m.T).max() if m.size else 0.0
    if asym > SYMMETRY_TOL:
        raise FormatError(f"{what} is asymmetric (max |D - D^T| = {asym:g})")
    diag = np.abs(np.diag(m)).max() if m.size else 0.0
    if diag > SYMMETRY_TOL:
        raise FormatError(f"{what} has a nonzero diagonal (max {diag:g})")
    return m


def save_distance_matrix(matrix: np.ndarray, path) -> None:
    m = np.asarray(matrix, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in m:
            f.write(",".join(format(v, ".17g") for v in row) + "\n")


def load_distance_matrix(path) -> np.ndarray:
    """Read a plain numeric matrix CSV ('.' decimals) and validate its invariants."""
    rows = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",") if "," in line else line.split()
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric cell") from None
    if not rows:
        raise FormatError(f"{path}: empty distance file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FormatError(f"{path}: ragged rows")
    return validate_distance_matrix(np.array(rows, dtype=float), what=str(path))


def save_geometry(geometry: KeyboardGeometry, path) -> None:
    doc = {"zones": [[{"x": x, "y": y} for x, y in zone] for zone in geometry.zones]}
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def load_geometry(path) -> KeyboardGeometry:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    if not isinstance(doc, dict) or "zones" not in doc:
        raise FormatError(f"{path}: geometry JSON needs a top-level 'zones' array")
    try:
        zones = tuple(
            tuple((float(k["x"]), float(k["y"])) for k in zone) for zone in doc["zones"]
        )
    except (TypeError, KeyError):
        raise FormatError(f"{path}: zone entries must be objects with 'x' and 'y'") from None
    return KeyboardGeometry(zones)
