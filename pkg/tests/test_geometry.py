import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twofinger.assets import published_left_distances
from twofinger.errors import FormatError, GeometryError
from twofinger.geometry import (
    KeyboardGeometry,
    canonical_geometry,
    compute_distance_matrix,
    load_distance_matrix,
    load_geometry,
    save_distance_matrix,
    save_geometry,
    zone_distance_matrices,
)

zones_strategy = st.lists(
    st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
    min_size=1,
    max_size=8,
    unique=True,
).map(lambda pts: tuple((float(x), float(y)) for x, y in pts))


class TestCanonicalGeometry:
    def test_zone_sizes(self):
        geo = canonical_geometry()
        assert geo.zone_sizes == (15, 14)
        assert geo.total_locations == 29

    def test_anchor_distances(self):
        left = zone_distance_matrices(canonical_geometry())[0]
        assert left[0, 1] == pytest.approx(1.0, abs=0.01)
        assert left[0, 4] == pytest.approx(4.0, abs=0.01)
        assert left[0, 5] == pytest.approx(1.12, abs=0.01)
        assert left[0, 5] == pytest.approx(math.sqrt(1.25), abs=1e-12)
        assert left[0, 9] == pytest.approx(4.61, abs=0.01)

    def test_zero_diagonal_and_symmetry(self):
        for mat in zone_distance_matrices(canonical_geometry()):
            assert np.all(np.diag(mat) == 0)
            assert np.array_equal(mat, mat.T)

    def test_triangle_inequality_all_triples(self):
        for mat in zone_distance_matrices(canonical_geometry()):
            n = mat.shape[0]
            for i, j, k in itertools.product(range(n), repeat=3):
                assert mat[i, j] <= mat[i, k] + mat[k, j] + 1e-12


class TestComputeDistanceMatrix:
    def test_single_location_zone(self):
        assert np.array_equal(compute_distance_matrix([(2.0, 3.0)]), np.zeros((1, 1)))

    def test_duplicate_coordinates_rejected(self):
        with pytest.raises(GeometryError):
            compute_distance_matrix([(0.0, 0.0), (0.0, 0.0)])

    @given(zones_strategy, st.integers(-7, 7), st.integers(-7, 7))
    def test_translation_invariance(self, zone, dx, dy):
        base = compute_distance_matrix(zone)
        moved = compute_distance_matrix([(x + dx, y + dy) for x, y in zone])
        assert np.abs(base - moved).max() <= 1e-12

    @given(zones_strategy)
    def test_mirror_invariance(self, zone):
        base = compute_distance_matrix(zone)
        mirrored = compute_distance_matrix([(-x, y) for x, y in zone])
        assert np.abs(base - mirrored).max() <= 1e-12

    @given(zones_strategy, st.floats(0.1, 10.0))
    def test_scaling_linearity(self, zone, scale):
        base = compute_distance_matrix(zone)
        scaled = compute_distance_matrix([(x * scale, y * scale) for x, y in zone])
        assert np.allclose(scaled, scale * base, rtol=1e-12, atol=1e-12)


class TestGeometryType:
    def test_rejects_empty_zone(self):
        with pytest.raises(GeometryError):
            KeyboardGeometry(((),))

    def test_rejects_no_zones(self):
        with pytest.raises(GeometryError):
            KeyboardGeometry(())

    def test_rejects_duplicate_points(self):
        with pytest.raises(GeometryError):
            KeyboardGeometry((((0.0, 0.0), (0.0, 0.0)),))

    def test_json_round_trip(self, tmp_path):
        geo = canonical_geometry()
        path = tmp_path / "geo.json"
        save_geometry(geo, path)
        assert load_geometry(path) == geo


class TestPublishedFragment:
    def test_loads_and_matches_reference_entries(self):
        frag = published_left_distances()
        assert frag.shape == (13, 13)
        assert frag[0, 1] == 1.0
        assert frag[1, 0] == 1.0
        assert frag[0, 5] == 1.12

    def test_known_deviation_from_computed_geometry(self):
        # the published fragment does not fit one uniform stagger; entries
        # like (1,9) differ from the computed canonical geometry
        left = zone_distance_matrices(canonical_geometry())[0]
        frag = published_left_distances()
        assert abs(left[0, 8] - frag[0, 8]) > 0.01
        assert abs(left[0, 5] - frag[0, 5]) <= 0.01


class TestDistanceCsv:
    def test_round_trip_exact(self, tmp_path):
        mat = zone_distance_matrices(canonical_geometry())[1]
        path = tmp_path / "d.csv"
        save_distance_matrix(mat, path)
        assert np.array_equal(load_distance_matrix(path), mat)

    def test_all_zero_matrix_is_valid(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,0,0\n0,0,0\n0,0,0\n", encoding="utf-8")
        assert np.array_equal(load_distance_matrix(path), np.zeros((3, 3)))

    def test_asymmetry_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,1\n2,0\n", encoding="utf-8")
        with pytest.raises(FormatError, match="asymmetric"):
            load_distance_matrix(path)

    def test_negative_entry_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,-1\n-1,0\n", encoding="utf-8")
        with pytest.raises(FormatError, match="negative"):
            load_distance_matrix(path)

    def test_nonzero_diagonal_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,0\n0,0\n", encoding="utf-8")
        with pytest.raises(FormatError, match="diagonal"):
            load_distance_matrix(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,1\n1\n", encoding="utf-8")
        with pytest.raises(FormatError, match="ragged"):
            load_distance_matrix(path)

    def test_non_square_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,1\n", encoding="utf-8")
        with pytest.raises(FormatError, match="square"):
            load_distance_matrix(path)
