import json

import numpy as np
import pytest

from conftest import line_zone, random_instance, random_valid_layout
from twofinger.corpus import Alphabet, FlowMatrix
from twofinger.errors import ConfigError, FormatError, InvalidLayoutError
from twofinger.geometry import KeyboardGeometry, zone_distance_matrices
from twofinger.model import (
    Layout,
    QapInstance,
    evaluate,
    export_instance,
    format_layout_text,
    instance_from_json,
    instance_to_json,
    layout_from_json,
    layout_to_json,
    load_instance,
    parse_layout_text,
    save_instance,
    standard_objective,
    swap_delta,
    to_standard_qap,
    validate_layout,
)


def kinds(violations):
    return {v.kind for v in violations}


class TestEvaluate:
    def test_hand_example(self, hand_instance, hand_layout):
        value = evaluate(hand_layout, hand_instance)
        assert value.left == pytest.approx(4.0, abs=1e-12)
        assert value.right == pytest.approx(2.0, abs=1e-12)
        assert value.total == pytest.approx(6.0, abs=1e-12)
        assert value.cross_mass == 5

    def test_zero_flow_scores_zero(self):
        alphabet = Alphabet(tuple("abcd"))
        flow = FlowMatrix(alphabet, np.zeros((4, 4), dtype=np.int64))
        instance = QapInstance.build(flow, KeyboardGeometry((line_zone(2), line_zone(2))))
        layout = Layout.from_parts([[3, 1], [0, 2]])
        assert evaluate(layout, instance).total == 0.0

    def test_total_is_sum_of_parts(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            instance = random_instance(rng)
            value = evaluate(random_valid_layout(rng, instance), instance)
            assert value.total == pytest.approx(sum(value.per_part), abs=1e-12)
            assert value.total >= 0.0

    def test_invalid_layout_raises_with_violations(self, hand_instance):
        bad = Layout.from_parts([[0, 1, 2], [3]])
        with pytest.raises(InvalidLayoutError) as exc:
            evaluate(bad, hand_instance)
        assert exc.value.violations

    def test_self_transitions_cost_nothing(self):
        alphabet = Alphabet(tuple("ab"))
        counts = np.array([[7, 0], [0, 9]], dtype=np.int64)
        instance = QapInstance.build(
            FlowMatrix(alphabet, counts), KeyboardGeometry((line_zone(1), line_zone(1)))
        )
        value = evaluate(Layout.from_parts([[0], [1]]), instance)
        assert value.total == 0.0
        assert value.cross_mass == 0

    def test_monotonicity_in_single_flow_entry(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            instance = random_instance(rng, n=6)
            layout = random_valid_layout(rng, instance)
            base = evaluate(layout, instance)
            i, k = int(rng.integers(0, 6)), int(rng.integers(0, 6))
            delta = int(rng.integers(1, 50))
            bumped_counts = instance.flow.counts.copy()
            bumped_counts[i, k] += delta
            bumped = QapInstance.build(
                FlowMatrix(instance.alphabet, bumped_counts),
                instance.geometry,
                instance.distances,
            )
            after = evaluate(layout, bumped)
            part_i, loc_i = layout.position_of(i)
            part_k, loc_k = layout.position_of(k)
            if part_i == part_k:
                expected = delta * instance.distances[part_i][loc_i, loc_k]
            else:
                expected = 0.0
            assert after.total - base.total == pytest.approx(expected, abs=1e-9)


class TestValidateLayout:
    def test_valid_layout_passes(self, hand_instance, hand_layout):
        assert validate_layout(hand_layout, hand_instance) == []

    def test_location_collision_names_both_symbols(self, hand_instance):
        layout = Layout(((0, 0, 0), (1, 0, 0), (2, 1, 0), (3, 1, 1)))
        violations = validate_layout(layout, hand_instance)
        collision = [v for v in violations if v.kind == "location-collision"]
        assert len(collision) == 1
        assert "'a'" in collision[0].message and "'b'" in collision[0].message

    def test_cardinality_mismatch(self):
        rng = np.random.default_rng(0)
        instance = random_instance(rng, sizes=(15, 14))
        lopsided = Layout.from_parts([list(range(16)), list(range(16, 29))])
        violations = validate_layout(lopsided, instance)
        assert "cardinality-mismatch" in kinds(violations)
        assert any("16" in v.message for v in violations if v.kind == "cardinality-mismatch")

    def test_unassigned_symbol(self, hand_instance):
        layout = Layout(((0, 0, 0), (1, 0, 1), (2, 1, 0)))  # 'd' missing
        violations = validate_layout(layout, hand_instance)
        assert "unassigned-symbol" in kinds(violations)
        assert any("'d'" in v.message for v in violations)

    def test_symbol_in_two_parts(self, hand_instance):
        layout = Layout(((0, 0, 0), (0, 1, 0), (1, 0, 1), (3, 1, 1)))
        violations = validate_layout(layout, hand_instance)
        assert "symbol-in-two-parts" in kinds(violations)
        assert "unassigned-symbol" in kinds(violations)  # 'c' never placed

    def test_location_out_of_range(self, hand_instance):
        layout = Layout(((0, 0, 5), (1, 0, 1), (2, 1, 0), (3, 1, 1)))
        assert "location-out-of-range" in kinds(validate_layout(layout, hand_instance))

    def test_violations_are_data_not_exceptions(self, hand_instance):
        assert isinstance(validate_layout(Layout(()), hand_instance), list)


class TestSwapDelta:
    def test_uncoupled_symbols_have_zero_delta(self, hand_instance, hand_layout):
        # only a->b carries flow, so swapping c and d moves no mass
        alphabet = hand_instance.alphabet
        counts = np.zeros((4, 4), dtype=np.int64)
        counts[0, 1] = 3
        instance = QapInstance.build(
            FlowMatrix(alphabet, counts), hand_instance.geometry, hand_instance.distances
        )
        assert swap_delta(hand_layout, instance, "c", "d") == pytest.approx(0.0, abs=1e-12)

    def test_matches_full_reevaluation(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            instance = random_instance(rng)
            layout = random_valid_layout(rng, instance)
            p, q = rng.choice(instance.n, size=2, replace=False)
            p_sym = instance.alphabet.symbols[int(p)]
            q_sym = instance.alphabet.symbols[int(q)]
            delta = swap_delta(layout, instance, p_sym, q_sym)
            swapped = layout.swap_symbols(int(p), int(q))
            full = evaluate(swapped, instance).total - evaluate(layout, instance).total
            assert abs(delta - full) <= 1e-9

    def test_swap_back_cancels(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            instance = random_instance(rng)
            layout = random_valid_layout(rng, instance)
            p, q = rng.choice(instance.n, size=2, replace=False)
            p_sym = instance.alphabet.symbols[int(p)]
            q_sym = instance.alphabet.symbols[int(q)]
            forward = swap_delta(layout, instance, p_sym, q_sym)
            back = swap_delta(layout.swap_symbols(int(p), int(q)), instance, p_sym, q_sym)
            assert abs(forward + back) <= 1e-9

    def test_same_symbol_rejected(self, hand_instance, hand_layout):
        with pytest.raises(ConfigError):
            swap_delta(hand_layout, hand_instance, "a", "a")

    def test_cross_part_swap_allowed(self, hand_instance, hand_layout):
        delta = swap_delta(hand_layout, hand_instance, "a", "c")
        swapped = hand_layout.swap_symbols(0, 2)
        full = evaluate(swapped, hand_instance).total - evaluate(hand_layout, hand_instance).total
        assert delta == pytest.approx(full, abs=1e-9)


class TestStandardQap:
    def test_block_structure(self):
        rng = np.random.default_rng(5)
        instance = random_instance(rng, sizes=(15, 14))
        std = to_standard_qap(instance)
        assert std.n == 29
        assert np.array_equal(std.distance[:15, :15], instance.distances[0])
        assert np.array_equal(std.distance[15:, 15:], instance.distances[1])
        assert np.all(std.distance[:15, 15:] == 0)
        assert np.all(std.distance[15:, :15] == 0)

    def test_objective_equivalence_on_random_layouts(self):
        rng = np.random.default_rng(7)
        instance = random_instance(rng, n=8)
        std = to_standard_qap(instance)
        for _ in range(100):
            layout = random_valid_layout(rng, instance)
            perm = np.asarray(layout.slot_sequence(), dtype=np.intp)
            via_std = float(standard_objective(std.flow, std.distance, perm))
            assert abs(via_std - evaluate(layout, instance).total) <= 1e-9

    def test_single_zone_instance_is_identity(self):
        alphabet = Alphabet(tuple("abc"))
        flow = FlowMatrix(alphabet, np.arange(9).reshape(3, 3).astype(np.int64))
        geometry = KeyboardGeometry((line_zone(3),))
        instance = QapInstance.build(flow, geometry)
        std = to_standard_qap(instance)
        assert np.array_equal(std.distance, instance.distances[0])


class TestInvariances:
    def test_part_relabel_invariance(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            instance = random_instance(rng)
            layout = random_valid_layout(rng, instance)
            flipped_geometry = KeyboardGeometry(instance.geometry.zones[::-1])
            flipped = QapInstance.build(
                instance.flow, flipped_geometry, instance.distances[::-1]
            )
            parts = layout.part_lists()
            flipped_layout = Layout.from_parts(parts[::-1])
            original = evaluate(layout, instance)
            relabeled = evaluate(flipped_layout, flipped)
            assert relabeled.total == pytest.approx(original.total, abs=1e-9)
            assert relabeled.per_part == pytest.approx(original.per_part[::-1], abs=1e-9)

    def test_zone_mirror_invariance(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            instance = random_instance(rng)
            layout = random_valid_layout(rng, instance)
            mirrored_zones = tuple(
                tuple((-x, y) for x, y in zone) for zone in instance.geometry.zones
            )
            mirrored = QapInstance.build(instance.flow, KeyboardGeometry(mirrored_zones))
            assert evaluate(layout, mirrored).total == pytest.approx(
                evaluate(layout, instance).total, abs=1e-9
            )


class TestInstanceSerialization:
    def test_qaplib_first_line_is_size(self, hand_instance):
        text = export_instance(hand_instance, "qaplib")
        assert text.splitlines()[0] == "4"
        assert text.splitlines()[1] == ""

    def test_turkish_qaplib_header(self):
        from twofinger.assets import canonical_turkish_instance

        text = export_instance(canonical_turkish_instance(), "qaplib")
        assert text.splitlines()[0] == "29"

    def test_qaplib_matrix_shapes(self, hand_instance):
        lines = export_instance(hand_instance, "qaplib").splitlines()
        flow_rows = lines[2:6]
        dist_rows = lines[7:11]
        assert all(len(r.split()) == 4 for r in flow_rows)
        assert all(len(r.split()) == 4 for r in dist_rows)
        assert flow_rows[0].split() == ["0", "3", "5", "0"]

    def test_json_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(13)
        instance = random_instance(rng)
        path = tmp_path / "inst.json"
        save_instance(instance, path)
        loaded = load_instance(path)
        assert loaded.alphabet.symbols == instance.alphabet.symbols
        assert np.array_equal(loaded.flow.counts, instance.flow.counts)
        assert loaded.geometry == instance.geometry
        for a, b in zip(loaded.distances, instance.distances):
            assert np.array_equal(a, b)

    def test_json_distances_optional(self, hand_instance):
        doc = instance_to_json(hand_instance)
        del doc["distances"]
        rebuilt = instance_from_json(doc)
        for a, b in zip(rebuilt.distances, zone_distance_matrices(hand_instance.geometry)):
            assert np.array_equal(a, b)

    def test_missing_keys_rejected(self):
        with pytest.raises(FormatError, match="missing"):
            instance_from_json({"alphabet": ["a"]})

    def test_unknown_format_rejected(self, hand_instance):
        with pytest.raises(ConfigError):
            export_instance(hand_instance, "xml")


class TestLayoutSerialization:
    def test_text_round_trip(self, hand_instance, hand_layout):
        text = format_layout_text(hand_layout, hand_instance.alphabet)
        assert text == "a b\nc d\n"
        assert parse_layout_text(text, hand_instance.alphabet) == hand_layout

    def test_unknown_symbol_rejected(self, hand_instance):
        with pytest.raises(FormatError, match="'x'"):
            parse_layout_text("a x\nc d\n", hand_instance.alphabet)

    def test_json_round_trip(self, hand_instance, hand_layout):
        doc = layout_to_json(hand_layout, hand_instance.alphabet)
        assert layout_from_json(doc, hand_instance.alphabet) == hand_layout

    def test_slot_sequence_order(self):
        layout = Layout.from_parts([[2, 0], [1]])
        assert layout.slot_sequence() == (2, 0, 1)

    def test_swap_slots(self):
        layout = Layout.from_parts([[0, 1], [2, 3]])
        assert layout.swap_slots(0, 2).slot_sequence() == (2, 1, 0, 3)
