"""Problem instances, layouts, and the split-zone assignment objective.

A layout places every alphabet symbol on one (zone, location) slot. The
objective charges flow(i, k) * distance(loc(i), loc(k)) for every ordered
symbol pair that lands in the same zone; pairs split across zones are free.
"""

import json
from dataclasses import dataclass

import numpy as np

from .corpus import Alphabet, FlowMatrix
from .errors import ConfigError, FormatError, InvalidLayoutError
from .geometry import KeyboardGeometry, validate_distance_matrix, zone_distance_matrices

PART_NAMES = ("left", "right")


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class Layout:
    """Placements of symbols on (part, location) slots.

    Stored as one entry per placement so that malformed layouts (missing
    symbols, collisions, wrong zone sizes) can be represented and reported by
    `validate_layout` instead of failing at construction.
    """

    entries: tuple[tuple[int, int, int], ...]  # (symbol, part, location)

    def __post_init__(self):
        object.__setattr__(
            self,
            "entries",
            tuple(sorted((int(s), int(p), int(l)) for s, p, l in self.entries)),
        )

    @classmethod
    def from_parts(cls, parts) -> "Layout":
        """Build from per-part symbol sequences in location order."""
        entries = []
        for part, symbols in enumerate(parts):
            for loc, sym in enumerate(symbols):
                entries.append((int(sym), part, loc))
        return cls(tuple(entries))

    @classmethod
    def from_slots(cls, slots, zone_sizes) -> "Layout":
        """Build from one concatenated location→symbol sequence."""
        slots = list(slots)
        if len(slots) != sum(zone_sizes):
            raise ConfigError(
                f"{len(slots)} slots do not fill zone sizes {tuple(zone_sizes)}"
            )
        parts = []
        start = 0
        for size in zone_sizes:
            parts.append(slots[start : start + size])
            start += size
        return cls.from_parts(parts)

    @property
    def n(self) -> int:
        return len(self.entries)

    def part_lists(self) -> tuple[tuple[int, ...], ...]:
        """Symbols per part in location order. Requires one symbol per slot."""
        by_part: dict[int, dict[int, int]] = {}
        for sym, part, loc in self.entries:
            slot_map = by_part.setdefault(part, {})
            if loc in slot_map:
                raise InvalidLayoutError(
                    [Violation("location-collision", f"part {part} location {loc} assigned twice")]
                )
            slot_map[loc] = sym
        parts = []
        for part in range(max(by_part) + 1 if by_part else 0):
            slot_map = by_part.get(part, {})
            if sorted(slot_map) != list(range(len(slot_map))):
                raise InvalidLayoutError(
                    [Violation("location-out-of-range", f"part {part} locations not contiguous")]
                )
            parts.append(tuple(slot_map[j] for j in range(len(slot_map))))
        return tuple(parts)

    def slot_sequence(self) -> tuple[int, ...]:
        """Symbols read off location by location, left zone first.

        This sequence is the deterministic tie-break order between layouts.
        """
        return tuple(s for part in self.part_lists() for s in part)

    def position_of(self, symbol: int) -> tuple[int, int]:
        for sym, part, loc in self.entries:
            if sym == symbol:
                return part, loc
        raise KeyError(symbol)

    def swap_symbols(self, p: int, q: int) -> "Layout":
        """Exchange the slots of symbols p and q (may cross parts)."""
        if p == q:
            raise ConfigError("cannot swap a symbol with itself")
        swapped = []
        for sym, part, loc in self.entries:
            if sym == p:
                sym = q
            elif sym == q:
                sym = p
            swapped.append((sym, part, loc))
        return Layout(tuple(swapped))

    def swap_slots(self, u: int, v: int) -> "Layout":
        """Exchange the symbols at concatenated locations u and v."""
        slots = list(self.slot_sequence())
        slots[u], slots[v] = slots[v], slots[u]
        sizes = tuple(len(p) for p in self.part_lists())
        return Layout.from_slots(slots, sizes)


@dataclass(frozen=True, eq=False)
class QapInstance:
    """Alphabet + flow + geometry + per-zone distances: the solvable unit."""

    flow: FlowMatrix
    geometry: KeyboardGeometry
    distances: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.flow.n != self.geometry.total_locations:
            raise ConfigError(
                f"flow size {self.flow.n} != total locations {self.geometry.total_locations}"
            )
        if len(self.distances) != len(self.geometry.zones):
            raise ConfigError("need exactly one distance matrix per zone")
        mats = []
        for z, (size, mat) in enumerate(zip(self.geometry.zone_sizes, self.distances)):
            m = validate_distance_matrix(mat, what=f"zone {z} distance matrix").copy()
            if m.shape != (size, size):
                raise ConfigError(f"zone {z} distance matrix shape {m.shape} != zone size {size}")
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "distances", tuple(mats))

    @classmethod
    def build(cls, flow: FlowMatrix, geometry: KeyboardGeometry, distances=None) -> "QapInstance":
        """Assemble an instance, computing distances from geometry by default."""
        if distances is None:
            distances = zone_distance_matrices(geometry)
        return cls(flow, geometry, tuple(distances))

    @property
    def alphabet(self) -> Alphabet:
        return self.flow.alphabet

    @property
    def n(self) -> int:
        return self.flow.n

    @property
    def zone_sizes(self) -> tuple[int, ...]:
        return self.geometry.zone_sizes


@dataclass(frozen=True)
class ObjectiveValue:
    """Total movement cost plus the per-zone breakdown."""

    total: float
    per_part: tuple[float, ...]
    cross_mass: int

    @property
    def left(self) -> float:
        return self.per_part[0]

    @property
    def right(self) -> float:
        return self.per_part[1] if len(self.per_part) > 1 else 0.0


def validate_layout(layout: Layout, instance: QapInstance) -> list[Violation]:
    """Check the assignment constraints; an empty list means the layout is valid.

    Violations are data, not exceptions: unassigned symbols, symbols placed in
    two parts, location collisions, and zone cardinality mismatches are all
    reported together.
    """
    violations = []
    sizes = instance.zone_sizes
    n = instance.n
    symbols = instance.alphabet.symbols

    def name(sym: int) -> str:
        return symbols[sym] if 0 <= sym < n else f"#{sym}"

    placements: dict[int, list[tuple[int, int]]] = {}
    slot_owners: dict[tuple[int, int], list[int]] = {}
    part_counts = [0] * len(sizes)
    for sym, part, loc in layout.entries:
        if not 0 <= sym < n:
            violations.append(Violation("unknown-symbol", f"symbol index {sym} outside alphabet"))
            continue
        placements.setdefault(sym, []).append((part, loc))
        if not 0 <= part < len(sizes):
            violations.append(Violation("invalid-part", f"symbol {name(sym)!r} on part {part}"))
            continue
        if not 0 <= loc < sizes[part]:
            violations.append(
                Violation(
                    "location-out-of-range",
                    f"symbol {name(sym)!r} at {PART_NAMES[part] if part < 2 else part}:{loc + 1}",
                )
            )
            continue
        slot_owners.setdefault((part, loc), []).append(sym)
        part_counts[part] += 1

    for sym in range(n):
        placed = placements.get(sym, [])
        if not placed:
            violations.append(Violation("unassigned-symbol", f"symbol {name(sym)!r} has no slot"))
        elif len(placed) > 1:
            parts_used = {p for p, _ in placed}
            if len(parts_used) > 1:
                violations.append(
                    Violation("symbol-in-two-parts", f"symbol {name(sym)!r} placed in {len(parts_used)} parts")
                )
            else:
                violations.append(
                    Violation("duplicate-assignment", f"symbol {name(sym)!r} placed {len(placed)} times")
                )

    for (part, loc), owners in slot_owners.items():
        if len(owners) > 1:
            names = ", ".join(repr(name(s)) for s in owners)
            part_label = PART_NAMES[part] if part < len(PART_NAMES) else str(part)
            violations.append(
                Violation("location-collision", f"{part_label} location {loc + 1} holds {names}")
            )

    for part, count in enumerate(part_counts):
        if count != sizes[part]:
            part_label = PART_NAMES[part] if part < len(PART_NAMES) else str(part)
            violations.append(
                Violation(
                    "cardinality-mismatch",
                    f"{part_label} zone holds {count} symbols, has {sizes[part]} locations",
                )
            )
    return violations


def _require_valid(layout: Layout, instance: QapInstance) -> None:
    violations = validate_layout(layout, instance)
    if violations:
        raise InvalidLayoutError(violations)


def evaluate(layout: Layout, instance: QapInstance) -> ObjectiveValue:
    """Movement cost of a valid layout: sum over ordered same-zone symbol pairs
    of flow(i, k) * distance(loc(i), loc(k))."""
    _require_valid(layout, instance)
    counts = instance.flow.counts
    per_part = []
    same_part_mass = 0
    for part, part_syms in enumerate(layout.part_lists()):
        idx = np.asarray(part_syms, dtype=np.intp)
        sub = counts[np.ix_(idx, idx)]
        per_part.append(float((sub * instance.distances[part]).sum()))
        same_part_mass += int(sub.sum())
    cross_mass = int(counts.sum()) - same_part_mass
    return ObjectiveValue(total=float(sum(per_part)), per_part=tuple(per_part), cross_mass=cross_mass)


@dataclass(frozen=True, eq=False)
class StandardQap:
    """Plain n-facility QAP view: concatenated locations, block distance matrix."""

    flow: np.ndarray
    distance: np.ndarray
    n: int


def to_standard_qap(instance: QapInstance) -> StandardQap:
    """Concatenate the zones into one location index space.

    Cross-zone distances are zero, so the standard QAP objective under the
    returned matrices equals `evaluate(...)` for every valid layout.
    """
    n = instance.n
    dhat = np.zeros((n, n), dtype=float)
    start = 0
    for mat in instance.distances:
        size = mat.shape[0]
        dhat[start : start + size, start : start + size] = mat
        start += size
    return StandardQap(flow=instance.flow.counts.copy(), distance=dhat, n=n)


def standard_objective(flow: np.ndarray, distance: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Objective of one or many permutations under a standard QAP.

    `perms` maps location -> symbol; shape (n,) or (k, n). Returns a scalar
    array for a single permutation, else one value per row.
    """
    flow = np.asarray(flow, dtype=float)
    perms = np.asarray(perms)
    single = perms.ndim == 1
    if single:
        perms = perms[None, :]
    gathered = flow[perms[:, :, None], perms[:, None, :]]
    values = (gathered * distance).sum(axis=(1, 2))
    return values[0] if single else values


def swap_delta_slots(flow: np.ndarray, distance: np.ndarray, perm: np.ndarray, u: int, v: int) -> float:
    """Objective change from swapping concatenated locations u and v, in O(n)."""
    pu = perm[u]
    pv = perm[v]
    frow = flow[pv, perm] - flow[pu, perm]          # over destinations w
    fcol = flow[perm, pv] - flow[perm, pu]          # over sources w
    drow = distance[u] - distance[v]
    dcol = distance[:, u] - distance[:, v]
    delta = float(frow @ drow + fcol @ dcol)
    # remove the w in {u, v} contributions included above
    for w in (u, v):
        delta -= float(frow[w] * drow[w] + fcol[w] * dcol[w])
    # corner terms of the swapped 2x2 block
    delta += float((flow[pv, pv] - flow[pu, pu]) * (distance[u, u] - distance[v, v]))
    delta += float((flow[pv, pu] - flow[pu, pv]) * distance[u, v])
    delta += float((flow[pu, pv] - flow[pv, pu]) * distance[v, u])
    return delta


def swap_delta(layout: Layout, instance: QapInstance, p: str, q: str) -> float:
    """evaluate(layout with symbols p and q exchanged) - evaluate(layout), in O(n)."""
    if p == q:
        raise ConfigError(f"swap_delta needs two distinct symbols, got {p!r} twice")
    try:
        pi = instance.alphabet.index[p]
        qi = instance.alphabet.index[q]
    except KeyError as exc:
        raise ConfigError(f"symbol {exc.args[0]!r} is not in the alphabet") from None
    _require_valid(layout, instance)
    std = to_standard_qap(instance)
    perm = np.asarray(layout.slot_sequence(), dtype=np.intp)
    pos = {int(s): j for j, s in enumerate(perm)}
    return swap_delta_slots(std.flow.astype(float), std.distance, perm, pos[pi], pos[qi])


# --- instance serialization -------------------------------------------------

def instance_to_json(instance: QapInstance) -> dict:
    return {
        "alphabet": list(instance.alphabet.symbols),
        "flow": instance.flow.counts.tolist(),
        "zones": [[{"x": x, "y": y} for x, y in zone] for zone in instance.geometry.zones],
        "distances": [m.tolist() for m in instance.distances],
    }


def instance_from_json(doc: dict) -> QapInstance:
    required = {"alphabet", "flow", "zones"}
    if not isinstance(doc, dict) or not required.issubset(doc):
        missing = required - set(doc) if isinstance(doc, dict) else required
        raise FormatError(f"instance JSON missing keys: {sorted(missing)}")
    alphabet = Alphabet(tuple(doc["alphabet"]))
    flow = FlowMatrix(alphabet, np.asarray(doc["flow"], dtype=np.int64))
    geometry = KeyboardGeometry(
        tuple(tuple((float(k["x"]), float(k["y"])) for k in zone) for zone in doc["zones"])
    )
    distances = None
    if "distances" in doc and doc["distances"] is not None:
        distances = tuple(np.asarray(m, dtype=float) for m in doc["distances"])
    return QapInstance.build(flow, geometry, distances)


def save_instance(instance: QapInstance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(export_instance(instance, "json"))


def load_instance(path) -> QapInstance:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    return instance_from_json(doc)


def export_instance(instance: QapInstance, fmt: str) -> str:
    """Render the instance as text: 'json' (lossless) or 'qaplib' (flat matrices).

    The qaplib-like layout is: size line, blank line, flow matrix row-major,
    blank line, concatenated distance matrix row-major with 6-decimal entries.
    """
    if fmt == "json":
        return json.dumps(instance_to_json(instance), indent=2, sort_keys=True) + "\n"
    if fmt in ("qaplib", "qaplib-like"):
        std = to_standard_qap(instance)
        lines = [str(std.n), ""]
        lines += [" ".join(str(int(v)) for v in row) for row in std.flow]
        lines.append("")
        lines += [" ".join(format(v, ".6f") for v in row) for row in std.distance]
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown export format {fmt!r} (expected 'qaplib' or 'json')")


# --- layout serialization ---------------------------------------------------

def format_layout_text(layout: Layout, alphabet: Alphabet) -> str:
    """Two lines of space-separated symbols: left zone then right zone, location order."""
    lines = []
    for part_syms in layout.part_lists():
        lines.append(" ".join(alphabet.symbols[s] for s in part_syms))
    return "\n".join(lines) + "\n"


def parse_layout_text(text: str, alphabet: Alphabet) -> Layout:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    parts = []
    for line in lines:
        row = []
        for token in line.split():
            if token not in alphabet:
                raise FormatError(f"unknown layout symbol {token!r}")
            row.append(alphabet.index[token])
        parts.append(row)
    return Layout.from_parts(parts)


def layout_to_json(layout: Layout, alphabet: Alphabet) -> dict:
    return {
        "assignment": [
            {"symbol": alphabet.symbols[s], "part": p, "location": l}
            for s, p, l in layout.entries
        ]
    }


def layout_from_json(doc: dict, alphabet: Alphabet) -> Layout:
    if not isinstance(doc, dict) or "assignment" not in doc:
        raise FormatError("layout JSON needs a top-level 'assignment' array")
    entries = []
    for item in doc["assignment"]:
        sym = item["symbol"]
        if sym not in alphabet:
            raise FormatError(f"unknown layout symbol {sym!r}")
        entries.append((alphabet.index[sym], int(item["part"]), int(item["location"])))
    return Layout(tuple(entries))


def save_layout(layout: Layout, alphabet: Alphabet, path) -> None:
    text = format_layout_text(layout, alphabet)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def load_layout(path, alphabet: Alphabet) -> Layout:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
        return layout_from_json(doc, alphabet)
    return parse_layout_text(text, alphabet)
