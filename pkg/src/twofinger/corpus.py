"""Character-transition statistics over a fixed alphabet.

The flow matrix records how often each alphabet symbol immediately follows
another in a text corpus. It is the "flow" half of the layout assignment
objective; the geometry module provides the "distance" half.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DecodeError, FormatError

TURKISH_SYMBOLS = tuple("abcçdefgğhıijklmnoöprsştuüvyz")

# Dotted/dotless i casing is not what str.lower() does, so these two uppercase
# letters are mapped explicitly before the generic lowercasing pass.
_TURKISH_CASE_TABLE = {ord("I"): "ı", ord("İ"): "i"}


def turkish_fold(text: str) -> str:
    """Lowercase `text` with Turkish dotted/dotless-i rules ('I'→'ı', 'İ'→'i')."""
    return text.translate(_TURKISH_CASE_TABLE).lower()


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of distinct symbols with 0-based index lookup."""

    symbols: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.symbols) == 0:
            raise ConfigError("alphabet must not be empty")
        index = {}
        for i, s in enumerate(self.symbols):
            if len(s) != 1:
                raise ConfigError(f"alphabet entry {s!r} is not a single character")
            if s in index:
                raise ConfigError(f"duplicate alphabet symbol {s!r}")
            index[s] = i
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.index


def turkish_alphabet() -> Alphabet:
    """The 29-letter Turkish alphabet in dictionary order."""
    return Alphabet(TURKISH_SYMBOLS)


@dataclass(frozen=True, eq=False)
class FlowMatrix:
    """Square matrix of consecutive-character transition counts.

    `counts[i, k]` is the number of times symbol k immediately followed
    symbol i. The matrix is asymmetric in general.
    """

    alphabet: Alphabet
    counts: np.ndarray

    def __post_init__(self):
        n = len(self.alphabet)
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (n, n):
            raise ConfigError(
                f"flow matrix shape {counts.shape} does not match alphabet size {n}"
            )
        if (counts < 0).any():
            raise ConfigError("flow matrix entries must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return len(self.alphabet)

    @property
    def total(self) -> int:
        """Total number of counted transitions."""
        return int(self.counts.sum())

    def __add__(self, other: "FlowMatrix") -> "FlowMatrix":
        if other.alphabet.symbols != self.alphabet.symbols:
            raise ConfigError("cannot add flow matrices over different alphabets")
        return FlowMatrix(self.alphabet, self.counts + other.counts)


def build_flow_matrix(
    text: str | bytes,
    alphabet: Alphabet,
    bridge_ignored: bool = False,
) -> FlowMatrix:
    """Count adjacent symbol pairs in `text`.

    Characters are case-folded with Turkish rules, then characters outside the
    alphabet are dropped. By default an ignored character breaks adjacency, so
    no pair spans it; with `bridge_ignored=True` ignored characters are deleted
    first and a pair may span them.

    Bytes input is decoded as UTF-8; a decode failure reports the byte offset.
    """
    if isinstance(text, bytes):
        text = decode_utf8(text)
    n = len(alphabet)
    counts = np.zeros((n, n), dtype=np.int64)
    index = alphabet.index
    prev = -1
    for ch in turkish_fold(text):
        cur = index.get(ch, -1)
        if cur >= 0:
            if prev >= 0:
                counts[prev, cur] += 1
            prev = cur
        elif not bridge_ignored:
            prev = -1
    return FlowMatrix(alphabet, counts)


def decode_utf8(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError("input is not valid UTF-8", exc.start) from None


def save_flow_matrix(matrix: FlowMatrix, path) -> None:
    """Write the documented flow CSV: symbol header row, then one labeled row per symbol."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(matrix.alphabet.symbols) + "\n")
        for sym, row in zip(matrix.alphabet.symbols, matrix.counts):
            f.write(sym + "," + ",".join(str(int(v)) for v in row) + "\n")


def load_flow_matrix(path, alphabet: Alphabet | None = None) -> FlowMatrix:
    """Read a flow CSV written by `save_flow_matrix`.

    The header row defines the alphabet. When `alphabet` is given, the header
    must match it symbol for symbol.
    """
    with open(path, "rb") as f:
        lines = decode_utf8(f.read()).splitlines()
    if not lines:
        raise FormatError(f"{path}: empty flow file")
    header = lines[0].split(",")
    if alphabet is not None:
        for sym in header:
            if sym not in alphabet:
                raise FormatError(f"{path}: unknown symbol {sym!r} in header")
        if tuple(header) != alphabet.symbols:
            raise FormatError(f"{path}: header does not match the expected alphabet")
    try:
        file_alphabet = Alphabet(tuple(header))
    except ConfigError as exc:
        raise FormatError(f"{path}: bad header: {exc}") from None
    n = len(file_alphabet)
    body = [ln for ln in lines[1:] if ln != ""]
    if len(body) != n:
        raise FormatError(f"{path}: expected {n} data rows, found {len(body)}")
    counts = np.zeros((n, n), dtype=np.int64)
    for i, line in enumerate(body):
        cells = line.split(",")
        if cells[0] != file_alphabet.symbols[i]:
            raise FormatError(
                f"{path}: row {i + 1} labeled {cells[0]!r}, expected {file_alphabet.symbols[i]!r}"
            )
        if len(cells) - 1 != n:
            raise FormatError(
                f"{path}: row {cells[0]!r} has {len(cells) - 1} cells, header has {n}"
            )
        for k, cell in enumerate(cells[1:]):
            try:
                value = int(cell)
            except ValueError:
                raise FormatError(f"{path}: non-integer cell {cell!r} in row {cells[0]!r}") from None
            if value < 0:
                raise FormatError(f"{path}: negative cell {value} in row {cells[0]!r}")
            counts[i, k] = value
    return FlowMatrix(file_alphabet, counts)
