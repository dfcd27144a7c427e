"""Brute-force reference for objectives and optima on small instances.

`oracle_evaluate` recomputes the movement cost as the raw five-index
indicator sum, deliberately sharing no structure with the pair-sum evaluator
in `model`, so the two cannot hide the same bug. `brute_force_optimal`
enumerates every permutation of a small instance.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import (
    Layout,
    QapInstance,
    _require_valid,
    standard_objective,
    to_standard_qap,
)

BRUTE_FORCE_LIMIT = 10
_CHUNK = 20_000


@dataclass(frozen=True)
class OracleResult:
    optimal_layout: Layout
    optimal_objective: float
    enumerated: int


def oracle_evaluate(layout: Layout, instance: QapInstance) -> float:
    """Five-index indicator sum over (part, symbol, location, symbol, location)."""
    _require_valid(layout, instance)
    n = instance.n
    sizes = instance.zone_sizes
    counts = instance.flow.counts

    # xy[m][i][j] = 1 iff symbol i sits at location j of part m
    xy = [[[0] * sizes[m] for _ in range(n)] for m in range(len(sizes))]
    for sym, part, loc in layout.entries:
        xy[part][sym][loc] = 1

    total = 0.0
    for m in range(len(sizes)):
        dist = instance.distances[m]
        for i in range(n):
            for j in range(sizes[m]):
                if xy[m][i][j] == 0:
                    continue
                for k in range(n):
                    for l in range(sizes[m]):
                        total += float(counts[i, k]) * float(dist[j, l]) * xy[m][i][j] * xy[m][k][l]
    return total


def brute_force_optimal(instance: QapInstance) -> OracleResult:
    """Enumerate all layouts of a small instance and return the best.

    Ties go to the first layout in lexicographic slot order. Refuses
    instances above BRUTE_FORCE_LIMIT locations.
    """
    n = instance.n
    if n > BRUTE_FORCE_LIMIT:
        raise ConfigError(
            f"brute force limited to {BRUTE_FORCE_LIMIT} locations, instance has {n}"
        )
    std = to_standard_qap(instance)
    flow = std.flow.astype(float)

    best_obj = math.inf
    best_perm = None
    enumerated = 0
    perm_iter = itertools.permutations(range(n))
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(perm_iter, _CHUNK)),
            dtype=np.intp,
        )
        if flat.size == 0:
            break
        chunk = flat.reshape(-1, n)
        values = standard_objective(flow, std.distance, chunk)
        enumerated += chunk.shape[0]
        local = int(np.argmin(values))
        if values[local] < best_obj:
            best_obj = float(values[local])
            best_perm = chunk[local].copy()
        if chunk.shape[0] < _CHUNK:
            break
    layout = Layout.from_slots(best_perm.tolist(), instance.zone_sizes)
    return OracleResult(optimal_layout=layout, optimal_objective=best_obj, enumerated=enumerated)
