"""Genetic algorithm over permutation-encoded layouts.

One run: sample an initial pool, keep the best as the population, then for a
fixed number of generations breed offspring by tournament selection, two-cut
PMX crossover, and transposition mutation, and keep the best individuals of
parents plus children (elitist truncation, preferring distinct layouts).
Everything is driven by one seeded generator in a fixed draw order, so runs
are exactly reproducible.

Inside `ga_optimize`, the mutation probability applies per slot of each
child (each slot is transposed with another uniform slot with that
probability). The per-call `swap_mutation` operator, which mutates a whole
layout with a single probability draw, is kept for direct use; at the
default rate of 0.01 it starves the search after the small population
converges, which is why the generation loop works slot-wise.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import (
    Layout,
    ObjectiveValue,
    QapInstance,
    evaluate,
    standard_objective,
    swap_delta_slots,
    to_standard_qap,
)


@dataclass(frozen=True)
class GaConfig:
    """Run parameters. Defaults are the toolkit's standard configuration.

    `mutation_prob` is the per-slot transposition probability applied to each
    child inside `ga_optimize`.
    """

    initial_pool: int = 100
    population: int = 10
    generations: int = 2000
    crossover_prob: float = 0.95
    mutation_prob: float = 0.01
    tournament_size: int = 2
    offspring: int | None = None  # children per generation; None means `population`
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ConfigError(f"crossover_prob {self.crossover_prob} outside [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ConfigError(f"mutation_prob {self.mutation_prob} outside [0, 1]")
        if self.population < 2:
            raise ConfigError("population must be at least 2")
        if self.initial_pool < self.population:
            raise ConfigError("initial_pool must be at least the population size")
        if self.generations < 0:
            raise ConfigError("generations must be nonnegative")
        if not 2 <= self.tournament_size <= self.population:
            raise ConfigError("tournament_size must be in [2, population]")
        if self.offspring is not None and self.offspring < 1:
            raise ConfigError("offspring must be at least 1")

    @property
    def offspring_count(self) -> int:
        return self.population if self.offspring is None else self.offspring


@dataclass(frozen=True)
class GaRun:
    """Result of one seeded optimization run."""

    best_layout: Layout
    best_objective: ObjectiveValue
    history: tuple[tuple[float, float], ...]  # (best, mean) per generation, row 0 = initial
    evaluations: int
    seed: int


def random_layout(instance: QapInstance, rng: np.random.Generator) -> Layout:
    """Uniformly random assignment of the alphabet over all locations."""
    return Layout.from_slots(rng.permutation(instance.n).tolist(), instance.zone_sizes)


def tournament_select(
    population,
    objectives,
    rng: np.random.Generator,
    tournament_size: int = 2,
):
    """Draw `tournament_size` members with replacement, return the best one.

    Ties on the objective fall back to the lexicographic slot order.
    """
    if len(population) == 0:
        raise ConfigError("tournament over an empty population")
    drawn = rng.integers(0, len(population), size=tournament_size)
    best = min(drawn, key=lambda i: (objectives[i], population[i].slot_sequence()))
    return population[int(best)]


def _pmx(a: np.ndarray, b: np.ndarray, c1: int, c2: int) -> np.ndarray:
    """Partially-mapped crossover: keep a[c1:c2], fill the rest from b with
    the segment's value mapping applied until the value is free."""
    n = a.shape[0]
    child = b.copy()
    child[c1:c2] = a[c1:c2]
    pos_in_a = np.empty(n, dtype=np.intp)
    pos_in_a[a] = np.arange(n, dtype=np.intp)
    for j in range(n):
        if c1 <= j < c2:
            continue
        v = b[j]
        p = pos_in_a[v]
        while c1 <= p < c2:
            v = b[p]
            p = pos_in_a[v]
        child[j] = v
    return child


def pmx_pair(parent_a: Layout, parent_b: Layout, cut1: int, cut2: int) -> tuple[Layout, Layout]:
    """Deterministic PMX with explicit cut points (slice bounds, 0 <= cut1 <= cut2 <= n)."""
    a, b, sizes = _parent_slots(parent_a, parent_b)
    n = a.shape[0]
    if not 0 <= cut1 <= cut2 <= n:
        raise ConfigError(f"cut points ({cut1}, {cut2}) out of range for {n} slots")
    return (
        Layout.from_slots(_pmx(a, b, cut1, cut2).tolist(), sizes),
        Layout.from_slots(_pmx(b, a, cut1, cut2).tolist(), sizes),
    )


def _parent_slots(parent_a: Layout, parent_b: Layout):
    sizes_a = tuple(len(p) for p in parent_a.part_lists())
    sizes_b = tuple(len(p) for p in parent_b.part_lists())
    if sizes_a != sizes_b:
        raise ConfigError(f"parents have different zone sizes {sizes_a} vs {sizes_b}")
    a = np.asarray(parent_a.slot_sequence(), dtype=np.intp)
    b = np.asarray(parent_b.slot_sequence(), dtype=np.intp)
    if sorted(a.tolist()) != sorted(b.tolist()):
        raise ConfigError("parents assign different symbol sets")
    return a, b, sizes_a


def _draw_cuts(rng: np.random.Generator, n: int) -> tuple[int, int]:
    """Two distinct cut sites among the n-1 interior slot boundaries, sorted.

    Interior distinct sites guarantee that a crossover actually exchanges a
    proper segment. Permutations shorter than 3 slots have no such pair of
    sites, so they fall back to a degenerate full-range cut.
    """
    if n < 3:
        return 0, n
    c1 = int(rng.integers(1, n))
    c2 = int(rng.integers(1, n - 1))
    if c2 >= c1:
        c2 += 1
    return (c1, c2) if c1 < c2 else (c2, c1)


def two_point_crossover(
    parent_a: Layout,
    parent_b: Layout,
    rng: np.random.Generator,
    crossover_prob: float = 0.95,
) -> tuple[Layout, Layout]:
    """With probability `crossover_prob`, PMX at two random cut points;
    otherwise return copies of the parents."""
    a, b, sizes = _parent_slots(parent_a, parent_b)
    if rng.random() >= crossover_prob:
        return parent_a, parent_b
    c1, c2 = _draw_cuts(rng, a.shape[0])
    return (
        Layout.from_slots(_pmx(a, b, c1, c2).tolist(), sizes),
        Layout.from_slots(_pmx(b, a, c1, c2).tolist(), sizes),
    )


def swap_mutation(
    layout: Layout,
    rng: np.random.Generator,
    mutation_prob: float = 0.01,
) -> Layout:
    """With probability `mutation_prob`, transpose two distinct uniform slots."""
    slots = layout.slot_sequence()
    n = len(slots)
    if rng.random() >= mutation_prob or n < 2:
        return layout
    u = int(rng.integers(0, n))
    v = int(rng.integers(0, n - 1))
    if v >= u:
        v += 1
    return layout.swap_slots(u, v)


def _rank(perms: np.ndarray, objs: np.ndarray) -> np.ndarray:
    """Sort order: objective ascending, then lexicographic slot sequence."""
    n = perms.shape[1]
    keys = tuple(perms[:, j] for j in range(n - 1, -1, -1)) + (objs,)
    return np.lexsort(keys)


def _truncate_distinct(perms: np.ndarray, objs: np.ndarray, size: int):
    """Best `size` individuals, preferring distinct layouts.

    Keeps the sorted-order first copy of every layout; duplicate copies fill
    the remaining slots only when there are fewer than `size` distinct
    layouts. Always retains the incumbent best, so truncation is elitist
    while the population cannot collapse into copies of one individual.
    """
    order = _rank(perms, objs)
    ranked = perms[order]
    ranked_objs = objs[order]
    dup = np.empty(ranked.shape[0], dtype=bool)
    dup[0] = False
    dup[1:] = np.all(ranked[1:] == ranked[:-1], axis=1)  # duplicates sort adjacently
    distinct = np.nonzero(~dup)[0]
    if distinct.size >= size:
        chosen = distinct[:size]
    else:
        copies = np.nonzero(dup)[0]
        chosen = np.sort(np.concatenate([distinct, copies[: size - distinct.size]]))
    return ranked[chosen], ranked_objs[chosen]


def ga_optimize(instance: QapInstance, config: GaConfig) -> GaRun:
    """Run the genetic algorithm and return the best layout found.

    Randomness is consumed in a fixed order per generation: tournament
    indices, crossover decisions, cut points for crossing pairs in pair
    order, the per-slot mutation mask, then one partner draw per mutating
    slot in row-major order, so a (instance, config) pair fully determines
    the result.
    """
    rng = np.random.default_rng(config.seed)
    n = instance.n
    std = to_standard_qap(instance)
    flow = std.flow.astype(float)
    dist = std.distance
    pop_size = config.population
    offspring = config.offspring_count
    pairs = (offspring + 1) // 2

    pool = rng.permuted(
        np.tile(np.arange(n, dtype=np.intp), (config.initial_pool, 1)), axis=1
    )
    pool_objs = np.atleast_1d(standard_objective(flow, dist, pool))
    evaluations = config.initial_pool
    population, objs = _truncate_distinct(pool, pool_objs, pop_size)

    history = [(float(objs[0]), float(objs.mean()))]

    for _ in range(config.generations):
        drawn = rng.integers(0, pop_size, size=(pairs, 2, config.tournament_size))
        parent_idx = drawn.min(axis=2)  # population is sorted, so min index wins
        cross_u = rng.random(pairs)
        crossing = cross_u < config.crossover_prob

        children = np.empty((pairs * 2, n), dtype=np.intp)
        for p in range(pairs):
            a = population[parent_idx[p, 0]]
            b = population[parent_idx[p, 1]]
            if crossing[p]:
                c1, c2 = _draw_cuts(rng, n)
                children[2 * p] = _pmx(a, b, c1, c2)
                children[2 * p + 1] = _pmx(b, a, c1, c2)
            else:
                children[2 * p] = a
                children[2 * p + 1] = b
        children = children[:offspring]

        child_objs = np.atleast_1d(standard_objective(flow, dist, children))
        evaluations += offspring

        mutating = rng.random((offspring, n)) < config.mutation_prob
        if n >= 2:
            for c, u in zip(*np.nonzero(mutating)):
                v = int(rng.integers(0, n - 1))
                if v >= u:
                    v += 1
                child_objs[c] += swap_delta_slots(flow, dist, children[c], int(u), v)
                children[c, u], children[c, v] = children[c, v], children[c, u]

        merged = np.vstack([population, children])
        merged_objs = np.concatenate([objs, child_objs])
        population, objs = _truncate_distinct(merged, merged_objs, pop_size)
        history.append((float(objs[0]), float(objs.mean())))

    best = Layout.from_slots(population[0].tolist(), instance.zone_sizes)
    return GaRun(
        best_layout=best,
        best_objective=evaluate(best, instance),
        history=tuple(history),
        evaluations=evaluations,
        seed=config.seed,
    )
