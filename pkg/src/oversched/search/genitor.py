"""Steady-state genetic algorithm with rank-based selection and position crossover."""

from __future__ import annotations

import bisect
import math

import numpy as np

from ..model import ProblemInstance
from .common import Evaluator, SearchConfig, SearchResult, start_rng
from .operators import syswerda_crossover

__all__ = ["genitor", "crossover_size", "linear_rank_index"]

RANDOM_THIRD = "third"


def linear_rank_index(u: float, size: int, bias: float) -> int:
    """Map a uniform draw to a population index (0 = best) under linear ranking.

    With ``bias`` b the best member is b times as likely to be picked as the
    median one.
    """
    if bias <= 1.0:
        return int(u * size)
    idx = size * (bias - math.sqrt(bias * bias - 4.0 * (bias - 1.0) * u)) / (2.0 * (bias - 1.0))
    return min(int(idx), size - 1)


def crossover_size(n: int, k_positions, rng: np.random.Generator) -> int:
    """Number of positions taken from the second parent.

    ``"third"`` draws uniformly among the integers strictly between n/3 and
    2n/3 (falling back to ``max(1, n // 2)`` when there are none); an int is
    used as is.
    """
    if k_positions == RANDOM_THIRD:
        lo = n // 3 + 1
        hi = -(-2 * n // 3) - 1
        if lo > hi:
            return max(1, n // 2)
        return int(rng.integers(lo, hi + 1))
    return int(k_positions)


def genitor(
    instance: ProblemInstance,
    config: SearchConfig,
    population: int = 200,
    k_positions: int | str = RANDOM_THIRD,
    selection_bias: float = 1.5,
) -> SearchResult:
    """Genitor: one child per step, always replacing the worst member.

    Evaluating the initial population spends ``population`` builds of the
    budget. ``k_positions`` is ``"third"`` or a fixed count of crossover
    positions.
    """
    if population < 2:
        raise ValueError("population must be >= 2")
    n = instance.n
    if k_positions != RANDOM_THIRD:
        k = int(k_positions)
        if k < 0 or k > n:
            raise ValueError(f"cannot select {k} crossover positions from {n}")
    rng = start_rng(config)
    ev = Evaluator(instance, config)

    # kept sorted best-first; ``bisect_right`` puts a new member after equals
    values: list[int] = []
    members: list[np.ndarray] = []
    for _ in range(population):
        if ev.done:
            break
        p = (rng.permutation(n) + 1).astype(np.int64)
        v = ev(p)
        pos = bisect.bisect_right(values, v)
        values.insert(pos, v)
        members.insert(pos, p)

    while not ev.done and len(members) >= 2:
        size = len(members)
        i = linear_rank_index(rng.random(), size, selection_bias)
        j = i
        while j == i:
            j = linear_rank_index(rng.random(), size, selection_bias)
        k = crossover_size(n, k_positions, rng)
        positions = rng.choice(n, size=k, replace=False) + 1
        child = syswerda_crossover(members[i], members[j], positions)
        v = ev(child)
        values.pop()
        members.pop()
        pos = bisect.bisect_right(values, v)
        values.insert(pos, v)
        members.insert(pos, child)

    return ev.result(population_best=values[0] if values else None)
