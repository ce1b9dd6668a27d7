"""Squeaky wheel optimization: build, find the trouble makers, move them forward."""

from __future__ import annotations

import numpy as np

from ..builder import BUMPED, OK, Objective, RawSchedule, flexibility_order
from ..model import ProblemInstance
from .common import Evaluator, SearchConfig, SearchResult, start_rng
from .operators import move_forward, random_swaps

__all__ = ["swo", "initial_priority", "trouble_makers", "reprioritize", "rank_distances"]

MAX_DISTANCE = 5


def initial_priority(instance: ProblemInstance) -> list[int]:
    return flexibility_order(instance)


def trouble_makers(raw: RawSchedule, objective: Objective) -> dict[int, int]:
    """Request id -> contribution to the objective, for requests that hurt it."""
    bad = np.flatnonzero(raw.status != OK)
    if objective is Objective.CONFLICTS:
        return {int(i) + 1: 1 for i in bad if raw.status[i] == BUMPED}
    return {int(i) + 1: int(raw.contrib[i]) for i in bad}


def rank_distances(m: int, max_distance: int = MAX_DISTANCE) -> list[int]:
    """Forward distances 1..max spread evenly over ``m`` ranks (rank 1 first)."""
    return [1 + (j * max_distance) // m for j in range(m)]


def reprioritize(
    perm: list[int],
    trouble: dict[int, int],
    objective: Objective,
    moves="all",
    rng: np.random.Generator | None = None,
    distance: int = MAX_DISTANCE,
) -> list[int]:
    """Return a new priority order with the trouble makers moved toward the front.

    ``moves`` is ``"all"``, ``"one"`` (a single random trouble maker) or an
    int k (the k largest contributors, largest first).
    """
    out = list(perm)
    if not trouble:
        return out
    if moves == "all":
        ranked = sorted(trouble, key=lambda r: (trouble[r], r))
        if objective is Objective.CONFLICTS:
            plan = [(r, distance) for r in ranked]
        else:
            plan = list(zip(ranked, rank_distances(len(ranked), distance)))
    elif moves == "one":
        if rng is None:
            raise ValueError("moves='one' needs a generator")
        pool = sorted(trouble)
        plan = [(pool[int(rng.integers(len(pool)))], distance)]
    else:
        k = int(moves)
        if k < 1:
            raise ValueError("top-k moves need k >= 1")
        ranked = sorted(trouble, key=lambda r: (-trouble[r], r))[:k]
        plan = [(r, distance) for r in ranked]
    for r, d in plan:
        move_forward(out, r, d)
    return out


def swo(
    instance: ProblemInstance,
    config: SearchConfig,
    start: str = "greedy",
    moves="all",
    perturb_swaps: int = 0,
) -> SearchResult:
    """Run SWO from the flexibility order (``start="greedy"``) or a random one.

    ``perturb_swaps`` random swaps are applied to the greedy start; repeated
    trials use 20 to diversify restarts.
    """
    if start not in ("greedy", "random"):
        raise ValueError(f"unknown start {start!r}")
    if moves not in ("all", "one") and int(moves) < 1:
        raise ValueError("top-k moves need k >= 1")
    rng = start_rng(config)
    ev = Evaluator(instance, config)
    if start == "greedy":
        order = np.asarray(initial_priority(instance), dtype=np.int64)
        if perturb_swaps:
            order = random_swaps(order, perturb_swaps, rng)
    else:
        order = (rng.permutation(instance.n) + 1).astype(np.int64)
    perm = order.tolist()
    while not ev.done:
        raw = ev.raw(np.asarray(perm, dtype=np.int64))
        perm = reprioritize(perm, trouble_makers(raw, config.objective), config.objective, moves, rng)
    return ev.result()
