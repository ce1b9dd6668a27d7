"""Landscape experiments: neighbourhood statistics, plateau walks, common precedences."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .builder import Objective, build_raw, split_order
from .model import Permutation, ProblemInstance, make_rng
from .search.common import Evaluator, IntStream, SearchConfig
from .search.local import hill_climb
from .search.operators import apply_shift, legal_shifts, random_shift

__all__ = [
    "NeighborStats",
    "WalkRecord",
    "PrecedenceStats",
    "SnapshotWalks",
    "neighbor_scan",
    "plateau_walk",
    "plateau_experiment",
    "precedence_pairs",
    "write_neighbor_stats",
    "write_walks",
    "write_precedence",
]


@dataclass(frozen=True)
class NeighborStats:
    total_neighbors: int
    same_schedule: int
    same_value: int
    improving: int
    worsening: int
    base_value: int

    @property
    def same_value_fraction(self) -> float:
        return self.same_value / self.total_neighbors if self.total_neighbors else 0.0


@dataclass(frozen=True)
class WalkRecord:
    start_value: int
    steps_taken: int
    exited: bool
    end_value: int
    evaluations: int

    @property
    def outcome(self) -> str:
        return "exit" if self.exited else "capped"


@dataclass(frozen=True)
class PrecedenceStats:
    s: int
    n: int
    low_high_pairs: int
    other_pairs: int

    @property
    def expected_random(self) -> float:
        return self.n * (self.n - 1) / 2.0**self.s

    @property
    def total_pairs(self) -> int:
        return self.low_high_pairs + self.other_pairs


@dataclass(frozen=True)
class SnapshotWalks:
    evaluation: int
    snapshot_value: int
    mean_steps: float
    capped_fraction: float


def _decoder(instance: ProblemInstance, builder: str):
    if builder == "split":
        return lambda order, obj: build_raw(instance, split_order(instance, order), obj)
    return lambda order, obj: build_raw(instance, order, obj)


def neighbor_scan(instance: ProblemInstance, perm, objective=Objective.CONFLICTS, builder: str = "standard") -> NeighborStats:
    """Rebuild every shift neighbour of ``perm`` and classify it against ``perm``'s value."""
    objective = Objective.parse(objective)
    build = _decoder(instance, builder)
    order = np.asarray(perm, dtype=np.int64)
    base = build(order, objective)
    same_sched = same = better = worse = 0
    moves = legal_shifts(instance.n)
    for mv in moves:
        raw = build(apply_shift(order, mv), objective)
        if raw.value == base.value:
            same += 1
            same_sched += raw.same_schedule(base)
        elif raw.value < base.value:
            better += 1
        else:
            worse += 1
    return NeighborStats(len(moves), same_sched, same, better, worse, base.value)


def plateau_walk(
    instance: ProblemInstance,
    start,
    objective=Objective.CONFLICTS,
    cap: int = 1000,
    seed=0,
    max_evaluations: int | None = None,
    builder: str = "standard",
) -> WalkRecord:
    """Random shift walk on the plateau of ``start`` until it finds an exit.

    Equal-valued neighbours are accepted and counted as steps; worse ones are
    rejected and not counted. The walk stops at the first improving neighbour
    or after ``cap`` steps; ``max_evaluations`` (default ``50 * cap``) bounds
    the builds spent when equal neighbours are rare.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    objective = Objective.parse(objective)
    limit = 50 * cap if max_evaluations is None else max_evaluations
    build = _decoder(instance, builder)
    rng = make_rng(seed)
    n = instance.n
    cur = np.asarray(start, dtype=np.int64)
    start_value = cur_val = build(cur, objective).value
    steps = evals = 0
    if n < 2:
        return WalkRecord(start_value, 0, False, start_value, 0)
    draw = IntStream(rng, n)
    while steps < cap and evals < limit:
        cand = apply_shift(cur, random_shift(draw, n))
        val = build(cand, objective).value
        evals += 1
        if val < cur_val:
            return WalkRecord(start_value, steps, True, val, evals)
        if val == cur_val:
            cur = cand
            steps += 1
    return WalkRecord(start_value, steps, False, cur_val, evals)


def plateau_experiment(
    instance: ProblemInstance,
    objective=Objective.OVERLAPS,
    rls_evaluations: int = 8000,
    snapshot_every: int = 500,
    walks: int = 100,
    cap: int = 1000,
    seed=0,
) -> list[SnapshotWalks]:
    """Plateau walks launched from the current RLS solution every ``snapshot_every`` builds."""
    objective = Objective.parse(objective)
    ss = np.random.SeedSequence(seed)
    rls_seed, walk_root = ss.spawn(2)
    snaps: list[tuple[int, np.ndarray, int]] = []

    def grab(ev: Evaluator, cur: np.ndarray, val: int) -> None:
        if ev.used % snapshot_every == 0:
            snaps.append((ev.used, cur.copy(), val))

    cfg = SearchConfig(objective=objective, max_evaluations=rls_evaluations, seed=rls_seed, target=None)
    hill_climb(instance, cfg, lambda _: 1, on_step=grab)

    rows = []
    for (used, perm, val), walk_ss in zip(snaps, walk_root.spawn(len(snaps))):
        recs = [plateau_walk(instance, perm, objective, cap, s) for s in walk_ss.spawn(walks)]
        steps = np.array([r.steps_taken for r in recs], dtype=float)
        capped = np.mean([not r.exited for r in recs])
        rows.append(SnapshotWalks(used, int(val), float(steps.mean()), float(capped)))
    return rows


def precedence_pairs(solutions: Sequence, instance: ProblemInstance) -> PrecedenceStats:
    """Count ordered pairs (A before B) shared by every solution.

    Pairs with a low-altitude A and a high-altitude B are reported apart
    from the rest.
    """
    if len(solutions) == 0:
        raise ValueError("need at least one solution")
    n = instance.n
    common = None
    for sol in solutions:
        order = np.asarray(sol, dtype=np.int64)
        if len(order) != n:
            raise ValueError("solutions must all have length n")
        pos = np.empty(n, dtype=np.int64)
        pos[order - 1] = np.arange(n)
        before = pos[:, None] < pos[None, :]
        common = before if common is None else (common & before)
    low = instance.is_low
    low_high = int(common[np.ix_(low, ~low)].sum())
    return PrecedenceStats(len(solutions), n, low_high, int(common.sum()) - low_high)


# ---------------------------------------------------------------------------
# CSV emitters


def write_neighbor_stats(path, rows: Sequence[tuple[str, NeighborStats]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "total_neighbors", "same_schedule", "same_value", "improving", "worsening", "base_value"])
        for label, st in rows:
            w.writerow([label, st.total_neighbors, st.same_schedule, st.same_value, st.improving, st.worsening, st.base_value])


def write_walks(path, rows: Sequence[SnapshotWalks]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["evaluation", "snapshot_value", "mean_steps", "capped_fraction"])
        for r in rows:
            w.writerow([r.evaluation, r.snapshot_value, f"{r.mean_steps:.4f}", f"{r.capped_fraction:.4f}"])


def write_precedence(path, rows: Sequence[tuple[str, PrecedenceStats]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "s", "n", "low_high_pairs", "other_pairs", "expected_random"])
        for label, st in rows:
            w.writerow([label, st.s, st.n, st.low_high_pairs, st.other_pairs, f"{st.expected_random:.6g}"])
