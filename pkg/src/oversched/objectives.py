"""Objective values recomputed from a finished schedule, independently of the builder."""

from __future__ import annotations

from dataclasses import dataclass

from .builder import Objective, Schedule

__all__ = ["ObjectiveValue", "count_conflicts", "sum_overlaps", "evaluate", "interval_overlap"]


@dataclass(frozen=True)
class ObjectiveValue:
    kind: Objective
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("objective values are non-negative")

    def __int__(self) -> int:
        return self.value


def interval_overlap(a_start: int, a_end: int, b_start: int, b_end: int) -> int:
    """Minutes shared by half-open intervals ``[a_start, a_end)`` and ``[b_start, b_end)``."""
    return max(0, min(a_end, b_end) - max(a_start, b_start))


def _require(schedule: Schedule, kind: Objective) -> None:
    if schedule.objective is not kind:
        raise ValueError(f"schedule was built for {schedule.objective.value}, not {kind.value}")


def count_conflicts(schedule: Schedule) -> ObjectiveValue:
    _require(schedule, Objective.CONFLICTS)
    return ObjectiveValue(Objective.CONFLICTS, len(schedule.bumped))


def sum_overlaps(schedule: Schedule) -> ObjectiveValue:
    """Total overlap between each overlapped placement and the conflict-free ones on its antenna.

    Overlap among overlapped placements themselves is not counted.
    """
    _require(schedule, Objective.OVERLAPS)
    total = 0
    for ps in schedule.placements.values():
        clean = [q for q in ps if not q.overlapped]
        for p in ps:
            if p.overlapped:
                total += sum(interval_overlap(p.start, p.end, q.start, q.end) for q in clean)
    return ObjectiveValue(Objective.OVERLAPS, total)


def evaluate(schedule: Schedule) -> ObjectiveValue:
    if schedule.objective is Objective.CONFLICTS:
        return count_conflicts(schedule)
    return sum_overlaps(schedule)
