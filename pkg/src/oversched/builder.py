"""Greedy schedule builders that decode a permutation into a schedule.

The hot path is a numba kernel over the flat tables from
``ProblemInstance.arrays``. Placements are closed intervals
``[start, start + duration - 1]``; two placements conflict iff those intervals
intersect.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .model import Permutation, ProblemInstance, check_bijection

__all__ = [
    "Objective",
    "Placement",
    "Schedule",
    "RawSchedule",
    "OK",
    "BUMPED",
    "OVERLAPPED",
    "build_schedule",
    "build_schedule_split",
    "build_raw",
    "split_order",
    "greedy_activity_selector",
    "insert_high_flexibility_order",
    "gooley_schedule",
    "flexibility_order",
    "dump_schedule",
]

OK, BUMPED, OVERLAPPED = 0, 1, 2


class Objective(enum.Enum):
    CONFLICTS = "conflicts"
    OVERLAPS = "overlaps"

    @classmethod
    def parse(cls, value) -> "Objective":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


# ---------------------------------------------------------------------------
# compiled kernel


@njit(cache=True)
def _earliest_start(starts, ends, count, lb, ub, dur):
    # first placement that ends at or after lb; ends are sorted because the
    # timeline is disjoint and sorted by start
    lo, hi = 0, count
    while lo < hi:
        mid = (lo + hi) >> 1
        if ends[mid] < lb:
            lo = mid + 1
        else:
            hi = mid
    t = lb
    for j in range(lo, count):
        if t + dur - 1 > ub:
            return -1
        if starts[j] > t + dur - 1:
            break
        t = ends[j] + 1
    if t + dur - 1 > ub:
        return -1
    return t


@njit(cache=True)
def _insert(starts, ends, count, s, e):
    j = count
    while j > 0 and starts[j - 1] > s:
        starts[j] = starts[j - 1]
        ends[j] = ends[j - 1]
        j -= 1
    starts[j] = s
    ends[j] = e


@njit(cache=True)
def _overlap_at(starts, ends, j0, j1, t, dur):
    total = 0
    e = t + dur - 1
    for j in range(j0, j1):
        lo = starts[j] if starts[j] > t else t
        hi = ends[j] if ends[j] < e else e
        if hi >= lo:
            total += hi - lo + 1
    return total


@njit(cache=True)
def _min_overlap(starts, ends, count, lb, ub, dur):
    """Start in the window minimising overlap with the conflict-free timeline.

    Candidate starts are lb and, for every placement p, p.end + 1 and
    p.start - dur, clamped to the feasible range; the overlap is piecewise
    linear in the start and its local minima sit on those kinks.
    """
    last = ub - dur + 1
    # placements intersecting [lb, ub]
    j0 = 0
    while j0 < count and ends[j0] < lb:
        j0 += 1
    j1 = j0
    while j1 < count and starts[j1] <= ub:
        j1 += 1
    best_t = lb
    best = _overlap_at(starts, ends, j0, j1, lb, dur)
    for j in range(j0, j1):
        for c in range(2):
            t = ends[j] + 1 if c == 0 else starts[j] - dur
            if t < lb:
                t = lb
            elif t > last:
                t = last
            ov = _overlap_at(starts, ends, j0, j1, t, dur)
            if ov < best or (ov == best and t < best_t):
                best = ov
                best_t = t
    return best_t, best


@njit(cache=True)
def _build_kernel(order, req, alt, n_res, overlaps, fixed):
    n = req.shape[0]
    out_res = np.full(n, -1, dtype=np.int64)
    out_start = np.full(n, -1, dtype=np.int64)
    status = np.zeros(n, dtype=np.int8)
    contrib = np.zeros(n, dtype=np.int64)
    starts = np.empty((n_res, n), dtype=np.int64)
    ends = np.empty((n_res, n), dtype=np.int64)
    cnt = np.zeros(n_res, dtype=np.int64)

    for i in range(n):
        r = fixed[i, 0]
        if r >= 0:
            s = fixed[i, 1]
            _insert(starts[r], ends[r], cnt[r], s, s + req[i, 0] - 1)
            cnt[r] += 1
            out_res[i] = r
            out_start[i] = s

    value = 0
    for p in range(order.shape[0]):
        i = order[p] - 1
        if fixed[i, 0] >= 0:
            continue
        dur = req[i, 0]
        a0 = req[i, 1]
        a1 = a0 + req[i, 2]
        placed = False
        for k in range(a0, a1):
            r = alt[k, 0]
            t = _earliest_start(starts[r], ends[r], cnt[r], alt[k, 1], alt[k, 2], dur)
            if t >= 0:
                _insert(starts[r], ends[r], cnt[r], t, t + dur - 1)
                cnt[r] += 1
                out_res[i] = r
                out_start[i] = t
                placed = True
                break
        if placed:
            continue
        if overlaps:
            best = -1
            best_t = -1
            best_r = -1
            for k in range(a0, a1):
                r = alt[k, 0]
                t, ov = _min_overlap(starts[r], ends[r], cnt[r], alt[k, 1], alt[k, 2], dur)
                if best < 0 or ov < best:
                    best = ov
                    best_t = t
                    best_r = r
            out_res[i] = best_r
            out_start[i] = best_t
            status[i] = 2
        else:
            status[i] = 1
            value += 1
    if overlaps:
        # later requests may have landed on top of an overlapped placement, so
        # contributions are measured against the final conflict-free timeline
        for i in range(n):
            if status[i] == 2:
                r = out_res[i]
                s = out_start[i]
                lo, hi = 0, cnt[r]
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if ends[r, mid] < s:
                        lo = mid + 1
                    else:
                        hi = mid
                j1 = lo
                e = s + req[i, 0] - 1
                while j1 < cnt[r] and starts[r, j1] <= e:
                    j1 += 1
                contrib[i] = _overlap_at(starts[r], ends[r], lo, j1, s, req[i, 0])
                value += contrib[i]
    return out_res, out_start, status, contrib, value


_NO_FIXED: dict[int, np.ndarray] = {}


def _no_fixed(n: int) -> np.ndarray:
    arr = _NO_FIXED.get(n)
    if arr is None:
        arr = np.full((n, 2), -1, dtype=np.int64)
        arr.setflags(write=False)
        _NO_FIXED[n] = arr
    return arr


# ---------------------------------------------------------------------------
# schedule types


@dataclass(frozen=True)
class Placement:
    request: int
    resource: str
    start: int
    end: int
    overlapped: bool = False


@dataclass(frozen=True)
class RawSchedule:
    """Array form of a built schedule, indexed by ``request id - 1``.

    ``resource`` holds roster indices (-1 when bumped), ``status`` is one of
    ``OK``, ``BUMPED``, ``OVERLAPPED`` and ``contrib`` the overlap minutes an
    overlapped request adds to the objective.
    """

    resource: np.ndarray
    start: np.ndarray
    status: np.ndarray
    contrib: np.ndarray
    value: int

    def same_schedule(self, other: "RawSchedule") -> bool:
        return (
            np.array_equal(self.resource, other.resource)
            and np.array_equal(self.start, other.start)
            and np.array_equal(self.status, other.status)
        )


@dataclass(frozen=True)
class Schedule:
    placements: dict[str, tuple[Placement, ...]]
    bumped: frozenset[int]
    objective: Objective
    value: int

    def all_placements(self) -> list[Placement]:
        return [p for ps in self.placements.values() for p in ps]

    def placement_of(self, request: int) -> Placement | None:
        for ps in self.placements.values():
            for p in ps:
                if p.request == request:
                    return p
        return None

    @classmethod
    def from_raw(cls, instance: ProblemInstance, raw: RawSchedule, objective: Objective) -> "Schedule":
        req, _ = instance.arrays
        per_res: dict[str, list[Placement]] = {r.id: [] for r in instance.resources}
        bumped = []
        for i in range(instance.n):
            if raw.status[i] == BUMPED:
                bumped.append(i + 1)
                continue
            res = instance.resources[int(raw.resource[i])].id
            s = int(raw.start[i])
            per_res[res].append(
                Placement(i + 1, res, s, s + int(req[i, 0]), bool(raw.status[i] == OVERLAPPED))
            )
        placements = {
            k: tuple(sorted(v, key=lambda p: (p.start, p.overlapped, p.request))) for k, v in per_res.items()
        }
        return cls(placements, frozenset(bumped), objective, int(raw.value))


# ---------------------------------------------------------------------------
# builders


def _as_order(instance: ProblemInstance, perm) -> np.ndarray:
    if isinstance(perm, Permutation):
        order = perm.as_array()
    else:
        order = np.asarray(perm, dtype=np.int64)
    if order.ndim != 1 or len(order) != instance.n:
        raise ValueError(f"permutation length {len(order)} does not match instance size {instance.n}")
    if instance.n and not np.array_equal(np.sort(order), np.arange(1, instance.n + 1)):
        raise ValueError("permutation is not a bijection over the instance's request ids")
    return order


def build_raw(instance: ProblemInstance, order: np.ndarray, objective: Objective, fixed=None) -> RawSchedule:
    """Unchecked fast path: ``order`` must be an int64 array of request ids."""
    req, alt = instance.arrays
    if fixed is None:
        fixed = _no_fixed(instance.n)
    res, start, status, contrib, value = _build_kernel(
        order, req, alt, len(instance.resources), objective is Objective.OVERLAPS, fixed
    )
    return RawSchedule(res, start, status, contrib, int(value))


def split_order(instance: ProblemInstance, order: np.ndarray) -> np.ndarray:
    """Stable partition: low requests first, then high, each in ``order``'s order."""
    low = instance.is_low[order - 1]
    return np.concatenate((order[low], order[~low]))


def build_schedule(instance: ProblemInstance, perm, objective=Objective.CONFLICTS) -> Schedule:
    """Decode ``perm`` with the standard greedy builder.

    Requests are taken in permutation order. Each goes on the first listed
    alternative that admits a conflict-free placement, at the earliest
    feasible start. Otherwise it is bumped (conflicts) or placed where its
    overlap with the conflict-free placements is smallest (overlaps).
    """
    objective = Objective.parse(objective)
    order = _as_order(instance, perm)
    return Schedule.from_raw(instance, build_raw(instance, order, objective), objective)


def build_schedule_split(instance: ProblemInstance, perm, objective=Objective.CONFLICTS) -> Schedule:
    """Like :func:`build_schedule` but all low requests are placed before any high one."""
    objective = Objective.parse(objective)
    order = _as_order(instance, perm)
    return Schedule.from_raw(instance, build_raw(instance, split_order(instance, order), objective), objective)


def flexibility_order(instance: ProblemInstance, ids: Iterable[int] | None = None, *, lb_tiebreak: bool = False) -> list[int]:
    """Most constrained first: decreasing duration / mean window length.

    Ties go to fewer alternatives, then (with ``lb_tiebreak``) the earlier
    window start, then the lower id. Ratios are compared exactly.
    """
    ids = list(range(1, instance.n + 1)) if ids is None else list(ids)

    def key(rid):
        r = instance.request(rid)
        ratio = Fraction(r.duration * len(r.alternatives), sum(a.window.length for a in r.alternatives))
        lb = min(a.window.lb for a in r.alternatives) if lb_tiebreak else 0
        return (-ratio, len(r.alternatives), lb, rid)

    return sorted(ids, key=key)


def greedy_activity_selector(instance: ProblemInstance, ids: Sequence[int] | None = None) -> Schedule:
    """Schedule zero-slack low requests with the multi-resource activity selector.

    Requests are taken by increasing fixed end time; each goes on the
    alternative antenna whose idle gap before the request's start is
    smallest (ties to the lower roster index). When every request can use
    every antenna of its station this schedules the maximum number.
    """
    ids = list(instance.low_ids) if ids is None else list(ids)
    for rid in ids:
        if not instance.request(rid).is_low:
            raise ValueError(f"request {rid} is a high-altitude request")
    index = instance.resource_index
    last_end = [-1] * len(instance.resources)

    def due(rid):
        r = instance.request(rid)
        return (r.alternatives[0].window.lb + r.duration - 1, rid)

    res = np.full(instance.n, -1, dtype=np.int64)
    start = np.full(instance.n, -1, dtype=np.int64)
    status = np.full(instance.n, BUMPED, dtype=np.int8)
    for rid in sorted(ids, key=due):
        r = instance.request(rid)
        best = None
        for a in r.alternatives:
            k = index[a.resource]
            s = a.window.lb
            if last_end[k] < s:
                cand = (s - last_end[k] - 1, k, s)
                if best is None or cand < best:
                    best = cand
        if best is not None:
            _, k, s = best
            last_end[k] = s + r.duration - 1
            res[rid - 1], start[rid - 1], status[rid - 1] = k, s, OK
    member = np.zeros(instance.n, dtype=bool)
    member[np.asarray(ids, dtype=np.int64) - 1] = True
    raw = RawSchedule(res, start, status, np.zeros(instance.n, dtype=np.int64), int(np.sum(member & (status == BUMPED))))
    sched = Schedule.from_raw(instance, raw, Objective.CONFLICTS)
    # requests outside ``ids`` are not part of this partial schedule
    return Schedule(sched.placements, frozenset(i for i in sched.bumped if member[i - 1]), Objective.CONFLICTS, raw.value)


def insert_high_flexibility_order(base: Schedule, instance: ProblemInstance, objective=None) -> Schedule:
    """Insert every high request around the fixed placements of ``base``.

    High requests go most-constrained first with the builder's placement rule;
    low requests that ``base`` left out come last and end up bumped or
    overlap-placed.
    """
    objective = Objective.parse(objective) if objective is not None else base.objective
    fixed = np.full((instance.n, 2), -1, dtype=np.int64)
    index = instance.resource_index
    for p in base.all_placements():
        if not instance.request(p.request).is_low:
            raise ValueError("base schedule may only contain low-altitude placements")
        if p.overlapped:
            continue
        fixed[p.request - 1] = (index[p.resource], p.start)
    highs = flexibility_order(instance, instance.high_ids, lb_tiebreak=True)
    rest = [rid for rid in instance.low_ids if fixed[rid - 1, 0] < 0]
    order = np.asarray(highs + rest, dtype=np.int64)
    placed = np.flatnonzero(fixed[:, 0] >= 0) + 1
    full = np.concatenate((placed, order)).astype(np.int64)
    return Schedule.from_raw(instance, build_raw(instance, full, objective, fixed), objective)


def gooley_schedule(instance: ProblemInstance, objective=Objective.CONFLICTS) -> Schedule:
    """Two-phase construction: optimal low-altitude phase, then high insertion."""
    return insert_high_flexibility_order(greedy_activity_selector(instance), instance, objective)


def dump_schedule(schedule: Schedule) -> str:
    lines = []
    for res, ps in schedule.placements.items():
        for p in ps:
            lines.append(f"res {res} req {p.request} [{p.start},{p.end}] {'ovl' if p.overlapped else 'ok'}")
    lines.append("bumped: " + " ".join(str(i) for i in sorted(schedule.bumped)))
    lines.append(f"value: {schedule.value}")
    return "\n".join(lines) + "\n"
