"""Problem instances, permutations, the instance text format and a generator.

Time is measured in integer minutes from the start of the scheduling day and
every window is a closed interval ``[lb, ub]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Altitude",
    "Resource",
    "TimeWindow",
    "Alternative",
    "TaskRequest",
    "ProblemInstance",
    "Permutation",
    "InstanceFormatError",
    "GeneratorParams",
    "parse_instance",
    "serialize_instance",
    "load_instance",
    "save_instance",
    "generate_instance",
    "random_permutation",
    "make_rng",
    "RNG_ALGORITHM",
]

#: Bit generator behind every seeded ``numpy.random.Generator`` in the package.
RNG_ALGORITHM = "PCG64"

DEFAULT_HORIZON = 1440


class Altitude(enum.Enum):
    LOW = "low"
    HIGH = "high"


class InstanceFormatError(ValueError):
    """Raised for malformed instance text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Resource:
    id: str
    station: str


@dataclass(frozen=True)
class TimeWindow:
    lb: int
    ub: int

    def __post_init__(self):
        if self.lb > self.ub:
            raise ValueError(f"window lb {self.lb} > ub {self.ub}")

    @property
    def length(self) -> int:
        return self.ub - self.lb + 1


@dataclass(frozen=True)
class Alternative:
    resource: str
    window: TimeWindow


@dataclass(frozen=True)
class TaskRequest:
    id: int
    duration: int
    altitude: Altitude
    alternatives: tuple[Alternative, ...]

    def __post_init__(self):
        if self.duration < 1:
            raise ValueError(f"request {self.id}: duration must be positive")
        if not self.alternatives:
            raise ValueError(f"request {self.id}: no alternatives")
        for alt in self.alternatives:
            if alt.window.length < self.duration:
                raise ValueError(
                    f"request {self.id}: window cannot fit duration "
                    f"([{alt.window.lb},{alt.window.ub}] < {self.duration})"
                )

    @property
    def is_low(self) -> bool:
        return self.altitude is Altitude.LOW

    @property
    def mean_window_length(self) -> float:
        return sum(a.window.length for a in self.alternatives) / len(self.alternatives)


@dataclass(frozen=True)
class ProblemInstance:
    """``n`` task requests with ids ``1..n`` plus the antenna roster."""

    requests: tuple[TaskRequest, ...]
    resources: tuple[Resource, ...]
    name: str = "instance"
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        ids = [r.id for r in self.requests]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("request ids must be exactly 1..n in order")
        rids = [r.id for r in self.resources]
        if len(set(rids)) != len(rids):
            raise ValueError("duplicate resource id")
        known = set(rids)
        for req in self.requests:
            for alt in req.alternatives:
                if alt.resource not in known:
                    raise ValueError(f"request {req.id}: unknown resource {alt.resource!r}")

    @property
    def n(self) -> int:
        return len(self.requests)

    def request(self, rid: int) -> TaskRequest:
        return self.requests[rid - 1]

    @cached_property
    def resource_index(self) -> dict[str, int]:
        return {r.id: k for k, r in enumerate(self.resources)}

    @cached_property
    def low_ids(self) -> tuple[int, ...]:
        return tuple(r.id for r in self.requests if r.is_low)

    @cached_property
    def high_ids(self) -> tuple[int, ...]:
        return tuple(r.id for r in self.requests if not r.is_low)

    @cached_property
    def is_low(self) -> np.ndarray:
        """Boolean mask indexed by ``id - 1``."""
        return np.array([r.is_low for r in self.requests], dtype=bool)

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat integer tables consumed by the compiled schedule builder.

        ``req[i] = (duration, first_alt, n_alts)`` for request ``i + 1`` and
        ``alt[k] = (resource_index, lb, ub)``, alternatives kept in file order.
        """
        req = np.empty((self.n, 3), dtype=np.int64)
        rows = []
        index = self.resource_index
        for i, r in enumerate(self.requests):
            req[i] = (r.duration, len(rows), len(r.alternatives))
            rows.extend((index[a.resource], a.window.lb, a.window.ub) for a in r.alternatives)
        alt = np.array(rows, dtype=np.int64).reshape(-1, 3)
        req.setflags(write=False)
        alt.setflags(write=False)
        return req, alt

    def restrict(self, ids: Iterable[int], name: str | None = None) -> "ProblemInstance":
        """Sub-instance over ``ids``, renumbered ``1..m`` in the given order."""
        reqs = []
        for new_id, old in enumerate(ids, start=1):
            r = self.request(old)
            reqs.append(TaskRequest(new_id, r.duration, r.altitude, r.alternatives))
        return ProblemInstance(tuple(reqs), self.resources, name or self.name, self.horizon)


@dataclass(frozen=True)
class Permutation:
    """An ordering of request ids ``1..n``; validated on construction."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))
        check_bijection(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.order, dtype=np.int64)


def check_bijection(order: Sequence[int], n: int | None = None) -> None:
    """Raise ``ValueError`` unless ``order`` is a bijection on ``1..n``."""
    n = len(order) if n is None else n
    if len(order) != n:
        raise ValueError(f"permutation has length {len(order)}, expected {n}")
    if n and sorted(int(v) for v in order) != list(range(1, n + 1)):
        raise ValueError("permutation is not a bijection on 1..n")


def make_rng(seed) -> np.random.Generator:
    """Seeded generator; accepts ints, ``SeedSequence`` or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def random_permutation(n: int, seed) -> Permutation:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    return Permutation(tuple(rng.permutation(n) + 1))


# ---------------------------------------------------------------------------
# text format


def serialize_instance(instance: ProblemInstance) -> str:
    lines = [f"instance {instance.name} horizon {instance.horizon}"]
    lines += [f"resource {r.id} station {r.station}" for r in instance.resources]
    for r in instance.requests:
        lines.append(f"request {r.id} dur {r.duration} alt {r.altitude.value}")
        lines += [f"win {a.resource} {a.window.lb} {a.window.ub}" for a in r.alternatives]
    return "\n".join(lines) + "\n"


def _int(tok: str, what: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceFormatError(f"{what} must be an integer, got {tok!r}", line) from None


def parse_instance(text: str) -> ProblemInstance:
    name, horizon = "instance", DEFAULT_HORIZON
    resources: list[Resource] = []
    seen_res: set[str] = set()
    # (id, duration, altitude, alternatives, line)
    pending: list[tuple[int, int, Altitude, list[Alternative], int]] = []
    seen_req: set[int] = set()
    header_seen = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "instance":
            if len(tok) != 4 or tok[2] != "horizon":
                raise InstanceFormatError("expected 'instance <name> horizon <minutes>'", lineno)
            if header_seen:
                raise InstanceFormatError("duplicate instance header", lineno)
            header_seen = True
            name, horizon = tok[1], _int(tok[3], "horizon", lineno)
        elif kind == "resource":
            if len(tok) != 4 or tok[2] != "station":
                raise InstanceFormatError("expected 'resource <rid> station <sid>'", lineno)
            if tok[1] in seen_res:
                raise InstanceFormatError(f"duplicate resource id {tok[1]!r}", lineno)
            seen_res.add(tok[1])
            resources.append(Resource(tok[1], tok[3]))
        elif kind == "request":
            if len(tok) != 6 or tok[2] != "dur" or tok[4] != "alt":
                raise InstanceFormatError("expected 'request <id> dur <minutes> alt {low|high}'", lineno)
            rid = _int(tok[1], "request id", lineno)
            if rid in seen_req:
                raise InstanceFormatError(f"duplicate request id {rid}", lineno)
            seen_req.add(rid)
            dur = _int(tok[3], "duration", lineno)
            if dur < 1:
                raise InstanceFormatError("duration must be positive", lineno)
            try:
                alt = Altitude(tok[5])
            except ValueError:
                raise InstanceFormatError(f"altitude must be low or high, got {tok[5]!r}", lineno) from None
            pending.append((rid, dur, alt, [], lineno))
        elif kind == "win":
            if len(tok) != 4:
                raise InstanceFormatError("expected 'win <rid> <lb> <ub>'", lineno)
            if not pending:
                raise InstanceFormatError("'win' before any 'request'", lineno)
            if tok[1] not in seen_res:
                raise InstanceFormatError(f"unknown resource {tok[1]!r}", lineno)
            lb, ub = _int(tok[2], "lb", lineno), _int(tok[3], "ub", lineno)
            if lb > ub:
                raise InstanceFormatError(f"window lb {lb} > ub {ub}", lineno)
            dur = pending[-1][1]
            if ub - lb + 1 < dur:
                raise InstanceFormatError(f"window cannot fit duration ([{lb},{ub}] < {dur})", lineno)
            pending[-1][3].append(Alternative(tok[1], TimeWindow(lb, ub)))
        else:
            raise InstanceFormatError(f"unknown record {kind!r}", lineno)

    for rid, _, _, alts, lineno in pending:
        if not alts:
            raise InstanceFormatError(f"request {rid} has no 'win' lines", lineno)
    pending.sort(key=lambda p: p[0])
    ids = [p[0] for p in pending]
    if ids != list(range(1, len(ids) + 1)):
        missing = sorted(set(range(1, len(ids) + 1)) - set(ids))
        line = pending[-1][4] if pending else None
        raise InstanceFormatError(f"request ids must be 1..n without gaps (missing {missing[:5]})", line)

    requests = tuple(TaskRequest(rid, dur, alt, tuple(alts)) for rid, dur, alt, alts, _ in pending)
    return ProblemInstance(requests, tuple(resources), name, horizon)


def load_instance(path) -> ProblemInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(instance: ProblemInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(instance))


# ---------------------------------------------------------------------------
# generator


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for :func:`generate_instance`.

    ``stations`` lists the antenna count of each tracking station. Ranges are
    inclusive ``(low, high)`` pairs.
    """

    n_low: int
    n_high: int
    stations: tuple[int, ...] = (2, 2, 2, 2, 2, 2, 2, 1, 1)
    horizon: int = DEFAULT_HORIZON
    low_duration: tuple[int, int] = (10, 20)
    high_duration: tuple[int, int] = (20, 60)
    high_slack: tuple[int, int] = (30, 300)
    high_alternatives: tuple[int, int] = (4, 14)
    name: str = "generated"

    @classmethod
    def a_shaped(cls, **kw) -> "GeneratorParams":
        """Size of the 1992 days: 153 low / 169 high on 9 stations, 16 antennas."""
        kw.setdefault("name", "A-shaped")
        return cls(n_low=kw.pop("n_low", 153), n_high=kw.pop("n_high", 169), **kw)

    @classmethod
    def r_shaped(cls, **kw) -> "GeneratorParams":
        """Size of the busiest recent day: 225 low / 258 high on the same roster."""
        kw.setdefault("name", "R-shaped")
        return cls(n_low=kw.pop("n_low", 225), n_high=kw.pop("n_high", 258), **kw)

    @classmethod
    def desk_r_shaped(cls, **kw) -> "GeneratorParams":
        """Small, heavily oversubscribed instance cheap enough for 30x8000 trials.

        Half of the busiest recent day in both requests and horizon, so the
        load per antenna-minute matches it.
        """
        kw.setdefault("name", "desk-R")
        kw.setdefault("horizon", 720)
        return cls(n_low=kw.pop("n_low", 112), n_high=kw.pop("n_high", 129), **kw)

    def validate(self) -> None:
        if self.n_low < 0 or self.n_high < 0 or self.n_low + self.n_high == 0:
            raise ValueError("need at least one request")
        if not self.stations or any(k < 1 for k in self.stations):
            raise ValueError("every station needs at least one antenna")
        for lo, hi in (self.low_duration, self.high_duration, self.high_slack, self.high_alternatives):
            if lo > hi or lo < 0:
                raise ValueError(f"bad range ({lo}, {hi})")
        if self.low_duration[0] < 1 or self.high_duration[0] < 1:
            raise ValueError("durations must be positive")
        if self.high_alternatives[0] < 1:
            raise ValueError("high requests need at least one alternative")
        longest = self.high_duration[1] + self.high_slack[1]
        if max(self.low_duration[1], longest) > self.horizon:
            raise ValueError("horizon shorter than the longest window")


def _roster(params: GeneratorParams) -> tuple[Resource, ...]:
    out = []
    for s, count in enumerate(params.stations, start=1):
        for a in range(1, count + 1):
            out.append(Resource(f"S{s}A{a}", f"S{s}"))
    return tuple(out)


def generate_instance(params: GeneratorParams, seed) -> ProblemInstance:
    """Draw a synthetic instance with the low/high request mix of the real days.

    Low requests get a zero-slack window at one station, listing all of its
    antennas in random order. High requests get a window of
    ``duration + slack`` per visible station, listing the antennas of a random
    run of stations until the drawn alternative count is reached.
    """
    params.validate()
    rng = make_rng(seed)
    resources = _roster(params)
    by_station: list[list[str]] = []
    for s, count in enumerate(params.stations, start=1):
        by_station.append([f"S{s}A{a}" for a in range(1, count + 1)])
    n_ant = len(resources)

    kinds = [Altitude.LOW] * params.n_low + [Altitude.HIGH] * params.n_high
    kinds = [kinds[i] for i in rng.permutation(len(kinds))]

    requests = []
    for rid, kind in enumerate(kinds, start=1):
        if kind is Altitude.LOW:
            dur = int(rng.integers(params.low_duration[0], params.low_duration[1] + 1))
            station = int(rng.integers(len(by_station)))
            lb = int(rng.integers(0, params.horizon - dur + 1))
            win = TimeWindow(lb, lb + dur - 1)
            ants = [by_station[station][i] for i in rng.permutation(len(by_station[station]))]
            alts = tuple(Alternative(a, win) for a in ants)
        else:
            dur = int(rng.integers(params.high_duration[0], params.high_duration[1] + 1))
            want = int(rng.integers(params.high_alternatives[0], params.high_alternatives[1] + 1))
            want = min(want, n_ant)
            alts_list: list[Alternative] = []
            for station in rng.permutation(len(by_station)):
                length = dur + int(rng.integers(params.high_slack[0], params.high_slack[1] + 1))
                lb = int(rng.integers(0, params.horizon - length + 1))
                win = TimeWindow(lb, lb + length - 1)
                for a in by_station[station]:
                    if len(alts_list) == want:
                        break
                    alts_list.append(Alternative(a, win))
                if len(alts_list) == want:
                    break
            alts = tuple(alts_list)
        requests.append(TaskRequest(rid, dur, kind, alts))
    return ProblemInstance(tuple(requests), resources, params.name, params.horizon)
