"""Shared evaluation budget, best-so-far tracking and result types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..builder import Objective, RawSchedule, build_raw, split_order
from ..model import Permutation, ProblemInstance, make_rng

__all__ = ["SearchConfig", "SearchResult", "ProgressTrace", "Evaluator", "IntStream"]


@dataclass(frozen=True)
class SearchConfig:
    """Budget and decoding options shared by every search algorithm.

    ``builder`` is ``"standard"`` or ``"split"``. A run stops early once the
    best value reaches ``target`` (0 is a global lower bound, so the default
    never changes the outcome); ``None`` always spends the whole budget.
    """

    objective: Objective = Objective.CONFLICTS
    max_evaluations: int = 8000
    seed: int | np.random.SeedSequence | None = 0
    builder: str = "standard"
    trace_stride: int = 100
    target: int | None = 0

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective.parse(self.objective))
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be >= 1")
        if self.builder not in ("standard", "split"):
            raise ValueError(f"unknown builder {self.builder!r}")


@dataclass(frozen=True)
class ProgressTrace:
    evaluations: tuple[int, ...]
    best: tuple[int, ...]

    def rows(self, run: int = 0):
        for e, b in zip(self.evaluations, self.best):
            yield run, e, b


@dataclass(frozen=True)
class SearchResult:
    best_value: int
    best_permutation: Permutation
    evaluations_used: int
    trace: ProgressTrace
    info: dict = field(default_factory=dict, compare=False)


class Evaluator:
    """Counts schedule builds against the budget and records the best-so-far trace."""

    def __init__(self, instance: ProblemInstance, config: SearchConfig):
        self.instance = instance
        self.config = config
        self.objective = config.objective
        self.split = config.builder == "split"
        self.used = 0
        self.best = math.inf
        self.best_order: np.ndarray | None = None
        self._trace: list[int] = []

    @property
    def remaining(self) -> int:
        return self.config.max_evaluations - self.used

    @property
    def done(self) -> bool:
        target = self.config.target
        return self.used >= self.config.max_evaluations or (target is not None and self.best <= target)

    def raw(self, order: np.ndarray) -> RawSchedule:
        if self.used >= self.config.max_evaluations:
            raise RuntimeError("evaluation budget exhausted")
        decoded = split_order(self.instance, order) if self.split else order
        raw = build_raw(self.instance, decoded, self.objective)
        self.used += 1
        if raw.value < self.best:
            self.best = raw.value
            self.best_order = np.array(order, dtype=np.int64)
        if self.used % self.config.trace_stride == 0:
            self._trace.append(self.best)
        return raw

    def __call__(self, order: np.ndarray) -> int:
        return self.raw(order).value

    def result(self, **info) -> SearchResult:
        if self.best_order is None:
            raise RuntimeError("no evaluation was performed")
        stride, total = self.config.trace_stride, self.config.max_evaluations
        points = list(range(stride, total + 1, stride))
        if total % stride:
            points.append(total)
        best = int(self.best)
        values = (self._trace + [best] * len(points))[: len(points)]
        return SearchResult(
            best_value=best,
            best_permutation=Permutation(tuple(self.best_order.tolist())),
            evaluations_used=self.used,
            trace=ProgressTrace(tuple(points), tuple(int(v) for v in values)),
            info=info,
        )


class IntStream:
    """Buffered uniform integers in ``[0, high)`` drawn from one generator."""

    def __init__(self, rng: np.random.Generator, high: int, block: int = 4096):
        self.rng = rng
        self.high = high
        self.block = block
        self._buf = np.empty(0, dtype=np.int64)
        self._pos = 0

    def __call__(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = self.rng.integers(0, self.high, size=self.block)
            self._pos = 0
        v = self._buf[self._pos]
        self._pos += 1
        return int(v)


def start_rng(config: SearchConfig) -> np.random.Generator:
    return make_rng(config.seed)
