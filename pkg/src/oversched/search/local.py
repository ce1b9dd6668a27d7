"""Randomized local search over shift moves and its attenuated-leap variants."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..model import ProblemInstance
from .common import Evaluator, IntStream, SearchConfig, SearchResult, start_rng
from .operators import apply_shift, random_shift

__all__ = ["rls", "alls", "alls_inverted", "leap_length", "hill_climb"]


def leap_length(evaluations: int, initial: int = 10, stride: int = 800, inverted: bool = False) -> int:
    """Number of chained shifts for the candidate built after ``evaluations`` builds."""
    steps = evaluations // stride
    if inverted:
        return initial + steps
    return max(1, initial - steps)


def hill_climb(
    instance: ProblemInstance,
    config: SearchConfig,
    leap: Callable[[int], int],
    start: np.ndarray | None = None,
    on_step: Callable[[Evaluator, np.ndarray, int], None] | None = None,
) -> SearchResult:
    """Accept-if-not-worse hill climbing with ``leap(evals)`` shifts per candidate.

    ``on_step`` sees the evaluator and the current solution after every
    evaluation (used by the plateau experiments).
    """
    rng = start_rng(config)
    n = instance.n
    ev = Evaluator(instance, config)
    cur = (rng.permutation(n) + 1).astype(np.int64) if start is None else np.asarray(start, dtype=np.int64)
    cur_val = ev(cur)
    if on_step:
        on_step(ev, cur, cur_val)
    draw = IntStream(rng, n)
    while n >= 2 and not ev.done:
        cand = cur
        for _ in range(leap(ev.used)):
            cand = apply_shift(cand, random_shift(draw, n))
        val = ev(cand)
        if val <= cur_val:
            cur, cur_val = cand, val
        if on_step:
            on_step(ev, cur, cur_val)
    return ev.result(final_value=int(cur_val))


def rls(instance: ProblemInstance, config: SearchConfig) -> SearchResult:
    return hill_climb(instance, config, lambda _: 1)


def alls(instance: ProblemInstance, config: SearchConfig, initial_leap: int = 10, decay_stride: int = 800) -> SearchResult:
    if initial_leap < 1 or decay_stride < 1:
        raise ValueError("initial_leap and decay_stride must be >= 1")
    return hill_climb(instance, config, lambda e: leap_length(e, initial_leap, decay_stride))


def alls_inverted(instance: ProblemInstance, config: SearchConfig, initial_leap: int = 10, growth_stride: int = 800) -> SearchResult:
    """Negative control: the leap grows by one every ``growth_stride`` builds."""
    if initial_leap < 1 or growth_stride < 1:
        raise ValueError("initial_leap and growth_stride must be >= 1")
    return hill_climb(instance, config, lambda e: leap_length(e, initial_leap, growth_stride, inverted=True))
