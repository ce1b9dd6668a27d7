"""Heuristic-biased stochastic sampling over the flexibility ranking."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..builder import flexibility_order
from ..model import ProblemInstance
from .common import Evaluator, SearchConfig, SearchResult, start_rng

__all__ = ["hbss", "exponential_bias", "selection_probabilities", "hbss_sample"]


def exponential_bias(rank):
    return np.exp(-np.asarray(rank, dtype=float))


def selection_probabilities(ranks, bias: Callable = exponential_bias) -> np.ndarray:
    """Chance of picking each unscheduled request given its heuristic rank."""
    w = np.asarray(bias(np.asarray(ranks, dtype=float)), dtype=float)
    return w / w.sum()


def _log_weights(n: int, bias: Callable | None) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=float)
    if bias is None or bias is exponential_bias:
        # exact even where exp(-rank) underflows
        return -ranks
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(bias(ranks), dtype=float))


def hbss_sample(ranking, rng: np.random.Generator, bias: Callable | None = None, log_weights=None) -> np.ndarray:
    """Draw one priority order from ``ranking`` (best-ranked first).

    Repeatedly picking among the remaining items with probability
    proportional to ``bias(rank)`` is the same distribution as sorting by
    ``log bias(rank) + Gumbel noise``, which is what this does.
    """
    ranking = np.asarray(ranking)
    if log_weights is None:
        log_weights = _log_weights(len(ranking), bias)
    keys = log_weights + rng.gumbel(size=len(ranking))
    return ranking[np.argsort(-keys, kind="stable")]


def hbss(instance: ProblemInstance, config: SearchConfig, bias: Callable | None = None) -> SearchResult:
    """Independent biased constructions until the budget is spent.

    The ranking is computed once from flexibility (most constrained = rank 1)
    and never updated during a construction.
    """
    rng = start_rng(config)
    ev = Evaluator(instance, config)
    ranking = np.asarray(flexibility_order(instance), dtype=np.int64)
    logw = _log_weights(instance.n, bias)
    while not ev.done:
        ev(hbss_sample(ranking, rng, log_weights=logw))
    return ev.result()
