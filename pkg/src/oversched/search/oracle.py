"""Exhaustive enumeration of every permutation, for small verification instances."""

from __future__ import annotations

import itertools

import numpy as np

from ..builder import Objective, build_raw, split_order
from ..model import Permutation, ProblemInstance

__all__ = ["exhaustive_oracle", "MAX_ORACLE_N"]

MAX_ORACLE_N = 9


def exhaustive_oracle(instance: ProblemInstance, objective=Objective.CONFLICTS, builder: str = "standard") -> tuple[int, Permutation]:
    """Optimal value over all ``n!`` permutations and the first permutation attaining it."""
    objective = Objective.parse(objective)
    n = instance.n
    if n > MAX_ORACLE_N:
        raise ValueError(f"exhaustive enumeration is limited to n <= {MAX_ORACLE_N} (got {n})")
    if n == 0:
        raise ValueError("empty instance")
    best, best_perm = None, None
    for perm in itertools.permutations(range(1, n + 1)):
        order = np.array(perm, dtype=np.int64)
        if builder == "split":
            order = split_order(instance, order)
        v = build_raw(instance, order, objective).value
        if best is None or v < best:
            best, best_perm = v, perm
            if v == 0:
                break
    return best, Permutation(best_perm)
