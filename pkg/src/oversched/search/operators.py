"""Permutation operators: shift, multi-shift, position crossover, forward moves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .common import IntStream

__all__ = [
    "ShiftMove",
    "apply_shift",
    "legal_shifts",
    "random_shift",
    "syswerda_crossover",
    "move_forward",
    "random_swaps",
]


@dataclass(frozen=True)
class ShiftMove:
    """Move the element at position ``x`` to position ``y`` (1-based)."""

    x: int
    y: int

    def check(self, n: int) -> None:
        if not (1 <= self.x <= n and 1 <= self.y <= n):
            raise ValueError(f"shift ({self.x}, {self.y}) out of range for n={n}")
        if self.y == self.x:
            raise ValueError("shift with x == y is the identity")
        if self.y == self.x - 1:
            raise ValueError("shift with y == x - 1 duplicates the shift (x-1, x)")


def apply_shift(perm: Sequence, move: ShiftMove) -> np.ndarray:
    p = np.asarray(perm)
    move.check(len(p))
    x, y = move.x - 1, move.y - 1
    item = p[x : x + 1]
    if x < y:
        return np.concatenate((p[:x], p[x + 1 : y + 1], item, p[y + 1 :]))
    return np.concatenate((p[:y], item, p[y:x], p[x + 1 :]))


def legal_shifts(n: int) -> list[ShiftMove]:
    """All ``(n - 1) ** 2`` distinct shift moves."""
    return [ShiftMove(x, y) for x in range(1, n + 1) for y in range(1, n + 1) if y != x and y != x - 1]


def random_shift(draw: IntStream, n: int) -> ShiftMove:
    """Uniform ``x``, then uniform ``y`` redrawn until legal.

    ``draw`` yields integers in ``[0, n)``. For ``n == 2`` position 2 has no
    legal destination, so ``x`` is redrawn as well.
    """
    if n < 2:
        raise ValueError("no shift moves exist for n < 2")
    while True:
        x = draw() + 1
        if n == 2 and x == 2:
            continue
        while True:
            y = draw() + 1
            if y != x and y != x - 1:
                return ShiftMove(x, y)


def syswerda_crossover(p1: Sequence, p2: Sequence, positions: Iterable[int]) -> np.ndarray:
    """Position-based crossover.

    The child copies ``p2`` at the given 1-based ``positions`` and fills the
    remaining slots left to right with the other elements in ``p1`` order.
    """
    a, b = np.asarray(p1), np.asarray(p2)
    if a.shape != b.shape:
        raise ValueError("parents differ in length")
    mask = np.zeros(len(a), dtype=bool)
    idx = np.fromiter(positions, dtype=np.int64)
    if idx.size:
        if idx.min() < 1 or idx.max() > len(a):
            raise ValueError("crossover position out of range")
        mask[idx - 1] = True
    child = a.copy()
    child[mask] = b[mask]
    child[~mask] = a[~np.isin(a, b[mask])]
    return child


def move_forward(perm: list, item, distance: int) -> None:
    """Move ``item`` ``distance`` places toward the front of ``perm`` in place, clamped at the front."""
    pos = perm.index(item)
    perm.pop(pos)
    perm.insert(max(0, pos - distance), item)


def random_swaps(perm: Sequence, count: int, rng: np.random.Generator) -> np.ndarray:
    out = np.array(perm, copy=True)
    n = len(out)
    if n < 2:
        return out
    for _ in range(count):
        i, j = rng.choice(n, size=2, replace=False)
        out[i], out[j] = out[j], out[i]
    return out
