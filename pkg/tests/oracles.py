"""Independent reference implementations used to check the library."""

from __future__ import annotations

import heapq
import math
import random

import numpy as np

from collabsim.world.geometry import GridMap

ROOT2 = math.sqrt(2.0)


def ucs_cost(occupied: np.ndarray, start: tuple[int, int], goal: tuple[int, int]) -> float | None:
    """Uniform-cost search over (straight, diagonal) step counts; None when unreachable.

    Costs are compared on the exact value ``straight + diagonal * sqrt(2)`` computed
    from integer counts, so there is no floating-point accumulation.
    """
    h, w = occupied.shape

    def free(r: int, c: int) -> bool:
        return 0 <= r < h and 0 <= c < w and not occupied[r, c]

    if not free(*start) or not free(*goal):
        return None
    best = {start: (0, 0)}
    heap = [(0.0, 0, 0, start)]
    done = set()
    while heap:
        _, s, d, cell = heapq.heappop(heap)
        if cell in done:
            continue
        done.add(cell)
        if cell == goal:
            return s + d * ROOT2
        r, c = cell
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if not (dr or dc) or not free(r + dr, c + dc):
                    continue
                diag = bool(dr and dc)
                if diag and not (free(r + dr, c) and free(r, c + dc)):
                    continue
                ns, nd = (s, d + 1) if diag else (s + 1, d)
                nxt = (r + dr, c + dc)
                old = best.get(nxt)
                if old is None or ns + nd * ROOT2 < old[0] + old[1] * ROOT2:
                    best[nxt] = (ns, nd)
                    heapq.heappush(heap, (ns + nd * ROOT2, ns, nd, nxt))
    return None


def random_grid(seed: int, size: int = 20, density: float = 0.25) -> tuple[GridMap, tuple[int, int], tuple[int, int]]:
    """Seeded random grid with free start and goal cells."""
    rng = random.Random(seed)
    occ = np.zeros((size, size), dtype=bool)
    for r in range(size):
        for c in range(size):
            occ[r, c] = rng.random() < density
    free = [(r, c) for r in range(size) for c in range(size) if not occ[r, c]]
    start, goal = rng.sample(free, 2)
    cells = [(r, c) for r in range(size) for c in range(size) if occ[r, c]]
    return GridMap.empty(size, size).with_occupied(cells), start, goal
