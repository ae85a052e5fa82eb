"""Pareto utilities for two-objective minimisation and the Conv ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def dominates(a, b) -> bool:
    """True when ``a`` is no worse than ``b`` everywhere and better somewhere."""
    a = np.asarray(a)
    b = np.asarray(b)
    return bool(np.all(a <= b) and np.any(a < b))


def non_dominated_mask(points) -> np.ndarray:
    """Boolean mask of the non-dominated rows; duplicates are all kept."""
    f = np.asarray(points, dtype=float)
    if f.size == 0:
        return np.zeros(0, dtype=bool)
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    return ~dominated


def non_dominated_sort(points) -> list[np.ndarray]:
    """Fronts of increasing rank as index arrays."""
    f = np.asarray(points, dtype=float)
    n = len(f)
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    count = dom.sum(axis=0)
    fronts = []
    remaining = np.ones(n, dtype=bool)
    while remaining.any():
        cur = np.nonzero(remaining & (count == 0))[0]
        fronts.append(cur)
        remaining[cur] = False
        count = count - dom[cur].sum(axis=0)
    return fronts


def crowding_distance(points) -> np.ndarray:
    f = np.asarray(points, dtype=float)
    n, m = f.shape
    d = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for k in range(m):
        order = np.argsort(f[:, k], kind="stable")
        span = f[order[-1], k] - f[order[0], k]
        d[order[0]] = d[order[-1]] = np.inf
        if span > 0:
            d[order[1:-1]] += (f[order[2:], k] - f[order[:-2], k]) / span
    return d


def hypervolume_2d(points, reference) -> float:
    """Area dominated by ``points`` and bounded by ``reference``."""
    f = np.asarray(points, dtype=float).reshape(-1, 2)
    ref = np.asarray(reference, dtype=float)
    f = f[np.all(f < ref, axis=1)]
    if f.size == 0:
        return 0.0
    f = f[non_dominated_mask(f)]
    f = f[np.argsort(f[:, 0])]
    area = 0.0
    prev_y = ref[1]
    for x, y in f:
        if y < prev_y:
            area += (ref[0] - x) * (prev_y - y)
            prev_y = y
    return float(area)


@dataclass
class ParetoFront:
    """Mutually non-dominated ``(tof_tot [days], dv_tot [km/s])`` points."""

    order: str
    objectives: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    decisions: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.objectives = np.asarray(self.objectives, dtype=float).reshape(-1, 2)
        self.decisions = np.asarray(self.decisions, dtype=float)
        if self.decisions.size == 0:
            self.decisions = np.zeros((len(self.objectives), 0))

    def __len__(self):
        return len(self.objectives)

    def extreme(self, k: int) -> np.ndarray:
        """Decision vector minimising objective ``k``."""
        return self.decisions[int(np.argmin(self.objectives[:, k]))]

    def is_consistent(self) -> bool:
        f = self.objectives
        return bool(np.all(non_dominated_mask(f))) if len(f) else True


class ParetoArchive:
    """Bounded set of non-dominated feasible points.

    Inserting a point that is dominated by (or equal to) an archived one
    leaves the archive unchanged, so its hypervolume never decreases.
    """

    def __init__(self):
        self.f = np.zeros((0, 2))
        self.x: list[np.ndarray] = []

    def insert(self, f, x) -> bool:
        f = np.asarray(f, dtype=float)
        if len(self.f):
            if np.any(np.all(self.f <= f, axis=1)):
                return False
            keep = ~(np.all(f <= self.f, axis=1) & np.any(f < self.f, axis=1))
            self.f = self.f[keep]
            self.x = [xi for xi, k in zip(self.x, keep) if k]
        self.f = np.vstack([self.f, f])
        self.x.append(np.asarray(x, dtype=float).copy())
        return True

    def __len__(self):
        return len(self.f)

    def front(self, order: str = "", diagnostics: dict | None = None) -> ParetoFront:
        idx = np.argsort(self.f[:, 0], kind="stable") if len(self.f) else np.zeros(0, dtype=int)
        x = np.array([self.x[i] for i in idx]) if len(idx) else np.zeros((0, 0))
        return ParetoFront(order, self.f[idx], x, dict(diagnostics or {}))


def global_front(fronts: dict[str, ParetoFront]) -> np.ndarray:
    pts = [fr.objectives for fr in fronts.values() if len(fr)]
    if not pts:
        raise ValueError("at least one non-empty front is required")
    allp = np.vstack(pts)
    return np.unique(allp[non_dominated_mask(allp)], axis=0)


@dataclass
class Ranking:
    rank: int
    order: str
    conv: float


def conv_metric(front: np.ndarray, pf_g: np.ndarray, delta: np.ndarray) -> float:
    """100 x mean over front points of the nearest normalised distance to ``pf_g``."""
    f = np.asarray(front, dtype=float).reshape(-1, 2)
    d = (f[:, None, :] - pf_g[None, :, :]) / delta
    return 100.0 * float(np.mean(np.min(np.linalg.norm(d, axis=2), axis=1)))


def conv_rank(fronts: dict[str, ParetoFront]) -> list[Ranking]:
    """Rank orders by their mean distance to the union front (lower is better).

    Distances are taken after dividing each objective by its range over the
    union front; a zero range is replaced by one.
    """
    pf_g = global_front(fronts)
    delta = pf_g.max(axis=0) - pf_g.min(axis=0)
    delta = np.where(delta > 0, delta, 1.0)
    scored = []
    for order, fr in fronts.items():
        c = conv_metric(fr.objectives, pf_g, delta) if len(fr) else math.inf
        scored.append((c, order))
    scored.sort()
    return [Ranking(k + 1, o, c) for k, (c, o) in enumerate(scored)]
