"""Seeded bi-objective evolutionary search (non-dominated sorting + crowding).

Offspring come from simulated-binary crossover and polynomial mutation.
Constraint handling is feasibility first: any feasible point beats any
infeasible one, and infeasible points compare by violation magnitude.
Every feasible evaluation is offered to a Pareto archive, which is what
the search returns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .pareto import ParetoArchive, crowding_distance, non_dominated_sort

# evaluate(x) -> (objectives[2], violation >= 0)
Evaluator = Callable[[np.ndarray], tuple[np.ndarray, float]]


@dataclass
class MoeaOptions:
    budget: int = 2000
    population: int = 24
    seed: int = 0
    eta_c: float = 15.0
    eta_m: float = 20.0
    p_crossover: float = 0.9
    p_mutation: float | None = None  # default 1/n


@dataclass
class MoeaResult:
    archive: ParetoArchive
    n_evaluations: int
    n_feasible: int
    generations: int
    history: list = field(default_factory=list, repr=False)


def _rank(f: np.ndarray, viol: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-individual (rank, crowding) under feasibility-first dominance."""
    n = len(f)
    rank = np.empty(n, dtype=int)
    crowd = np.zeros(n)
    feas = np.nonzero(viol <= 0)[0]
    inf = np.nonzero(viol > 0)[0]
    r = 0
    if feas.size:
        for front in non_dominated_sort(f[feas]):
            idx = feas[front]
            rank[idx] = r
            crowd[idx] = crowding_distance(f[idx])
            r += 1
    # infeasible points: one rank per distinct violation level
    for k, i in enumerate(inf[np.argsort(viol[inf], kind="stable")]):
        rank[i] = r + k
    return rank, crowd


def _better(i, j, rank, crowd) -> bool:
    if rank[i] != rank[j]:
        return rank[i] < rank[j]
    return crowd[i] > crowd[j]


def _sbx(p1, p2, lo, hi, eta, rng):
    c1, c2 = p1.copy(), p2.copy()
    for k in range(len(p1)):
        if rng.random() > 0.5 or abs(p1[k] - p2[k]) < 1e-14 or hi[k] <= lo[k]:
            continue
        y1, y2 = min(p1[k], p2[k]), max(p1[k], p2[k])
        u = rng.random()
        # bounded spread factors towards the lower and the upper side
        spread = []
        for room in (y1 - lo[k], hi[k] - y2):
            alpha = 2.0 - (1.0 + 2.0 * room / (y2 - y1)) ** -(eta + 1.0)
            if u <= 1.0 / alpha:
                spread.append((u * alpha) ** (1.0 / (eta + 1.0)))
            else:
                spread.append((1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0)))
        v1 = 0.5 * ((y1 + y2) - spread[0] * (y2 - y1))
        v2 = 0.5 * ((y1 + y2) + spread[1] * (y2 - y1))
        v1, v2 = np.clip([v1, v2], lo[k], hi[k])
        if rng.random() < 0.5:
            v1, v2 = v2, v1
        c1[k], c2[k] = v1, v2
    return c1, c2


def _mutate(x, lo, hi, eta, pm, rng):
    y = x.copy()
    for k in range(len(x)):
        span = hi[k] - lo[k]
        if span <= 0 or rng.random() >= pm:
            continue
        d1 = (y[k] - lo[k]) / span
        d2 = (hi[k] - y[k]) / span
        u = rng.random()
        p = 1.0 / (eta + 1.0)
        if u < 0.5:
            val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)
            dq = val**p - 1.0
        else:
            val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)
            dq = 1.0 - val**p
        y[k] = np.clip(y[k] + dq * span, lo[k], hi[k])
    return y


def evolve(evaluate: Evaluator, lower, upper, opts: MoeaOptions | None = None, on_insert=None) -> MoeaResult:
    """Run the search for ``opts.budget`` evaluations and return the archive.

    ``on_insert(archive)`` is called after every archive update (tests use it
    to check the archive invariant).
    """
    opts = opts or MoeaOptions()
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if opts.population < 2 or opts.population % 2:
        raise ValueError("population must be an even number >= 2")
    if opts.budget < opts.population:
        raise ValueError("budget must cover at least the initial population")
    n = lo.size
    pm = opts.p_mutation if opts.p_mutation is not None else 1.0 / n
    rng = np.random.default_rng(opts.seed)
    archive = ParetoArchive()
    used = 0
    n_feas = 0
    history = []

    def run(xs):
        nonlocal used, n_feas
        fs, vs = [], []
        for x in xs:
            f, v = evaluate(x)
            used += 1
            f = np.asarray(f, dtype=float)
            fs.append(f)
            vs.append(float(v))
            if v <= 0:
                n_feas += 1
                if archive.insert(f, x) and on_insert is not None:
                    on_insert(archive)
        return np.array(fs).reshape(-1, 2), np.array(vs)

    X = lo + rng.random((opts.population, n)) * (hi - lo)
    F, V = run(X)
    gen = 0
    while used < opts.budget:
        rank, crowd = _rank(F, V)
        n_off = min(opts.population, opts.budget - used)
        kids = []
        while len(kids) < n_off:
            parents = []
            for _ in range(2):
                i, j = rng.integers(0, len(X), 2)
                parents.append(X[i] if _better(i, j, rank, crowd) else X[j])
            if rng.random() < opts.p_crossover:
                c1, c2 = _sbx(parents[0], parents[1], lo, hi, opts.eta_c, rng)
            else:
                c1, c2 = parents[0].copy(), parents[1].copy()
            kids.append(_mutate(c1, lo, hi, opts.eta_m, pm, rng))
            kids.append(_mutate(c2, lo, hi, opts.eta_m, pm, rng))
        kids = np.array(kids[:n_off])
        Fk, Vk = run(kids)
        X = np.vstack([X, kids])
        F = np.vstack([F, Fk])
        V = np.concatenate([V, Vk])
        rank, crowd = _rank(F, V)
        # survivors: by rank, then by crowding (descending)
        order = np.lexsort((-crowd, rank))[: opts.population]
        X, F, V = X[order], F[order], V[order]
        gen += 1
        history.append({"generation": gen, "evaluations": used, "archive": len(archive)})
    return MoeaResult(archive, used, n_feas, gen, history)
