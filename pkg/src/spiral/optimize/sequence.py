"""Removal-sequence evaluation and per-order Pareto search.

A plan visits every debris once: rendezvous (a spiral from the previous
release orbit up to the debris orbit) then de-orbit (read off that debris's
surrogate). Durations are the decision variables; the order is fixed per run.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..deorbit import DAY, Debris, DeorbitSurrogate, SurrogateDomainError, minimum_deorbit_time
from ..elements import EARTH, Constants, relative_inclination
from ..shepherd import SpacecraftConfig
from ..transfer import (
    CONSTRAINT_SCALE,
    FEASIBILITY_TOL,
    BoundaryConditions,
    RendezvousOptions,
    TransferControls,
    TransferSolution,
    solve_rendezvous,
)
from .moea import MoeaOptions, evolve
from .nlp import NlpOptions
from .pareto import ParetoFront

T_RV_BOUNDS = (5.0, 100.0)  # days
T_DO_MAX = 50.0  # days

# memo-key resolution: departure a [km], e, rendezvous time [days], mass [kg]
Q_A, Q_E, Q_T, Q_M = 0.1, 1e-4, 0.1, 1.0


@dataclass
class Scenario:
    debris: dict[str, Debris]
    departure_a: float = 6628.16
    departure_e: float = 0.01
    coplanar_with_first: bool = True
    config: SpacecraftConfig = field(default_factory=SpacecraftConfig)
    constants: Constants = EARTH
    t_rv_bounds: tuple[float, float] = T_RV_BOUNDS
    t_do_max: float = T_DO_MAX
    t_do_min: dict[str, float] = field(default_factory=dict)  # days

    def minimum_deorbit_days(self, debris_id: str) -> float:
        if debris_id not in self.t_do_min:
            d = self.debris[debris_id]
            self.t_do_min[debris_id] = minimum_deorbit_time(d, 350.0, self.config, self.constants) / DAY
        return self.t_do_min[debris_id]

    def bounds(self, order) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = [], []
        for d in order:
            lo += [self.t_rv_bounds[0], self.minimum_deorbit_days(d)]
            hi += [self.t_rv_bounds[1], self.t_do_max]
        return np.array(lo), np.array(hi)


@dataclass
class SequencePlan:
    order: tuple[str, ...]
    durations: np.ndarray  # days, (T_RV,1, T_DO,1, ..., T_RV,n, T_DO,n)

    def __post_init__(self):
        self.order = tuple(str(o) for o in self.order)
        self.durations = np.asarray(self.durations, dtype=float)
        if len(set(self.order)) != len(self.order):
            raise ValueError("order must be a permutation (no repeats)")
        if self.durations.shape != (2 * len(self.order),):
            raise ValueError("durations need two entries per debris")
        if np.any(self.durations <= 0):
            raise ValueError("durations must be positive")

    @property
    def label(self) -> str:
        return "".join(self.order)


@dataclass
class PhaseRecord:
    kind: str  # "rendezvous" | "deorbit"
    debris: str
    duration_days: float
    dv: float
    m_after: float
    a: float
    e: float
    status: str
    n_revolutions: int | None = None


@dataclass
class SequenceResult:
    tof_tot: float  # days
    dv_tot: float  # km/s
    feasible: bool
    violation: float
    phases: list[PhaseRecord]


class LegCache:
    """Rendezvous solutions keyed on quantised boundary data.

    Each leg is solved at the quantised values, so a cache hit returns
    exactly what a fresh solve of that key would. The nearest stored leg to
    the same target seeds the next solve.
    """

    def __init__(self):
        self._store: dict[tuple, TransferSolution] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._store)

    def get(self, key):
        sol = self._store.get(key)
        if sol is not None:
            self.hits += 1
        return sol

    def put(self, key, sol: TransferSolution):
        self.misses += 1
        self._store[key] = sol

    def nearest(self, key) -> TransferControls | None:
        best, best_d = None, math.inf
        qa, qe, target, qt, qm = key
        for (a, e, t, tt, m), sol in self._store.items():
            if t != target or not sol.feasible:
                continue
            d = abs(a - qa) * Q_A / 10.0 + abs(e - qe) * Q_E / 1e-3 + abs(tt - qt) * Q_T + abs(m - qm) * Q_M / 10.0
            if d < best_d:
                best, best_d = sol.controls, d
        return best


def _leg_options(warm: TransferControls | None) -> RendezvousOptions:
    nlp = NlpOptions(
        feas_tol=0.25 * FEASIBILITY_TOL / CONSTRAINT_SCALE,
        max_outer=50, max_inner=40, opt_tol=1e-4, stall_limit=3,
        inner_ftol=1e-6, inner_gtol=1e-5, fd_central=False,
    )
    return RendezvousOptions(n_multistart=0, nlp=nlp, warm_start=warm, first_feasible=True)


def _release_eccentricity(a_f: float, constants: Constants) -> float:
    return max(0.0, 1.0 - constants.rp_threshold / a_f)


def evaluate_sequence(
    plan: SequencePlan,
    scenario: Scenario,
    surrogates: dict[str, DeorbitSurrogate],
    cache: LegCache | None = None,
) -> SequenceResult:
    """Chain the rendezvous and de-orbit phases of ``plan``.

    A phase that cannot be flown (infeasible rendezvous, de-orbit time
    outside the surrogate, propellant below dry mass) ends the evaluation;
    the returned ``violation`` counts the phases left unflown plus the
    normalised shortfall of the failing one, so that the search can still
    compare infeasible plans.
    """
    cfg, const = scenario.config, scenario.constants
    c_exh = cfg.exhaust_velocity(const)
    cache = cache if cache is not None else LegCache()
    for d in plan.order:
        if d not in surrogates:
            raise KeyError(f"no surrogate for debris {d}")
    tof_tot = float(np.sum(plan.durations))
    a, e = scenario.departure_a, scenario.departure_e
    m = cfg.m_launch
    prev_plane = None
    dv_tot = 0.0
    phases: list[PhaseRecord] = []
    n_phase = 2 * len(plan.order)

    def fail(k, shortfall):
        return SequenceResult(tof_tot, dv_tot, False, (n_phase - k - 1) + min(1.0, shortfall) + 1e-9, phases)

    for j, d in enumerate(plan.order):
        deb = scenario.debris[d]
        t_rv, t_do = plan.durations[2 * j], plan.durations[2 * j + 1]
        plane = (deb.i, deb.raan)
        if prev_plane is None and scenario.coplanar_with_first:
            di = 0.0
        else:
            di = relative_inclination(prev_plane or (0.0, 0.0), plane)
        key = (round(a / Q_A), round(e / Q_E), d, round(t_rv / Q_T), round(m / Q_M))
        if key[3] == 0:
            # shorter than one ToF quantum: no spiral fits
            phases.append(PhaseRecord("rendezvous", d, t_rv, 0.0, m, deb.a, 0.0, "infeasible"))
            return fail(2 * j, 1.0)
        sol = cache.get(key)
        if sol is None:
            bc = BoundaryConditions(key[0] * Q_A, key[1] * Q_E, deb.a, 0.0, di)
            sol = solve_rendezvous(bc, key[3] * Q_T * DAY, key[4] * Q_M, cfg, const, _leg_options(cache.nearest(key)))
            cache.put(key, sol)
        if not sol.feasible:
            phases.append(PhaseRecord("rendezvous", d, t_rv, sol.dv, m, deb.a, 0.0, "infeasible", sol.n_revolutions))
            short = float(np.max(np.abs(np.array(sol.constraint_residual)) / FEASIBILITY_TOL)) / 1e3
            return fail(2 * j, short)
        m = m * math.exp(-sol.dv / c_exh)
        dv_tot += sol.dv
        phases.append(PhaseRecord("rendezvous", d, t_rv, sol.dv, m, deb.a, 0.0, "ok", sol.n_revolutions))
        if m < cfg.m_dry:
            return fail(2 * j, 1.0)
        try:
            dv_do, a_f = surrogates[d].query(t_do * DAY, m)
        except SurrogateDomainError:
            try:
                lo, hi = surrogates[d].tof_range(m)
                gap = max(lo - t_do * DAY, t_do * DAY - hi) / DAY / 10.0
            except SurrogateDomainError:
                gap = 1.0  # mass outside the surrogate
            phases.append(PhaseRecord("deorbit", d, t_do, 0.0, m, deb.a, 0.0, "out_of_domain"))
            return fail(2 * j + 1, gap)
        m = (m + 2.0 * deb.mass) * math.exp(-dv_do / c_exh) - 2.0 * deb.mass
        dv_tot += dv_do
        a, e = a_f, _release_eccentricity(a_f, const)
        phases.append(PhaseRecord("deorbit", d, t_do, dv_do, m, a, e, "ok"))
        if m < cfg.m_dry:
            return fail(2 * j + 1, 1.0)
        prev_plane = plane
    return SequenceResult(tof_tot, dv_tot, True, 0.0, phases)


def enumerate_orders(n: int) -> list[tuple[int, ...]]:
    """All ``n!`` visiting orders of ``1..n`` in lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return list(itertools.permutations(range(1, n + 1)))


def pareto_optimize(
    order,
    scenario: Scenario,
    surrogates: dict[str, DeorbitSurrogate],
    budget: int = 2000,
    population: int = 24,
    seed: int = 0,
    cache: LegCache | None = None,
    on_insert=None,
) -> ParetoFront:
    """Non-dominated (ToF_Tot [days], ΔV_Tot [km/s]) plans for a fixed order."""
    order = tuple(str(o) for o in order)
    lo, hi = scenario.bounds(order)
    cache = cache if cache is not None else LegCache()

    def evaluate(x):
        r = evaluate_sequence(SequencePlan(order, x), scenario, surrogates, cache)
        return np.array([r.tof_tot, r.dv_tot]), r.violation

    res = evolve(evaluate, lo, hi, MoeaOptions(budget=budget, population=population, seed=seed), on_insert)
    diag = {
        "evaluations": res.n_evaluations,
        "feasible_evaluations": res.n_feasible,
        "generations": res.generations,
        "cached_legs": len(cache),
        "cache_hits": cache.hits,
    }
    if len(res.archive) == 0:
        diag["message"] = "no feasible plan found"
    return res.archive.front("".join(order), diag)
