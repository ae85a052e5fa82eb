"""Many-revolution rendezvous spirals with two thrust arcs per revolution.

Each revolution carries one arc centred on perigee and one on apogee. The
in-plane split between them is set by ``(ΔL_t, r_t)``, interpolated linearly
in elapsed time between two nodes; the out-of-plane elevations ``β_p`` and
``β_a`` stay constant. Matching the target ``(a, e, i)`` after a fixed time
of flight while minimising ΔV is a six-variable equality-constrained NLP.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _transfer_kernel as TK
from .elements import EARTH, Constants, EquinoctialState, orbital_period
from .optimize.nlp import NlpOptions, NlpProblem, minimize_constrained
from .shepherd import PropellantExhausted, SpacecraftConfig

TRANSFER_SCHEMA = 1
HISTORY_HEADER = "rev,t_s,a_km,e,i_deg,raan_deg,rp_km,ra_km,dv_kms,m_kg"

# solver-side scaling and physical feasibility tolerances of (Δa, Δe, Δi)
CONSTRAINT_SCALE = np.array([1000.0, 0.1, 0.1])
FEASIBILITY_TOL = np.array([1.0, 1e-3, math.radians(0.01)])

LOWER = np.array([-math.pi, -math.pi, 0.0, 0.0, -0.5 * math.pi, -0.5 * math.pi])
UPPER = -LOWER + np.array([0.0, 0.0, 2.0, 2.0, 0.0, 0.0])


@dataclass(frozen=True)
class TransferControls:
    dlt1: float
    dltf: float
    rt1: float
    rtf: float
    beta_a: float = 0.0
    beta_p: float = 0.0

    def __post_init__(self):
        x = self.as_array()
        if np.any(x < LOWER - 1e-12) or np.any(x > UPPER + 1e-12):
            raise ValueError(f"transfer controls out of bounds: {x}")

    def as_array(self) -> np.ndarray:
        return np.array([self.dlt1, self.dltf, self.rt1, self.rtf, self.beta_a, self.beta_p])

    @classmethod
    def from_array(cls, x) -> "TransferControls":
        x = np.clip(np.asarray(x, dtype=float), LOWER, UPPER)
        return cls(*map(float, x))


@dataclass(frozen=True)
class BoundaryConditions:
    """Departure ``(a0, e0)`` in the reference plane; target ``(a, e)`` tilted by ``di``."""

    a0: float
    e0: float
    a_f: float
    e_f: float = 0.0
    di: float = 0.0  # rad

    def __post_init__(self):
        if self.di < 0:
            raise ValueError("di must be non-negative")
        for e in (self.e0, self.e_f):
            if not 0.0 <= e < 1.0:
                raise ValueError("eccentricities must lie in [0, 1)")
        if self.a0 <= 0 or self.a_f <= 0:
            raise ValueError("semi-major axes must be positive")

    def departure(self) -> EquinoctialState:
        # departure at apogee with the apse line along the reference direction
        return EquinoctialState(self.a0, 0.0, self.e0, 0.0, 0.0, math.pi)


@dataclass
class TransferSolution:
    controls: TransferControls
    dv: float
    tof: float
    n_revolutions: int
    constraint_residual: tuple[float, float, float]
    m_ibs_final: float
    feasible: bool
    status: str = "converged"
    history: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "schema_version": TRANSFER_SCHEMA,
            "kind": "transfer_solution",
            "controls": asdict(self.controls),
            "dv_kms": self.dv,
            "tof_s": self.tof,
            "n_revolutions": self.n_revolutions,
            "residual": {
                "da_km": self.constraint_residual[0],
                "de": self.constraint_residual[1],
                "di_rad": self.constraint_residual[2],
            },
            "m_ibs_final_kg": self.m_ibs_final,
            "feasible": self.feasible,
            "status": self.status,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "TransferSolution":
        r = d["residual"]
        return cls(
            TransferControls(**d["controls"]), d["dv_kms"], d["tof_s"], d["n_revolutions"],
            (r["da_km"], r["de"], r["di_rad"]), d["m_ibs_final_kg"], d["feasible"], d.get("status", ""),
        )


def decode_controls(dl_thrust: float, r_t: float) -> tuple[float, float, float, float]:
    """``(α_a, α_p, ΔL_a, ΔL_p)`` from the arc length and apogee share."""
    if not -math.pi <= dl_thrust <= math.pi:
        raise ValueError("dl_thrust must lie in [-pi, pi]")
    if not 0.0 <= r_t <= 2.0:
        raise ValueError("r_t must lie in [0, 2]")
    return TK.decode(float(dl_thrust), float(r_t))


@dataclass
class TransferRun:
    dv: float
    final: EquinoctialState
    m_final: float
    n_rev: int
    status: str
    history: np.ndarray | None = field(default=None, repr=False)


def simulate_transfer(
    bc: BoundaryConditions,
    controls: TransferControls,
    tof_bar: float,
    m_ibs0: float,
    config: SpacecraftConfig = SpacecraftConfig(),
    constants: Constants = EARTH,
    history: bool = False,
    strict: bool = True,
) -> TransferRun:
    """Fly the parameterised spiral for exactly ``tof_bar`` seconds.

    With ``strict`` set, propellant exhaustion and eccentricity blow-up raise;
    otherwise they come back in ``status``.
    """
    if not tof_bar > 0:
        raise ValueError("tof_bar must be positive")
    if m_ibs0 < config.m_dry:
        raise ValueError("initial mass below dry mass")
    rows = int(tof_bar / orbital_period(bc.a0 * (1 - bc.e0), constants) * 1.2) + 8 if history else 0
    hist = np.zeros((rows, TK.HIST_COLS))
    dv, a, p1, p2, q1, q2, lon, _, m, status, n_rev = TK.transfer(
        bc.a0, bc.e0, controls.dlt1, controls.dltf, controls.rt1, controls.rtf,
        controls.beta_a, controls.beta_p, float(tof_bar), float(m_ibs0),
        config.f_tot, config.exhaust_velocity(constants), config.m_dry, constants.mu, hist,
    )
    if strict and status == TK.EXHAUSTED:
        raise PropellantExhausted(f"mass {m:.2f} kg below dry mass")
    if strict and status == TK.DIVERGED:
        from .propagator import DivergenceError

        raise DivergenceError("eccentricity left [0, 1) during transfer")
    name = {TK.OK: "ok", TK.EXHAUSTED: "propellant_exhausted", TK.DIVERGED: "diverged"}[status]
    final = EquinoctialState(a, p1, p2, q1, q2, lon, tof_bar)
    run = TransferRun(dv, final, m, n_rev, name)
    if history:
        filled = np.nonzero(hist[:, 1] > 0)[0]
        last = int(filled[-1]) + 1 if filled.size else 1
        run.history = hist[:last]
    return run


def boundary_mismatch(final: EquinoctialState, target: BoundaryConditions) -> np.ndarray:
    """``(Δa, Δe, Δi)`` between reached and required orbit; norms only."""
    da = final.a - target.a_f
    de = math.hypot(final.p1, final.p2) - target.e_f
    di = 2.0 * (math.atan(math.hypot(final.q1, final.q2)) - math.atan(math.tan(0.5 * target.di)))
    return np.array([da, de, di])


@dataclass
class RendezvousOptions:
    n_multistart: int = 5
    seed: int = 0
    # the solver aims at a quarter of the acceptance tolerances
    nlp: NlpOptions = field(default_factory=lambda: NlpOptions(feas_tol=0.25 * FEASIBILITY_TOL / CONSTRAINT_SCALE))
    warm_start: TransferControls | None = None
    # accept the first feasible start instead of trying them all
    first_feasible: bool = False


def initial_guess(bc: BoundaryConditions) -> TransferControls:
    da = bc.a_f - bc.a0
    s = 1.0 if da >= 0 else -1.0
    beta0 = math.atan2(bc.di, abs(da) / bc.a0)
    # out-of-plane pushes at perigee and apogee must have opposite signs
    return TransferControls(s * 0.5 * math.pi, s * 0.5 * math.pi, 1.0, 1.0, -beta0, beta0)


def edelbaum_dv(bc: BoundaryConditions, constants: Constants = EARTH) -> float:
    """Continuous-thrust circle-to-circle cost with plane change [km/s]."""
    v0 = math.sqrt(constants.mu / bc.a0)
    vf = math.sqrt(constants.mu / bc.a_f)
    return math.sqrt(max(0.0, v0 * v0 + vf * vf - 2.0 * v0 * vf * math.cos(0.5 * math.pi * bc.di)))


def sized_guess(
    bc: BoundaryConditions,
    tof_bar: float,
    m_ibs0: float,
    config: SpacecraftConfig = SpacecraftConfig(),
    constants: Constants = EARTH,
) -> TransferControls:
    """Start sized from a rough cost estimate rather than fixed half-revolution arcs.

    The arc length makes the thrusting fraction match the estimated ΔV, and
    the elevations split it between in-plane and out-of-plane work.
    """
    v0 = math.sqrt(constants.mu / bc.a0)
    vf = math.sqrt(constants.mu / bc.a_f)
    budget = config.f_tot / m_ibs0 * tof_bar
    frac = min(1.0, edelbaum_dv(bc, constants) / budget)
    s = 1.0 if bc.a_f >= bc.a0 else -1.0
    beta = math.atan2(0.25 * math.pi * (v0 + vf) * bc.di, abs(v0 - vf) + 1e-9)
    return TransferControls(s * math.pi * frac, s * math.pi * frac, 0.75, 0.75, -beta, beta)


def _problem(bc, tof_bar, m_ibs0, config, constants):
    c_exh = config.exhaust_velocity(constants)
    no_hist = np.zeros((0, TK.HIST_COLS))
    coplanar = bc.di == 0.0

    def evaluate(x):
        b_a, b_p = (0.0, 0.0) if coplanar else (x[4], x[5])
        dv, a, p1, p2, q1, q2, lon, _, m, status, _ = TK.transfer(
            bc.a0, bc.e0, x[0], x[1], x[2], x[3], b_a, b_p, float(tof_bar), float(m_ibs0),
            config.f_tot, c_exh, config.m_dry, constants.mu, no_hist,
        )
        c = boundary_mismatch(EquinoctialState(a, p1, p2, q1, q2, lon), bc)
        if status != TK.OK:
            # push the solver back towards gentler controls
            c = c + np.sign(c + 1e-300) * np.array([1e4, 1.0, 1.0])
        return dv, c

    lo, hi = LOWER.copy(), UPPER.copy()
    if coplanar:
        lo[4:] = hi[4:] = 0.0
    return NlpProblem(evaluate, lo, hi, CONSTRAINT_SCALE), evaluate


def _solution(x, evaluate, bc, tof_bar, m_ibs0, config, constants, status):
    controls = TransferControls.from_array(x)
    if bc.di == 0.0:
        controls = TransferControls(controls.dlt1, controls.dltf, controls.rt1, controls.rtf)
    run = simulate_transfer(bc, controls, tof_bar, m_ibs0, config, constants, strict=False)
    res = boundary_mismatch(run.final, bc)
    ok = run.status == "ok" and bool(np.all(np.abs(res) < FEASIBILITY_TOL))
    return TransferSolution(
        controls, run.dv, tof_bar, run.n_rev, tuple(map(float, res)), run.m_final, ok,
        status if ok else "infeasible",
    )


def solve_rendezvous(
    bc: BoundaryConditions,
    tof_bar: float,
    m_ibs0: float,
    config: SpacecraftConfig = SpacecraftConfig(),
    constants: Constants = EARTH,
    opts: RendezvousOptions | None = None,
) -> TransferSolution:
    """Minimum-ΔV controls meeting ``(a, e, i)`` of the target after ``tof_bar``.

    Starts from ``opts.warm_start`` if given, two heuristic guesses, then
    ``opts.n_multistart`` seeded random points; keeps the cheapest feasible
    result, ties broken by start index. An unreachable target in the allotted
    time returns ``feasible=False``.
    """
    opts = opts or RendezvousOptions()
    if not tof_bar > 0:
        raise ValueError("tof_bar must be positive")
    if m_ibs0 < config.m_dry:
        raise ValueError("initial mass below dry mass")
    if bc.a0 == bc.a_f and bc.e0 == bc.e_f and bc.di == 0.0:
        zero = TransferControls(0.0, 0.0, 1.0, 1.0)
        return _solution(zero.as_array(), None, bc, tof_bar, m_ibs0, config, constants, "converged")
    problem, evaluate = _problem(bc, tof_bar, m_ibs0, config, constants)
    starts = []
    if opts.warm_start is not None:
        starts.append(opts.warm_start.as_array())
    starts.append(sized_guess(bc, tof_bar, m_ibs0, config, constants).as_array())
    starts.append(initial_guess(bc).as_array())
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.n_multistart):
        starts.append(problem.lower + rng.random(6) * (problem.upper - problem.lower))
    best = None
    for k, x0 in enumerate(starts):
        x0 = np.clip(x0, problem.lower, problem.upper)
        r = minimize_constrained(problem, x0, opts.nlp)
        sol = _solution(r.x, evaluate, bc, tof_bar, m_ibs0, config, constants, r.status)
        key = (not sol.feasible, sol.dv if sol.feasible else _violation(sol), k)
        if best is None or key < best[0]:
            best = (key, sol)
        if opts.first_feasible and sol.feasible:
            break
    return best[1]


def _violation(sol: TransferSolution) -> float:
    return float(np.max(np.abs(np.array(sol.constraint_residual)) / FEASIBILITY_TOL))


def write_history_csv(path, history: np.ndarray, comments: list[str] = ()) -> None:
    from ._io import write_csv

    write_csv(path, HISTORY_HEADER, history, comments, fmt=["%d"] + ["%.10g"] * 9)
