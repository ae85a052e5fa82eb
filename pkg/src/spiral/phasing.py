"""Worst-case phasing delays neglected by the spiral transfers.

Two waits are bounded. Apsidal alignment: the perigee-lowering phase must
start with the apse line perpendicular to the line of nodes towards the
next target, costing at most half a period of the departure circular orbit.
In-plane phasing: either a coast at the point of fastest phase drift
(quasi-circular transfers), or whole coasting revolutions that leave the
apse line in place (eccentric spirals).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .elements import EARTH, TWO_PI, Constants, mean_motion

QUASI_CIRCULAR = "quasi-circular"
ECCENTRIC = "eccentric-coasting"


@dataclass
class PhasingReport:
    t_wait_di: float  # s
    t_wait_dphi: float  # s
    total: float  # s
    fraction_of_nominal: float
    strategy: str

    def __post_init__(self):
        if self.t_wait_di < 0 or self.t_wait_dphi < 0:
            raise ValueError("waits must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["total_days"] = self.total / 86400.0
        return d


def apsidal_alignment_delay(n0: float) -> float:
    """Longest wait for apse/node alignment: half a period, ``pi / n0``."""
    if not n0 > 0:
        raise ValueError("n0 must be positive")
    return math.pi / n0


def quasi_circular_phasing_delay(n: float, n_f: float, dphi_tot: float = TWO_PI) -> float:
    """Coast time to absorb ``dphi_tot`` of phase at drift rate ``|n - n_f|``.

    Returns ``inf`` when the two mean motions coincide.
    """
    if dphi_tot < 0:
        raise ValueError("dphi_tot must be non-negative")
    if dphi_tot == 0:
        return 0.0
    rate = abs(n - n_f)
    return math.inf if rate == 0 else dphi_tot / rate


def phase_per_revolution(n, n_f):
    """Phase gained on the target during one coasting revolution."""
    n = np.asarray(n, dtype=float)
    return TWO_PI * np.abs(n - n_f) / n


@dataclass
class CoastingPlan:
    k: int  # revolutions at n_k
    n_k: float
    n_res: float
    residual_target: float  # rad, phase left for the last revolution
    residual_achieved: float  # rad, what the nearest profile sample gives
    total: float  # s


def eccentric_phasing_delay(n_profile, n_f: float) -> CoastingPlan:
    """Worst-case (2 pi) phasing by whole coasting revolutions.

    ``k`` revolutions are flown where the phase gain per revolution is
    largest, then one more where the gain best matches what is left.
    A profile that never drifts against the target gives ``total = inf``.
    """
    prof = np.asarray(n_profile, dtype=float).ravel()
    if prof.size == 0:
        raise ValueError("n_profile must not be empty")
    if not n_f > 0 or np.any(prof <= 0):
        raise ValueError("mean motions must be positive")
    gain = phase_per_revolution(prof, n_f)
    i_k = int(np.argmax(gain))
    g_k = float(gain[i_k])
    if g_k == 0.0:
        return CoastingPlan(0, float(prof[i_k]), float(prof[i_k]), TWO_PI, 0.0, math.inf)
    k = int(math.floor(TWO_PI / g_k * (1 + 1e-12)))
    residual = max(0.0, TWO_PI - k * g_k)
    if residual <= 1e-12 * TWO_PI:
        n_k = float(prof[i_k])
        return CoastingPlan(k, n_k, n_k, 0.0, 0.0, TWO_PI * k / n_k)
    i_r = int(np.argmin(np.abs(gain - residual)))
    n_k, n_res = float(prof[i_k]), float(prof[i_r])
    return CoastingPlan(k, n_k, n_res, residual, float(gain[i_r]), TWO_PI * (k / n_k + 1.0 / n_res))


def couplet_profile(a_low: float, a_target: float, constants: Constants = EARTH, samples: int = 512) -> np.ndarray:
    """Circular mean motions from the lowest radius of a couplet up to the target."""
    return np.array([mean_motion(a, constants) for a in np.linspace(a_low, a_target, samples)])


def sequence_phasing(
    couplets,
    nominal_tof: float,
    strategy: str,
    constants: Constants = EARTH,
) -> PhasingReport:
    """Worst-case delay summed over de-orbit/rendezvous couplets.

    Each couplet is ``(a_start, a_low, a_target)``: the circular orbit where
    perigee lowering starts, the lowest radius reached, and the next target.
    """
    t_di = 0.0
    t_phi = 0.0
    for a_start, a_low, a_target in couplets:
        t_di += apsidal_alignment_delay(mean_motion(a_start, constants))
        n_f = mean_motion(a_target, constants)
        if strategy == QUASI_CIRCULAR:
            t_phi += quasi_circular_phasing_delay(mean_motion(a_low, constants), n_f)
        elif strategy == ECCENTRIC:
            t_phi += eccentric_phasing_delay(couplet_profile(a_low, a_target, constants), n_f).total
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
    total = t_di + t_phi
    return PhasingReport(t_di, t_phi, total, total / nominal_tof, strategy)


def plan_couplets(phases, constants: Constants = EARTH) -> list[tuple[float, float, float]]:
    """Couplets of an evaluated plan: each de-orbit followed by a rendezvous.

    ``phases`` is the phase list of a sequence evaluation (or the equivalent
    dicts). The lowest radius is the de-orbit threshold, where every
    perigee-lowering spiral ends.
    """
    recs = [p if isinstance(p, dict) else asdict(p) for p in phases]
    out = []
    for k in range(1, len(recs) - 1):
        if recs[k]["kind"] == "deorbit" and recs[k + 1]["kind"] == "rendezvous":
            a_start = recs[k - 1]["a"]
            out.append((a_start, constants.rp_threshold, recs[k + 1]["a"]))
    return out
