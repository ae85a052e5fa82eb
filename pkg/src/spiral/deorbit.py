"""Perigee-lowering de-orbit spirals and the (ToF, m_IBS0) cost surrogate.

A shepherd thrusts against the velocity on arcs centred on apogee until the
debris perigee reaches the re-entry threshold. The arc semi-amplitude varies
linearly with the orbit count between two nodal values, so one de-orbit is
fully fixed by ``(m_ibs0, dla1, dlaf)``. Sweeping that grid and keeping the
cheapest run per time of flight gives the surrogate used by sequence
optimisation.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _deorbit_kernel as DK
from .elements import EARTH, Constants
from .shepherd import SpacecraftConfig

SURROGATE_SCHEMA = 1
DAY = 86400.0


@dataclass(frozen=True)
class Debris:
    mass: float  # kg
    a: float  # km, circular initial orbit
    id: str = ""
    i: float = 0.0  # rad
    raan: float = 0.0  # rad


@dataclass(frozen=True)
class DeorbitControls:
    dla1: float
    dlaf: float
    n_ref: int = 1200
    n_max: int = 1200

    def __post_init__(self):
        for v in (self.dla1, self.dlaf):
            if not 0.0 <= v <= math.pi:
                raise ValueError("arc semi-amplitudes must lie in [0, pi]")
        if self.n_ref < 2:
            raise ValueError("n_ref must be >= 2")


@dataclass
class DeorbitResult:
    dv: float
    tof: float
    a_f: float
    e_f: float
    m_ibs_final: float
    n_orbits: int
    converged: bool
    status: str = "converged"
    history: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("history")
        return d


_STATUS = {
    DK.CONVERGED: "converged",
    DK.NOT_CONVERGED: "not_converged",
    DK.EXHAUSTED: "propellant_exhausted",
    DK.DIVERGED: "diverged",
}

HISTORY_HEADER = "orbit,t_s,a_km,e,rp_km,ra_km,dv_kms,m_kg,dla_rad"


def arc_amplitude_at(controls: DeorbitControls, orbit_index: float) -> float:
    """Arc semi-amplitude on a given orbit (1-based, may be fractional)."""
    if orbit_index < 1:
        raise ValueError("orbit_index must be >= 1")
    return DK.arc_amplitude(controls.dla1, controls.dlaf, controls.n_ref, float(orbit_index))


def simulate_deorbit(
    debris: Debris,
    m_ibs0: float,
    controls: DeorbitControls,
    config: SpacecraftConfig = SpacecraftConfig(),
    constants: Constants = EARTH,
    history: bool = False,
) -> DeorbitResult:
    """Run one perigee-lowering spiral until the perigee reaches the threshold.

    Non-convergence within ``controls.n_max`` orbits is reported through
    ``converged=False``; so is propellant exhaustion (``status``).
    """
    if not debris.a > constants.rp_threshold:
        raise ValueError("initial orbit must lie above the de-orbit threshold")
    if not config.m_dry <= m_ibs0:
        raise ValueError("initial shepherd mass below dry mass")
    hist = np.zeros((controls.n_max + 1 if history else 0, DK.HIST_COLS))
    dv, tof, a, p1, p2, m, n, status = DK.deorbit(
        float(debris.mass), float(debris.a), float(m_ibs0),
        float(controls.dla1), float(controls.dlaf), controls.n_ref, controls.n_max,
        config.f_tot, config.exhaust_velocity(constants), config.m_dry,
        constants.mu, constants.rp_threshold, hist,
    )
    res = DeorbitResult(
        dv=dv, tof=tof, a_f=a, e_f=math.hypot(p1, p2), m_ibs_final=m,
        n_orbits=int(n), converged=status == DK.CONVERGED, status=_STATUS[status],
    )
    if history:
        res.history = hist[: int(n) + 1]
    return res


@dataclass(frozen=True)
class GridSpec:
    """Sampling of ``(m_ibs0, dla1, dlaf)``; defaults give 8 x 50 x 50 cells."""

    m_min: float = 350.0
    m_max: float = 1000.0
    n_m: int = 8
    n_a1: int = 50
    n_af: int = 50
    n_ref: int = 1200
    n_max: int = 1200

    def axes(self):
        return (
            np.linspace(self.m_min, self.m_max, self.n_m),
            np.linspace(0.0, math.pi, self.n_a1),
            np.linspace(0.0, math.pi, self.n_af),
        )


@dataclass
class DeorbitGrid:
    debris: Debris
    m_axis: np.ndarray
    la1_axis: np.ndarray
    laf_axis: np.ndarray
    # [..., 0..6] = dv, tof, a_f, e_f, m_final, n_orbits, status
    cells: np.ndarray

    @property
    def converged(self) -> np.ndarray:
        return self.cells[..., 6] == DK.CONVERGED

    def __len__(self):
        return int(np.prod(self.cells.shape[:3]))


def build_surrogate_grid(
    debris: Debris,
    config: SpacecraftConfig = SpacecraftConfig(),
    constants: Constants = EARTH,
    grid: GridSpec = GridSpec(),
) -> DeorbitGrid:
    """Evaluate every de-orbit cell of ``grid`` for one piece of debris."""
    m_axis, la1, laf = grid.axes()
    cells = DK.sweep(
        float(debris.mass), float(debris.a), m_axis, la1, laf, grid.n_ref, grid.n_max,
        config.f_tot, config.exhaust_velocity(constants), config.m_dry,
        constants.mu, constants.rp_threshold,
    )
    return DeorbitGrid(debris, m_axis, la1, laf, cells)


class SurrogateDomainError(ValueError):
    def __init__(self, message, valid_range):
        super().__init__(message)
        self.valid_range = valid_range


@dataclass
class EnvelopeSlice:
    m_ibs0: float
    tof: np.ndarray
    dv: np.ndarray
    a_f: np.ndarray

    @property
    def tof_range(self) -> tuple[float, float]:
        return float(self.tof[0]), float(self.tof[-1])

    def at(self, tof: float) -> tuple[float, float]:
        return float(np.interp(tof, self.tof, self.dv)), float(np.interp(tof, self.tof, self.a_f))

    def at_fraction(self, tau: float) -> tuple[float, float]:
        lo, hi = self.tof_range
        return self.at(lo + tau * (hi - lo))


@dataclass
class DeorbitSurrogate:
    """Minimum de-orbit ΔV and final semi-major axis vs (ToF, m_IBS0)."""

    debris: Debris
    slices: list[EnvelopeSlice]
    unavailable: list[float] = field(default_factory=list)
    config_hash: str = ""

    @property
    def m_axis(self) -> np.ndarray:
        return np.array([s.m_ibs0 for s in self.slices])

    def tof_range(self, m_ibs0: float) -> tuple[float, float]:
        lo_s, hi_s, w = self._bracket(m_ibs0)
        lo = (1 - w) * lo_s.tof_range[0] + w * hi_s.tof_range[0]
        hi = (1 - w) * lo_s.tof_range[1] + w * hi_s.tof_range[1]
        return lo, hi

    def _bracket(self, m_ibs0):
        m = self.m_axis
        if not m[0] - 1e-9 <= m_ibs0 <= m[-1] + 1e-9:
            raise SurrogateDomainError(
                f"m_ibs0={m_ibs0:.2f} kg outside [{m[0]}, {m[-1]}]", (float(m[0]), float(m[-1]))
            )
        if len(m) == 1:
            return self.slices[0], self.slices[0], 0.0
        j = int(np.clip(np.searchsorted(m, m_ibs0) - 1, 0, len(m) - 2))
        w = (m_ibs0 - m[j]) / (m[j + 1] - m[j])
        return self.slices[j], self.slices[j + 1], float(np.clip(w, 0.0, 1.0))

    def query(self, tof: float, m_ibs0: float) -> tuple[float, float]:
        """``(dv [km/s], a_f [km])`` for a de-orbit lasting ``tof`` seconds."""
        lo, hi = self.tof_range(m_ibs0)
        if not lo * (1 - 1e-12) <= tof <= hi * (1 + 1e-12):
            raise SurrogateDomainError(
                f"tof={tof / DAY:.3f} d outside [{lo / DAY:.3f}, {hi / DAY:.3f}] d", (lo, hi)
            )
        # blend the slices at the same relative position in their ToF
        # ranges, so the steep fast edge lines up across masses
        tau = (tof - lo) / (hi - lo) if hi > lo else 0.0
        tau = min(1.0, max(0.0, tau))
        s0, s1, w = self._bracket(m_ibs0)
        dv0, af0 = s0.at_fraction(tau)
        dv1, af1 = s1.at_fraction(tau)
        return (1 - w) * dv0 + w * dv1, (1 - w) * af0 + w * af1

    def tof_min(self, m_ibs0: float) -> float:
        return self.tof_range(m_ibs0)[0]

    def to_json(self) -> dict:
        return {
            "schema_version": SURROGATE_SCHEMA,
            "kind": "deorbit_surrogate",
            "debris": asdict(self.debris),
            "config_hash": self.config_hash,
            "unavailable_m_ibs0": list(self.unavailable),
            "slices": [
                {
                    "m_ibs0": s.m_ibs0,
                    "tof_s": s.tof.tolist(),
                    "dv_kms": s.dv.tolist(),
                    "a_f_km": s.a_f.tolist(),
                }
                for s in self.slices
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DeorbitSurrogate":
        if doc.get("schema_version") != SURROGATE_SCHEMA:
            raise ValueError(f"unsupported surrogate schema {doc.get('schema_version')}")
        slices = [
            EnvelopeSlice(s["m_ibs0"], np.array(s["tof_s"]), np.array(s["dv_kms"]), np.array(s["a_f_km"]))
            for s in doc["slices"]
        ]
        return cls(Debris(**doc["debris"]), slices, doc.get("unavailable_m_ibs0", []), doc.get("config_hash", ""))

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    @classmethod
    def load(cls, path) -> "DeorbitSurrogate":
        with open(path) as f:
            return cls.from_json(json.load(f))


def _envelope_1d(tof, dv, a_f, n_bins):
    order = np.argsort(tof, kind="stable")
    tof, dv, a_f = tof[order], dv[order], a_f[order]
    if tof.size == 1 or tof[-1] == tof[0]:
        k = int(np.argmin(dv))
        return tof[k : k + 1], dv[k : k + 1], a_f[k : k + 1]
    edges = np.linspace(tof[0], tof[-1], n_bins + 1)
    idx = np.clip(np.searchsorted(edges, tof, side="right") - 1, 0, n_bins - 1)
    # the fastest cell always bounds the domain from below
    t_out, dv_out, af_out = [tof[0]], [dv[0]], [a_f[0]]
    for b in range(n_bins):
        sel = np.nonzero(idx == b)[0]
        if sel.size == 0:
            continue
        k = sel[np.argmin(dv[sel])]
        if k == 0:
            continue
        t_out.append(tof[k])
        dv_out.append(dv[k])
        af_out.append(a_f[k])
    t_out, dv_out, af_out = np.array(t_out), np.array(dv_out), np.array(af_out)
    # a longer phase can always fly a faster de-orbit and coast: running min
    for k in range(1, t_out.size):
        if dv_out[k] > dv_out[k - 1]:
            dv_out[k] = dv_out[k - 1]
            af_out[k] = af_out[k - 1]
    return t_out, dv_out, af_out


def extract_envelope(grid: DeorbitGrid, n_bins: int = 200, config_hash: str = "") -> DeorbitSurrogate:
    """Minimum-ΔV envelope per m_IBS0 slice over the converged cells."""
    slices, missing = [], []
    ok = grid.converged
    for i, m in enumerate(grid.m_axis):
        sel = ok[i]
        if not sel.any():
            missing.append(float(m))
            continue
        c = grid.cells[i][sel]
        t, dv, af = _envelope_1d(c[:, 1], c[:, 0], c[:, 2], n_bins)
        slices.append(EnvelopeSlice(float(m), t, dv, af))
    if not slices:
        raise ValueError("no converged de-orbit cell in the grid")
    return DeorbitSurrogate(grid.debris, slices, missing, config_hash)


def query_surrogate(surrogate: DeorbitSurrogate, tof: float, m_ibs0: float) -> tuple[float, float]:
    return surrogate.query(tof, m_ibs0)


def config_hash(config: SpacecraftConfig, constants: Constants, grid: GridSpec = GridSpec()) -> str:
    blob = json.dumps([asdict(config), asdict(constants), asdict(grid)], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_surrogate(
    debris: Debris,
    config: SpacecraftConfig = SpacecraftConfig(),
    constants: Constants = EARTH,
    grid: GridSpec = GridSpec(),
) -> DeorbitSurrogate:
    g = build_surrogate_grid(debris, config, constants, grid)
    return extract_envelope(g, config_hash=config_hash(config, constants, grid))


def minimum_deorbit_time(
    debris: Debris,
    m_ibs0: float = 350.0,
    config: SpacecraftConfig = SpacecraftConfig(),
    constants: Constants = EARTH,
) -> float:
    """De-orbit time [s] with continuous thrust (both arc nodes at pi)."""
    r = simulate_deorbit(debris, m_ibs0, DeorbitControls(math.pi, math.pi), config, constants)
    if not r.converged:
        raise RuntimeError(f"continuous-thrust de-orbit did not converge ({r.status})")
    return r.tof
