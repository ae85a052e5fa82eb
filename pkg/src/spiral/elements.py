"""Orbital element sets, conversions and small geometric helpers.

Angles are radians throughout; degrees only appear at I/O boundaries.
The true longitude of an :class:`EquinoctialState` is *unwrapped*: it keeps
growing across revolutions so that revolution counts are simply
``floor((L - L_start) / 2pi)``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Constants:
    """Physical constants used by every model.

    ``rp_threshold`` is the de-orbit perigee *radius* (300 km altitude above
    ``earth_radius``), not an altitude.
    """

    mu: float = 398600.4418  # km^3/s^2
    earth_radius: float = 6378.16  # km
    rp_threshold: float = 6678.16  # km
    g0: float = 9.80665e-3  # km/s^2

    def __post_init__(self):
        for name in ("mu", "earth_radius", "rp_threshold", "g0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_env(cls, **overrides) -> "Constants":
        """Defaults, then ``SPIRAL_*`` environment variables, then overrides."""
        env = {
            "mu": "SPIRAL_MU",
            "earth_radius": "SPIRAL_EARTH_RADIUS",
            "rp_threshold": "SPIRAL_RP_THRESHOLD",
            "g0": "SPIRAL_G0",
        }
        values = {}
        for field, var in env.items():
            if var in os.environ:
                values[field] = float(os.environ[var])
        values.update({k: float(v) for k, v in overrides.items() if v is not None})
        return cls(**values)


EARTH = Constants()


@dataclass(frozen=True)
class KeplerianElements:
    a: float
    e: float
    i: float
    raan: float
    argp: float
    theta: float

    @property
    def p(self) -> float:
        return self.a * (1.0 - self.e**2)


@dataclass(frozen=True)
class EquinoctialState:
    """Non-singular elements ``(a, P1, P2, Q1, Q2, L)`` plus an epoch [s].

    ``P1 = e sin(raan + argp)``, ``P2 = e cos(raan + argp)``,
    ``Q1 = tan(i/2) sin(raan)``, ``Q2 = tan(i/2) cos(raan)``.
    """

    a: float
    p1: float
    p2: float
    q1: float
    q2: float
    longitude: float
    epoch: float = 0.0

    @property
    def e(self) -> float:
        return math.hypot(self.p1, self.p2)

    @property
    def inclination(self) -> float:
        return 2.0 * math.atan(math.hypot(self.q1, self.q2))

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.p1, self.p2, self.q1, self.q2, self.longitude])

    def with_(self, **changes) -> "EquinoctialState":
        return replace(self, **changes)


def kep_to_equinoctial(kep: KeplerianElements, epoch: float = 0.0) -> EquinoctialState:
    if not 0.0 <= kep.e < 1.0:
        raise ValueError(f"eccentricity must be in [0, 1), got {kep.e}")
    if not abs(kep.i) < math.pi:
        raise ValueError("|i| must be < pi")
    lon_peri = kep.raan + kep.argp
    t = math.tan(0.5 * kep.i)
    return EquinoctialState(
        a=kep.a,
        p1=kep.e * math.sin(lon_peri),
        p2=kep.e * math.cos(lon_peri),
        q1=t * math.sin(kep.raan),
        q2=t * math.cos(kep.raan),
        longitude=lon_peri + kep.theta,
        epoch=epoch,
    )


def equinoctial_to_kep(state: EquinoctialState) -> KeplerianElements:
    """Inverse of :func:`kep_to_equinoctial`.

    The inclination comes back non-negative. With ``i = 0`` the node is
    undefined and ``raan = 0`` is used, so ``argp + theta`` absorbs the phase;
    likewise ``argp = 0`` (relative to the node) when ``e = 0``.
    """
    e = state.e
    if not e < 1.0:
        raise ValueError("state is not elliptical (P1^2 + P2^2 >= 1)")
    tq = math.hypot(state.q1, state.q2)
    i = 2.0 * math.atan(tq)
    raan = math.atan2(state.q1, state.q2) if tq > 0.0 else 0.0
    lon_peri = math.atan2(state.p1, state.p2) if e > 0.0 else raan
    argp = lon_peri - raan
    theta = state.longitude - raan - argp
    return KeplerianElements(state.a, e, i, raan, argp, theta)


def apsis_radii(state: EquinoctialState) -> tuple[float, float]:
    """Perigee and apogee radii ``(a(1-e), a(1+e))``."""
    e = state.e
    return state.a * (1.0 - e), state.a * (1.0 + e)


def relative_inclination(plane_a, plane_b) -> float:
    """Angle between two orbit planes given as ``(i, raan)`` pairs [rad].

    Inclinations may be signed; they are used as given.
    """
    i0, raan0 = plane_a
    i1, raan1 = plane_b
    c = -math.cos(i0) * math.cos(math.pi - i1) + math.sin(i0) * math.sin(
        math.pi - i1
    ) * math.cos(raan1 - raan0)
    return math.acos(min(1.0, max(-1.0, c)))


def wrap_pi(angle: float) -> float:
    """Wrap an angle into ``(-pi, pi]``."""
    w = math.fmod(angle + math.pi, TWO_PI)
    if w <= 0.0:
        w += TWO_PI
    return w - math.pi


def mean_motion(a: float, constants: Constants = EARTH) -> float:
    return math.sqrt(constants.mu / a**3)


def orbital_period(a: float, constants: Constants = EARTH) -> float:
    return TWO_PI * math.sqrt(a**3 / constants.mu)
