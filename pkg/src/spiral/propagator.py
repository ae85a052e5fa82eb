"""First-order analytic propagation of low-thrust perturbed Keplerian motion.

Elements are expanded to first order in the thrust acceleration magnitude
``eps`` and parameterised in true longitude::

    x(L0 + dL) = x0 + eps * x1(L0, dL, alpha, beta)
    t(L0 + dL) = t0 + h0^3/mu^2 * I12 + eps * t1

with ``x = (a, P1, P2, Q1, Q2)`` and the thrust fixed in the
radial/transverse/normal frame. The first-order coefficients are closed-form
combinations of seven integrals in ``L`` (see :func:`kepler_integrals`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels as K
from .elements import EARTH, Constants, EquinoctialState


class DivergenceError(ArithmeticError):
    """The first-order update left the elliptical domain (P1^2 + P2^2 >= 1)."""


@dataclass(frozen=True)
class ThrustSetting:
    """Constant acceleration ``eps`` [km/s^2], azimuth ``alpha`` and elevation ``beta``.

    ``a_r = eps cos(alpha) cos(beta)``, ``a_theta = eps sin(alpha) cos(beta)``,
    ``a_h = eps sin(beta)``.
    """

    epsilon: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if not -math.pi / 2 <= self.beta <= math.pi / 2:
            raise ValueError("beta must lie in [-pi/2, pi/2]")

    def components(self) -> tuple[float, float, float]:
        cb = math.cos(self.beta)
        return (
            self.epsilon * math.cos(self.alpha) * cb,
            self.epsilon * math.sin(self.alpha) * cb,
            self.epsilon * math.sin(self.beta),
        )


@dataclass(frozen=True)
class IntegralSet:
    i11: float
    i12: float
    i13: float
    ic2: float
    ic3: float
    is2: float
    is3: float


def kepler_integrals(p1: float, p2: float, l0: float, lf: float) -> IntegralSet:
    """Definite integrals over ``[l0, lf]`` of ``w^-n``, ``cos L w^-n``, ``sin L w^-n``.

    Here ``w = 1 + P1 sin L + P2 cos L``. ``I1n`` integrates ``w^-n`` (n=1..3),
    ``Icn``/``Isn`` integrate ``cos L / w^n`` and ``sin L / w^n`` (n=2, 3).
    The arc may span any number of revolutions.
    """
    if p1 * p1 + p2 * p2 >= 1.0:
        raise ValueError("P1^2 + P2^2 must be < 1")
    if lf < l0:
        raise ValueError("lf must be >= l0")
    return IntegralSet(*K.integrals(p1, p2, l0, lf))


def coast_time(state: EquinoctialState, dl: float, constants: Constants = EARTH) -> float:
    """Two-body time [s] to sweep ``dl`` of longitude from ``state.longitude``."""
    if dl < 0:
        raise ValueError("dl must be non-negative")
    return K.coast_time_from(state.a, state.p1, state.p2, state.longitude, dl, constants.mu)


def propagate_first_order(
    state0: EquinoctialState,
    dl: float,
    thrust: ThrustSetting,
    constants: Constants = EARTH,
) -> EquinoctialState:
    """State at ``L0 + dl`` under constant thrust, epoch advanced accordingly."""
    if dl < 0:
        raise ValueError("dl must be non-negative")
    s = state0
    a, p1, p2, q1, q2, dt = K.propagate(
        s.a, s.p1, s.p2, s.q1, s.q2, s.longitude, dl,
        thrust.epsilon, thrust.alpha, thrust.beta, constants.mu,
    )
    if p1 * p1 + p2 * p2 >= 1.0 or a <= 0.0:
        raise DivergenceError(
            f"first-order update diverged (a={a:.3f}, e={math.hypot(p1, p2):.4f})"
        )
    return EquinoctialState(a, p1, p2, q1, q2, s.longitude + dl, s.epoch + dt)


def apsis_thrust_arc(
    state_in: EquinoctialState,
    l_apsis: float,
    dl_semi: float,
    alpha: float,
    beta: float,
    epsilon: float,
    constants: Constants = EARTH,
) -> tuple[EquinoctialState, float]:
    """Coast to ``l_apsis - dl_semi`` then thrust over ``2 dl_semi``.

    Returns the post-arc state and the thrusting time [s].
    """
    if not 0.0 <= dl_semi <= math.pi:
        raise ValueError("dl_semi must lie in [0, pi]")
    start = l_apsis - dl_semi
    if state_in.longitude > start + 1e-12:
        raise ValueError("arc starts behind the current longitude")
    coast = max(0.0, start - state_in.longitude)
    mid = propagate_first_order(state_in, coast, ThrustSetting(0.0), constants)
    out = propagate_first_order(mid, 2.0 * dl_semi, ThrustSetting(epsilon, alpha, beta), constants)
    return out, out.epoch - mid.epoch


def longitude_after(state: EquinoctialState, dt: float, constants: Constants = EARTH) -> float:
    """Unwrapped longitude reached after coasting ``dt`` seconds."""
    return K.longitude_after(state.a, state.p1, state.p2, state.longitude, dt, constants.mu)
