"""Numerical reference integration of the Gauss variational equations.

This is the ground truth the analytic propagator is checked against. It is
deliberately simple and slow: an adaptive 8(5,3) Dormand-Prince integration
of the equinoctial form of the equations, which stays regular at ``e = 0``
and ``i = 0``. The classical Keplerian form is kept for cross-checks at
non-singular points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .elements import EARTH, Constants, EquinoctialState, KeplerianElements

# (t, state) -> (a_r, a_theta, a_h) in km/s^2
ControlProfile = Callable[[float, EquinoctialState], Sequence[float]]


class SingularStateError(ValueError):
    """The Keplerian form of the equations is singular at this state."""


class IntegrationError(RuntimeError):
    pass


def constant_thrust(eps: float, alpha: float, beta: float) -> ControlProfile:
    """Constant acceleration of magnitude ``eps`` fixed in the rotating frame."""
    acc = (
        eps * math.cos(alpha) * math.cos(beta),
        eps * math.sin(alpha) * math.cos(beta),
        eps * math.sin(beta),
    )

    def profile(t, state):
        return acc

    return profile


def gauss_rhs(kep: KeplerianElements, accel, constants: Constants = EARTH) -> np.ndarray:
    """Time derivatives of ``(a, e, i, raan, argp, theta)``.

    Raises :class:`SingularStateError` for ``e < 1e-8`` or ``sin i < 1e-10``.
    """
    a, e, i, _, _, theta = kep.a, kep.e, kep.i, kep.raan, kep.argp, kep.theta
    if e < 1e-8:
        raise SingularStateError("argument of perigee undefined for e < 1e-8")
    si = math.sin(i)
    if abs(si) < 1e-10:
        raise SingularStateError("node undefined for sin(i) < 1e-10")
    ar, at, ah = accel
    mu = constants.mu
    p = a * (1.0 - e * e)
    h = math.sqrt(mu * p)
    r = p / (1.0 + e * math.cos(theta))
    st, ct = math.sin(theta), math.cos(theta)
    u = kep.argp + theta
    su, cu = math.sin(u), math.cos(u)
    da = 2.0 * a * a / h * (e * st * ar + p / r * at)
    de = (p * st * ar + ((p + r) * ct + r * e) * at) / h
    di = r * cu / h * ah
    draan = r * su / (h * si) * ah
    dargp = (-p * ct * ar + (p + r) * st * at) / (h * e) - r * su * math.cos(i) / (h * si) * ah
    dtheta = h / r**2 + (p * ct * ar - (p + r) * st * at) / (e * h)
    return np.array([da, de, di, draan, dargp, dtheta])


def equinoctial_rhs(y, accel, mu: float) -> np.ndarray:
    """Time derivatives of ``(a, P1, P2, Q1, Q2, L)``."""
    a, p1, p2, q1, q2, lon = y
    ar, at, an = accel
    sl, cl = math.sin(lon), math.cos(lon)
    p = a * (1.0 - p1 * p1 - p2 * p2)
    h = math.sqrt(mu * p)
    w = 1.0 + p1 * sl + p2 * cl
    k = h / mu  # sqrt(p/mu)
    zeta = q2 * sl - q1 * cl
    s2 = 1.0 + q1 * q1 + q2 * q2
    da = 2.0 * a * a / h * ((p2 * sl - p1 * cl) * ar + w * at)
    dp1 = k * (-cl * ar + ((w + 1.0) * sl + p1) * at / w + zeta * p2 * an / w)
    dp2 = k * (sl * ar + ((w + 1.0) * cl + p2) * at / w - zeta * p1 * an / w)
    dq1 = k * s2 * sl * an / (2.0 * w)
    dq2 = k * s2 * cl * an / (2.0 * w)
    dl = h * w * w / (p * p) + k * zeta * an / w
    return np.array([da, dp1, dp2, dq1, dq2, dl])


def _state(y, t) -> EquinoctialState:
    return EquinoctialState(*(float(v) for v in y[:6]), epoch=float(t))


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[EquinoctialState]

    def elements(self) -> np.ndarray:
        return np.array([s.as_array() for s in self.states])


def integrate_numeric(
    state0: EquinoctialState,
    profile: ControlProfile,
    t_span: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    t_eval=None,
    constants: Constants = EARTH,
) -> Trajectory:
    """Integrate in time for ``t_span`` seconds from ``state0.epoch``."""
    _check_tol(rel_tol, abs_tol)
    mu = constants.mu
    t0 = state0.epoch

    def rhs(t, y):
        return equinoctial_rhs(y, profile(t, _state(y, t)), mu)

    if t_eval is None:
        t_eval = [t0, t0 + t_span]
    sol = solve_ivp(
        rhs, (t0, t0 + t_span), state0.as_array(), method="DOP853",
        rtol=rel_tol, atol=abs_tol, t_eval=np.asarray(t_eval, dtype=float),
    )
    if not sol.success:
        raise IntegrationError(sol.message)
    return Trajectory(sol.t, [_state(sol.y[:, k], sol.t[k]) for k in range(sol.t.size)])


def integrate_to_longitude(
    state0: EquinoctialState,
    profile: ControlProfile,
    longitudes,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-13,
    constants: Constants = EARTH,
) -> Trajectory:
    """Integrate with true longitude as the independent variable.

    Time is carried as an extra state, so the returned epochs are the arrival
    times at each requested longitude.
    """
    _check_tol(rel_tol, abs_tol)
    mu = constants.mu
    longitudes = np.asarray(longitudes, dtype=float)
    l0 = state0.longitude

    def rhs(lon, z):
        y = np.empty(6)
        y[:5] = z[:5]
        y[5] = lon
        st = _state(y, z[5])
        d = equinoctial_rhs(y, profile(z[5], st), mu)
        dtdl = 1.0 / d[5]
        out = np.empty(6)
        out[:5] = d[:5] * dtdl
        out[5] = dtdl
        return out

    z0 = np.r_[state0.as_array()[:5], state0.epoch]
    # time is O(1e4) s, elements O(1e3) km or O(1): scale the absolute tolerance
    atol = np.array([abs_tol * 1e3, abs_tol, abs_tol, abs_tol, abs_tol, abs_tol * 1e4])
    sol = solve_ivp(
        rhs, (l0, float(longitudes.max())), z0, method="DOP853",
        rtol=rel_tol, atol=atol, t_eval=longitudes,
    )
    if not sol.success:
        raise IntegrationError(sol.message)
    states = []
    for k in range(sol.t.size):
        y = np.r_[sol.y[:5, k], sol.t[k]]
        states.append(_state(y, sol.y[5, k]))
    return Trajectory(sol.y[5].copy(), states)


def _check_tol(rel_tol, abs_tol):
    if not (0.0 < rel_tol <= 1e-3 and 0.0 < abs_tol <= 1e-3):
        raise ValueError("tolerances must lie in (0, 1e-3]")
