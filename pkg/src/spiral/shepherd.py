"""Ion Beam Shepherd force balance and propellant bookkeeping.

The shepherd pushes the debris with one thruster (``F_p1``) and holds
formation with a counter-thruster (``F_p2``). Treating the pair as one body,
the usable acceleration is ``F_tot / (2 m_debr + m_ibs)``.

Units: thrust in kN and mass in kg, so accelerations come out in km/s^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .elements import EARTH, Constants


class PropellantExhausted(RuntimeError):
    """Wet mass dropped below the dry mass."""


@dataclass(frozen=True)
class SpacecraftConfig:
    f_tot: float = 0.5e-3  # kN (0.5 N)
    isp: float = 3000.0  # s
    m_dry: float = 250.0  # kg
    m_launch: float = 1000.0  # kg

    def __post_init__(self):
        if not self.f_tot > 0 or not self.isp > 0:
            raise ValueError("thrust and specific impulse must be positive")
        if not self.m_dry < self.m_launch:
            raise ValueError("m_dry must be below m_launch")

    def exhaust_velocity(self, constants: Constants = EARTH) -> float:
        return self.isp * constants.g0


@dataclass(frozen=True)
class MassState:
    m_ibs: float
    m_debr: float = 0.0


def balance_thrust(f_p1: float, m_ibs: float, m_debr: float) -> float:
    """Counter-thrust ``F_p2`` that keeps the shepherd-debris distance fixed."""
    if m_debr <= 0:
        raise ValueError("debris mass must be positive")
    return f_p1 * (1.0 + m_ibs / m_debr)


def split_thrust(f_tot: float, m_ibs: float, m_debr: float) -> tuple[float, float]:
    """``(F_p1, F_p2)`` summing to ``f_tot`` with balanced relative motion."""
    f_p1 = f_tot * m_debr / (2.0 * m_debr + m_ibs)
    return f_p1, balance_thrust(f_p1, m_ibs, m_debr)


def beam_acceleration(config: SpacecraftConfig, mass: MassState) -> float:
    """Acceleration of the shepherd-debris pair, or of the shepherd alone."""
    if mass.m_ibs <= 0:
        raise ValueError("shepherd mass must be positive")
    if mass.m_debr > 0:
        return config.f_tot / (2.0 * mass.m_debr + mass.m_ibs)
    return config.f_tot / mass.m_ibs


def update_mass_shepherding(
    mass: MassState,
    epsilon: float,
    t_thrust: float,
    config: SpacecraftConfig,
    constants: Constants = EARTH,
) -> float:
    """Shepherd mass after thrusting ``t_thrust`` s while pushing debris."""
    if t_thrust < 0:
        raise ValueError("t_thrust must be non-negative")
    c = config.exhaust_velocity(constants)
    m = (mass.m_ibs + 2.0 * mass.m_debr) * math.exp(-epsilon * t_thrust / c) - 2.0 * mass.m_debr
    # the subtraction above can round one ulp upward for tiny burns
    m = min(m, mass.m_ibs)
    if m < config.m_dry:
        raise PropellantExhausted(f"wet mass {m:.2f} kg below dry mass {config.m_dry} kg")
    return m


def update_mass_solo(
    m_ibs: float,
    epsilon: float,
    t_thrust: float,
    config: SpacecraftConfig,
    constants: Constants = EARTH,
) -> float:
    return update_mass_shepherding(MassState(m_ibs, 0.0), epsilon, t_thrust, config, constants)
