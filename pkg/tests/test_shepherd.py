import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spiral.shepherd import (
    MassState,
    PropellantExhausted,
    SpacecraftConfig,
    balance_thrust,
    beam_acceleration,
    split_thrust,
    update_mass_shepherding,
    update_mass_solo,
)

CFG = SpacecraftConfig()


def test_config_validation():
    with pytest.raises(ValueError):
        SpacecraftConfig(f_tot=0.0)
    with pytest.raises(ValueError):
        SpacecraftConfig(m_dry=1000.0, m_launch=900.0)
    assert CFG.exhaust_velocity() == pytest.approx(3000 * 9.80665e-3)


def test_accelerations():
    assert beam_acceleration(CFG, MassState(1000.0, 800.0)) == pytest.approx(0.5e-3 / 2600.0)
    assert beam_acceleration(CFG, MassState(1000.0)) == pytest.approx(5e-7)
    with pytest.raises(ValueError):
        beam_acceleration(CFG, MassState(0.0))


@given(st.floats(0.01, 1.0), st.floats(250.0, 1000.0), st.floats(10.0, 1000.0))
def test_split_thrust_balances(f_tot, m_ibs, m_debr):
    f1, f2 = split_thrust(f_tot, m_ibs, m_debr)
    assert f1 + f2 == pytest.approx(f_tot)
    # equal accelerations of debris (f1/m_debr) and shepherd ((f2 - f1)/m_ibs)
    assert f1 / m_debr == pytest.approx((f2 - f1) / m_ibs)
    assert balance_thrust(f1, m_ibs, m_debr) == pytest.approx(f2)


@given(st.floats(300.0, 1000.0), st.floats(0.0, 800.0), st.floats(0.0, 1e6))
def test_mass_is_non_increasing(m, m_debr, t):
    eps = beam_acceleration(CFG, MassState(m, m_debr))
    try:
        m1 = update_mass_shepherding(MassState(m, m_debr), eps, t, CFG)
    except PropellantExhausted:
        return
    assert m1 <= m


def test_shepherding_burns_more_than_solo():
    t = 30 * 86400.0
    solo = update_mass_solo(1000.0, 5e-7, t, CFG)
    eps = beam_acceleration(CFG, MassState(1000.0, 500.0))
    push = update_mass_shepherding(MassState(1000.0, 500.0), eps, t, CFG)
    # same thrust and burn time: equal propellant to first order, slightly
    # more when pushing because M (1 - exp(-F t / (M c))) grows with M
    assert 1000.0 - push == pytest.approx(1000.0 - solo, rel=2e-2)
    assert push < solo
    assert solo == pytest.approx(1000.0 * math.exp(-5e-7 * t / CFG.exhaust_velocity()))


def test_exhaustion_and_validation():
    with pytest.raises(PropellantExhausted):
        update_mass_solo(260.0, 5e-7, 1e8, CFG)
    with pytest.raises(ValueError):
        update_mass_solo(500.0, 5e-7, -1.0, CFG)
    with pytest.raises(ValueError):
        balance_thrust(1e-3, 500.0, 0.0)
