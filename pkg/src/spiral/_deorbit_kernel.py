"""Compiled perigee-lowering loop and grid sweep."""

import math

import numpy as np
from numba import njit

from ._kernels import PI, TWO_PI, coast_time_from, propagate, wrap_pi

CONVERGED = 0
NOT_CONVERGED = 1
EXHAUSTED = 2
DIVERGED = 3

HIST_COLS = 9  # orbit, t, a, e, rp, ra, dv, m, dla

_E_APSIS_MIN = 1e-6
_RP_TOL = 1e-6  # km
_ALPHA = -0.5 * PI  # decelerating transverse thrust


@njit(cache=True)
def arc_amplitude(dla1, dlaf, n_ref, orbit):
    if orbit >= n_ref:
        return dlaf
    return dla1 + (dlaf - dla1) * (orbit - 1.0) / (n_ref - 1.0)


@njit(cache=True)
def deorbit(m_debr, a0, m_ibs0, dla1, dlaf, n_ref, n_max,
            f_tot, c_exh, m_dry, mu, rp_bar, hist):
    """Returns (dv, tof, a, p1, p2, m_ibs, n_orbits, status)."""
    a = a0
    p1 = 0.0
    p2 = 0.0
    lon = 0.0
    la_prev = -PI  # so that orbit 1 places apogee at L0 + pi
    m = m_ibs0
    dv = 0.0
    tof = 0.0
    record = hist.shape[0] > 0
    if record:
        hist[0, 0] = 0.0
        hist[0, 1] = 0.0
        hist[0, 2] = a
        hist[0, 3] = 0.0
        hist[0, 4] = a
        hist[0, 5] = a
        hist[0, 6] = 0.0
        hist[0, 7] = m
        hist[0, 8] = 0.0
    for n in range(1, n_max + 1):
        dla = arc_amplitude(dla1, dlaf, n_ref, n)
        eps = f_tot / (2.0 * m_debr + m)
        e = math.hypot(p1, p2)
        if e < _E_APSIS_MIN:
            la = la_prev + TWO_PI
        else:
            varpi = math.atan2(p1, p2)
            la = lon + PI + wrap_pi(varpi - lon)
        la_prev = la
        l_minus = max(la - dla, lon)
        l_plus = la + dla
        t_coast = coast_time_from(a, p1, p2, lon, l_minus - lon, mu)
        span = l_plus - l_minus
        if span <= 0.0:
            tof += t_coast
            lon = l_plus
            if record:
                _record(hist, n, tof, a, p1, p2, dv, m, dla)
            continue
        an, p1n, p2n, _, _, t_thr = propagate(a, p1, p2, 0.0, 0.0, l_minus, span, eps, _ALPHA, 0.0, mu)
        if p1n * p1n + p2n * p2n >= 1.0 or an <= 0.0:
            return dv, tof, a, p1, p2, m, n, DIVERGED
        rp = an * (1.0 - math.hypot(p1n, p2n))
        if rp <= rp_bar:
            lo = 0.0
            hi = span
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                am, p1m, p2m, _, _, tm = propagate(a, p1, p2, 0.0, 0.0, l_minus, mid, eps, _ALPHA, 0.0, mu)
                rpm = am * (1.0 - math.hypot(p1m, p2m))
                if rpm > rp_bar:
                    lo = mid
                else:
                    hi = mid
                if abs(rpm - rp_bar) < _RP_TOL or hi - lo < 1e-14:
                    break
            an, p1n, p2n, t_thr = am, p1m, p2m, tm
            dv += eps * t_thr
            tof += t_coast + t_thr
            m = (m + 2.0 * m_debr) * math.exp(-eps * t_thr / c_exh) - 2.0 * m_debr
            if record:
                _record(hist, n, tof, an, p1n, p2n, dv, m, dla)
            if m < m_dry:
                return dv, tof, an, p1n, p2n, m, n, EXHAUSTED
            return dv, tof, an, p1n, p2n, m, n, CONVERGED
        dv += eps * t_thr
        tof += t_coast + t_thr
        m = (m + 2.0 * m_debr) * math.exp(-eps * t_thr / c_exh) - 2.0 * m_debr
        a = an
        p1 = p1n
        p2 = p2n
        lon = l_plus
        if record:
            _record(hist, n, tof, a, p1, p2, dv, m, dla)
        if m < m_dry:
            return dv, tof, a, p1, p2, m, n, EXHAUSTED
    return dv, tof, a, p1, p2, m, n_max, NOT_CONVERGED


@njit(cache=True)
def _record(hist, n, tof, a, p1, p2, dv, m, dla):
    e = math.hypot(p1, p2)
    hist[n, 0] = n
    hist[n, 1] = tof
    hist[n, 2] = a
    hist[n, 3] = e
    hist[n, 4] = a * (1.0 - e)
    hist[n, 5] = a * (1.0 + e)
    hist[n, 6] = dv
    hist[n, 7] = m
    hist[n, 8] = dla


@njit(cache=True)
def sweep(m_debr, a0, m_axis, la1_axis, laf_axis, n_ref, n_max,
          f_tot, c_exh, m_dry, mu, rp_bar):
    nm = m_axis.shape[0]
    n1 = la1_axis.shape[0]
    nf = laf_axis.shape[0]
    out = np.empty((nm, n1, nf, 7))
    empty = np.empty((0, HIST_COLS))
    for i in range(nm):
        for j in range(n1):
            for k in range(nf):
                dv, tof, a, p1, p2, m, n, status = deorbit(
                    m_debr, a0, m_axis[i], la1_axis[j], laf_axis[k], n_ref, n_max,
                    f_tot, c_exh, m_dry, mu, rp_bar, empty)
                out[i, j, k, 0] = dv
                out[i, j, k, 1] = tof
                out[i, j, k, 2] = a
                out[i, j, k, 3] = math.hypot(p1, p2)
                out[i, j, k, 4] = m
                out[i, j, k, 5] = n
                out[i, j, k, 6] = status
    return out
