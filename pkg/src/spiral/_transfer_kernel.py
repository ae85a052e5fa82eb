"""Compiled two-arc-per-revolution rendezvous spiral."""

import math

import numpy as np
from numba import njit

from ._kernels import PI, TWO_PI, coast_time_from, longitude_after, propagate, wrap_pi

OK = 0
EXHAUSTED = 2
DIVERGED = 3

HIST_COLS = 10  # rev, t, a, e, i, raan, rp, ra, dv, m

# Near-circular orbits have an apse line that the arcs themselves keep
# moving; letting it steer the schedule makes the run chaotic. Arc centres
# advance by pi and track the osculating apsis until e first drops below
# _E_LOCK. From then on the schedule stays frozen, so e can be driven through
# zero smoothly. Re-enabling tracking at some larger e makes that value an
# attractor, so it is never re-enabled.
_E_LOCK = 1e-3


@njit(cache=True)
def decode(dlt, rt):
    """Thrust-arc parameterisation -> (alpha_a, alpha_p, dla, dlp)."""
    alpha_a = 0.5 * PI if dlt >= 0.0 else -0.5 * PI
    mag = abs(dlt)
    if rt <= 1.0:
        alpha_p = alpha_a
        dla = rt * mag
    else:
        alpha_p = -alpha_a
        dla = (2.0 - rt) * mag
    return alpha_a, alpha_p, dla, mag - dla


@njit(cache=True)
def _record(hist, k, t, a, p1, p2, q1, q2, dv, m):
    if k >= hist.shape[0]:
        return
    e = math.hypot(p1, p2)
    tq = math.hypot(q1, q2)
    hist[k, 0] = k
    hist[k, 1] = t
    hist[k, 2] = a
    hist[k, 3] = e
    hist[k, 4] = 2.0 * math.atan(tq) * 180.0 / PI
    hist[k, 5] = math.atan2(q1, q2) * 180.0 / PI if tq > 0.0 else 0.0
    hist[k, 6] = a * (1.0 - e)
    hist[k, 7] = a * (1.0 + e)
    hist[k, 8] = dv
    hist[k, 9] = m


@njit(cache=True)
def transfer(a0, e0, dlt1, dltf, rt1, rtf, beta_a, beta_p, tof_bar, m0,
             f_tot, c_exh, m_dry, mu, hist):
    """Returns (dv, a, p1, p2, q1, q2, lon, l0, m, status, n_rev)."""
    a = a0
    p1 = 0.0
    p2 = e0
    q1 = 0.0
    q2 = 0.0
    l0 = PI  # depart from apogee: the first perigee arc is complete
    lon = l0
    m = m0
    dv = 0.0
    tof = 0.0
    l_apsis = l0  # centre of the previous arc
    locked = e0 < _E_LOCK
    record = hist.shape[0] > 0
    if record:
        _record(hist, 0, 0.0, a, p1, p2, q1, q2, dv, m)
    status = OK
    rev = 0
    done = False
    while not done:
        frac = tof / tof_bar
        dlt = dlt1 + (dltf - dlt1) * frac
        rt = rt1 + (rtf - rt1) * frac
        alpha_a, alpha_p, dla, dlp = decode(dlt, rt)
        for leg in range(2):
            if leg == 0:
                dl_semi = dlp
                alpha = alpha_p
                beta = beta_p
                offset = 0.0
            else:
                dl_semi = dla
                alpha = alpha_a
                beta = beta_a
                offset = PI
            e = math.hypot(p1, p2)
            lx = l_apsis + PI
            if not locked and e < _E_LOCK:
                locked = True
            if not locked:
                varpi = math.atan2(p1, p2)
                lx += wrap_pi(varpi + offset - lx)
            l_apsis = lx
            l_minus = max(lx - dl_semi, lon)
            l_plus = lx + dl_semi
            eps = f_tot / m
            t_coast = coast_time_from(a, p1, p2, lon, l_minus - lon, mu)
            if tof + t_coast >= tof_bar:
                lon = longitude_after(a, p1, p2, lon, tof_bar - tof, mu)
                tof = tof_bar
                done = True
                break
            tof += t_coast
            lon = l_minus
            span = l_plus - l_minus
            if span <= 0.0:
                lon = l_plus
                continue
            an, p1n, p2n, q1n, q2n, t_thr = propagate(a, p1, p2, q1, q2, lon, span, eps, alpha, beta, mu)
            if tof + t_thr > tof_bar:
                remaining = tof_bar - tof
                lo = 0.0
                hi = span
                for _ in range(100):
                    mid = 0.5 * (lo + hi)
                    an, p1n, p2n, q1n, q2n, t_thr = propagate(a, p1, p2, q1, q2, lon, mid, eps, alpha, beta, mu)
                    if t_thr > remaining:
                        hi = mid
                    else:
                        lo = mid
                    if hi - lo < 1e-13:
                        break
                span = mid
                t_thr = remaining
                done = True
            if p1n * p1n + p2n * p2n >= 1.0 or an <= 0.0:
                return dv, a, p1, p2, q1, q2, lon, l0, m, DIVERGED, rev
            a = an
            p1 = p1n
            p2 = p2n
            q1 = q1n
            q2 = q2n
            dv += eps * t_thr
            tof += t_thr
            m = m * math.exp(-eps * t_thr / c_exh)
            lon = lon + span
            if m < m_dry:
                return dv, a, p1, p2, q1, q2, lon, l0, m, EXHAUSTED, rev
            if done:
                break
        rev += 1
        if record:
            _record(hist, rev, tof, a, p1, p2, q1, q2, dv, m)
    n_rev = int(math.floor((lon - l0) / TWO_PI))
    return dv, a, p1, p2, q1, q2, lon, l0, m, status, n_rev
