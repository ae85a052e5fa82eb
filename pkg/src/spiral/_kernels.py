"""Compiled scalar kernels for the first-order analytic propagator.

All integrals in true longitude are evaluated through the eccentric anomaly
measured from the osculating perigee, which keeps them real, continuous over
any number of revolutions and free of cancellation near ``e = 0``.

State tuples are ``(a, p1, p2, q1, q2)``; longitudes are unwrapped.
"""

import math

import numpy as np
from numba import njit

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_PANEL = 0.5 * math.pi
PI = math.pi
TWO_PI = 2.0 * math.pi


@njit(cache=True)
def wrap_pi(x):
    w = (x + PI) - TWO_PI * math.floor((x + PI) / TWO_PI)
    if w <= 0.0:
        w += TWO_PI
    return w - PI


@njit(cache=True)
def _ecc_anomaly(phi, beta):
    # unwrapped: follows phi across revolutions
    return phi - 2.0 * math.atan2(beta * math.sin(phi), 1.0 + beta * math.cos(phi))


@njit(cache=True)
def integrals(p1, p2, l0, lf):
    """(I11, I12, I13, Ic2, Ic3, Is2, Is3) over [l0, lf]."""
    e = math.hypot(p1, p2)
    if e > 0.0:
        cw = p2 / e
        sw = p1 / e
        varpi = math.atan2(p1, p2)
    else:
        cw = 1.0
        sw = 0.0
        varpi = 0.0
    eta2 = 1.0 - e * e
    eta = math.sqrt(eta2)
    beta = e / (1.0 + eta)
    e0 = _ecc_anomaly(l0 - varpi, beta)
    ef = _ecc_anomaly(lf - varpi, beta)
    dE = ef - e0
    s0 = math.sin(e0)
    sf = math.sin(ef)
    # differences written to avoid cancellation for short arcs
    half = 0.5 * dE
    sh = math.sin(half)
    cm = math.cos(e0 + half)
    sm = math.sin(e0 + half)
    ds1 = 2.0 * cm * sh  # sin(Ef) - sin(E0)
    dc1 = -2.0 * sm * sh  # cos(Ef) - cos(E0)
    ds2 = 2.0 * math.cos(2.0 * e0 + dE) * math.sin(dE)  # sin(2Ef) - sin(2E0)
    dsq = sf * sf - s0 * s0
    eta3 = eta2 * eta
    eta5 = eta3 * eta2
    j1 = dE / eta
    j2 = (dE - e * ds1) / eta3
    j3 = (dE - 2.0 * e * ds1 + e * e * (0.5 * dE + 0.25 * ds2)) / eta5
    kc2 = (ds1 - e * dE) / eta3
    kc3 = ((1.0 + e * e) * ds1 - e * (0.5 * dE + 0.25 * ds2) - e * dE) / eta5
    ks2 = -dc1 / eta2
    ks3 = (-dc1 - 0.5 * e * dsq) / (eta2 * eta2)
    ic2 = cw * kc2 - sw * ks2
    ic3 = cw * kc3 - sw * ks3
    is2 = cw * ks2 + sw * kc2
    is3 = cw * ks3 + sw * kc3
    return j1, j2, j3, ic2, ic3, is2, is3


@njit(cache=True)
def first_order_terms(a, p1, p2, q1, q2, l0, lf, alpha, beta, mu):
    """First-order coefficients (a1, P11, P21, Q11, Q21) per unit acceleration."""
    i11, i12, i13, ic2, ic3, is2, is3 = integrals(p1, p2, l0, lf)
    h = math.sqrt(mu * a * (1.0 - p1 * p1 - p2 * p2))
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    cb = math.cos(beta)
    sb = math.sin(beta)
    k = h**4 / mu**3
    a1 = 2.0 * (h * a / mu) ** 2 * cb * (ca * (p2 * is2 - p1 * ic2) + sa * i11)
    p11 = k * (
        cb * (-ca * ic2 + sa * (p1 * i13 + is2 + is3))
        + sb * p2 * (-q1 * ic3 + q2 * is3)
    )
    p21 = k * (
        cb * (ca * is2 + sa * (p2 * i13 + ic2 + ic3))
        + sb * p1 * (q1 * ic3 - q2 * is3)
    )
    s2 = 0.5 * k * sb * (1.0 + q1 * q1 + q2 * q2)
    q11 = s2 * is3
    q21 = s2 * ic3
    return a1, p11, p21, q11, q21


@njit(cache=True)
def coast_time_from(a, p1, p2, l0, dl, mu):
    if dl == 0.0:
        return 0.0
    i12 = integrals(p1, p2, l0, l0 + dl)[1]
    h = math.sqrt(mu * a * (1.0 - p1 * p1 - p2 * p2))
    return h**3 / mu**2 * i12


@njit(cache=True)
def _time_first_order(a, p1, p2, q1, q2, l0, dl, alpha, beta, mu):
    # Integrates the first-order variation of dt/dL along the arc with
    # Gauss-Legendre panels; inner element variations are closed form.
    if dl == 0.0:
        return 0.0
    e2 = p1 * p1 + p2 * p2
    eta2 = 1.0 - e2
    h = math.sqrt(mu * a * eta2)
    t0c = h**3 / mu**2
    tnc = h**7 / mu**5
    sb = math.sin(beta)
    npan = int(math.ceil(dl / _PANEL))
    if npan < 1:
        npan = 1
    width = dl / npan
    total = 0.0
    for j in range(npan):
        lo = l0 + j * width
        for k in range(_GL_NODES.shape[0]):
            lk = lo + 0.5 * width * (_GL_NODES[k] + 1.0)
            wk = 0.5 * width * _GL_WEIGHTS[k]
            s = math.sin(lk)
            c = math.cos(lk)
            w = 1.0 + p1 * s + p2 * c
            a1, p11, p21, _, _ = first_order_terms(a, p1, p2, q1, q2, l0, lk, alpha, beta, mu)
            rel = 1.5 * a1 / a - 3.0 * (p1 * p11 + p2 * p21) / eta2 - 2.0 * (s * p11 + c * p21) / w
            f = t0c / (w * w) * rel
            if sb != 0.0:
                f -= sb * tnc * (q2 * s - q1 * c) / w**5
            total += wk * f
    return total


@njit(cache=True)
def propagate(a, p1, p2, q1, q2, l0, dl, eps, alpha, beta, mu):
    """Propagate over ``dl`` of longitude with constant thrust acceleration.

    Returns ``(a, p1, p2, q1, q2, dt)``.
    """
    dt0 = coast_time_from(a, p1, p2, l0, dl, mu)
    if eps == 0.0 or dl == 0.0:
        return a, p1, p2, q1, q2, dt0
    a1, p11, p21, q11, q21 = first_order_terms(a, p1, p2, q1, q2, l0, l0 + dl, alpha, beta, mu)
    t1 = _time_first_order(a, p1, p2, q1, q2, l0, dl, alpha, beta, mu)
    return (
        a + eps * a1,
        p1 + eps * p11,
        p2 + eps * p21,
        q1 + eps * q11,
        q2 + eps * q21,
        dt0 + eps * t1,
    )


@njit(cache=True)
def longitude_after(a, p1, p2, l0, dt, mu):
    """Longitude reached after coasting ``dt`` seconds from ``l0`` (Kepler's equation)."""
    e = math.hypot(p1, p2)
    varpi = math.atan2(p1, p2) if e > 0.0 else 0.0
    eta = math.sqrt(1.0 - e * e)
    beta = e / (1.0 + eta)
    n = math.sqrt(mu / a**3)
    E0 = _ecc_anomaly(l0 - varpi, beta)
    M = E0 - e * math.sin(E0) + n * dt
    E = M
    for _ in range(50):
        f = E - e * math.sin(E) - M
        d = f / (1.0 - e * math.cos(E))
        E -= d
        if abs(d) < 1e-15 * max(1.0, abs(E)):
            break
    # eccentric -> true anomaly, unwrapped consistently with E
    phi = E + 2.0 * math.atan2(beta * math.sin(E), 1.0 - beta * math.cos(E))
    return phi + varpi
