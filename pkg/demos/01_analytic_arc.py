"""Fly one revolution of transverse thrust with the analytic propagator
and compare it against direct numerical integration of the Gauss equations.

Halving the acceleration should cut the error by about four, the signature
of a first-order expansion.
"""

import math

from spiral.elements import EquinoctialState
from spiral.oracle import constant_thrust, integrate_to_longitude
from spiral.propagator import ThrustSetting, propagate_first_order

start = EquinoctialState(7128.16, 0.0, 0.0, 0.0, 0.0, 1.0)

for eps in (2e-7, 1e-7):
    fast = propagate_first_order(start, 2 * math.pi, ThrustSetting(eps, math.pi / 2, 0.0))
    ref = integrate_to_longitude(start, constant_thrust(eps, math.pi / 2, 0.0), [start.longitude + 2 * math.pi]).states[-1]
    print(f"eps={eps:.0e}  da={fast.a - start.a:+.4f} km  error a={abs(fast.a - ref.a):.2e} km  "
          f"t={abs(fast.epoch - ref.epoch):.2e} s")
