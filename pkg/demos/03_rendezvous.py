"""Solve one low-thrust rendezvous: from a de-orbit release orbit up to the
next target, with and without a 10 degree plane change, in 70 days.

Each solve takes a few minutes on one core.
"""

import math

from spiral.deorbit import DAY
from spiral.transfer import BoundaryConditions, solve_rendezvous

for di in (0.0, 10.0):
    bc = BoundaryConditions(6892.24, 0.031, 7478.16, 0.0, math.radians(di))
    sol = solve_rendezvous(bc, 70 * DAY, 1000.0)
    c = sol.controls
    print(f"di={di:4.1f} deg  feasible={sol.feasible}  dv={sol.dv:.4f} km/s  revs={sol.n_revolutions}  "
          f"beta_a={math.degrees(c.beta_a):.0f} deg  beta_p={math.degrees(c.beta_p):.0f} deg")
