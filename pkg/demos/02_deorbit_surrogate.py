"""De-orbit debris 1 of the reference scenario, then build its surrogate.

The surrogate maps (de-orbit time, initial shepherd mass) to the cheapest
de-orbit found on a grid of arc-length schedules.
"""

import math

from spiral.catalog import paper_catalog
from spiral.deorbit import DAY, DeorbitControls, GridSpec, build_surrogate, simulate_deorbit

debris = paper_catalog()[0].to_debris()

full = simulate_deorbit(debris, 1000.0, DeorbitControls(math.pi, math.pi))
print(f"continuous thrust: {full.tof / DAY:.2f} d, {full.dv:.4f} km/s, {full.n_orbits} orbits")

# a coarse grid keeps this demo quick; the default is 8 x 50 x 50
sur = build_surrogate(debris, grid=GridSpec(n_m=4, n_a1=20, n_af=20))
lo, hi = sur.tof_range(900.0)
print(f"at 900 kg the surrogate covers {lo / DAY:.2f} to {hi / DAY:.2f} d")
for days in (5, 10, 20, 40):
    dv, a_f = sur.query(days * DAY, 900.0)
    print(f"  {days:>3} d -> {dv:.4f} km/s, released at a = {a_f:.1f} km")
