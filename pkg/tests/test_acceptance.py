"""Acceptance suite: one PASS/FAIL line per criterion at its stated tolerance.

Reference values marked "published" are the figures of the source study;
everything else is checked against an independent oracle (quadrature,
numerical integration, fresh simulations or hand computation).
"""

import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from spiral.catalog import paper_catalog
from spiral.deorbit import DAY, DeorbitControls, GridSpec, build_surrogate, build_surrogate_grid, minimum_deorbit_time, simulate_deorbit
from spiral.elements import EquinoctialState, KeplerianElements, equinoctial_to_kep, kep_to_equinoctial, relative_inclination
from spiral.oracle import constant_thrust, integrate_to_longitude
from spiral.optimize.moea import MoeaOptions
from spiral.optimize.pareto import ParetoArchive, ParetoFront, conv_rank, dominates
from spiral.optimize.sequence import LegCache, Scenario, SequencePlan, evaluate_sequence, pareto_optimize
from spiral.phasing import ECCENTRIC, QUASI_CIRCULAR, sequence_phasing
from spiral.propagator import ThrustSetting, kepler_integrals, propagate_first_order
from spiral.shepherd import MassState, PropellantExhausted, SpacecraftConfig, beam_acceleration, update_mass_shepherding
from spiral.transfer import BoundaryConditions, solve_rendezvous

R = math.radians

# ---------------------------------------------------------------- criterion 1

TABLE4 = {
    ("1", "2"): 2.16, ("1", "3"): 1.47, ("1", "4"): 1.95, ("1", "5"): 1.00, ("2", "3"): 3.63,
    ("2", "4"): 2.65, ("2", "5"): 2.00, ("3", "4"): 2.52, ("3", "5"): 2.00, ("4", "5"): 1.00,
}


def test_c1_relative_inclination_table(report):
    cat = {e.id: e.to_debris() for e in paper_catalog()}
    worst = 0.0
    for (i, j), published in TABLE4.items():
        d = math.degrees(relative_inclination((cat[i].i, cat[i].raan), (cat[j].i, cat[j].raan)))
        worst = max(worst, abs(d - published))
    ok = report(1, worst <= 0.01, f"10 pairwise Δi, worst |error| {worst:.4f} deg (tol 0.01)")
    assert ok


# ---------------------------------------------------------------- criterion 2


def test_c2_beam_acceleration(report):
    cfg = SpacecraftConfig()
    push = beam_acceleration(cfg, MassState(1000.0, 800.0))
    solo = beam_acceleration(cfg, MassState(1000.0))
    ok = f"{push:.4g}" == "1.923e-07" and f"{solo:.4g}" == "5e-07"
    report(2, ok, f"shepherding {push:.4g} km/s^2 (1.923e-7), solo {solo:.4g} km/s^2 (5e-7)")
    assert ok


# ---------------------------------------------------------------- criterion 3


def _quadrature_set(p1, p2, l0, lf):
    w = lambda x: 1.0 + p1 * math.sin(x) + p2 * math.cos(x)
    # split at quarter turns so every panel is smooth and short
    edges = np.append(np.arange(l0, lf, 0.5 * math.pi), lf)
    fns = (
        lambda x: w(x) ** -1, lambda x: w(x) ** -2, lambda x: w(x) ** -3,
        lambda x: math.cos(x) * w(x) ** -2, lambda x: math.cos(x) * w(x) ** -3,
        lambda x: math.sin(x) * w(x) ** -2, lambda x: math.sin(x) * w(x) ** -3,
    )
    return np.array([
        sum(quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0] for a, b in zip(edges[:-1], edges[1:]) if b > a)
        for f in fns
    ])


def test_c3_closed_form_integrals(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(500):
        e = rng.uniform(0.0, 0.5)
        varpi = rng.uniform(-math.pi, math.pi)
        p1, p2 = e * math.sin(varpi), e * math.cos(varpi)
        l0 = rng.uniform(-2 * math.pi, 2 * math.pi)
        lf = l0 + rng.uniform(0.0, 4 * math.pi)
        s = kepler_integrals(p1, p2, l0, lf)
        closed = np.array([s.i11, s.i12, s.i13, s.ic2, s.ic3, s.is2, s.is3])
        worst = max(worst, float(np.max(np.abs(closed - _quadrature_set(p1, p2, l0, lf)))))
    ok = report(3, worst <= 1e-9, f"7 integrals x 500 samples, worst |error| {worst:.2e} (tol 1e-9)")
    assert ok


# ---------------------------------------------------------------- criterion 4


def test_c4_first_order_convergence(report):
    # a generic start longitude; at L0 = 0 the second-order P2 error cancels
    s0 = EquinoctialState(7128.16, 0.0, 0.0, 0.0, 0.0, 1.0)
    errors = []
    for eps in (2e-7, 1e-7):
        fpet = propagate_first_order(s0, 2 * math.pi, ThrustSetting(eps, 0.5 * math.pi, 0.0))
        ref = integrate_to_longitude(s0, constant_thrust(eps, 0.5 * math.pi, 0.0), [s0.longitude + 2 * math.pi]).states[-1]
        errors.append([abs(fpet.a - ref.a), abs(fpet.p1 - ref.p1), abs(fpet.p2 - ref.p2), abs(fpet.epoch - ref.epoch)])
    ratios = np.array(errors[0]) / np.array(errors[1])
    ok = bool(np.all((ratios >= 3.2) & (ratios <= 4.8)))
    report(4, ok, "error ratios a/P1/P2/t = " + "/".join(f"{r:.2f}" for r in ratios) + " (range [3.2, 4.8])")
    assert ok


# ---------------------------------------------------------------- criterion 5


@pytest.mark.slow
@pytest.mark.parametrize(
    "di_deg,dv_pub,tol,revs_pub",
    [(0.0, 0.301, 0.05, 1001), (10.0, 1.480, 0.07, None)],
    ids=["coplanar", "plane-change"],
)
def test_c5_table2_transfer(report, di_deg, dv_pub, tol, revs_pub):
    bc = BoundaryConditions(6892.24, 0.031, 7478.16, 0.0, R(di_deg))
    t0 = time.perf_counter()
    sol = solve_rendezvous(bc, 70 * DAY, 1000.0)
    elapsed = time.perf_counter() - t0
    rel = abs(sol.dv - dv_pub) / dv_pub
    ok = sol.feasible and rel <= tol
    detail = f"Δi={di_deg:g} deg: ΔV {sol.dv:.4f} km/s vs {dv_pub} (±{tol:.0%}, err {rel:.1%})"
    if revs_pub is not None:
        ok = ok and abs(sol.n_revolutions - revs_pub) <= 25
        detail += f", {sol.n_revolutions} revs vs {revs_pub} ± 25"
    report("5", ok, detail + f", {elapsed:.0f} s")
    assert ok


# ---------------------------------------------------------------- criterion 6

TABLE3_DAYS = {"1": 2.67, "2": 3.36, "3": 3.68, "4": 11.12, "5": 12.25}


def test_c6_minimum_deorbit_times(report, paper_debris):
    got = {k: minimum_deorbit_time(paper_debris[k], 350.0) / DAY for k in TABLE3_DAYS}
    rel = {k: abs(got[k] - v) / v for k, v in TABLE3_DAYS.items()}
    ok = max(rel.values()) <= 0.15
    report(6, ok, ", ".join(f"{k}: {got[k]:.2f} d ({TABLE3_DAYS[k]})" for k in got) + f"; worst {max(rel.values()):.1%} (tol 15%)")
    assert ok


# ---------------------------------------------------------------- criterion 7


def _resimulated_minimum(debris, tof, m_ibs0, n=50, refine=7):
    """Fresh minimum-ΔV de-orbit at the exact mass with duration <= tof."""
    g = build_surrogate_grid(debris, grid=GridSpec(m_min=m_ibs0, m_max=m_ibs0, n_m=1, n_a1=n, n_af=n))
    cells = g.cells[0].reshape(-1, 7)
    ok = (cells[:, 6] == 0) & (cells[:, 1] <= tof)
    if not ok.any():
        return math.inf
    k = np.flatnonzero(ok)[np.argmin(cells[ok, 0])]
    best = float(cells[k, 0])
    i, j = divmod(int(k), n)
    h = math.pi / (n - 1)
    # local scan around the best cell
    for x, y in itertools.product(
        np.linspace(max(0.0, g.la1_axis[i] - h), min(math.pi, g.la1_axis[i] + h), refine),
        np.linspace(max(0.0, g.laf_axis[j] - h), min(math.pi, g.laf_axis[j] + h), refine),
    ):
        r = simulate_deorbit(debris, m_ibs0, DeorbitControls(x, y))
        if r.converged and r.tof <= tof:
            best = min(best, r.dv)
    return best


@pytest.mark.slow
def test_c7_surrogate_fidelity(report, paper_debris, surrogates):
    # build time of one fresh default grid
    t0 = time.perf_counter()
    sur = build_surrogate(paper_debris["1"])
    build_s = time.perf_counter() - t0
    surrogates.setdefault("1", sur)

    # node queries return the envelope values themselves
    node_err = 0.0
    for sl in sur.slices:
        for t, dv in zip(sl.tof, sl.dv):
            node_err = max(node_err, abs(sur.query(t, sl.m_ibs0)[0] - dv))

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        k = str(rng.integers(1, 6))
        s = surrogates[k]
        m = rng.uniform(350.0, 1000.0)
        lo, hi = s.tof_range(m)
        t = rng.uniform(lo, hi)
        ref = _resimulated_minimum(paper_debris[k], t, m)
        worst = max(worst, abs(s.query(t, m)[0] - ref) / ref)
    ok = build_s < 600.0 and node_err == 0.0 and worst <= 0.05
    report(7, ok, f"build {build_s:.0f} s (< 600), node error {node_err:.1e}, 50 random queries worst {worst:.2%} (tol 5%)")
    assert ok


# ---------------------------------------------------------------- criterion 8

TABLE8_X = [5.0, 22.06, 88.10, 25.96, 66.71, 34.33, 55.89, 30.77, 56.98, 33.99]


@pytest.mark.slow
def test_c8a_table8_plan(report, paper_debris, surrogates):
    sc = Scenario(paper_debris)
    r = evaluate_sequence(SequencePlan("13452", TABLE8_X), sc, surrogates.subset("12345"))
    rel = abs(r.dv_tot - 1.98) / 1.98
    ok = r.feasible and rel <= 0.15
    report("8a", ok, f"sequence 13452 ΔV_Tot {r.dv_tot:.4f} km/s vs 1.98 (err {rel:.1%}, tol 15%), ToF {r.tof_tot:.2f} d")
    assert ok


@pytest.fixture(scope="module")
def front_13(paper_debris, surrogates):
    sc = Scenario({k: paper_debris[k] for k in "13"})
    sur = surrogates.subset("13")
    consistent = []
    t0 = time.perf_counter()
    fr = pareto_optimize(("1", "3"), sc, sur, budget=2000, population=24, seed=0, cache=LegCache(),
                         on_insert=lambda arc: consistent.append(arc.front().is_consistent()))
    return sc, fr, time.perf_counter() - t0, all(consistent)


def _pairwise_non_dominated(f):
    return not any(dominates(f[i], f[j]) for i in range(len(f)) for j in range(len(f)) if i != j)


@pytest.mark.slow
def test_c8b_front_and_runtime(report, front_13):
    sc, fr, elapsed, consistent = front_13
    ok = len(fr) > 0 and consistent and _pairwise_non_dominated(fr.objectives) and elapsed < 1800.0
    report("8b", ok, f"{{1,3}} budget 2000: {len(fr)} points, archive non-dominated after every insertion: "
           f"{consistent}, runtime {elapsed / 60:.1f} min (< 30)")
    assert ok


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="a 5-day 1->3 rendezvous and a 350 kg de-orbit time are not reachable "
                                       "at the sequence's ~1000 kg; see decisions ledger")
def test_c8b_min_tof_extreme_at_lower_bounds(report, front_13):
    sc, fr, _, _ = front_13
    lo, hi = sc.bounds(("1", "3"))
    # polynomial mutation moves a variable by about span / (eta_m + 1)
    tol = (hi - lo) / (MoeaOptions().eta_m + 1.0)
    x = fr.decisions[np.argmin(fr.objectives[:, 0])]
    ok = bool(np.all(np.abs(x - lo) <= tol))
    report("8b", ok, f"min-ToF extreme {fr.objectives[:, 0].min():.2f} d vs lower-bound sum {lo.sum():.2f} d; "
           "durations " + ", ".join(f"{v:.2f}" for v in x) + " vs bounds " + ", ".join(f"{v:.2f}±{t:.2f}" for v, t in zip(lo, tol)))
    assert ok


# ---------------------------------------------------------------- criterion 9


def test_c9_conv_metric(report):
    best = ParetoFront("13452", [[96.35, 1.98], [120.0, 1.6], [200.0, 1.4]])
    other = ParetoFront("12345", [[110.0, 2.3], [210.0, 1.7]])
    conv_zero = {r.order: r.conv for r in conv_rank({"13452": best, "12345": other})}["13452"]

    a = ParetoFront("A", [[0.0, 10.0], [10.0, 0.0]])
    b = ParetoFront("B", [[5.0, 5.0]])
    c = ParetoFront("C", [[10.0, 10.0], [12.0, 2.0]])
    # global front {(0,10), (5,5), (10,0)}, ranges 10 and 10; C's points
    # are nearest to (5,5) and (10,0) at normalised distances below
    hand = 100.0 * (math.hypot(0.5, 0.5) + math.hypot(0.2, 0.2)) / 2.0
    ranking = conv_rank({"A": a, "B": b, "C": c})
    conv = {r.order: r.conv for r in ranking}
    ok = conv_zero == 0.0 and abs(conv["C"] - hand) <= 1e-9 and conv["A"] == conv["B"] == 0.0 and ranking[-1].order == "C"
    report(9, ok, f"Conv(global front) = {conv_zero}, three-front Conv(C) = {conv['C']:.12f} vs hand {hand:.12f}")
    assert ok


# ---------------------------------------------------------------- criterion 10

TABLE8_COUPLETS = [
    (6828.16, 6678.16, 6978.16), (6978.16, 6678.16, 7478.16),
    (7478.16, 6678.16, 7178.16), (7178.16, 6678.16, 7128.16),
]


def test_c10_phasing_bounds(report):
    quasi = sequence_phasing(TABLE8_COUPLETS, 96.35 * DAY, QUASI_CIRCULAR)
    ecc = sequence_phasing(TABLE8_COUPLETS, 419.79 * DAY, ECCENTRIC)
    apsidal = quasi.t_wait_di / DAY
    within = lambda v, ref: 0.5 * ref <= v <= 1.5 * ref
    ok = (within(apsidal, 0.14) and within(quasi.total / DAY, 2.82) and within(ecc.total / DAY, 4.72)
          and quasi.fraction_of_nominal < 0.05 and ecc.fraction_of_nominal < 0.05)
    report(10, ok, f"apsidal {apsidal:.3f} d (0.14); quasi-circular {quasi.total / DAY:.2f} d (2.82), "
           f"{quasi.fraction_of_nominal:.2%}; eccentric {ecc.total / DAY:.2f} d (4.72), {ecc.fraction_of_nominal:.2%}")
    assert ok


# ---------------------------------------------------------------- criterion 11

_points = st.lists(st.tuples(st.floats(0, 100), st.floats(0, 5)), min_size=1, max_size=40)


@settings(max_examples=200, deadline=None)
@given(_points)
def _archive_property(pts):
    arc = ParetoArchive()
    for k, p in enumerate(pts):
        arc.insert(p, [k])
        assert _pairwise_non_dominated(arc.f)


@settings(max_examples=200, deadline=None)
@given(st.floats(350.0, 1000.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def _envelope_property(sur, m, u, v):
    lo, hi = sur.tof_range(m)
    t1, t2 = sorted((lo + u * (hi - lo), lo + v * (hi - lo)))
    assert sur.query(t2, m)[0] <= sur.query(t1, m)[0] + 1e-15


@settings(max_examples=200, deadline=None)
@given(st.floats(250.0, 1000.0), st.floats(0.0, 800.0), st.floats(0.0, 1e7))
def _mass_property(m, m_debr, t):
    cfg = SpacecraftConfig()
    try:
        m1 = update_mass_shepherding(MassState(m, m_debr), beam_acceleration(cfg, MassState(m, m_debr)), t, cfg)
    except PropellantExhausted:
        return
    assert cfg.m_dry <= m1 <= m


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-9, 1e-6), st.floats(-math.pi, math.pi), st.floats(0.0, 4 * math.pi),
       st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(0.0, 0.3))
def _plane_property(eps, alpha, dl, q1, q2, e):
    s = EquinoctialState(7000.0, 0.6 * e, 0.8 * e, q1, q2, 0.7)
    out = propagate_first_order(s, dl, ThrustSetting(eps, alpha, 0.0))
    assert out.q1 == q1 and out.q2 == q2


@settings(max_examples=200, deadline=None)
@given(st.floats(6600.0, 50000.0), st.floats(0.0, 0.9), st.floats(0.0, 3.0),
       st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def _round_trip_property(a, e, i, raan, argp, theta):
    s = kep_to_equinoctial(KeplerianElements(a, e, i, raan, argp, theta))
    back = kep_to_equinoctial(equinoctial_to_kep(s))
    np.testing.assert_allclose(back.as_array(), s.as_array(), rtol=1e-12, atol=1e-9)


def test_c11_property_suite(report, paper_debris):
    sur = build_surrogate(paper_debris["2"], grid=GridSpec(n_m=4, n_a1=20, n_af=20))
    t0 = time.perf_counter()
    checks = {
        "archive non-domination": _archive_property,
        "envelope monotonicity": lambda: _envelope_property(sur),
        "mass monotonicity": _mass_property,
        "Q1/Q2 invariance at beta=0": _plane_property,
        "element round trip": _round_trip_property,
    }
    failed = []
    for name, check in checks.items():
        try:
            check()
        except AssertionError:
            failed.append(name)
    elapsed = time.perf_counter() - t0
    ok = not failed and elapsed < 300.0
    report(11, ok, f"{len(checks) - len(failed)}/{len(checks)} properties hold over 200 examples each, {elapsed:.0f} s (< 300)"
           + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert ok
