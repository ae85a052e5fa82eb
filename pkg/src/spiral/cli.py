"""Command-line front end: ``spiral <subcommand> ...``.

Times are in days at this surface and seconds inside the library.
Structured results are JSON, series are CSV; both are written atomically.
Failures exit non-zero with a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import glob
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from . import _io
from .catalog import CatalogError, load_catalog, paper_catalog, validate_scenario
from .deorbit import (
    DAY,
    HISTORY_HEADER as DEORBIT_HEADER,
    DeorbitControls,
    DeorbitSurrogate,
    GridSpec,
    SurrogateDomainError,
    build_surrogate,
    simulate_deorbit,
)
from .elements import Constants, EquinoctialState
from .optimize.pareto import ParetoFront, conv_rank
from .optimize.sequence import (
    LegCache,
    Scenario,
    SequencePlan,
    enumerate_orders,
    evaluate_sequence,
    pareto_optimize,
)
from .phasing import ECCENTRIC, QUASI_CIRCULAR, plan_couplets, sequence_phasing
from .propagator import ThrustSetting, propagate_first_order
from .shepherd import SpacecraftConfig
from .transfer import HISTORY_HEADER as TRANSFER_HEADER
from .transfer import BoundaryConditions, RendezvousOptions, simulate_transfer, solve_rendezvous

EXIT_ERROR = 1
EXIT_INFEASIBLE = 3


class CliError(Exception):
    def __init__(self, kind, message, code=EXIT_ERROR, **extra):
        super().__init__(message)
        self.kind = kind
        self.code = code
        self.extra = extra


def _floats(text, n=None, name="value"):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError("usage", f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise CliError("usage", f"{name}: expected {n} numbers, got {len(vals)}")
    return vals


# ----------------------------------------------------------------- context


class Context:
    """Spacecraft, constants and bounds assembled from flags and config file."""

    def __init__(self, args):
        doc = {}
        if getattr(args, "config", None):
            with open(args.config) as f:
                doc = validate_scenario(json.load(f))
        self.doc = doc
        self.constants = Constants.from_env(**doc.get("constants", {}))
        self.config = SpacecraftConfig(**doc.get("spacecraft", {}))
        self.seed = args.seed if args.seed is not None else doc.get("optimizer", {}).get("seed", 0)
        self.threads = args.threads

    def config_hash(self) -> str:
        blob = json.dumps([asdict(self.config), asdict(self.constants), self.doc], sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def catalog(self, args):
        if getattr(args, "catalog", None):
            return load_catalog(args.catalog)
        if getattr(args, "paper_scenario", False):
            return paper_catalog()
        raise CliError("usage", "--catalog FILE or --paper-scenario is required")

    def optimizer(self, args, key, default):
        v = getattr(args, key, None)
        return v if v is not None else self.doc.get("optimizer", {}).get(key, default)

    def scenario(self, args) -> Scenario:
        entries = self.catalog(args)
        dep = self.doc.get("departure", {})
        bounds = self.doc.get("bounds", {})
        sc = Scenario(
            {e.id: e.to_debris() for e in entries},
            departure_a=dep.get("a", 6628.16),
            departure_e=dep.get("e", 0.01),
            coplanar_with_first=dep.get("coplanar_with_first", True),
            config=self.config,
            constants=self.constants,
        )
        if "t_rv_days" in bounds:
            sc.t_rv_bounds = tuple(bounds["t_rv_days"])
        if "t_do_max_days" in bounds:
            sc.t_do_max = bounds["t_do_max_days"]
        sc.t_do_min.update(bounds.get("t_do_min_days", {}))
        return sc


# ------------------------------------------------------------- subcommands


def cmd_propagate(args, ctx):
    a, p1, p2, q1, q2, lon = _floats(args.state, 6, "--state")
    s0 = EquinoctialState(a, p1, p2, q1, q2, lon)
    thrust = ThrustSetting(args.eps, args.alpha, args.beta)
    s1 = propagate_first_order(s0, args.dl, thrust, ctx.constants)
    out = {"analytic": {"a": s1.a, "p1": s1.p1, "p2": s1.p2, "q1": s1.q1, "q2": s1.q2, "L": s1.longitude, "t": s1.epoch}}
    if args.oracle:
        from .oracle import constant_thrust, integrate_to_longitude

        ref = integrate_to_longitude(s0, constant_thrust(args.eps, args.alpha, args.beta), [lon + args.dl], constants=ctx.constants)
        r = ref.states[-1]
        out["oracle"] = {"a": r.a, "p1": r.p1, "p2": r.p2, "q1": r.q1, "q2": r.q2, "L": r.longitude, "t": r.epoch}
    print(json.dumps(out))


def _debris(ctx, args):
    for e in ctx.catalog(args):
        if e.id == args.debris:
            return e.to_debris()
    raise CliError("not_found", f"debris {args.debris!r} not in catalog")


def cmd_deorbit(args, ctx):
    deb = _debris(ctx, args)
    dla1, dlaf = _floats(args.controls, 2, "--controls")
    res = simulate_deorbit(deb, args.mibs0, DeorbitControls(dla1, dlaf, args.n_ref, args.n_max), ctx.config, ctx.constants, history=bool(args.history))
    doc = {"schema_version": 1, "kind": "deorbit_result", "debris": deb.id, **res.to_dict(), "tof_days": res.tof / DAY}
    if args.history:
        _io.write_csv(args.history, DEORBIT_HEADER, res.history, config_hash=ctx.config_hash())
    _emit(doc, args.out)
    if not res.converged:
        raise CliError("infeasible", f"de-orbit did not converge ({res.status})", EXIT_INFEASIBLE)


def cmd_surrogate_build(args, ctx):
    entries = ctx.catalog(args)
    wanted = set(args.debris or [e.id for e in entries])
    grid = GridSpec(n_m=args.n_m, n_a1=args.n_arc, n_af=args.n_arc)
    written = []
    for e in entries:
        if e.id not in wanted:
            continue
        sur = build_surrogate(e.to_debris(), ctx.config, ctx.constants, grid)
        path = os.path.join(args.out, f"surrogate_{e.id}.json")
        _io.write_json(path, sur.to_json())
        written.append(path)
    print(json.dumps({"written": written}))


def cmd_surrogate_query(args, ctx):
    sur = DeorbitSurrogate.load(args.surrogate)
    try:
        lo, hi = sur.tof_range(args.mibs0)
    except SurrogateDomainError as exc:
        raise CliError("infeasible", str(exc), EXIT_INFEASIBLE, status="infeasible",
                       variable="m_ibs0_kg", valid_range=list(exc.valid_range)) from None
    try:
        dv, a_f = sur.query(args.tof * DAY, args.mibs0)
    except SurrogateDomainError as exc:
        raise CliError("infeasible", str(exc), EXIT_INFEASIBLE, status="infeasible",
                       variable="tof_days", valid_range=[lo / DAY, hi / DAY]) from None
    print(json.dumps({"dv_kms": dv, "a_f_km": a_f, "tof_days": args.tof, "m_ibs0_kg": args.mibs0}))


def cmd_transfer(args, ctx):
    a0, e0 = _floats(args.from_, 2, "--from")
    af, ef, di = _floats(args.to, 3, "--to")
    bc = BoundaryConditions(a0, e0, af, ef, math.radians(di))
    tof = args.tof * DAY
    sol = solve_rendezvous(bc, tof, args.mibs0, ctx.config, ctx.constants, RendezvousOptions(n_multistart=args.multistart, seed=ctx.seed))
    doc = sol.to_dict()
    doc["tof_days"] = args.tof
    if args.history:
        run = simulate_transfer(bc, sol.controls, tof, args.mibs0, ctx.config, ctx.constants, history=True, strict=False)
        _io.write_csv(args.history, TRANSFER_HEADER, run.history, config_hash=ctx.config_hash(),
                      fmt=["%d"] + ["%.10g"] * 9)
    _emit(doc, args.out)
    if not sol.feasible:
        raise CliError("infeasible", "rendezvous constraints not met", EXIT_INFEASIBLE, residual=list(sol.constraint_residual))


def _load_surrogates(args, ctx, scenario):
    surs = {}
    for d in scenario.debris:
        path = os.path.join(args.surrogates, f"surrogate_{d}.json") if args.surrogates else None
        if path and os.path.exists(path):
            surs[d] = DeorbitSurrogate.load(path)
        elif args.build_missing:
            surs[d] = build_surrogate(scenario.debris[d], ctx.config, ctx.constants)
            if args.surrogates:
                _io.write_json(path, surs[d].to_json())
        else:
            raise CliError("not_found", f"no surrogate for debris {d} (use --surrogates DIR or --build-missing)")
    return surs


def _front_header(n_var):
    return "order,tof_days,dv_kms," + ",".join(f"x{k}" for k in range(1, n_var + 1))


def write_front_csv(path, front: ParetoFront, config_hash=""):
    rows = [[front.order, *f, *x] for f, x in zip(front.objectives, front.decisions)]
    n_var = front.decisions.shape[1] if len(front) else 10
    _io.write_csv(path, _front_header(n_var), rows, config_hash=config_hash,
                  comments=[f"diagnostics: {json.dumps(front.diagnostics, default=str)}"])


def read_front_csv(path) -> ParetoFront:
    header, rows = _io.read_csv(path)
    if header[:3] != ["order", "tof_days", "dv_kms"]:
        raise CliError("format", f"{path}: not a front CSV")
    order = rows[0][0] if rows else os.path.splitext(os.path.basename(path))[0].replace("front_", "")
    f = np.array([[float(r[1]), float(r[2])] for r in rows]).reshape(-1, 2)
    x = np.array([[float(v) for v in r[3:]] for r in rows]) if rows else np.zeros((0, 0))
    return ParetoFront(order, f, x)


def cmd_sequence(args, ctx):
    sc = ctx.scenario(args)
    surs = _load_surrogates(args, ctx, sc)
    if args.evaluate:
        plan = SequencePlan(tuple(args.order), _floats(args.evaluate, 2 * len(args.order), "--evaluate"))
        res = evaluate_sequence(plan, sc, surs)
        doc = {
            "schema_version": 1, "kind": "sequence_result", "order": plan.label,
            "durations_days": plan.durations, "tof_tot_days": res.tof_tot, "dv_tot_kms": res.dv_tot,
            "feasible": res.feasible, "violation": res.violation,
            "phases": [asdict(p) for p in res.phases],
        }
        _emit(doc, args.out)
        if not res.feasible:
            raise CliError("infeasible", "plan infeasible", EXIT_INFEASIBLE)
        return
    orders = ["".join(map(str, o)) for o in enumerate_orders(len(sc.debris))] if args.all_orders else [args.order]
    if not orders[0]:
        raise CliError("usage", "--order or --all-orders is required")
    ids = sorted(sc.debris)
    cache = LegCache()
    for label in orders:
        order = tuple(ids[int(c) - 1] for c in label) if args.all_orders else tuple(label)
        front = pareto_optimize(order, sc, surs, ctx.optimizer(args, "budget", 2000),
                                ctx.optimizer(args, "population", 24), ctx.seed, cache)
        path = args.out if (args.out and not args.all_orders) else os.path.join(args.out_dir, f"front_{front.order}.csv")
        write_front_csv(path, front, ctx.config_hash())
        print(json.dumps({"order": front.order, "points": len(front), "path": path, **front.diagnostics}, default=str))


def cmd_rank(args, ctx):
    paths = sorted(glob.glob(os.path.join(args.fronts, "*.csv")))
    if not paths:
        raise CliError("not_found", f"no front CSV files in {args.fronts}")
    fronts = {}
    for p in paths:
        fr = read_front_csv(p)
        fronts[fr.order] = fr
    ranking = conv_rank(fronts)
    rows = [[r.rank, r.order, r.conv] for r in ranking]
    if args.out:
        _io.write_csv(args.out, "rank,order,conv", rows, config_hash=ctx.config_hash())
    else:
        print("rank,order,conv")
        for r in rows:
            print(f"{r[0]},{r[1]},{r[2]:.6g}")


def cmd_phasing(args, ctx):
    with open(args.result) as f:
        doc = json.load(f)
    if doc.get("kind") != "sequence_result":
        raise CliError("format", "phasing needs a sequence_result JSON (sequence --evaluate)")
    phases = doc["phases"]
    strategy = args.strategy
    if strategy == "auto":
        e_max = max((p["e"] for p in phases if p["kind"] == "deorbit"), default=0.0)
        strategy = QUASI_CIRCULAR if e_max <= 0.02 else ECCENTRIC
    rep = sequence_phasing(plan_couplets(phases, ctx.constants), doc["tof_tot_days"] * DAY, strategy, ctx.constants)
    _emit({"schema_version": 1, "kind": "phasing_report", **rep.to_dict()}, args.out)


def _emit(doc, path):
    if path:
        _io.write_json(path, doc)
    else:
        print(_io.dumps(doc))


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON (spacecraft, constants, departure, optimizer, bounds)")
    common.add_argument("--seed", type=int, help="RNG seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker cap (computation runs serially)")

    p = argparse.ArgumentParser(prog="spiral", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("propagate", parents=[common], help="one analytic thrust arc")
    s.add_argument("--state", required=True, help="a,P1,P2,Q1,Q2,L (km, rad)")
    s.add_argument("--dl", type=float, required=True, help="longitude span [rad]")
    s.add_argument("--eps", type=float, required=True, help="acceleration [km/s^2]")
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--oracle", action="store_true", help="add numerically integrated reference")
    s.set_defaults(func=cmd_propagate)

    def catalog_flags(s):
        s.add_argument("--catalog", help="debris catalog JSON")
        s.add_argument("--paper-scenario", action="store_true", help="bundled Table-3 catalog and default spacecraft")

    s = sub.add_parser("deorbit", parents=[common], help="simulate one de-orbit")
    catalog_flags(s)
    s.add_argument("--debris", required=True)
    s.add_argument("--mibs0", type=float, required=True)
    s.add_argument("--controls", required=True, help="dla1,dlaf [rad]")
    s.add_argument("--n-ref", type=int, default=1200)
    s.add_argument("--n-max", type=int, default=1200)
    s.add_argument("--out")
    s.add_argument("--history", help="per-orbit CSV")
    s.set_defaults(func=cmd_deorbit)

    s = sub.add_parser("surrogate", help="de-orbit surrogates")
    ss = s.add_subparsers(dest="action", required=True)
    b = ss.add_parser("build", parents=[common])
    catalog_flags(b)
    b.add_argument("--out", required=True, help="output directory")
    b.add_argument("--debris", nargs="*")
    b.add_argument("--n-m", type=int, default=8)
    b.add_argument("--n-arc", type=int, default=50)
    b.set_defaults(func=cmd_surrogate_build)
    q = ss.add_parser("query", parents=[common])
    q.add_argument("--surrogate", required=True, help="surrogate JSON")
    q.add_argument("--tof", type=float, required=True, help="[days]")
    q.add_argument("--mibs0", type=float, required=True)
    q.set_defaults(func=cmd_surrogate_query)

    s = sub.add_parser("transfer", parents=[common], help="solve one rendezvous spiral")
    s.add_argument("--from", dest="from_", required=True, help="a,e")
    s.add_argument("--to", required=True, help="a,e,di_deg")
    s.add_argument("--tof", type=float, required=True, help="[days]")
    s.add_argument("--mibs0", type=float, default=1000.0)
    s.add_argument("--multistart", type=int, default=5)
    s.add_argument("--out")
    s.add_argument("--history", help="per-revolution CSV")
    s.set_defaults(func=cmd_transfer)

    s = sub.add_parser("sequence", parents=[common], help="Pareto search or single plan evaluation")
    catalog_flags(s)
    s.add_argument("--order", default="", help="debris ids in visiting order, e.g. 13452")
    s.add_argument("--all-orders", action="store_true")
    s.add_argument("--evaluate", help="durations x1..x2n [days]; evaluates one plan")
    s.add_argument("--budget", type=int, help="evaluations per order (default 2000)")
    s.add_argument("--population", type=int, help="default 24")
    s.add_argument("--surrogates", help="directory of surrogate_<id>.json")
    s.add_argument("--build-missing", action="store_true")
    s.add_argument("--out")
    s.add_argument("--out-dir", default=".")
    s.set_defaults(func=cmd_sequence)

    s = sub.add_parser("rank", parents=[common], help="Conv ranking of fronts")
    s.add_argument("--fronts", required=True, help="directory of front CSVs")
    s.add_argument("--out")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("phasing", parents=[common], help="worst-case phasing delay of a plan")
    s.add_argument("--result", required=True, help="sequence_result JSON")
    s.add_argument("--strategy", choices=["auto", QUASI_CIRCULAR, ECCENTRIC], default="auto")
    s.add_argument("--out")
    s.set_defaults(func=cmd_phasing)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", 1) < 1:
            raise CliError("usage", "--threads must be >= 1")
        ctx = Context(args)
        args.func(args, ctx)
        return 0
    except CliError as exc:
        err = {"error": exc.kind, "message": str(exc), **exc.extra}
        code = exc.code
    except (CatalogError, ValueError, KeyError, FileNotFoundError, RuntimeError, ArithmeticError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        for k in ("index", "field"):
            if getattr(exc, k, None) is not None:
                err[k] = getattr(exc, k)
        code = EXIT_ERROR
    sys.stderr.write(json.dumps(err, default=str) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
