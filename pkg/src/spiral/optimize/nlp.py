"""Equality-constrained, bound-constrained NLP by augmented Lagrangian.

The outer loop updates multipliers and the penalty weight; each inner
problem is a bound-constrained quasi-Newton solve (L-BFGS-B). Derivatives
come from central finite differences on the unit-box scaled variables, with
objective and constraints evaluated together because in this code base they
always come out of the same trajectory simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize


@dataclass
class NlpProblem:
    """``min f(x)  s.t.  c(x) / scale = 0,  lower <= x <= upper``.

    ``evaluate`` returns ``(f, c)`` in one call. ``constraint_scale`` divides
    the raw residuals before they enter the solver.
    """

    evaluate: Callable[[np.ndarray], tuple[float, np.ndarray]]
    lower: np.ndarray
    upper: np.ndarray
    constraint_scale: np.ndarray | None = None

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise ValueError("bound arrays differ in shape")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound above upper bound")

    @classmethod
    def from_functions(cls, objective, equality_constraints, lower, upper, constraint_scale=None):
        def evaluate(x):
            return objective(x), np.atleast_1d(equality_constraints(x))

        return cls(evaluate, lower, upper, constraint_scale)


@dataclass
class NlpOptions:
    max_outer: int = 50
    # on scaled residuals; a scalar or one value per constraint
    feas_tol: float | np.ndarray = 1e-6
    opt_tol: float = 1e-8
    max_inner: int = 60
    # L-BFGS-B stopping tolerances of each inner solve
    inner_ftol: float = 1e-12
    inner_gtol: float = 1e-9
    fd_step: float = 1e-6
    # one-sided differences halve the cost of each gradient
    fd_central: bool = True
    rho0: float = 1e3
    rho_max: float = 1e9
    # give up early once this many outer iterations pass without reducing
    # the constraint violation by 1 %; None runs all max_outer iterations
    stall_limit: int | None = None


@dataclass
class NlpResult:
    x: np.ndarray
    objective: float
    residuals: np.ndarray  # scaled
    status: str  # "converged" | "infeasible"
    n_evaluations: int = 0
    history: list = field(default_factory=list, repr=False)

    @property
    def feasible(self) -> bool:
        return self.status == "converged"


class _Evaluator:
    """Caches (f, c) and counts calls; works in unit-box coordinates."""

    def __init__(self, problem: NlpProblem):
        self.p = problem
        self.free = problem.upper > problem.lower
        self.span = np.where(self.free, problem.upper - problem.lower, 0.0)
        self.n = 0
        self._cache: dict[bytes, tuple[float, np.ndarray]] = {}

    def to_x(self, z):
        return self.p.lower + self.span * z

    def __call__(self, z):
        z = np.clip(z, 0.0, 1.0)
        key = z.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        f, c = self.p.evaluate(self.to_x(z))
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if self.p.constraint_scale is not None:
            c = c / self.p.constraint_scale
        self.n += 1
        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[key] = (float(f), c)
        return float(f), c

    def jacobian(self, z, h, central=True):
        f0, c0 = self(z)
        gf = np.zeros(z.size)
        jc = np.zeros((c0.size, z.size))
        for k in np.nonzero(self.free)[0]:
            zp = z.copy()
            zm = z.copy()
            if central:
                zp[k] = min(1.0, z[k] + h)
                zm[k] = max(0.0, z[k] - h)
            elif z[k] + h <= 1.0:
                zp[k] = z[k] + h
            else:
                zm[k] = z[k] - h
            d = zp[k] - zm[k]
            if d == 0.0:
                continue
            fp, cp = (f0, c0) if zp[k] == z[k] else self(zp)
            fm, cm = (f0, c0) if zm[k] == z[k] else self(zm)
            gf[k] = (fp - fm) / d
            jc[:, k] = (cp - cm) / d
        return f0, c0, gf, jc


def minimize_constrained(problem: NlpProblem, x0, opts: NlpOptions | None = None) -> NlpResult:
    """Augmented-Lagrangian solve; returns the best feasible iterate if any.

    Otherwise the iterate with the smallest residual norm is returned with
    ``status="infeasible"`` once ``opts.max_outer`` outer iterations are spent.
    """
    opts = opts or NlpOptions()
    ev = _Evaluator(problem)
    x0 = np.asarray(x0, dtype=float)
    if np.any(x0 < problem.lower - 1e-12) or np.any(x0 > problem.upper + 1e-12):
        raise ValueError("x0 outside bounds")
    z = np.where(ev.free, (x0 - problem.lower) / np.where(ev.free, ev.span, 1.0), 0.0)
    z = np.clip(z, 0.0, 1.0)
    box = [(0.0, 1.0) if free else (0.0, 0.0) for free in ev.free]
    tol = np.asarray(opts.feas_tol, dtype=float)
    f, c = ev(z)
    lam = np.zeros_like(c)
    rho = opts.rho0
    best_feas: tuple[float, np.ndarray, np.ndarray] | None = None
    history = []
    eta = 0.25 / rho**0.1
    prev_f = None

    def violation(c):
        # residual measured in multiples of the tolerance
        return float(np.max(np.abs(c) / tol)) if c.size else 0.0

    best_res = (violation(c), z.copy(), f, c)

    def consider(z, f, c):
        nonlocal best_feas, best_res
        r = violation(c)
        if r <= 1.0 and (best_feas is None or f < best_feas[0]):
            best_feas = (f, z.copy(), c.copy())
        if r < best_res[0]:
            best_res = (r, z.copy(), f, c.copy())

    consider(z, f, c)
    stalled = 0
    for outer in range(opts.max_outer):
        res_before = best_res[0]

        def lagr(zz, lam=lam, rho=rho):
            f0, c0, gf, jc = ev.jacobian(zz, opts.fd_step, opts.fd_central)
            val = f0 + lam @ c0 + 0.5 * rho * (c0 @ c0)
            grad = gf + jc.T @ (lam + rho * c0)
            return val, grad

        res = minimize(
            lagr, z, jac=True, method="L-BFGS-B", bounds=box,
            options={"maxiter": opts.max_inner, "ftol": opts.inner_ftol, "gtol": opts.inner_gtol},
        )
        z = np.clip(res.x, 0.0, 1.0)
        f, c = ev(z)
        consider(z, f, c)
        cn = float(np.max(np.abs(c))) if c.size else 0.0
        history.append({"outer": outer, "f": f, "residual": cn, "rho": rho})
        if best_feas is None and opts.stall_limit is not None:
            stalled = stalled + 1 if best_res[0] > 0.99 * res_before else 0
            if stalled >= opts.stall_limit:
                break
        if violation(c) <= 1.0:
            if prev_f is not None and abs(prev_f - f) <= opts.opt_tol * max(1.0, abs(f)):
                break
            prev_f = f
        if cn <= eta:
            lam = lam + rho * c
            eta = max(eta / rho**0.9, float(np.min(tol)) * 0.1)
        else:
            rho = min(rho * 10.0, opts.rho_max)
            eta = 0.25 / rho**0.1
    if best_feas is not None:
        f, zb, cb = best_feas
        status = "converged"
    else:
        _, zb, f, cb = best_res
        status = "infeasible"
    return NlpResult(ev.to_x(zb), f, cb, status, ev.n, history)
