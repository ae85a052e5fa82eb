import numpy as np
import pytest

from spiral.optimize.moea import MoeaOptions, evolve
from spiral.optimize.pareto import hypervolume_2d


def _zdt1(x):
    g = 1.0 + 9.0 * np.mean(x[1:])
    f1 = x[0]
    return np.array([f1, g * (1.0 - np.sqrt(f1 / g))]), 0.0


def test_converges_on_zdt1():
    lo, hi = np.zeros(4), np.ones(4)
    res = evolve(_zdt1, lo, hi, MoeaOptions(budget=3000, population=40, seed=1))
    assert res.n_evaluations == 3000
    assert res.archive.front().is_consistent()
    # true front hypervolume w.r.t. (1, 1) is 2/3 - 1/2 ... = 1/3
    hv = hypervolume_2d(res.archive.f, [1.0, 1.0])
    assert hv > 0.30


def test_seeded_runs_repeat():
    lo, hi = np.zeros(3), np.ones(3)
    a = evolve(_zdt1, lo, hi, MoeaOptions(budget=200, population=10, seed=7))
    b = evolve(_zdt1, lo, hi, MoeaOptions(budget=200, population=10, seed=7))
    np.testing.assert_array_equal(a.archive.f, b.archive.f)


def test_infeasible_points_never_archived():
    def ev(x):
        # feasible only for x0 >= 0.5
        return np.array([x[0], 1 - x[0]]), max(0.0, 0.5 - x[0])

    seen = []
    res = evolve(ev, np.zeros(2), np.ones(2), MoeaOptions(budget=200, population=10, seed=0),
                 on_insert=lambda arc: seen.append(arc.front().is_consistent()))
    assert len(res.archive) > 0 and all(seen)
    assert np.all(res.archive.f[:, 0] >= 0.5)
    assert res.n_feasible < res.n_evaluations


def test_bounds_respected():
    xs = []

    def ev(x):
        xs.append(x.copy())
        return np.array([x.sum(), -x.sum()]), 0.0

    lo, hi = np.array([5.0, 2.6]), np.array([100.0, 50.0])
    evolve(ev, lo, hi, MoeaOptions(budget=100, population=10, seed=3))
    xs = np.array(xs)
    assert np.all(xs >= lo) and np.all(xs <= hi)


def test_option_validation():
    with pytest.raises(ValueError):
        evolve(_zdt1, np.zeros(2), np.ones(2), MoeaOptions(budget=100, population=3))
    with pytest.raises(ValueError):
        evolve(_zdt1, np.zeros(2), np.ones(2), MoeaOptions(budget=5, population=10))
