import math

import numpy as np
import pytest

from esn_denoise import tuning
from esn_denoise.tuning import TuneGrid, TuneScenario, coordinate_descent, evaluate_cell


def tiny_scenario(**kw):
    base = dict(n_reservoir=20, transient=20, train_len=400, eval_len=3000, seed=4)
    base.update(kw)
    return TuneScenario(**base)


def test_grids_match_the_search_plan():
    g = TuneGrid()
    assert g.a_grid[0] == 0.0 and g.a_grid[-1] == 1.0 and len(g.a_grid) == 21
    assert g.lambda_grid[0] == 0.05 and g.lambda_grid[-1] == 1.0 and len(g.lambda_grid) == 20
    assert g.p_grid[0] == 0.0 and g.p_grid[-1] == 10.0 and len(g.p_grid) == 21
    assert g.q_grid[0] == 0.5 and g.q_grid[-1] == 10.0 and len(g.q_grid) == 20
    assert g.initial[1:] == (0.05, 0.0, 0.5)
    assert 0.8 in g.a_grid and 0.75 in g.lambda_grid and 1.5 in g.p_grid and 1.0 in g.q_grid


class TestEvaluateCell:
    def test_zero_leakage_untrainable(self):
        assert evaluate_cell(0.0, 0.5, 1.0, 1.0, tiny_scenario()) == -math.inf

    def test_deterministic(self):
        a = evaluate_cell(0.8, 0.75, 1.5, 1.0, tiny_scenario())
        b = evaluate_cell(0.8, 0.75, 1.5, 1.0, tiny_scenario())
        assert a == b and math.isfinite(a)

    def test_memoized(self):
        sc = tiny_scenario()
        evaluate_cell(0.5, 0.5, 0.5, 0.5, sc)
        assert (0.5, 0.5, 0.5, 0.5) in sc._cache


def _stub(center, weights=(1.0, 1.0, 0.05, 0.05)):
    def gain(a, lam, p, q):
        x = np.array([a, lam, p, q]) - center
        return -float(np.dot(weights, x * x))
    return gain


@pytest.mark.oracle("descent_matches_brute_force")
@pytest.mark.parametrize("center", [(0.63, 0.41, 3.2, 6.7), (0.12, 0.93, 8.8, 0.6)])
def test_separable_stub_reaches_grid_optimum(center):
    grid = TuneGrid()
    result = coordinate_descent(grid, objective=_stub(np.array(center)))
    # brute force over the whole 4-D grid
    A, L, P, Q = np.meshgrid(grid.a_grid, grid.lambda_grid, grid.p_grid, grid.q_grid, indexing="ij")
    w = (1.0, 1.0, 0.05, 0.05)
    G = -(w[0] * (A - center[0]) ** 2 + w[1] * (L - center[1]) ** 2
          + w[2] * (P - center[2]) ** 2 + w[3] * (Q - center[3]) ** 2)
    idx = np.unravel_index(np.argmax(G), G.shape)
    best = (A[idx], L[idx], P[idx], Q[idx])
    assert result.params == pytest.approx(best)
    assert result.trace.converged
    assert result.trace.cycles <= 3


def test_constant_objective_keeps_incumbent():
    result = coordinate_descent(TuneGrid(), objective=lambda a, lam, p, q: 1.0)
    assert result.params == TuneGrid().initial
    assert result.trace.converged and result.trace.cycles == 1


def test_tie_prefers_smallest_when_incumbent_loses():
    assert tuning._pick([0.1, 0.2, 0.3], [1.0, 2.0, 2.0], 0.1) == 0.2
    assert tuning._pick([0.1, 0.2, 0.3], [1.0, 2.0, 2.0], 0.3) == 0.3
    assert tuning._pick([0.1, 0.2], [-math.inf, -math.inf], 0.2) == 0.2


def test_iteration_cap():
    calls = iter(range(10**6))
    # an objective that never settles: always prefers a fresh value
    result = coordinate_descent(TuneGrid(), objective=lambda *x: float(next(calls)), max_cycles=4)
    assert not result.trace.converged
    assert result.trace.cycles == 4


def test_order_validation():
    with pytest.raises(ValueError):
        coordinate_descent(TuneGrid(), objective=lambda *x: 0.0, order=("a", "a", "p", "q"))


def test_real_descent_trace_properties():
    grid = TuneGrid(a_grid=(0.0, 0.5, 1.0), lambda_grid=(0.3, 0.9), p_grid=(0.0, 1.0),
                    q_grid=(0.5, 2.0), initial=(1.0, 0.3, 0.0, 0.5))
    sc = tiny_scenario()
    result = coordinate_descent(grid, sc)
    gains = result.trace.scan_gains
    assert all(b >= a for a, b in zip(gains[1:], gains[2:]))
    fresh = tiny_scenario()
    for it in result.trace.iterations:
        assert it.gain_db == evaluate_cell(it.a, it.lam, it.p, it.q, fresh)
    assert result.trace.converged


def test_trace_csv(tmp_path):
    result = coordinate_descent(TuneGrid(), objective=_stub(np.array([0.5, 0.5, 5.0, 5.0])))
    path = tmp_path / "trace.csv"
    tuning.write_trace_csv(result, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("kind,cycle")
    assert sum(line.startswith("eval,") for line in lines) == len(result.trace.evaluations)
    assert lines[-1].startswith("summary,")
    assert "converged" in lines[-1]
