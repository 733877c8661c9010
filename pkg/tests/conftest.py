import numpy as np
import pytest

import hpsro.engine
import hpsro.evaluation
import hpsro.meta_solver as meta_solver
from hpsro.builtin_games import make_hetero_matrix_game, make_team_rps

SOLVE_STATS = {"calls": 0, "worst_gap": 0.0, "worst_support": 0.0}


@pytest.fixture
def rps():
    return make_team_rps()


@pytest.fixture
def hetero():
    return make_hetero_matrix_game()


@pytest.fixture(autouse=True)
def audit_every_solve(monkeypatch):
    """Re-check the equilibrium certificate of every zero-sum solve in the suite."""
    original = meta_solver.solve_zero_sum

    def checked(matrix):
        sol = original(matrix)
        mat = matrix.matrix if isinstance(matrix, meta_solver.RestrictedPayoffMatrix) else np.asarray(matrix, float)
        lower, upper = meta_solver.equilibrium_certificate(mat, sol.row.weights, sol.col.weights)
        support = meta_solver.support_regret(mat, sol.row.weights, sol.col.weights)
        SOLVE_STATS["calls"] += 1
        SOLVE_STATS["worst_gap"] = max(SOLVE_STATS["worst_gap"], upper - lower)
        SOLVE_STATS["worst_support"] = max(SOLVE_STATS["worst_support"], support)
        assert upper - lower <= 1e-9
        assert support <= 1e-8
        return sol

    for module in (meta_solver, hpsro.engine, hpsro.evaluation):
        monkeypatch.setattr(module, "solve_zero_sum", checked)
    yield
