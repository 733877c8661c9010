"""Restricted-game payoff matrices and an LP solver for zero-sum matrix games."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .game_core import GameError, TeamGame, TeamPolicy, _simplex, expected_payoff, to_joint

DUALITY_GAP_TOL = 1e-9
SUPPORT_EPS_TOL = 1e-8

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class MetaSolverError(GameError):
    pass


@dataclass(frozen=True, eq=False)
class MetaPolicy:
    team: int
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _simplex(self.weights, "meta weights"))


class ZeroSumSolution(NamedTuple):
    row: MetaPolicy
    col: MetaPolicy
    value: float


@dataclass
class RestrictedPayoffMatrix:
    """Expected team-1 payoffs between every pair of population members.

    ``row_tags``/``col_tags`` record the population index behind each row and
    column. Rows and columns are appended one at a time; existing entries are
    never recomputed.
    """

    game: TeamGame
    pop1: list = field(default_factory=list)
    pop2: list = field(default_factory=list)
    matrix: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    @property
    def row_tags(self) -> list:
        return list(range(len(self.pop1)))

    @property
    def col_tags(self) -> list:
        return list(range(len(self.pop2)))

    def add_row(self, policy: TeamPolicy) -> None:
        joint = to_joint(policy, self.game)
        if joint.team != 1:
            raise GameError("rows hold team 1 policies")
        row = np.array([[expected_payoff(self.game, joint, q) for q in self.pop2]]).reshape(1, len(self.pop2))
        self.matrix = np.vstack([self.matrix, row])
        self.pop1.append(joint)

    def add_col(self, policy: TeamPolicy) -> None:
        joint = to_joint(policy, self.game)
        if joint.team != 2:
            raise GameError("columns hold team 2 policies")
        col = np.array([expected_payoff(self.game, p, joint) for p in self.pop1]).reshape(len(self.pop1), 1)
        self.matrix = np.hstack([self.matrix, col])
        self.pop2.append(joint)


def build_restricted_matrix(game: TeamGame, pop1: Sequence[TeamPolicy], pop2: Sequence[TeamPolicy]) -> RestrictedPayoffMatrix:
    if not pop1 or not pop2:
        raise GameError("populations must be non-empty")
    restricted = RestrictedPayoffMatrix(game)
    restricted.pop2 = [to_joint(q, game) for q in pop2]
    if any(q.team != 2 for q in restricted.pop2):
        raise GameError("pop2 must hold team 2 policies")
    restricted.matrix = np.zeros((0, len(pop2)))
    for p in pop1:
        restricted.add_row(p)
    return restricted


def equilibrium_certificate(matrix, row: np.ndarray, col: np.ndarray) -> tuple:
    """Return (lower, upper): what ``row`` guarantees and what ``col`` concedes.

    ``upper - lower`` is the duality gap; it also bounds how far either
    strategy is from a best response to the other.
    """
    matrix = np.asarray(matrix, dtype=float)
    lower = float(np.min(row @ matrix))
    upper = float(np.max(matrix @ col))
    return lower, upper


def support_regret(matrix, row: np.ndarray, col: np.ndarray) -> float:
    """Largest loss of any support action against the best pure reply."""
    matrix = np.asarray(matrix, dtype=float)
    row_vals = matrix @ col
    col_vals = row @ matrix
    return float(max(
        row_vals.max() - row_vals[row > 0].min(),
        col_vals[col > 0].max() - col_vals.min(),
    ))


def _maximin(matrix: np.ndarray) -> np.ndarray:
    m, n = matrix.shape
    # variables: x_1..x_m, v ; maximize v  s.t.  v - x^T A e_j <= 0
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-matrix.T, np.ones((n, 1))])
    a_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    bounds = [(0.0, None)] * m + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=[1.0], bounds=bounds,
                  method="highs", options=_HIGHS_OPTIONS)
    if res.status != 0:
        raise MetaSolverError(f"LP failed: {res.message}")
    x = res.x[:m].copy()
    x[x < 1e-14] = 0.0
    return x / x.sum()


def solve_zero_sum(matrix) -> ZeroSumSolution:
    """Maximin strategy for the row player and minimax for the column player.

    Raises :class:`MetaSolverError` if the returned pair does not certify
    a duality gap within ``DUALITY_GAP_TOL``.
    """
    if isinstance(matrix, RestrictedPayoffMatrix):
        matrix = matrix.matrix
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or 0 in matrix.shape:
        raise MetaSolverError(f"need a non-empty 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise MetaSolverError("matrix has non-finite entries")
    if matrix.shape == (1, 1):
        return ZeroSumSolution(MetaPolicy(1, [1.0]), MetaPolicy(2, [1.0]), float(matrix[0, 0]))
    row = _maximin(matrix)
    col = _maximin(-matrix.T)
    lower, upper = equilibrium_certificate(matrix, row, col)
    if upper - lower > DUALITY_GAP_TOL:
        raise MetaSolverError(f"duality gap {upper - lower:.3e} exceeds {DUALITY_GAP_TOL}")
    eps = support_regret(matrix, row, col)
    if eps > SUPPORT_EPS_TOL:
        raise MetaSolverError(f"support regret {eps:.3e} exceeds {SUPPORT_EPS_TOL}")
    return ZeroSumSolution(MetaPolicy(1, row), MetaPolicy(2, col), 0.5 * (lower + upper))
