"""Exact exploitability, a full-game equilibrium oracle and trajectory export."""

from __future__ import annotations

import numpy as np

from .game_core import GameError, JointPolicy, ShapeError, TeamGame, TeamPolicy, to_joint
from .meta_solver import solve_zero_sum

FULL_GAME_CELL_LIMIT = 10**6


class SizeGuardError(GameError):
    pass


def _pair(game: TeamGame, p1: TeamPolicy, p2: TeamPolicy) -> tuple:
    j1, j2 = to_joint(p1, game), to_joint(p2, game)
    if j1.team != 1 or j2.team != 2:
        raise ShapeError("exploitability needs a team 1 policy and a team 2 policy")
    return j1.probs, j2.probs


def best_response_values(game: TeamGame, p1: TeamPolicy, p2: TeamPolicy) -> tuple:
    """(team 1's best value against p2, team 2's best value against p1), by enumeration."""
    x, y = _pair(game, p1, p2)
    return float(np.max(game.payoff1 @ y)), float(-np.min(x @ game.payoff1))


def exploitability(game: TeamGame, p1: TeamPolicy, p2: TeamPolicy) -> float:
    """Sum of both teams' best-response values against the other's strategy."""
    br1, br2 = best_response_values(game, p1, p2)
    return br1 + br2


def solve_full_tmecor(game: TeamGame) -> tuple:
    """Equilibrium of the whole game viewed as a two-player zero-sum matrix game."""
    cells = game.joint_count(1) * game.joint_count(2)
    if cells > FULL_GAME_CELL_LIMIT:
        raise SizeGuardError(f"game has {cells} joint-action pairs; the full-game solver is limited to {FULL_GAME_CELL_LIMIT}")
    sol = solve_zero_sum(game.payoff1)
    return JointPolicy(1, sol.row.weights), JointPolicy(2, sol.col.weights), sol.value


def project_team_rps(policy) -> np.ndarray:
    """(Rock, Paper, Scissors) decision probabilities of a Team RPS joint policy."""
    probs = policy.probs if isinstance(policy, JointPolicy) else np.asarray(policy, dtype=float)
    if probs.shape != (4,):
        raise ShapeError(f"Team RPS joint policies have 4 entries, got shape {probs.shape}")
    return np.array([probs[0], probs[1], probs[2] + probs[3]])


PROJECTIONS = {
    "raw": lambda probs: np.asarray(probs, dtype=float),
    "team_rps": project_team_rps,
}


def export_trajectory(trace, projection: str = "raw") -> list:
    """Rows ``(iteration, team, *coordinates)`` for every recorded iteration."""
    if projection not in PROJECTIONS:
        raise GameError(f"unknown projection {projection!r}")
    if not trace.records or not trace.config.record_trajectories:
        raise GameError("trace holds no trajectory data")
    project = PROJECTIONS[projection]
    rows = []
    for record in trace.records:
        for team, joint in zip((1, 2), record.joint_pair):
            rows.append((record.iteration, team, *(float(c) for c in project(joint.probs))))
    return rows
