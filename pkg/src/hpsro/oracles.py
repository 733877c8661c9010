"""Best-response oracles for one team against a fixed opposing joint policy.

* :func:`joint_best_response` enumerates the team's pure joint actions.
* :func:`shared_bro` restricts every teammate to one shared distribution.
* :func:`sequential_bro` updates teammates one at a time in a random order,
  each best-responding to the teammates already updated (heterogeneous BRO).
* :func:`independent_bro` lets all teammates best-respond simultaneously to
  a frozen copy of the previous team policy.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .game_core import (
    GameError,
    ProductPolicy,
    SharedPolicy,
    TeamGame,
    TeamPolicy,
    action_values,
    shared_action_count,
)

# Ties within this relative tolerance go to the lowest index.
TIE_TOL = 1e-12
# Cap on simplex grid points evaluated by the shared oracle.
SHARED_GRID_BUDGET = 200_000


@dataclass(frozen=True)
class BroConfig:
    max_sweeps: int = 50
    restarts: int = 16
    improvement_tolerance: float = 1e-10
    permutation_seed: int = 0
    shared_grid_points: int = 1001
    shared_refinement_tolerance: float = 1e-13
    exact_mode_threshold: int = 4096

    def __post_init__(self):
        if self.restarts < 1:
            raise GameError("restarts must be >= 1")
        if self.max_sweeps < 1:
            raise GameError("max_sweeps must be >= 1")
        if self.improvement_tolerance <= 0 or self.shared_refinement_tolerance <= 0:
            raise GameError("tolerances must be > 0")
        if self.shared_grid_points < 2:
            raise GameError("shared_grid_points must be >= 2")
        if not 0 <= self.permutation_seed < 2**64:
            raise GameError("permutation_seed must be a 64-bit unsigned integer")


def _argmax(values: np.ndarray) -> int:
    top = values.max()
    return int(np.flatnonzero(values >= top - TIE_TOL * max(1.0, abs(top)))[0])


def _team_tensor(game: TeamGame, team: int, opponent: TeamPolicy) -> np.ndarray:
    return action_values(game, team, opponent).reshape(game.player_counts(team))


def _contract(tensor: np.ndarray, vecs) -> float:
    for v in reversed(list(vecs)):
        tensor = tensor @ v
    return float(tensor)


def _player_values(tensor: np.ndarray, vecs, player: int) -> np.ndarray:
    """Expected value of each of ``player``'s actions with teammates playing ``vecs``."""
    moved = np.moveaxis(tensor, player, 0)
    for v in reversed([v for i, v in enumerate(vecs) if i != player]):
        moved = moved @ v
    return np.asarray(moved)


def joint_best_response(game: TeamGame, team: int, opponent: TeamPolicy) -> tuple:
    """Best pure joint action and its value; ties go to the lowest joint index."""
    q = action_values(game, team, opponent)
    index = _argmax(q)
    actions = tuple(int(a) for a in np.unravel_index(index, game.player_counts(team)))
    return actions, float(q[index])


# --- shared (policy-sharing) oracle -------------------------------------------------


def _shared_values(tensor: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Objective for a batch of shared distributions ``points`` (K x L)."""
    n = tensor.ndim
    size = tensor.shape[0]
    out = tensor.reshape(-1, size) @ points.T  # (L^(n-1), K)
    for _ in range(n - 1):
        out = out.reshape(-1, size, points.shape[0])
        out = np.einsum("rak,ka->rk", out, points)
    return out.reshape(-1)


def _simplex_grid(size: int, resolution: int) -> np.ndarray:
    """All points of the simplex with coordinates that are multiples of 1/resolution."""
    if size == 2:
        x = np.linspace(0.0, 1.0, resolution + 1)
        return np.column_stack([x, 1.0 - x])[::-1]
    pts = []
    for bars in combinations_with_replacement(range(resolution + 1), size - 1):
        edges = (0,) + bars + (resolution,)
        pts.append([edges[k + 1] - edges[k] for k in range(size)])
    return np.array(pts, dtype=float) / resolution


def _grid_resolution(size: int, grid_points: int) -> int:
    resolution = grid_points - 1
    while resolution > 1 and comb(resolution + size - 1, size - 1) > SHARED_GRID_BUDGET:
        resolution = max(1, int(resolution * 0.8))
    return resolution


def _line_polynomial(tensor: np.ndarray, point: np.ndarray, direction: np.ndarray) -> Polynomial:
    """Exact polynomial t -> objective(point + t * direction)."""
    poly = tensor[..., None]
    for _ in range(tensor.ndim):
        const = np.tensordot(poly, point, axes=([-2], [0]))
        slope = np.tensordot(poly, direction, axes=([-2], [0]))
        nxt = np.zeros(const.shape[:-1] + (const.shape[-1] + 1,))
        nxt[..., :-1] += const
        nxt[..., 1:] += slope
        poly = nxt
    return Polynomial(poly)


def _maximize_on_interval(poly: Polynomial, upper: float) -> tuple:
    candidates = [0.0, upper]
    if poly.degree() >= 2:
        for root in poly.deriv().roots():
            if abs(root.imag) < 1e-12 and 0.0 < root.real < upper:
                candidates.append(float(root.real))
    values = [float(poly(t)) for t in candidates]
    best = int(np.argmax(values))
    return candidates[best], values[best]


def shared_bro(game: TeamGame, team: int, opponent: TeamPolicy, config: BroConfig = BroConfig()) -> tuple:
    """Best shared distribution: dense simplex grid, then pairwise line-search ascent.

    Each ascent step moves probability mass from one action to another and
    maximizes the resulting univariate polynomial exactly, so for two actions
    the result is the global optimum.
    """
    size = shared_action_count(game, team)
    tensor = _team_tensor(game, team, opponent)
    if size == 1:
        return SharedPolicy(team, [1.0]), float(tensor.ravel()[0])
    grid = _simplex_grid(size, _grid_resolution(size, config.shared_grid_points))
    values = _shared_values(tensor, grid)
    start = _argmax(values)
    point, value = grid[start].copy(), float(values[start])
    for _ in range(10_000):
        best_gain, best_point = 0.0, None
        for src in range(size):
            if point[src] <= 0.0:
                continue
            for dst in range(size):
                if dst == src:
                    continue
                direction = np.zeros(size)
                direction[dst], direction[src] = 1.0, -1.0
                poly = _line_polynomial(tensor, point, direction)
                t, val = _maximize_on_interval(poly, point[src])
                if val - value > best_gain:
                    best_gain = val - value
                    best_point = point + t * direction
        if best_point is None or best_gain < config.shared_refinement_tolerance:
            if best_point is not None:
                point, value = best_point, value + best_gain
            break
        point, value = best_point, value + best_gain
    point = np.clip(point, 0.0, None)
    policy = SharedPolicy(team, point / point.sum())
    return policy, float(_shared_values(tensor, policy.probs[None, :])[0])


# --- heterogeneous oracles ----------------------------------------------------------

UpdateMonitor = Callable[[float, float], None]


def sequential_bro(
    game: TeamGame,
    team: int,
    opponent: TeamPolicy,
    config: BroConfig = BroConfig(),
    monitor: Optional[UpdateMonitor] = None,
) -> tuple:
    """Sequential coordinate ascent over teammates with random restarts.

    Small teams (joint action count at most ``config.exact_mode_threshold``)
    are solved by enumeration instead. ``monitor(before, after)`` is called
    after every per-player update in coordinate-ascent mode.
    """
    counts = game.player_counts(team)
    if game.joint_count(team) <= config.exact_mode_threshold:
        actions, value = joint_best_response(game, team, opponent)
        return ProductPolicy.pure(game, team, actions), value
    tensor = _team_tensor(game, team, opponent)
    rng = np.random.Generator(np.random.PCG64(config.permutation_seed))
    best_value, best_vecs = -np.inf, None
    for restart in range(config.restarts):
        if restart == 0:
            vecs = [np.full(c, 1.0 / c) for c in counts]
        else:
            vecs = [np.eye(c)[rng.integers(c)] for c in counts]
        value = _contract(tensor, vecs)
        for _ in range(config.max_sweeps):
            sweep_start = value
            for player in rng.permutation(len(counts)):
                payoffs = _player_values(tensor, vecs, player)
                action = _argmax(payoffs)
                vecs[player] = np.eye(counts[player])[action]
                before, value = value, float(payoffs[action])
                if monitor is not None:
                    monitor(before, value)
            if value - sweep_start < config.improvement_tolerance:
                break
        if value > best_value:
            best_value, best_vecs = value, [v.copy() for v in vecs]
    return ProductPolicy(team, tuple(best_vecs)), best_value


def independent_bro(
    game: TeamGame,
    team: int,
    opponent: TeamPolicy,
    previous_team_policy: ProductPolicy,
    config: BroConfig = BroConfig(),
) -> tuple:
    """One round of simultaneous per-player best responses to a frozen team.

    A player whose previous distribution is already a best response keeps it.
    """
    counts = game.player_counts(team)
    prev = previous_team_policy.per_player_probs
    if previous_team_policy.team != team or tuple(v.size for v in prev) != counts:
        raise GameError("previous team policy does not match the team")
    tensor = _team_tensor(game, team, opponent)
    new = []
    for player in range(len(counts)):
        payoffs = _player_values(tensor, prev, player)
        action = _argmax(payoffs)
        top = payoffs[action]
        if float(prev[player] @ payoffs) >= top - TIE_TOL * max(1.0, abs(top)):
            new.append(prev[player])
        else:
            new.append(np.eye(counts[player])[action])
    return ProductPolicy(team, tuple(new)), _contract(tensor, new)
