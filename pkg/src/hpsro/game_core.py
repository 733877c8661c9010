"""Two-team zero-sum normal-form games and team policy representations.

A game stores only team 1's payoff tensor ``payoff1`` with shape
``(joint actions of team 1, joint actions of team 2)``; team 2 receives the
negation. Joint actions are indexed in mixed radix with player 1 as the most
significant digit, which is the C-order ravel of the per-player action grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Optional, Sequence, Union

import numpy as np

SIMPLEX_TOL = 1e-9


class GameError(ValueError):
    """Base class for malformed games and policies."""


class ShapeError(GameError):
    pass


class PolicyError(GameError):
    pass


class RepresentationError(GameError):
    """A policy representation cannot be expressed for the given team."""


def _check_team(team: int) -> int:
    if team not in (1, 2):
        raise ShapeError(f"team id must be 1 or 2, got {team!r}")
    return team


def _simplex(values, what: str = "probs") -> np.ndarray:
    """Validate a probability vector, renormalizing tiny drift."""
    arr = np.array(values, dtype=float).ravel()
    if arr.size == 0:
        raise PolicyError(f"{what}: empty probability vector")
    if not np.all(np.isfinite(arr)):
        raise PolicyError(f"{what}: non-finite probability")
    if arr.min() < -SIMPLEX_TOL or abs(arr.sum() - 1.0) > SIMPLEX_TOL:
        raise PolicyError(f"{what}: not a simplex vector (sum={arr.sum()!r}, min={arr.min()!r})")
    arr = np.clip(arr, 0.0, None)
    arr = arr / arr.sum()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TeamGame:
    team1_player_action_counts: tuple
    team2_player_action_counts: tuple
    payoff1: np.ndarray
    action_labels: Optional[tuple] = None
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        c1 = tuple(int(c) for c in self.team1_player_action_counts)
        c2 = tuple(int(c) for c in self.team2_player_action_counts)
        for counts in (c1, c2):
            if not counts or any(c < 1 for c in counts):
                raise ShapeError(f"player action counts must be positive, got {counts}")
        payoff = np.array(self.payoff1, dtype=float)
        expected = (int(np.prod(c1)), int(np.prod(c2)))
        if payoff.shape != expected:
            raise ShapeError(f"payoff shape {payoff.shape} does not match joint action counts {expected}")
        if not np.all(np.isfinite(payoff)):
            raise GameError("payoff entries must be finite")
        payoff.setflags(write=False)
        labels = self.action_labels
        if labels is None:
            labels = tuple(tuple(tuple(str(a) for a in range(c)) for c in cs) for cs in (c1, c2))
        else:
            labels = tuple(tuple(tuple(str(a) for a in player) for player in team) for team in labels)
            for team_labels, counts in zip(labels, (c1, c2)):
                if tuple(len(p) for p in team_labels) != counts:
                    raise ShapeError("action labels do not match action counts")
                for p in team_labels:
                    if len(set(p)) != len(p):
                        raise GameError(f"duplicate action labels {p}")
        object.__setattr__(self, "team1_player_action_counts", c1)
        object.__setattr__(self, "team2_player_action_counts", c2)
        object.__setattr__(self, "payoff1", payoff)
        object.__setattr__(self, "action_labels", labels)

    def player_counts(self, team: int) -> tuple:
        return self.team1_player_action_counts if _check_team(team) == 1 else self.team2_player_action_counts

    def num_players(self, team: int) -> int:
        return len(self.player_counts(team))

    def joint_count(self, team: int) -> int:
        return int(np.prod(self.player_counts(team)))

    def joint_actions(self, team: int) -> list:
        """Per-player action-index tuples in joint-index order."""
        return list(product(*(range(c) for c in self.player_counts(team))))

    def joint_index(self, team: int, actions: Sequence[int]) -> int:
        counts = self.player_counts(team)
        if len(actions) != len(counts) or any(not 0 <= a < c for a, c in zip(actions, counts)):
            raise ShapeError(f"joint action {tuple(actions)} out of range for counts {counts}")
        return int(np.ravel_multi_index(tuple(actions), counts))

    def joint_labels(self, team: int, index: int) -> tuple:
        actions = np.unravel_index(index, self.player_counts(team))
        return tuple(self.action_labels[team - 1][i][a] for i, a in enumerate(actions))

    def team_payoff(self, team: int) -> np.ndarray:
        """Payoff matrix from ``team``'s perspective, its joint actions as rows."""
        return self.payoff1 if _check_team(team) == 1 else -self.payoff1.T

    @property
    def payoff2(self) -> np.ndarray:
        return -self.payoff1

    def equals(self, other: "TeamGame") -> bool:
        return (
            self.team1_player_action_counts == other.team1_player_action_counts
            and self.team2_player_action_counts == other.team2_player_action_counts
            and self.action_labels == other.action_labels
            and np.array_equal(self.payoff1, other.payoff1)
        )


@dataclass(frozen=True, eq=False)
class JointPolicy:
    """Distribution over a team's joint actions (fully correlated)."""

    team: int
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "team", _check_team(self.team))
        object.__setattr__(self, "probs", _simplex(self.probs))

    @classmethod
    def pure(cls, game: TeamGame, team: int, actions) -> "JointPolicy":
        index = actions if isinstance(actions, (int, np.integer)) else game.joint_index(team, actions)
        probs = np.zeros(game.joint_count(team))
        probs[index] = 1.0
        return cls(team, probs)

    @classmethod
    def uniform(cls, game: TeamGame, team: int) -> "JointPolicy":
        n = game.joint_count(team)
        return cls(team, np.full(n, 1.0 / n))


@dataclass(frozen=True, eq=False)
class ProductPolicy:
    """Independent per-player mixed strategies (heterogeneous team policy)."""

    team: int
    per_player_probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "team", _check_team(self.team))
        vecs = tuple(_simplex(p, f"player {i + 1}") for i, p in enumerate(self.per_player_probs))
        if not vecs:
            raise PolicyError("product policy needs at least one player")
        object.__setattr__(self, "per_player_probs", vecs)

    @classmethod
    def uniform(cls, game: TeamGame, team: int) -> "ProductPolicy":
        return cls(team, tuple(np.full(c, 1.0 / c) for c in game.player_counts(team)))

    @classmethod
    def pure(cls, game: TeamGame, team: int, actions: Sequence[int]) -> "ProductPolicy":
        vecs = []
        for a, c in zip(actions, game.player_counts(team)):
            v = np.zeros(c)
            v[a] = 1.0
            vecs.append(v)
        return cls(team, tuple(vecs))


@dataclass(frozen=True, eq=False)
class SharedPolicy:
    """One action distribution applied by index to every teammate."""

    team: int
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "team", _check_team(self.team))
        object.__setattr__(self, "probs", _simplex(self.probs))


TeamPolicy = Union[JointPolicy, ProductPolicy, SharedPolicy]


def shared_action_count(game: TeamGame, team: int) -> int:
    """Common per-player action count; raises if teammates differ."""
    counts = set(game.player_counts(team))
    if len(counts) != 1:
        raise RepresentationError(
            f"team {team} players have unequal action counts {game.player_counts(team)}; "
            "a shared policy cannot be mapped onto them"
        )
    return counts.pop()


def to_joint(policy: TeamPolicy, game: TeamGame) -> JointPolicy:
    team = policy.team
    if isinstance(policy, JointPolicy):
        if policy.probs.size != game.joint_count(team):
            raise ShapeError(f"joint policy has {policy.probs.size} entries, team {team} has {game.joint_count(team)}")
        return policy
    counts = game.player_counts(team)
    if isinstance(policy, ProductPolicy):
        vecs = policy.per_player_probs
        if tuple(v.size for v in vecs) != counts:
            raise ShapeError(f"product policy sizes {[v.size for v in vecs]} do not match {counts}")
    elif isinstance(policy, SharedPolicy):
        if shared_action_count(game, team) != policy.probs.size:
            raise RepresentationError(f"shared policy length {policy.probs.size} does not match action count")
        vecs = (policy.probs,) * len(counts)
    else:
        raise TypeError(f"not a team policy: {policy!r}")
    return JointPolicy(team, reduce(np.multiply.outer, vecs).ravel())


def _joint_probs(policy, game: TeamGame, team: int) -> np.ndarray:
    joint = to_joint(policy, game)
    if joint.team != team:
        raise ShapeError(f"expected a team {team} policy, got team {joint.team}")
    return joint.probs


def action_values(game: TeamGame, team: int, opponent: TeamPolicy) -> np.ndarray:
    """Expected payoff to ``team`` of each of its pure joint actions against ``opponent``."""
    opp = _joint_probs(opponent, game, 3 - team)
    return game.team_payoff(team) @ opp


def expected_payoff(game: TeamGame, p1: TeamPolicy, p2: TeamPolicy) -> float:
    """Team 1's expected reward; team 2 gets the negation."""
    return float(_joint_probs(p1, game, 1) @ game.payoff1 @ _joint_probs(p2, game, 2))


def team_advantage(game: TeamGame, team: int, team_policy: TeamPolicy, opponent: TeamPolicy, joint_action) -> float:
    q = action_values(game, team, opponent)
    probs = _joint_probs(team_policy, game, team)
    index = joint_action if isinstance(joint_action, (int, np.integer)) else game.joint_index(team, joint_action)
    if not 0 <= index < q.size:
        raise ShapeError(f"joint action index {index} out of range")
    return float(q[index] - probs @ q)


def multiagent_advantage(
    game: TeamGame,
    team: int,
    base_policy: ProductPolicy,
    opponent: TeamPolicy,
    agents: Sequence[int],
    actions: Sequence[int],
) -> float:
    """Advantage of the listed agents (0-based) fixing ``actions`` while the rest follow ``base_policy``."""
    counts = game.player_counts(team)
    agents = list(agents)
    if len(set(agents)) != len(agents):
        raise ShapeError(f"duplicate agents in {agents}")
    if len(agents) != len(actions):
        raise ShapeError("need exactly one action per listed agent")
    for i, a in zip(agents, actions):
        if not 0 <= i < len(counts):
            raise ShapeError(f"agent {i} out of range")
        if not 0 <= a < counts[i]:
            raise ShapeError(f"action {a} out of range for agent {i}")
    if tuple(v.size for v in base_policy.per_player_probs) != counts or base_policy.team != team:
        raise ShapeError("base policy does not match the team")
    q = action_values(game, team, opponent).reshape(counts)
    value = _contract(q, base_policy.per_player_probs)
    fixed = dict(zip(agents, actions))
    # Fix listed agents first so the remaining axes line up with the unlisted players.
    index = tuple(fixed.get(i, slice(None)) for i in range(len(counts)))
    rest = [base_policy.per_player_probs[i] for i in range(len(counts)) if i not in fixed]
    return float(_contract(q[index], rest) - value)


def _contract(tensor: np.ndarray, vecs) -> float:
    for v in reversed(list(vecs)):
        tensor = tensor @ v
    return float(tensor)
