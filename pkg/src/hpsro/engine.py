"""Population-based training loops and the Self Play / FSP baselines."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .evaluation import exploitability
from .game_core import (
    GameError,
    JointPolicy,
    ProductPolicy,
    RepresentationError,
    SharedPolicy,
    TeamGame,
    shared_action_count,
    to_joint,
)
from .meta_solver import RestrictedPayoffMatrix, build_restricted_matrix, solve_zero_sum
from .oracles import BroConfig, independent_bro, joint_best_response, sequential_bro, shared_bro

POPULATION_ALGORITHMS = ("hpsro", "team_psro", "psro_joint", "indep_psro")
ALGORITHMS = POPULATION_ALGORITHMS + ("self_play", "fsp")

DUPLICATE_TOL = 1e-9


class ConfigError(GameError):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class RunConfig:
    algorithm: str = "hpsro"
    max_iterations: int = 50
    br_gap_tolerance: float = 1e-9
    seed: int = 0
    bro_config: BroConfig = field(default_factory=BroConfig)
    record_trajectories: bool = True
    # Initial shared distribution for team_psro (e.g. (1, 0) = Rock in Team RPS).
    shared_init: Optional[tuple] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError("algo", f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.max_iterations < 1:
            raise ConfigError("iters", "max_iterations must be >= 1")
        if not self.br_gap_tolerance >= 0:
            raise ConfigError("br_gap", "br_gap_tolerance must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "seed must be a 64-bit unsigned integer")


@dataclass
class IterationRecord:
    iteration: int
    pop_sizes: tuple
    meta1: np.ndarray
    meta2: np.ndarray
    value: float
    br_values: tuple
    br_gaps: tuple
    exploitability: float
    populations: tuple  # joint forms of both populations at solve time
    appended: list = field(default_factory=list)  # (team, policy) added after this iteration
    bro_seeds: tuple = ()
    elapsed: float = 0.0

    @property
    def joint_pair(self) -> tuple:
        return induced_joint_pair(self)


@dataclass
class RunTrace:
    game_name: str
    config: RunConfig
    records: list = field(default_factory=list)
    termination: str = ""
    elapsed: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def iteration(self, k: int) -> IterationRecord:
        if not 1 <= k <= len(self.records):
            raise IndexError(f"iteration {k} not recorded (1..{len(self.records)})")
        return self.records[k - 1]


def induced_joint_pair(record: IterationRecord) -> tuple:
    """Meta-policy mixtures of the populations' joint forms, one per team."""
    out = []
    for team, pop, weights in zip((1, 2), record.populations, (record.meta1, record.meta2)):
        probs = sum(w * p.probs for w, p in zip(weights, pop))
        out.append(JointPolicy(team, probs))
    return tuple(out)


def _bro_seed(run_seed: int, iteration: int, team: int) -> int:
    seq = np.random.SeedSequence([run_seed, iteration, team])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _initial_policy(game: TeamGame, config: RunConfig, team: int):
    algo = config.algorithm
    if algo == "team_psro":
        size = shared_action_count(game, team)
        if config.shared_init is not None:
            if len(config.shared_init) != size:
                raise ConfigError("shared_init", f"expected {size} probabilities, got {len(config.shared_init)}")
            return SharedPolicy(team, config.shared_init)
        return SharedPolicy(team, np.full(size, 1.0 / size))
    if algo == "psro_joint":
        return JointPolicy.uniform(game, team)
    return ProductPolicy.uniform(game, team)


class _Oracle:
    """Dispatches the per-algorithm best response for one team."""

    def __init__(self, game: TeamGame, config: RunConfig):
        self.game = game
        self.config = config
        self.previous = {}

    def __call__(self, team: int, opponent: JointPolicy, seed: int) -> tuple:
        bro = replace(self.config.bro_config, permutation_seed=seed)
        algo = self.config.algorithm
        if algo in ("hpsro", "self_play", "fsp"):
            return sequential_bro(self.game, team, opponent, bro)
        if algo == "team_psro":
            return shared_bro(self.game, team, opponent, bro)
        if algo == "psro_joint":
            actions, value = joint_best_response(self.game, team, opponent)
            return JointPolicy.pure(self.game, team, actions), value
        policy, value = independent_bro(self.game, team, opponent, self.previous[team], bro)
        self.previous[team] = policy
        return policy, value


def _is_duplicate(joint: JointPolicy, population) -> bool:
    return any(np.max(np.abs(joint.probs - p.probs)) <= DUPLICATE_TOL for p in population)


def run(game: TeamGame, config: RunConfig) -> RunTrace:
    if config.algorithm == "team_psro":
        for team in (1, 2):
            try:
                shared_action_count(game, team)
            except RepresentationError as exc:
                raise ConfigError("algo", f"team_psro needs equal action counts within each team ({exc})") from None
    trace = RunTrace(game.name, config)
    start = time.perf_counter()
    if config.algorithm in POPULATION_ALGORITHMS:
        _run_population(game, config, trace)
    else:
        _run_self_play(game, config, trace)
    trace.elapsed = time.perf_counter() - start
    return trace


def _run_population(game: TeamGame, config: RunConfig, trace: RunTrace) -> None:
    oracle = _Oracle(game, config)
    init = {team: _initial_policy(game, config, team) for team in (1, 2)}
    oracle.previous = dict(init)
    restricted: RestrictedPayoffMatrix = build_restricted_matrix(game, [init[1]], [init[2]])
    tol = config.br_gap_tolerance
    for t in range(1, config.max_iterations + 1):
        t0 = time.perf_counter()
        sol = solve_zero_sum(restricted.matrix)
        record = IterationRecord(
            iteration=t,
            pop_sizes=(len(restricted.pop1), len(restricted.pop2)),
            meta1=sol.row.weights,
            meta2=sol.col.weights,
            value=sol.value,
            br_values=(0.0, 0.0),
            br_gaps=(0.0, 0.0),
            exploitability=0.0,
            populations=(list(restricted.pop1), list(restricted.pop2)),
        )
        p1, p2 = induced_joint_pair(record)
        record.exploitability = exploitability(game, p1, p2)
        seeds = (_bro_seed(config.seed, t, 1), _bro_seed(config.seed, t, 2))
        br1, v1 = oracle(1, p2, seeds[0])
        br2, v2 = oracle(2, p1, seeds[1])
        record.br_values = (v1, v2)
        record.br_gaps = (v1 - sol.value, v2 + sol.value)
        record.bro_seeds = seeds
        trace.records.append(record)
        if record.br_gaps[0] <= tol and record.br_gaps[1] <= tol:
            trace.termination = "br_gap"
        else:
            new1 = None if _is_duplicate(to_joint(br1, game), restricted.pop1) else br1
            new2 = None if _is_duplicate(to_joint(br2, game), restricted.pop2) else br2
            if new1 is None and new2 is None:
                trace.termination = "duplicate_policy"
            elif t == config.max_iterations:
                trace.termination = "max_iterations"
            else:
                if new1 is not None:
                    restricted.add_row(new1)
                    record.appended.append((1, new1))
                if new2 is not None:
                    restricted.add_col(new2)
                    record.appended.append((2, new2))
        record.elapsed = time.perf_counter() - t0
        if trace.termination:
            return


def _run_self_play(game: TeamGame, config: RunConfig, trace: RunTrace) -> None:
    """Self Play (current policies) or FSP (time-averaged policies).

    Team 1 updates first, then team 2 responds to team 1's fresh policy.
    """
    oracle = _Oracle(game, config)
    fsp = config.algorithm == "fsp"
    current = {team: to_joint(ProductPolicy.uniform(game, team), game) for team in (1, 2)}
    average = dict(current)
    for t in range(1, config.max_iterations + 1):
        t0 = time.perf_counter()
        seeds = (_bro_seed(config.seed, t, 1), _bro_seed(config.seed, t, 2))
        for team in (1, 2):
            target = average if fsp else current
            policy, _ = oracle(team, target[3 - team], seeds[team - 1])
            current[team] = to_joint(policy, game)
            average[team] = JointPolicy(team, ((t - 1) * average[team].probs + current[team].probs) / t)
        shown = average if fsp else current
        p1, p2 = shown[1], shown[2]
        value = float(p1.probs @ game.payoff1 @ p2.probs)
        br1 = float(np.max(game.payoff1 @ p2.probs))
        br2 = float(-np.min(p1.probs @ game.payoff1))
        record = IterationRecord(
            iteration=t,
            pop_sizes=(t, t) if fsp else (1, 1),
            meta1=np.array([1.0]),
            meta2=np.array([1.0]),
            value=value,
            br_values=(br1, br2),
            br_gaps=(br1 - value, br2 + value),
            exploitability=br1 + br2,
            populations=([p1], [p2]),
            appended=[(1, current[1]), (2, current[2])],
            bro_seeds=seeds,
            elapsed=time.perf_counter() - t0,
        )
        trace.records.append(record)
        if record.exploitability <= config.br_gap_tolerance:
            trace.termination = "converged"
            return
    trace.termination = "max_iterations"
