"""Equilibrium computation for two-team zero-sum normal-form games.

Implements heterogeneous PSRO (sequential best responses over teammates),
its baselines (Team PSRO, joint PSRO, independent PSRO, Self Play, FSP),
exact exploitability and a full-game equilibrium oracle.
"""

from .builtin_games import make_hetero_matrix_game, make_team_rps, parse_game, random_team_game, serialize_game
from .engine import RunConfig, RunTrace, induced_joint_pair, run
from .evaluation import exploitability, project_team_rps, solve_full_tmecor
from .game_core import JointPolicy, ProductPolicy, SharedPolicy, TeamGame, expected_payoff, to_joint
from .meta_solver import build_restricted_matrix, solve_zero_sum
from .oracles import BroConfig, independent_bro, joint_best_response, sequential_bro, shared_bro

__version__ = "0.1.0"
