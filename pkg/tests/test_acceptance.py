"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are printed even
without ``-s``) or directly as ``python3 tests/test_acceptance.py``.
"""

import sys
import time

import numpy as np
import pytest

import conftest
from hpsro.builtin_games import make_hetero_matrix_game, make_team_rps, random_team_game
from hpsro.cli import main as cli_main
from hpsro.engine import RunConfig, run
from hpsro.evaluation import exploitability, project_team_rps, solve_full_tmecor
from hpsro.game_core import JointPolicy, SharedPolicy, to_joint
from hpsro.meta_solver import equilibrium_certificate, solve_zero_sum, support_regret
from hpsro.oracles import BroConfig, sequential_bro, shared_bro
from hpsro.traces import format_policy
from reference import decomposition_violation, random_advantage_instance, random_simplex

UNIFORM3 = np.full(3, 1.0 / 3.0)
ROCK, PAPER, SCISSORS = 0, 1, 2


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return emit


def tv(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def timed_run(game, config):
    start = time.perf_counter()
    trace = run(game, config)
    return trace, time.perf_counter() - start


def test_criterion_1_team_rps_hpsro(report):
    trace, secs = timed_run(make_team_rps(), RunConfig(algorithm="hpsro", max_iterations=30, seed=0))
    expl = trace.final.exploitability
    tvs = [tv(project_team_rps(j), UNIFORM3) for j in trace.final.joint_pair]
    ok = trace.iterations <= 30 and expl <= 1e-3 and max(tvs) <= 1e-3 and secs < 5
    assert report(1, ok, f"iterations={trace.iterations} exploitability={expl:.3e} "
                         f"tv=({tvs[0]:.2e}, {tvs[1]:.2e}) time={secs:.2f}s")


def test_criterion_2_team_psro_rock_trap(report):
    config = RunConfig(algorithm="team_psro", seed=0, shared_init=(1.0, 0.0))
    trace, secs = timed_run(make_team_rps(), config)
    paper = [project_team_rps(p)[PAPER] for r in trace.records for pop in r.populations for p in pop]
    expl = trace.final.exploitability
    ok = max(paper) <= 0.5 and abs(expl - 2.0) <= 1e-6 and secs < 5
    assert report(2, ok, f"max paper prob in populations={max(paper):.3g} exploitability={expl!r} "
                         f"termination={trace.termination} time={secs:.2f}s")


def test_criterion_3_hetero_hpsro(report):
    game = make_hetero_matrix_game()
    trace, secs = timed_run(game, RunConfig(algorithm="hpsro", seed=0))
    p1, p2 = trace.final.joint_pair
    # joint order: team 1 (0,0),(0,2),(1,0),(1,2); team 2 (0,0),(0,3),(1,0),(1,3)
    err = max(np.abs(p1.probs - [0.6, 0.4, 0, 0]).max(), np.abs(p2.probs - [0.4, 0, 0.6, 0]).max())
    expl = trace.final.exploitability
    ok = expl < 1e-6 and err <= 1e-3 and secs < 5
    assert report(3, ok, f"exploitability={expl:.3e} max mixture error={err:.2e} time={secs:.2f}s")


def test_criterion_4_hetero_team_psro(report, tmp_path, capsys):
    game = make_hetero_matrix_game()
    policy, value = shared_bro(game, 1, JointPolicy.pure(game, 2, 0))
    x = float(policy.probs[0])
    trace, secs = timed_run(game, RunConfig(algorithm="team_psro", seed=0))
    end_to_end = trace.final.exploitability

    p1 = tmp_path / "stuck1.policy"
    p2 = tmp_path / "stuck2.policy"
    p1.write_text(format_policy(to_joint(SharedPolicy(1, [0.9, 0.1]), game)))
    p2.write_text(format_policy(JointPolicy.pure(game, 2, 0)))
    code = cli_main(["eval", "--game", "hetero_matrix", "--p1", str(p1), "--p2", str(p2)])
    out = capsys.readouterr().out
    stuck = float(out.split("exploitability ", 1)[1].split()[0]) if code == 0 else float("nan")

    ok = abs(x - 0.9) <= 1e-6 and abs(value - 1.05) <= 1e-9 and 2.4 <= end_to_end <= 3.5 \
        and abs(stuck - 2.95) <= 1e-9
    assert report(4, ok, f"shared BRO x={x!r} value={value!r} end-to-end={end_to_end:.6g} "
                         f"cmd_eval stuck pair={stuck!r}")


def _theorem2_instance(seed):
    rng = np.random.default_rng(seed)
    team = int(rng.integers(1, 3))
    players, actions = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    other = [int(s) for s in rng.integers(1, 4, size=int(rng.integers(1, 4)))]
    sizes = [actions] * players
    game = random_team_game(sizes if team == 1 else other, other if team == 1 else sizes, (-1, 1), seed)
    opp = JointPolicy(3 - team, random_simplex(rng, game.joint_count(3 - team)))
    return game, team, opp


def test_criterion_5_sequential_dominates_shared(report):
    passed, worst = 0, np.inf
    for seed in range(200):
        game, team, opp = _theorem2_instance(seed)
        _, v_shared = shared_bro(game, team, opp)
        _, v_exact = sequential_bro(game, team, opp)
        _, v_ascent = sequential_bro(game, team, opp, BroConfig(exact_mode_threshold=0, permutation_seed=seed))
        margin = min(v_exact, v_ascent) - v_shared
        worst = min(worst, margin)
        passed += margin >= -1e-9
    rps = make_team_rps()
    rock = JointPolicy.pure(rps, 2, 0)
    strict = sequential_bro(rps, 1, rock)[1] - shared_bro(rps, 1, rock)[1]
    ok = passed == 200 and strict > 0.1
    assert report(5, ok, f"{passed}/200 games with sequential >= shared - 1e-9 (worst margin {worst:.3e}); "
                         f"Team RPS vs Rock margin={strict!r}")


def test_criterion_6_advantage_decomposition_and_monotone_sweeps(report):
    worst = max(decomposition_violation(*random_advantage_instance(seed)[1:]) for seed in range(200))
    drops = []

    def monitor(before, after):
        drops.append(before - after)

    for seed in range(200):
        game, team, opp = _theorem2_instance(seed)
        sequential_bro(game, team, opp, BroConfig(exact_mode_threshold=0, permutation_seed=seed), monitor)
    largest_drop = max(drops)
    ok = worst <= 1e-10 and largest_drop <= 0.0
    assert report(6, ok, f"decomposition max error={worst:.2e} over 200 instances; "
                         f"{len(drops)} per-player updates, largest decrease={largest_drop:.2e}")


def test_criterion_7_meta_solver_certificates(report):
    rng = np.random.default_rng(2024)
    worst_gap = worst_support = 0.0
    for i in range(300):
        m, n = rng.integers(1, 13, size=2)
        if i % 3 == 0:
            matrix = rng.integers(-2, 3, size=(m, n)).astype(float)  # degenerate, many ties
        elif i % 3 == 1:
            base = rng.uniform(-1, 1, size=(m, 1))
            matrix = np.repeat(base, n, axis=1) + rng.uniform(-1e-3, 1e-3, size=(m, n))
        else:
            matrix = rng.normal(size=(m, n)) * 10 ** rng.uniform(-3, 3)
        sol = solve_zero_sum(matrix)
        lower, upper = equilibrium_certificate(matrix, sol.row.weights, sol.col.weights)
        worst_gap = max(worst_gap, upper - lower)
        worst_support = max(worst_support, support_regret(matrix, sol.row.weights, sol.col.weights))
    games = [make_team_rps(), make_hetero_matrix_game()]
    games += [random_team_game([2, 3], [3, 2], (-1, 1), s) for s in range(30)]
    games += [random_team_game([2, 2, 2], [4], (-5, 5), s) for s in range(30, 50)]
    full_worst = 0.0
    for game in games:
        p1, p2, _ = solve_full_tmecor(game)
        full_worst = max(full_worst, exploitability(game, p1, p2))
    stats = conftest.SOLVE_STATS
    ok = worst_gap <= 1e-9 and worst_support <= 1e-8 and full_worst <= 1e-8 \
        and stats["worst_gap"] <= 1e-9 and stats["worst_support"] <= 1e-8
    assert report(7, ok, f"battery gap={worst_gap:.2e} support={worst_support:.2e}; full-game oracle "
                         f"exploitability max={full_worst:.2e} over {len(games)} games; all audited solves so far: "
                         f"{stats['calls']} calls, gap {stats['worst_gap']:.2e}, support {stats['worst_support']:.2e}")


def test_criterion_8_self_play_and_fsp_dynamics(report):
    rps = make_team_rps()
    sp = run(rps, RunConfig(algorithm="self_play", max_iterations=12, seed=0))
    decisions = [int(np.argmax(project_team_rps(r.joint_pair[0]))) for r in sp.records]
    steps = {(b - a) % 3 for a, b in zip(decisions, decisions[1:]) if a != b}
    cyclic = set(decisions) == {ROCK, PAPER, SCISSORS} and len(steps) == 1

    fsp = run(rps, RunConfig(algorithm="fsp", max_iterations=200, seed=0))
    worst_rise = 0.0
    for team in (0, 1):
        tvs = [tv(project_team_rps(r.joint_pair[team]), UNIFORM3) for r in fsp.records]
        tail = tvs[-51:]
        worst_rise = max(worst_rise, max(b - a for a, b in zip(tail, tail[1:])))
    monotone = fsp.iterations == 200 and worst_rise <= 1e-3
    names = "RPS"
    ok = cyclic and monotone
    assert report(8, ok, f"self play team 1 decisions {''.join(names[d] for d in decisions)} "
                         f"({'cyclic' if cyclic else 'not cyclic'}); FSP largest TV rise over the last 50 of "
                         f"{fsp.iterations} iterations={worst_rise:.4f} (slack 1e-3)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
