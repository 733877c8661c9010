import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hpsro.builtin_games import (
    GameParseError,
    get_builtin,
    make_team_rps,
    parse_game,
    random_team_game,
    rps_decision,
    serialize_game,
)
from hpsro.evaluation import exploitability
from hpsro.game_core import GameError, JointPolicy
from reference import eq7_fixture

A, B = 0, 1


def rps_cell(game, joint1, joint2):
    return game.payoff1[game.joint_index(1, joint1), game.joint_index(2, joint2)]


def test_team_rps_examples(rps):
    assert rps_cell(rps, (B, A), (A, A)) == -1.0  # Scissors vs Rock
    assert rps_cell(rps, (A, B), (A, A)) == 1.0  # Paper vs Rock
    assert rps_cell(rps, (B, B), (B, A)) == 0.0  # Scissors vs Scissors


def test_team_rps_decision_map():
    assert [rps_decision(*a) for a in [(A, A), (A, B), (B, A), (B, B)]] == [0, 1, 2, 2]


def test_team_rps_is_antisymmetric(rps):
    np.testing.assert_array_equal(rps.payoff1, -rps.payoff1.T)


def test_hetero_golden_rows(hetero):
    golden = np.array([[1, 4, 3, 6], [4, 2, 1, 4], [-1, 2, 1, 4], [-3, 0, -1, 2]], dtype=float)
    np.testing.assert_array_equal(eq7_fixture(), golden)
    np.testing.assert_array_equal(hetero.payoff1, golden)


def test_hetero_examples(hetero):
    def cell(a1, a2):
        i = [("0", "0"), ("0", "2"), ("1", "0"), ("1", "2")].index(a1)
        j = [("0", "0"), ("0", "3"), ("1", "0"), ("1", "3")].index(a2)
        return hetero.payoff1[i, j]

    assert cell(("0", "2"), ("0", "0")) == 4.0
    assert cell(("0", "0"), ("0", "0")) == 1.0
    assert cell(("1", "2"), ("1", "3")) == 2.0
    assert hetero.joint_labels(1, 1) == ("0", "2")


def test_random_game_determinism_and_shape():
    a = random_team_game([2, 2], [2, 2], (-1, 1), 42)
    b = random_team_game([2, 2], [2, 2], (-1, 1), 42)
    assert a.payoff1.shape == (4, 4)
    assert a.payoff1.tobytes() == b.payoff1.tobytes()
    assert not np.array_equal(a.payoff1, random_team_game([2, 2], [2, 2], (-1, 1), 43).payoff1)
    assert a.payoff1.min() >= -1 and a.payoff1.max() <= 1


def test_random_zero_range_game_has_zero_exploitability():
    g = random_team_game([2, 3], [2], (0, 0), 5)
    assert not g.payoff1.any()
    rng = np.random.default_rng(0)
    p1 = JointPolicy(1, rng.dirichlet(np.ones(6)))
    p2 = JointPolicy(2, rng.dirichlet(np.ones(2)))
    assert exploitability(g, p1, p2) == 0.0


@pytest.mark.parametrize("sizes,rng_", [([], [2]), ([0], [2]), ([2], [2])])
def test_random_game_errors(sizes, rng_):
    payoff_range = (1, 0) if sizes == [2] else (0, 1)
    with pytest.raises(GameError):
        random_team_game(sizes, rng_, payoff_range, 0)


@pytest.mark.parametrize("name", ["team_rps", "hetero_matrix"])
def test_builtin_round_trip(name):
    game = get_builtin(name)
    back = parse_game(serialize_game(game))
    assert back.equals(game)
    assert back.name == name


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**64 - 1), st.lists(st.integers(1, 3), min_size=1, max_size=3),
       st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_random_round_trip_is_bit_exact(seed, s1, s2):
    game = random_team_game(s1, s2, (-1e6, 1e-3), seed)
    back = parse_game(serialize_game(game))
    assert back.payoff1.tobytes() == game.payoff1.tobytes()
    assert serialize_game(back) == serialize_game(game)


def _rps_text():
    return serialize_game(make_team_rps())


def test_entry_count_error():
    lines = _rps_text().splitlines()
    lines[-1] = " ".join(lines[-1].split()[:3])  # 15 entries for a 4x4 game
    with pytest.raises(GameParseError, match="entry count"):
        parse_game("\n".join(lines))


def test_non_finite_error_reports_position():
    text = _rps_text().replace("-1.0", "inf", 1)
    with pytest.raises(GameParseError, match="non-finite") as info:
        parse_game(text)
    assert info.value.line == 6 and info.value.column == 5


def test_syntax_errors_report_line_and_column():
    with pytest.raises(GameParseError) as info:
        parse_game("teamgame v1\nteam1 a,b\nteam2 a,b\npayoff\n1 2 x 4\n")
    assert (info.value.line, info.value.column) == (5, 5)
    with pytest.raises(GameParseError) as info:
        parse_game("teamgame v2\n")
    assert info.value.line == 1
    with pytest.raises(GameParseError, match="unknown keyword"):
        parse_game("teamgame v1\nplayers 2\n")


def test_duplicate_labels_rejected():
    with pytest.raises(GameParseError, match="duplicate"):
        parse_game("teamgame v1\nteam1 a,a\nteam2 a,b\npayoff\n1 2\n3 4\n")


def test_comments_and_metadata():
    text = "# demo\nteamgame v1\nname demo game\nmeta source hand written\nteam1 x,y\nteam2 u\npayoff\n1.5\n-2\n"
    game = parse_game(text)
    assert game.name == "demo game"
    assert game.metadata == {"source": "hand written"}
    assert game.payoff1.tolist() == [[1.5], [-2.0]]
    assert parse_game(serialize_game(game)).metadata == game.metadata
