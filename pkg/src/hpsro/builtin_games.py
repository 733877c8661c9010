"""Benchmark games, seeded random games and the ``teamgame v1`` text format.

File layout (UTF-8, ``#`` starts a comment line, blank lines ignored)::

    teamgame v1
    name team_rps            # optional
    meta source example      # optional, repeatable: key then value
    team1 a,b a,b            # one comma-separated label list per player
    team2 a,b a,b
    payoff
    0.0 -1.0 -1.0 1.0        # one row per team-1 joint action
    ...

Rows follow the mixed-radix joint-action order of :mod:`hpsro.game_core`.
Floats are written with ``repr`` so a parse/serialize round trip is exact.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .game_core import GameError, TeamGame

FORMAT_HEADER = "teamgame v1"

ROCK, PAPER, SCISSORS = 0, 1, 2
DECISION_NAMES = ("Rock", "Paper", "Scissors")


class GameParseError(GameError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


def rps_decision(p1: int, p2: int) -> int:
    """Team decision from two binary choices (0 = a, 1 = b).

    Player 1 choosing b means Scissors regardless of player 2; otherwise
    (a, a) is Rock and (a, b) is Paper.
    """
    if p1 == 1:
        return SCISSORS
    return ROCK if p2 == 0 else PAPER


def rps_outcome(d1: int, d2: int) -> float:
    if d1 == d2:
        return 0.0
    return 1.0 if (d1 - d2) % 3 == 1 else -1.0


def make_team_rps() -> TeamGame:
    joint = list(product(range(2), range(2)))
    payoff = np.array([[rps_outcome(rps_decision(*a1), rps_decision(*a2)) for a2 in joint] for a1 in joint])
    labels = (("a", "b"), ("a", "b"))
    return TeamGame((2, 2), (2, 2), payoff, action_labels=(labels, labels), name="team_rps")


def _hetero_payoff(a1: tuple, a2: tuple) -> float:
    # a1, a2 hold action labels: team 1 plays {0,1} x {0,2}, team 2 {0,1} x {0,3}.
    if a1 == (0, 2) and a2 == (0, 0):
        return 4.0
    nu1 = 2 * (a1[0] == 1) + 2 * (a1[1] == 2)
    nu2 = 2 * (a2[0] == 1) + 3 * (a2[1] == 3)
    return float(nu2 - nu1 + 1)


def make_hetero_matrix_game() -> TeamGame:
    labels1 = ((0, 1), (0, 2))
    labels2 = ((0, 1), (0, 3))
    rows = list(product(*labels1))
    cols = list(product(*labels2))
    payoff = np.array([[_hetero_payoff(a1, a2) for a2 in cols] for a1 in rows])
    return TeamGame((2, 2), (2, 2), payoff, action_labels=(labels1, labels2), name="hetero_matrix")


BUILTIN_GAMES = {
    "team_rps": make_team_rps,
    "hetero_matrix": make_hetero_matrix_game,
}


def get_builtin(name: str) -> TeamGame:
    try:
        return BUILTIN_GAMES[name]()
    except KeyError:
        raise GameError(f"unknown built-in game {name!r}; choose from {sorted(BUILTIN_GAMES)}") from None


def random_team_game(team1_sizes, team2_sizes, payoff_range=(-1.0, 1.0), seed: int = 0) -> TeamGame:
    """I.i.d. uniform payoffs from numpy's PCG64 generator seeded with ``seed``."""
    sizes1 = tuple(int(s) for s in team1_sizes)
    sizes2 = tuple(int(s) for s in team2_sizes)
    if not sizes1 or not sizes2 or min(sizes1 + sizes2) < 1:
        raise GameError("team sizes must be non-empty lists of positive action counts")
    low, high = (float(x) for x in payoff_range)
    if not (math.isfinite(low) and math.isfinite(high)) or low > high:
        raise GameError(f"invalid payoff range [{low}, {high}]")
    if not 0 <= int(seed) < 2**64:
        raise GameError("seed must be a 64-bit unsigned integer")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    shape = (int(np.prod(sizes1)), int(np.prod(sizes2)))
    payoff = rng.uniform(low, high, size=shape) if high > low else np.full(shape, low)
    return TeamGame(sizes1, sizes2, payoff, name=f"random_{seed}")


def serialize_game(game: TeamGame) -> str:
    lines = [FORMAT_HEADER]
    if game.name:
        lines.append(f"name {game.name}")
    for key, value in game.metadata.items():
        lines.append(f"meta {key} {value}")
    for team in (1, 2):
        players = [",".join(labels) for labels in game.action_labels[team - 1]]
        lines.append(f"team{team} " + " ".join(players))
    lines.append("payoff")
    for row in game.payoff1:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def _tokens(text: str):
    """Yield (column, token) pairs, columns 1-based."""
    col = 0
    for tok in text.split():
        col = text.index(tok, col)
        yield col + 1, tok
        col += len(tok)


def parse_game(text: str) -> TeamGame:
    name = ""
    metadata: dict = {}
    teams: dict = {}
    entries: list = []
    header_seen = in_payoff = False
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        toks = list(_tokens(line))
        if not header_seen:
            if line.strip() != FORMAT_HEADER:
                raise GameParseError(f"expected header {FORMAT_HEADER!r}", lineno, toks[0][0])
            header_seen = True
            continue
        if in_payoff:
            for col, tok in toks:
                try:
                    value = float(tok)
                except ValueError:
                    raise GameParseError(f"invalid number {tok!r}", lineno, col) from None
                if not math.isfinite(value):
                    raise GameParseError(f"non-finite payoff {tok!r}", lineno, col)
                entries.append(value)
            continue
        keyword = toks[0][1]
        if keyword == "name":
            name = line.strip()[len("name"):].strip()
        elif keyword == "meta":
            if len(toks) < 3:
                raise GameParseError("meta needs a key and a value", lineno, toks[0][0])
            metadata[toks[1][1]] = " ".join(t for _, t in toks[2:])
        elif keyword in ("team1", "team2"):
            if keyword in teams:
                raise GameParseError(f"duplicate {keyword} line", lineno, toks[0][0])
            if len(toks) < 2:
                raise GameParseError(f"{keyword} lists no players", lineno, toks[0][0])
            players = []
            for col, tok in toks[1:]:
                labels = tuple(tok.split(","))
                if any(not lab for lab in labels):
                    raise GameParseError(f"empty action label in {tok!r}", lineno, col)
                if len(set(labels)) != len(labels):
                    raise GameParseError(f"duplicate action labels in {tok!r}", lineno, col)
                players.append(labels)
            teams[keyword] = tuple(players)
        elif keyword == "payoff":
            if len(toks) > 1:
                raise GameParseError("unexpected tokens after 'payoff'", lineno, toks[1][0])
            missing = {"team1", "team2"} - teams.keys()
            if missing:
                raise GameParseError(f"'payoff' before {sorted(missing)[0]} line", lineno, toks[0][0])
            in_payoff = True
        else:
            raise GameParseError(f"unknown keyword {keyword!r}", lineno, toks[0][0])
    if not header_seen:
        raise GameParseError("empty game file", max(last_line, 1), 1)
    if not in_payoff:
        raise GameParseError("missing 'payoff' section", max(last_line, 1), 1)
    counts1 = tuple(len(p) for p in teams["team1"])
    counts2 = tuple(len(p) for p in teams["team2"])
    n1, n2 = int(np.prod(counts1)), int(np.prod(counts2))
    if len(entries) != n1 * n2:
        raise GameParseError(f"entry count mismatch: expected {n1 * n2} payoff entries ({n1}x{n2}), found {len(entries)}")
    payoff = np.array(entries, dtype=float).reshape(n1, n2)
    return TeamGame(counts1, counts2, payoff, action_labels=(teams["team1"], teams["team2"]), name=name, metadata=metadata)
