"""Command-line front end: ``hpsro run | eval | value | gen | validate``.

Errors print one line ``error:<category>: <message>`` to stderr and exit
with 2 (config), 3 (game or policy file), or 4 (size guard).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from .builtin_games import BUILTIN_GAMES, GameParseError, get_builtin, parse_game, random_team_game, serialize_game
from .engine import ALGORITHMS, ConfigError, RunConfig, run
from .evaluation import SizeGuardError, best_response_values, export_trajectory, solve_full_tmecor
from .game_core import GameError, TeamGame, to_joint
from .oracles import BroConfig
from .traces import format_policy, format_table, format_trace, parse_policy

EXIT_CONFIG, EXIT_PARSE, EXIT_SIZE = 2, 3, 4


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int):
        self.category = category
        self.code = code
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("config", message, EXIT_CONFIG)


def _csv_numbers(text: str, kind=float) -> list:
    return [kind(x) for x in text.split(",") if x.strip()]


def load_game(source: str) -> TeamGame:
    if source in BUILTIN_GAMES:
        return get_builtin(source)
    path = Path(source)
    if not path.is_file():
        raise CliError("config", f"game: {source!r} is neither a built-in game ({', '.join(BUILTIN_GAMES)}) nor a file", EXIT_CONFIG)
    try:
        return parse_game(path.read_text(encoding="utf-8"))
    except GameParseError as exc:
        raise CliError("parse", f"{path}: {exc}", EXIT_PARSE) from None
    except GameError as exc:
        raise CliError("parse", f"{path}: {exc}", EXIT_PARSE) from None


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError("config", f"config: file {path!r} not found", EXIT_CONFIG) from None
    except json.JSONDecodeError as exc:
        raise CliError("config", f"config: {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}", EXIT_CONFIG) from None
    if not isinstance(data, dict):
        raise CliError("config", "config: top level must be an object", EXIT_CONFIG)
    return data


_CONFIG_KEYS = {"game", "algo", "iters", "seed", "seeds", "out", "br_gap", "restarts", "shared_init", "bro",
                "trajectory", "projection"}


def _merged_run_options(args) -> dict:
    opts: dict = {}
    if args.config:
        opts = _load_config_file(args.config)
        unknown = set(opts) - _CONFIG_KEYS
        if unknown:
            raise CliError("config", f"{sorted(unknown)[0]}: unknown config field", EXIT_CONFIG)
    for key in ("game", "algo", "iters", "seed", "out", "br_gap", "restarts", "shared_init", "trajectory", "projection"):
        value = getattr(args, key)
        if value is not None:
            opts[key] = value
    if "seed" in opts:
        opts["seeds"] = [opts.pop("seed")]
    return opts


def _build_run_config(opts: dict, seed: int) -> RunConfig:
    bro_opts = dict(opts.get("bro", {}))
    valid = {f.name for f in fields(BroConfig)}
    for key in bro_opts:
        if key not in valid:
            raise CliError("config", f"bro.{key}: unknown field", EXIT_CONFIG)
    if "restarts" in opts:
        bro_opts["restarts"] = opts["restarts"]
    try:
        bro = BroConfig(**bro_opts)
    except (TypeError, GameError) as exc:
        raise CliError("config", f"bro: {exc}", EXIT_CONFIG) from None
    shared_init = opts.get("shared_init")
    if isinstance(shared_init, str):
        shared_init = shared_init.strip().lower()
        shared_init = (1.0, 0.0) if shared_init == "rock" else tuple(_csv_numbers(shared_init))
    elif shared_init is not None:
        shared_init = tuple(float(x) for x in shared_init)
    try:
        return RunConfig(
            algorithm=str(opts.get("algo", "hpsro")),
            max_iterations=int(opts.get("iters", 50)),
            br_gap_tolerance=float(opts.get("br_gap", 1e-9)),
            seed=int(seed),
            bro_config=bro,
            shared_init=shared_init,
        )
    except ConfigError as exc:
        raise CliError("config", str(exc), EXIT_CONFIG) from None
    except (TypeError, ValueError) as exc:
        raise CliError("config", str(exc), EXIT_CONFIG) from None


def _out_path(out: str, seed: int, sweep: bool) -> Path:
    if "{seed}" in out:
        return Path(out.format(seed=seed))
    path = Path(out)
    return path.with_name(f"{path.stem}.seed{seed}{path.suffix}") if sweep else path


def cmd_run(args) -> int:
    opts = _merged_run_options(args)
    seeds = opts.get("seeds")
    if not seeds:
        raise CliError("config", "seed: a seed is required (--seed or 'seed'/'seeds' in the config file)", EXIT_CONFIG)
    if len(set(seeds)) != len(seeds):
        raise CliError("config", "seeds: seeds must be distinct", EXIT_CONFIG)
    if "game" not in opts:
        raise CliError("config", "game: no game given", EXIT_CONFIG)
    configs = [_build_run_config(opts, s) for s in seeds]
    game = load_game(str(opts["game"]))
    sweep = len(seeds) > 1
    for config in configs:
        try:
            trace = run(game, config)
        except ConfigError as exc:
            raise CliError("config", str(exc), EXIT_CONFIG) from None
        prefix = f"seed {config.seed} " if sweep else ""
        print(f"{prefix}exploitability {trace.final.exploitability!r}")
        print(f"{prefix}iterations {trace.iterations}")
        print(f"{prefix}termination {trace.termination}")
        if opts.get("out"):
            path = _out_path(str(opts["out"]), config.seed, sweep)
            path.write_text(format_trace(trace), encoding="utf-8")
        if opts.get("trajectory"):
            path = _out_path(str(opts["trajectory"]), config.seed, sweep)
            try:
                rows = export_trajectory(trace, opts.get("projection", "raw"))
            except GameError as exc:
                raise CliError("config", f"projection: {exc}", EXIT_CONFIG) from None
            path.write_text(format_table(rows), encoding="utf-8")
    return 0


def _load_policy(path: str, field_name: str):
    try:
        return parse_policy(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError("config", f"{field_name}: file {path!r} not found", EXIT_CONFIG) from None
    except GameError as exc:
        raise CliError("policy", f"{field_name}: {path}: {exc}", EXIT_PARSE) from None


def cmd_eval(args) -> int:
    game = load_game(args.game)
    p1 = _load_policy(args.p1, "p1")
    p2 = _load_policy(args.p2, "p2")
    try:
        j1, j2 = to_joint(p1, game), to_joint(p2, game)
        if j1.team != 1 or j2.team != 2:
            raise GameError("p1 must be a team 1 policy and p2 a team 2 policy")
        br1, br2 = best_response_values(game, j1, j2)
    except GameError as exc:
        raise CliError("policy", str(exc), EXIT_PARSE) from None
    print(f"exploitability {br1 + br2!r}")
    print(f"br_value_team1 {br1!r}")
    print(f"br_value_team2 {br2!r}")
    return 0


def cmd_value(args) -> int:
    game = load_game(args.game)
    try:
        p1, p2, value = solve_full_tmecor(game)
    except SizeGuardError as exc:
        raise CliError("size", str(exc), EXIT_SIZE) from None
    print(f"value {value!r}")
    print("team1 " + " ".join(repr(float(x)) for x in p1.probs))
    print("team2 " + " ".join(repr(float(x)) for x in p2.probs))
    if args.out_prefix:
        for team, policy in ((1, p1), (2, p2)):
            Path(f"{args.out_prefix}.team{team}.policy").write_text(format_policy(policy), encoding="utf-8")
    return 0


def cmd_gen(args) -> int:
    try:
        game = random_team_game(
            _csv_numbers(args.team1, int), _csv_numbers(args.team2, int), tuple(_csv_numbers(args.range)), args.seed
        )
    except (GameError, ValueError) as exc:
        raise CliError("config", f"gen: {exc}", EXIT_CONFIG) from None
    text = serialize_game(game)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    game = load_game(args.file)
    print(f"ok {game.name or args.file}: team1 {list(game.team1_player_action_counts)}, "
          f"team2 {list(game.team2_player_action_counts)}, {game.payoff1.size} entries")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hpsro", description="Two-team zero-sum game solvers (H-PSRO and baselines).")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", help="run a training loop and write a trace")
    p.add_argument("--game", help="built-in game name or game file path")
    p.add_argument("--algo", help=f"one of {', '.join(ALGORITHMS)}")
    p.add_argument("--iters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="trace file; '{seed}' is replaced in sweeps")
    p.add_argument("--config", help="JSON experiment file; flags override it")
    p.add_argument("--br-gap", dest="br_gap", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--shared-init", dest="shared_init", help="team_psro initial shared policy, e.g. 'rock' or '1,0'")
    p.add_argument("--trajectory", help="write the trajectory table to this file")
    p.add_argument("--projection", choices=("raw", "team_rps"))
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="exploitability of a pair of joint policies")
    p.add_argument("--game", required=True)
    p.add_argument("--p1", required=True, help="team 1 policy file")
    p.add_argument("--p2", required=True, help="team 2 policy file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("value", help="solve the full game exactly")
    p.add_argument("--game", required=True)
    p.add_argument("--out-prefix", dest="out_prefix", help="also write <prefix>.team{1,2}.policy")
    p.set_defaults(func=cmd_value)

    p = sub.add_parser("gen", help="write a random game file")
    p.add_argument("--team1", required=True, help="per-player action counts, e.g. 2,2")
    p.add_argument("--team2", required=True)
    p.add_argument("--range", default="-1,1", help="payoff range low,high")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="parse a game file and report errors")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)
    return parser


def _attach_range_value(argv: list) -> list:
    # argparse reads "-1,1" as an option; glue it to its flag instead.
    out = []
    for i, tok in enumerate(argv):
        if i > 0 and argv[i - 1] == "--range" and tok.startswith("-"):
            out[-1] = f"--range={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = _attach_range_value(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise CliError("config", "command: expected one of run, eval, value, gen, validate", EXIT_CONFIG)
        return args.func(args)
    except CliError as exc:
        print(f"error:{exc.category}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
