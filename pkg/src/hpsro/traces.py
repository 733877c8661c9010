"""Text formats for run traces, trajectory tables and joint-policy files.

Trace files start with ``trace v1`` followed by ``key value`` header lines
and comma-delimited tables introduced by ``[name]`` lines. Every float is
written with ``repr`` so it parses back to the identical value. The only
line that differs between two identical runs is the ``timestamp`` line.
"""

from __future__ import annotations

import datetime as _dt

import numpy as np

from .engine import RunTrace
from .game_core import JointPolicy, ProductPolicy, SharedPolicy
from .builtin_games import GameParseError

TRACE_HEADER = "trace v1"
POLICY_HEADER = "policy v1"


def _f(x) -> str:
    return repr(float(x))


def _policy_fields(policy) -> list:
    if isinstance(policy, ProductPolicy):
        sizes = "x".join(str(v.size) for v in policy.per_player_probs)
        return [f"product:{sizes}"] + [_f(x) for v in policy.per_player_probs for x in v]
    if isinstance(policy, SharedPolicy):
        return ["shared"] + [_f(x) for x in policy.probs]
    return ["joint"] + [_f(x) for x in policy.probs]


def format_trace(trace: RunTrace, timestamp: str | None = None) -> str:
    cfg = trace.config
    bro = cfg.bro_config
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    lines = [
        TRACE_HEADER,
        f"timestamp {timestamp} elapsed_s={trace.elapsed:.6f}",
        f"game {trace.game_name or '-'}",
        f"algorithm {cfg.algorithm}",
        f"seed {cfg.seed}",
        f"max_iterations {cfg.max_iterations}",
        f"br_gap_tolerance {_f(cfg.br_gap_tolerance)}",
        f"record_trajectories {str(cfg.record_trajectories).lower()}",
        "shared_init " + (",".join(_f(x) for x in cfg.shared_init) if cfg.shared_init is not None else "-"),
    ]
    for name in ("max_sweeps", "restarts", "improvement_tolerance", "shared_grid_points",
                 "shared_refinement_tolerance", "exact_mode_threshold"):
        lines.append(f"bro.{name} {getattr(bro, name)!r}")
    lines += [
        f"termination {trace.termination}",
        f"iterations {trace.iterations}",
        f"final_exploitability {_f(trace.final.exploitability) if trace.records else '-'}",
        "[iterations]",
        "iteration,pop1,pop2,value,br1,br2,gap1,gap2,exploitability,bro_seed1,bro_seed2",
    ]
    for r in trace.records:
        fields = [r.iteration, *r.pop_sizes, _f(r.value), *map(_f, r.br_values), *map(_f, r.br_gaps),
                  _f(r.exploitability), *(r.bro_seeds or ("-", "-"))]
        lines.append(",".join(str(x) for x in fields))
    lines += ["[meta]", "iteration,team,weights..."]
    for r in trace.records:
        for team, weights in ((1, r.meta1), (2, r.meta2)):
            lines.append(",".join([str(r.iteration), str(team)] + [_f(w) for w in weights]))
    lines += ["[appended]", "iteration,team,kind,coordinates..."]
    for r in trace.records:
        for team, policy in r.appended:
            lines.append(",".join([str(r.iteration), str(team)] + _policy_fields(policy)))
    if cfg.record_trajectories:
        lines += ["[trajectory]", "iteration,team,coordinates..."]
        for r in trace.records:
            for team, joint in zip((1, 2), r.joint_pair):
                lines.append(",".join([str(r.iteration), str(team)] + [_f(x) for x in joint.probs]))
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> tuple:
    """Return (header dict, {table name: list of rows as string lists})."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise GameParseError(f"expected header {TRACE_HEADER!r}", 1, 1)
    header: dict = {}
    tables: dict = {}
    current = None
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            tables[current] = []
            continue
        if current is None:
            key, _, value = line.partition(" ")
            header[key] = value
        else:
            tables[current].append(line.split(","))
    # Drop the column-name rows.
    return header, {name: rows[1:] for name, rows in tables.items()}


def format_table(rows, header=("iteration", "team")) -> str:
    width = max((len(r) for r in rows), default=len(header))
    names = list(header) + [f"c{i}" for i in range(width - len(header))]
    out = [",".join(names)]
    for row in rows:
        out.append(",".join([str(int(row[0])), str(int(row[1]))] + [_f(x) for x in row[2:]]))
    return "\n".join(out) + "\n"


def parse_table(text: str) -> list:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append((int(cells[0]), int(cells[1]), *(float(c) for c in cells[2:])))
    return rows


def format_policy(policy: JointPolicy) -> str:
    return f"{POLICY_HEADER}\nteam {policy.team}\n" + " ".join(_f(x) for x in policy.probs) + "\n"


def parse_policy(text: str) -> JointPolicy:
    """Parse a ``policy v1`` joint-policy file."""
    team = None
    values: list = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != POLICY_HEADER:
                raise GameParseError(f"expected header {POLICY_HEADER!r}", lineno, 1)
            header_seen = True
        elif line.startswith("team"):
            parts = line.split()
            if len(parts) != 2 or parts[1] not in ("1", "2"):
                raise GameParseError("team line must be 'team 1' or 'team 2'", lineno, 1)
            team = int(parts[1])
        else:
            for tok in line.split():
                try:
                    values.append(float(tok))
                except ValueError:
                    raise GameParseError(f"invalid number {tok!r}", lineno, raw.index(tok) + 1) from None
    if not header_seen:
        raise GameParseError("empty policy file", 1, 1)
    if team is None:
        raise GameParseError("missing team line", 1, 1)
    if not values or not np.all(np.isfinite(values)):
        raise GameParseError("policy needs finite probabilities", 1, 1)
    return JointPolicy(team, values)
