"""Command-line front end.

Commands: ``eval`` (Boolean answer of a bound query), ``answers`` (full
answer enumeration), ``shapley`` (contribution report), ``nonzero``
(positivity verdict for one player).  Output is deterministic for identical
inputs, flags and seed.

Exit codes: 0 success, 2 parse/validation error, 3 enumeration overflow,
4 multiplicative approximation requested for an infinite language, 5 search
budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import explain, game as game_mod, query as query_mod
from .errors import (
    BudgetExceeded,
    EnumerationOverflow,
    InfiniteLanguage,
    PathShapError,
)
from .explain import ExplainRequest
from .game import ShapleyReport
from .graph import load_graph


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pathshap")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("eval", "answers", "shapley", "nonzero"):
        c = sub.add_parser(name)
        c.add_argument("--graph", required=True, help="graph file path")
        c.add_argument("--query", required=True, help="query text")
        if name != "answers":
            c.add_argument("--bind", required=True, help="variable binding, e.g. x=v1,y=v6")
        if name in ("shapley", "nonzero"):
            c.add_argument("--player-kind", choices=("edge", "vertex"), default="edge")
            c.add_argument("--focus", default=None, help="restrict to one player id")
        if name == "shapley":
            c.add_argument(
                "--mode",
                choices=("auto", "exact", "approx-additive", "approx-multiplicative"),
                default="auto",
            )
            c.add_argument("--eps", type=float, default=0.05)
            c.add_argument("--delta", type=float, default=0.01)
            c.add_argument("--seed", type=int, default=0)
            c.add_argument("--format", choices=("json", "csv", "table"), default="table")
        c.add_argument("--cap", type=int, default=game_mod.SUBSET_CAP)
        c.add_argument("--budget", type=int, default=1_000_000)
    return p


def _load_inputs(args, need_binding: bool):
    g = load_graph(Path(args.graph).read_text())
    q = query_mod.compile_crpq(args.query, g.alphabet)
    mu = query_mod.parse_binding(args.bind, q) if need_binding else None
    return g, q, mu


def _row_fields(player: str, value, method: str) -> dict:
    row = {"id": player}
    if isinstance(value, Fraction):
        row["value"] = str(value)
    else:
        row["value"] = float(value.value)
        row["eps"] = value.eps
        row["delta"] = value.delta
        row["samples"] = value.samples
        row["seed"] = value.seed
    row["method"] = method
    return row


def _sorted_rows(report: ShapleyReport) -> list[dict]:
    def sort_key(item):
        player, value = item
        v = value if isinstance(value, Fraction) else value.value
        return (-v, player)

    return [
        _row_fields(player, value, report.method)
        for player, value in sorted(report.values.items(), key=sort_key)
    ]


def _render_report(report: ShapleyReport, fmt: str, out) -> None:
    rows = _sorted_rows(report)
    if fmt == "json":
        payload = {
            "method": report.method,
            "players": [
                {k: v for k, v in row.items() if k != "method"} for row in rows
            ],
            "flags": list(report.flags),
        }
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    columns = ["id", "value", "method", "eps", "delta", "samples", "seed"]
    sampled = any("samples" in row for row in rows)
    if not sampled:
        columns = columns[:3]
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(c, "") for c in columns])
        for flag in report.flags:
            writer.writerow(["# " + flag])
        return
    out.write("\t".join(columns) + "\n")
    for row in rows:
        out.write("\t".join(str(row.get(c, "-")) for c in columns) + "\n")
    for flag in report.flags:
        out.write(f"# {flag}\n")


def _cmd_eval(args, out) -> int:
    g, q, mu = _load_inputs(args, need_binding=True)
    result = query_mod.eval_crpq_bound(g, q, mu)
    out.write(("1" if result else "0") + "\n")
    return 0


def _cmd_answers(args, out) -> int:
    g = load_graph(Path(args.graph).read_text())
    q = query_mod.compile_crpq(args.query, g.alphabet)
    for answer in query_mod.enumerate_answers(g, q, cap=args.cap):
        out.write("\t".join(answer) + "\n")
    return 0


def _cmd_shapley(args, out) -> int:
    g, q, mu = _load_inputs(args, need_binding=True)
    req = ExplainRequest(
        graph=g,
        query=q,
        binding=mu,
        player_kind=args.player_kind,
        focus=args.focus,
        mode=args.mode,
        eps=args.eps,
        delta=args.delta,
        seed=args.seed,
        subset_cap=args.cap,
        budget=args.budget,
    )
    report = explain.solve(req)
    _render_report(report, args.format, out)
    return 0


def _cmd_nonzero(args, out) -> int:
    g, q, mu = _load_inputs(args, need_binding=True)
    if args.focus is None:
        raise PathShapError("nonzero needs --focus <player id>")
    players = sorted(g.endo_edges if args.player_kind == "edge" else g.endo_vertices)
    if args.focus not in players:
        raise PathShapError(f"{args.focus} is not an endogenous {args.player_kind}")
    if args.player_kind == "edge":
        game = explain.edge_game(g, q, mu)
    else:
        game = explain.vertex_game(g, q, mu)
    supports = explain.candidate_supports(g, q, mu, args.player_kind, budget=args.budget)
    try:
        verdict = game_mod.shapley_nonzero(game, args.focus, supports)
    except BudgetExceeded:
        out.write("unknown\n")
        return 5
    out.write(("true" if verdict else "false") + "\n")
    return 0


_COMMANDS = {
    "eval": _cmd_eval,
    "answers": _cmd_answers,
    "shapley": _cmd_shapley,
    "nonzero": _cmd_nonzero,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except EnumerationOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InfiniteLanguage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (PathShapError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
