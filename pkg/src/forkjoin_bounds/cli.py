"""Command line front end.

    forkjoin-bounds bounds   TOPOLOGY MODEL...
    forkjoin-bounds simulate TOPOLOGY MODEL... [--cycles K] [--seed S] [--out FILE]
    forkjoin-bounds table    NAME [--n N] [--cycles K] [--seed S] [--out FILE]

TOPOLOGY is a topology file, or one of the built-in names ``fig1`` and
``tandemN`` (e.g. ``tandem10``). MODEL is either a model file or the model
line itself, e.g. ``exponential 1 1 1 1 1`` or ``mixture 1/2``.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import network
from .experiments import (
    DEFAULT_CYCLES,
    TABLE_NAMES,
    bounds_only,
    load_config,
    preset,
    render_csv,
    run_sweep,
    topology_summary,
    write_csv,
)
from .network import ParseError, Topology
from .stochastic import DEFAULT_SEED, BoundsReport, UpperBoundError, estimate_gamma, format_model, parse_model

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3
UPPER_METHODS = ("auto", "closed-form", "quadrature", "monte-carlo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_topology(arg: str) -> Topology:
    path = Path(arg)
    if path.is_file():
        return network.load_topology(path)
    if arg == "fig1":
        return network.fig1()
    m = re.fullmatch(r"tandem(\d+)", arg)
    if m:
        return network.tandem(int(m.group(1)))
    raise UsageError(f"no such topology file or built-in name: {arg!r}")


def resolve_model(tokens: list[str], n: int):
    if len(tokens) == 1 and Path(tokens[0]).is_file():
        path = Path(tokens[0])
        return parse_model(path.read_text(encoding="utf-8"), n, source=str(path))
    return parse_model(" ".join(tokens), n, source="<command line>")


def _print_report(rep: BoundsReport, out=None) -> None:
    out = sys.stdout if out is None else out
    rows = [
        ("lower", f"{rep.lower:.6f}"),
        ("upper", f"{rep.upper:.6f}"),
        ("upper_method", rep.upper_method),
        ("upper_error", f"{rep.upper_error:.6f}"),
    ]
    if rep.gamma_hat is not None:
        rows += [
            ("gamma_hat", f"{rep.gamma_hat:.6f}"),
            ("stderr", f"{rep.stderr:.6f}"),
            ("k", str(rep.k)),
            ("seed", str(rep.seed)),
            ("bracketed", "yes" if rep.bracketed else "NO"),
        ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}", file=out)


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_bounds(args) -> int:
    t = resolve_topology(args.topology)
    model = resolve_model(args.model, t.n)
    _print_report(bounds_only(model, args.upper_method, args.seed))
    return EXIT_OK


def cmd_simulate(args) -> int:
    t = resolve_topology(args.topology)
    model = resolve_model(args.model, t.n)
    if args.cycles < 1:
        raise UsageError("--cycles must be at least 1")
    rep = estimate_gamma(model, t, args.cycles, args.seed, upper_method=args.upper_method)
    _print_report(rep)
    if args.out:
        label = format_model(model).strip().replace("\n", " / ")
        if label.startswith("model "):
            label = label[len("model "):]
        meta = {"experiment": "simulate", "topology": topology_summary(t), "cycles": args.cycles, "seed": args.seed}
        stream, close = _open_out(args.out)
        try:
            write_csv(stream, [rep], [label], "model", meta)
        finally:
            if close:
                stream.close()
    return EXIT_OK


def cmd_table(args) -> int:
    if args.config:
        cfg = load_config(args.config, n=args.n)
    else:
        if args.name is None:
            raise UsageError("give a table name or --config")
        cfg = preset(args.name, args.n)
    if args.name is not None and args.name != cfg.name:
        raise UsageError(f"table name {args.name!r} disagrees with config ({cfg.name!r})")
    if args.cycles is not None:
        cfg.cycles = args.cycles
    if args.seed is not None:
        cfg.seed = args.seed
    if args.upper_method is not None:
        cfg.upper_method = args.upper_method
    if cfg.cycles < 1:
        raise UsageError("--cycles must be at least 1")
    reports = run_sweep(cfg, jobs=args.jobs)
    text = render_csv(cfg, reports)
    stream, close = _open_out(args.out)
    try:
        stream.write(text)
    finally:
        if close:
            stream.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="forkjoin-bounds", description="Mean cycle time bounds for acyclic fork-join networks.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("bounds", help="print the lower and upper bounds")
    p.add_argument("topology")
    p.add_argument("model", nargs="+")
    p.add_argument("--upper-method", choices=UPPER_METHODS, default="auto")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for a Monte Carlo upper bound")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="estimate the mean cycle time by simulation")
    p.add_argument("topology")
    p.add_argument("model", nargs="+")
    p.add_argument("--cycles", type=int, default=DEFAULT_CYCLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="write a one-row CSV here ('-' for stdout)")
    p.add_argument("--upper-method", choices=UPPER_METHODS, default="auto")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table", help="run a built-in sweep and write CSV")
    p.add_argument("name", nargs="?", choices=TABLE_NAMES)
    p.add_argument("--config", help="JSON sweep file layered over the preset")
    p.add_argument("--n", type=int, help="tandem length for table3 (default 10)")
    p.add_argument("--cycles", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--upper-method", choices=UPPER_METHODS)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"forkjoin-bounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"forkjoin-bounds: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UpperBoundError, FloatingPointError, ArithmeticError) as exc:
        print(f"forkjoin-bounds: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KeyError, ValueError) as exc:
        print(f"forkjoin-bounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
