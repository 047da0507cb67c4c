"""Command-line driver: ``kaccess <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 failed check, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from kaccess.accessibility import (
    Verdict,
    is_k_accessible,
    lazy_is_k_accessible,
    path_witness,
)
from kaccess.closure import build_Hk, expected_hk_degree, k_transitive_closure
from kaccess.estimate import exact_theta, monte_carlo_theta
from kaccess.experiments import ConfigError, parse_config, run_lemma1_check, run_scan, write_scan
from kaccess.tree import LazyLabeler, TreeFormatError, TreeSizeError, parse_labeled_tree, parse_tree

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _emit(obj) -> None:
    print(json.dumps(obj, indent=1))


def cmd_check(args) -> int:
    if args.path is not None:
        try:
            labels = [float(x) for x in args.path.split(",")]
        except ValueError:
            raise UsageError(f"--path must be comma-separated numbers, got {args.path!r}") from None
        positions = path_witness(labels, args.k)
        verdict = Verdict.ACCESSIBLE if positions is not None else Verdict.BLOCKED
        _emit({"verdict": verdict.value, "witness_positions": positions})
        return EXIT_OK
    if args.file is None:
        raise UsageError("give a labeled-tree FILE or --path")
    tree, labeling = parse_labeled_tree(_read(args.file))
    out = is_k_accessible(tree, labeling, args.k)
    _emit({
        "verdict": out.verdict.value,
        "witness": list(out.witness.selected) if out.witness else None,
        "nodes_visited": out.nodes_visited,
    })
    return EXIT_OK


def cmd_exact(args) -> int:
    tree = parse_tree(_read(args.file))
    theta = exact_theta(tree, args.k, cap=args.cap)
    _emit({"theta": str(theta), "value": float(theta), "vertex_count": tree.vertex_count})
    return EXIT_OK


def cmd_estimate(args) -> int:
    est = monte_carlo_theta(args.n, args.h, args.k, args.trials, args.seed,
                            budget=None if args.budget == 0 else args.budget,
                            workers=args.workers)
    _emit(dict(est.to_json(), n=args.n, h=args.h, k=args.k))
    return EXIT_OK


def cmd_closure(args) -> int:
    tree = parse_tree(_read(args.file))
    _emit(k_transitive_closure(tree, args.k).to_json())
    return EXIT_OK


def cmd_hk(args) -> int:
    hk = build_Hk(args.n, args.h, args.k, cap=args.cap, max_depth=args.max_depth)
    report = hk.degree_report()
    mismatches = 0
    for row in report:
        row["expected_degree"] = expected_hk_degree(args.n, args.k, row["residual_depth"])
        mismatches += row["degree"] != row["expected_degree"]
    print(hk.tree.serialize())
    _emit({"vertex_count": hk.tree.vertex_count, "internal_vertices": len(report),
           "degree_mismatches": mismatches, "degrees": report if args.verbose else None})
    return EXIT_CHECK if mismatches and args.max_depth is None else EXIT_OK


def cmd_scan(args) -> int:
    config = parse_config(_read(args.config))
    if args.output:
        from dataclasses import replace
        config = replace(config, output=args.output)
    if not config.output:
        raise UsageError("scan needs an output prefix (config key 'output' or --output)")
    rows = run_scan(config, write=False)
    paths = write_scan(config, rows)
    _emit({"rows": len(rows), **{k: str(v) for k, v in paths.items()}})
    return EXIT_OK


def cmd_lemma1(args) -> int:
    report = run_lemma1_check(args.n, args.h, args.k, args.trials, args.seed, args.mode)
    _emit(report.to_json())
    return EXIT_OK if report.holds else EXIT_CHECK


def cmd_lazy(args) -> int:
    out = lazy_is_k_accessible(args.n, args.h, args.k, LazyLabeler(args.seed),
                               budget=None if args.budget == 0 else args.budget)
    _emit({
        "verdict": out.verdict.value,
        "witness": [list(p) for p in out.witness.selected] if out.witness else None,
        "nodes_visited": out.nodes_visited,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kaccess", description="k-accessibility percolation on rooted trees")
    p.add_argument("-v", "--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", help="decide k-accessibility of a labeled path or tree")
    s.add_argument("file", nargs="?", help="labeled-tree file (parent array, rank array)")
    s.add_argument("--path", help="comma-separated labels of a single path, root first")
    s.add_argument("-k", type=int, required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("exact", help="exact theta_k of a small tree by enumeration")
    s.add_argument("file")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--cap", type=int, default=9)
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("estimate", help="Monte Carlo theta_k of the complete n-ary tree")
    for name in ("n", "h", "k", "trials", "seed"):
        s.add_argument(name, type=int)
    s.add_argument("budget", type=int, nargs="?", default=1_000_000, help="0 for unbounded")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("lazy", help="one lazy search on an implicit n-ary tree")
    for name in ("n", "h", "k", "seed"):
        s.add_argument(name, type=int)
    s.add_argument("--budget", type=int, default=0, help="0 for unbounded")
    s.set_defaults(func=cmd_lazy)

    s = sub.add_parser("closure", help="dump the k-transitive closure of a tree as JSON")
    s.add_argument("file")
    s.add_argument("-k", type=int, required=True)
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("hk", help="build H^k, dump it and check the degree formula")
    for name in ("n", "h", "k"):
        s.add_argument(name, type=int)
    s.add_argument("cap", type=int, nargs="?", default=10**6)
    s.add_argument("--max-depth", type=int)
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(func=cmd_hk)

    s = sub.add_parser("scan", help="threshold scan from a config file")
    s.add_argument("config")
    s.add_argument("--output", help="override the config's output prefix")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("lemma1", help="compare theta_1(H^k) with theta_1(T^k)")
    for name in ("n", "h", "k"):
        s.add_argument(name, type=int)
    s.add_argument("--mode", choices=("exact", "mc"), default="exact")
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_lemma1)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"kaccess: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ConfigError, TreeFormatError, TreeSizeError, ValueError) as exc:
        print(f"kaccess: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
