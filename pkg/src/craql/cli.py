"""Command-line entry point.

    craql -P <projectlist> -Q <querylist> [--dirs ROOT] [--jobs N]
          [--recursion-limit N]
    craql collate  [--dirs ROOT]
    craql genprops [--dirs ROOT]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from craql.runner import (
    RunConfig,
    RunnerError,
    collate_csv,
    generate_props,
    run_batch,
)


def _add_dirs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--dirs",
        type=Path,
        default=Path("."),
        metavar="ROOT",
        help="root holding the projects/, queries/, properties/, results/ directories",
    )


def build_run_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="craql", description="Run query files over project trees.")
    parser.add_argument("-P", "--projects", type=Path, required=True, metavar="LIST",
                        help="file listing project names, one per line")
    parser.add_argument("-Q", "--queries", type=Path, required=True, metavar="LIST",
                        help="file listing query file names, one per line")
    _add_dirs(parser)
    parser.add_argument("--jobs", type=int, default=1, help="projects evaluated concurrently")
    parser.add_argument("--recursion-limit", type=int, default=512,
                        help="maximum callquery depth")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(format="%(levelname)s %(message)s")

    if argv and argv[0] in ("collate", "genprops"):
        sub = argparse.ArgumentParser(prog=f"craql {argv[0]}")
        _add_dirs(sub)
        args = sub.parse_args(argv[1:])
        try:
            if argv[0] == "collate":
                out = collate_csv(args.dirs / "results")
                print(f"wrote {out}")
            else:
                written = generate_props(args.dirs / "properties")
                print(f"wrote {len(written)} properties files")
        except RunnerError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return 0

    args = build_run_parser().parse_args(argv)
    config = RunConfig.from_root(
        args.dirs,
        project_list=args.projects,
        query_list=args.queries,
        recursion_limit=args.recursion_limit,
        jobs=args.jobs,
    )
    try:
        status, records = run_batch(config)
    except RunnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    ok = sum(1 for r in records if not r.aborted)
    print(f"{ok}/{len(records)} projects completed; results in {config.results_dir}",
          file=sys.stderr)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
