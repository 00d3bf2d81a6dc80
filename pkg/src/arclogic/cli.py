"""Command-line entry points: solve, extract, batch."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from arclogic.grid import TaskError, infer_background, parse_task
from arclogic.objects import CapExceeded, ExtractionCaps, extract_objects, representation_dump
from arclogic.synthesizer import Budget, Unsolved, solve_task

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_UNSOLVED = 2


def _add_budget_flags(p: argparse.ArgumentParser):
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--min-unified", type=int, default=2)
    p.add_argument("--max-clause-len", type=int, default=8)
    p.add_argument("--max-nodes", type=int, default=400)
    p.add_argument("--max-rectangles", type=int, default=512)
    p.add_argument("--order-perms", type=int, default=12,
                   help="max objects per step for exhaustive order search")
    p.add_argument("--sub-lines", action="store_true",
                   help="start with sub-line enumeration enabled")
    p.add_argument("--format", choices=("text", "document"), default="text")


def _budget_from_args(args) -> Budget:
    return Budget(
        max_depth=args.max_depth,
        min_unified=args.min_unified,
        max_clause_len=args.max_clause_len,
        max_nodes=args.max_nodes,
        max_rectangles=args.max_rectangles,
        max_order_objects=args.order_perms,
    )


def _load_task(path: str):
    p = Path(path)
    return parse_task(p.read_bytes(), task_id=p.stem)


def cmd_solve(args) -> int:
    try:
        task = _load_task(args.task)
    except (OSError, TaskError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    budget = _budget_from_args(args)
    if args.sub_lines:
        budget.sub_line_phase = True
    try:
        solution = solve_task(task, budget)
    except Unsolved as e:
        print(f"unsolved: {e.reason}", file=sys.stderr)
        return EXIT_UNSOLVED
    if args.format == "document":
        sys.stdout.write(solution.document())
    else:
        sys.stdout.write(solution.text())
    return EXIT_OK


def cmd_extract(args) -> int:
    try:
        task = _load_task(args.task)
    except (OSError, TaskError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    caps = ExtractionCaps(sub_lines=args.sub_lines, max_rectangles=args.max_rectangles)
    try:
        for label, grids in (
            ("train", [(ex.input, ex.output) for ex in task.train]),
            ("test", [(ex.input, ex.output) for ex in task.test]),
        ):
            for i, (grid_in, grid_out) in enumerate(grids):
                for side, g in (("input", grid_in), ("output", grid_out)):
                    if g is None:
                        continue
                    rep = extract_objects(g, infer_background(g), caps)
                    sys.stdout.write(f"{label}[{i}] {side}\n")
                    sys.stdout.write(representation_dump(rep))
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return EXIT_OK


def cmd_batch(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return EXIT_INPUT_ERROR
    budget = _budget_from_args(args)
    rows = []
    for path in sorted(directory.glob("*.json")):
        started = time.monotonic()
        status, score, depth = "unsolved", "", ""
        try:
            task = parse_task(path.read_bytes(), task_id=path.stem)
        except (OSError, TaskError):
            status = "invalid"
            rows.append((path.stem, status, score, depth, 0))
            continue
        try:
            solution = solve_task(task, budget)
            status = "solved"
            score = solution.score
            depth = solution.depth
        except Unsolved as e:
            status = "unsupported" if e.reason.startswith("unsupported") else "unsolved"
        except Exception:
            status = "error"
        ms = int((time.monotonic() - started) * 1000)
        rows.append((path.stem, status, score, depth, ms))
    solved = sum(1 for r in rows if r[1] == "solved")
    if args.format == "document":
        doc = {
            "solved": solved,
            "total": len(rows),
            "tasks": [
                {"id": r[0], "status": r[1], "score": r[2] or None,
                 "depth": r[3] if r[3] != "" else None, "ms": r[4]}
                for r in rows
            ],
        }
        sys.stdout.write(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    else:
        for r in rows:
            sys.stdout.write(f"{r[0]} {r[1]} score={r[2]} depth={r[3]} ms={r[4]}\n")
        sys.stdout.write(f"solved {solved}/{len(rows)}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="arclogic",
        description="Induce object-generating logic programs for ARC-style grid tasks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one task file")
    p_solve.add_argument("task")
    _add_budget_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_extract = sub.add_parser("extract", help="dump object representations")
    p_extract.add_argument("task")
    p_extract.add_argument("--sub-lines", action="store_true")
    p_extract.add_argument("--max-rectangles", type=int, default=512)
    p_extract.set_defaults(func=cmd_extract)

    p_batch = sub.add_parser("batch", help="solve every *.json task in a directory")
    p_batch.add_argument("directory")
    _add_budget_flags(p_batch)
    p_batch.set_defaults(func=cmd_batch)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
