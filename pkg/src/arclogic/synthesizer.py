"""Search for a program as a sequence of induced generator clauses.

Each search node holds per-example grid states. Expanding a node picks a
target relation backed by detected instances, induces one clause for it, and
applies the clause to every unified example with target-consistent objects
drawn first. The search is budget-guided best-first on built surface; success
requires at least min_unified training canvases to equal their targets
exactly and the program to apply validly to the test inputs.
"""

from __future__ import annotations

import heapq
import json
import os
import sys
from dataclasses import dataclass, field


def _debug(*parts):
    if os.environ.get("ARCLOGIC_DEBUG"):
        print(*parts, file=sys.stderr, flush=True)

from arclogic.clauses import Program, clause_text, program_score, program_text
from arclogic.grid import Grid, Task, grids_equal, infer_background, render_text
from arclogic.ilp import IlpConfig, InducedClause, NoClause, TargetSignature, induce_clause
from arclogic.interpreter import (
    ApplicationResult,
    GenContext,
    GridState,
    apply_program_deductive,
    apply_step,
    generate_objects,
    GenerationCapExceeded,
    training_order,
)
from arclogic.objects import ExtractionCaps, Point, Line, Rectangle, extract_objects, footprint
from arclogic import relations as rel

TARGET_ORDER = {"line_from_point": 0, "translate": 1, "copy": 2}
KIND_ORDER = {"point": 0, "line": 1, "rectangle": 2}


class Unsolved(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass
class Budget:
    max_depth: int = 6
    max_nodes: int = 400
    min_unified: int = 2
    max_clause_len: int = 8
    max_rectangles: int = 512
    detect_cap: int = 100_000
    max_objects: int = 5000
    max_solutions: int = 200_000
    max_order_objects: int = 12
    order_search_nodes: int = 20_000
    max_clause_retries: int = 5
    sub_line_phase: bool = True  # retry extraction with sub-lines enabled


@dataclass
class Solution:
    task_id: str
    program: Program
    unified: tuple         # train example indices reproduced exactly
    predictions: tuple     # one Grid per test example
    score: int
    depth: int

    def document(self) -> str:
        return json.dumps(
            {
                "task": self.task_id,
                "score": self.score,
                "depth": self.depth,
                "unified": list(self.unified),
                "program": program_text(self.program),
                "predictions": [g.rows() for g in self.predictions],
            },
            indent=1,
            sort_keys=True,
        ) + "\n"

    def text(self) -> str:
        parts = [program_text(self.program)]
        parts.append(f"score {self.score}")
        parts.append(f"unified {' '.join(str(i) for i in self.unified)}")
        for i, g in enumerate(self.predictions):
            parts.append(f"prediction {i}")
            parts.append(render_text(g).rstrip("\n"))
        return "\n".join(parts) + "\n"


@dataclass
class _Example:
    input_grid: Grid
    target: Grid
    input_rep: object
    output_rep: object
    oo_targets: frozenset  # (relation, kind) pairs with OO instances


@dataclass
class _Node:
    states: tuple        # per train example GridState
    unified: tuple       # indices still consistent with their targets
    program: tuple       # Clause sequence
    scopes: tuple
    depth: int
    seq: int
    covered: int
    preds: tuple | None = None   # test predictions, set when terminal-eligible
    blind: tuple = ()            # examples the blind deductive replay rebuilds

    def priority(self):
        score = sum(len(c.body) for c in self.program)
        return (-self.covered, score, self.depth, self.seq)


def score_program(program: Program) -> int:
    return program_score(program)


def _oo_target_set(output_rep, output_grid) -> frozenset:
    insts = rel.detect_all(output_rep, None, output_grid, None, strict=False)
    out = set()
    for inst in insts:
        if inst.relation in TARGET_ORDER:
            out.add((inst.relation, _subject_kind(inst)))
    return frozenset(out)


def _subject_kind(inst) -> str:
    from arclogic.objects import kind

    return kind(inst.obj1)


def _io_targets(state: GridState, example: _Example) -> set:
    """(relation, kind) pairs with at least one instance from the promoted
    input facts to the target output objects."""
    out = set()
    out_objs = sorted(example.output_rep.objects, key=_sort_key_obj)
    out_by_kind: dict = {"point": [], "line": [], "rectangle": []}
    for o in out_objs:
        out_by_kind[_kind_of(o)].append(o)
    for k in ("point", "line", "rectangle"):
        pool = state.pools.get(k, ())
        for a in pool:
            for b in out_by_kind[k]:
                if ("translate", k) not in out and rel.detect_translate(a, b, rel.SCOPE_IO):
                    out.add(("translate", k))
                if ("copy", k) not in out and rel.detect_copy(a, b, rel.SCOPE_IO):
                    out.add(("copy", k))
            if ("translate", k) in out and ("copy", k) in out:
                break
    for p in state.pools.get("point", ()):
        if ("line_from_point", "point") in out:
            break
        for line in out_by_kind["line"]:
            if rel.detect_line_from_point(p, line, rel.SCOPE_IO):
                out.add(("line_from_point", "point"))
                break
    return out


def _kind_of(o):
    from arclogic.objects import kind

    return kind(o)


def _sort_key_obj(o):
    from arclogic.objects import sort_key

    return sort_key(o)


def enumerate_targets(node: _Node, examples, min_unified: int, depth: int) -> list:
    """Viable target signatures, canonical order.

    Depth 0 considers only input-to-output backed relations; later depths add
    output-to-output ones. point_straight_path_to never generates, and
    within-input relations are body material only.
    """
    counts: dict = {}
    for i in node.unified:
        found = _io_targets(node.states[i], examples[i])
        if depth > 0:
            found = found | set(examples[i].oo_targets)
        for sig in found:
            counts[sig] = counts.get(sig, 0) + 1
    viable = [sig for sig, n in counts.items() if n >= min_unified]
    viable.sort(key=lambda s: (TARGET_ORDER[s[0]], KIND_ORDER[s[1]]))
    return [TargetSignature(relation, kind) for relation, kind in viable]


def _prepare_examples(task: Task, caps: ExtractionCaps, budget: Budget) -> list:
    examples = []
    for ex in task.train:
        bg = infer_background(ex.input)
        input_rep = extract_objects(ex.input, bg, caps)
        out_bg = infer_background(ex.output)
        output_rep = extract_objects(ex.output, out_bg, caps)
        examples.append(
            _Example(
                ex.input, ex.output, input_rep, output_rep,
                _oo_target_set(output_rep, ex.output),
            )
        )
    return examples


def _apply_training_step(state: GridState, clause, target: Grid, budget: Budget):
    """Apply one induced clause with target-consistent objects first.

    Returns (new_state, consistent_only, progressed) or None when generation
    blows the cap.
    """
    ctx = GenContext.from_state(
        state, max_objects=budget.max_objects, max_solutions=budget.max_solutions
    )
    try:
        objects = generate_objects(clause, ctx)
    except GenerationCapExceeded:
        return None
    order = training_order(objects, target)
    new_state, drawn, _blocked = apply_step(state, order)
    consistent = all(
        all(
            0 <= x < target.width and 0 <= y < target.height
            and target.get(x, y) == o.color
            for (x, y) in footprint(o)
        )
        for o in drawn
    )
    progressed = len(new_state.occupied) > len(state.occupied)
    return new_state, consistent, progressed


def _blind_replay_matches(program: Program, example: _Example, caps: ExtractionCaps,
                          budget: Budget) -> bool:
    """Target-blind deductive application must rebuild the training output.

    This is the arbiter that separates a program from a lucky draw order:
    at solve time the output grid is unknown, so covering the most surface
    has to land on the training output by itself."""
    state = GridState.initial(example.input_rep, example.input_grid,
                              cap_per_scope=budget.detect_cap)
    res = apply_program_deductive(
        program, state, None,
        max_order_objects=budget.max_order_objects,
        max_nodes=budget.order_search_nodes,
        gen_kwargs={"max_objects": budget.max_objects,
                    "max_solutions": budget.max_solutions},
    )
    return bool(res.ok and res.canvas is not None
                and grids_equal(res.canvas, example.target))


def _test_predictions(program: Program, task: Task, caps: ExtractionCaps, budget: Budget):
    """Apply the program to every test input; None when application fails."""
    preds = []
    for ex in task.test:
        bg = infer_background(ex.input)
        try:
            input_rep = extract_objects(ex.input, bg, caps)
        except Exception:
            return None
        state = GridState.initial(input_rep, ex.input, cap_per_scope=budget.detect_cap)
        res = apply_program_deductive(
            program, state, None,
            max_order_objects=budget.max_order_objects,
            max_nodes=budget.order_search_nodes,
            gen_kwargs={"max_objects": budget.max_objects,
                        "max_solutions": budget.max_solutions},
        )
        if not res.ok or res.canvas is None:
            return None
        preds.append(res.canvas)
    return tuple(preds)


def _solve_phase(task: Task, caps: ExtractionCaps, budget: Budget) -> Solution | None:
    try:
        examples = _prepare_examples(task, caps, budget)
    except Exception:
        return None
    ilp_cfg = IlpConfig(
        max_clause_len=budget.max_clause_len,
        min_unified=budget.min_unified,
        int_constants=tuple(
            range(0, max(max(e.input_grid.width, e.input_grid.height) for e in examples) + 1)
        ),
        color_constants=tuple(sorted({
            c
            for e in examples
            for grid in (e.input_grid, e.target)
            for c in grid.cells
        })),
        max_objects=budget.max_objects,
        max_solutions=budget.max_solutions,
    )

    states = tuple(
        GridState.initial(e.input_rep, e.input_grid, cap_per_scope=budget.detect_cap)
        for e in examples
    )
    root = _Node(
        states=states,
        unified=tuple(range(len(examples))),
        program=(),
        scopes=(),
        depth=0,
        seq=0,
        covered=0,
    )

    heap = [(root.priority(), root.seq, root)]
    seen = set()
    seq = 1
    expansions = 0
    best_solution: Solution | None = None

    while heap:
        _, _, node = heapq.heappop(heap)
        if expansions >= budget.max_nodes:
            break
        expansions += 1
        _debug(f"pop depth={node.depth} covered={node.covered} unified={node.unified} "
               f"score={sum(len(c.body) for c in node.program)} "
               f"prog={[clause_text(c)[:60] for c in node.program]}")

        # terminal test: the blind replay rebuilt enough training outputs and
        # the test application was valid (both checked at node creation)
        if node.program and len(node.blind) >= budget.min_unified and node.preds is not None:
            program = Program(tuple(node.program), tuple(node.scopes))
            _debug(f"  terminal blind={node.blind}")
            sol = Solution(
                task.id, program, node.blind, node.preds, program_score(program),
                node.depth,
            )
            if best_solution is None or (
                sol.score, -len(sol.unified)
            ) < (best_solution.score, -len(best_solution.unified)):
                best_solution = sol
            break  # first success under deterministic best-first order

        if node.depth >= budget.max_depth:
            continue

        for sig in enumerate_targets(node, examples, budget.min_unified, node.depth):
            ctxs = [
                GenContext.from_state(
                    node.states[i],
                    max_objects=budget.max_objects,
                    max_solutions=budget.max_solutions,
                )
                for i in node.unified
            ]
            targets = [examples[i].target for i in node.unified]
            occupieds = [node.states[i].occupied for i in node.unified]

            tabu: list = []
            for _attempt in range(budget.max_clause_retries):
                try:
                    induced = induce_clause(sig, ctxs, targets, occupieds, ilp_cfg,
                                            tabu=tuple(tabu))
                except NoClause:
                    break

                new_states = list(node.states)
                survivors = []
                progressed_any = False
                failed = False
                for i in node.unified:
                    step = _apply_training_step(
                        node.states[i], induced.clause, examples[i].target, budget
                    )
                    if step is None:
                        failed = True
                        break
                    new_state, consistent, progressed = step
                    if consistent:
                        survivors.append(i)
                        new_states[i] = new_state
                        progressed_any = progressed_any or progressed
                viable = (not failed and len(survivors) >= budget.min_unified
                          and progressed_any)
                _debug(f"  target {sig.relation}/{sig.kind} attempt={_attempt} "
                       f"viable={viable} survivors={survivors} "
                       f"clause={clause_text(induced.clause)[:100]}")
                if not viable:
                    # reroute induction around the first committed decision
                    decisions = [
                        l for l in induced.clause.body[1:]
                        if l.pred not in ("member", "point_attrs", "line_attrs",
                                          "rectangle_attrs")
                    ]
                    if not decisions or decisions[0] in tabu:
                        break
                    tabu.append(decisions[0])
                    continue

                scope = "IO" if node.depth == 0 else (
                    "OO" if (sig.relation, sig.kind) in examples[survivors[0]].oo_targets
                    else "IO"
                )
                child = _Node(
                    states=tuple(new_states),
                    unified=tuple(survivors),
                    program=node.program + (induced.clause,),
                    scopes=node.scopes + (scope,),
                    depth=node.depth + 1,
                    seq=seq,
                    covered=sum(len(new_states[i].occupied) for i in survivors),
                )
                seq += 1
                child_done = tuple(
                    i for i in child.unified
                    if grids_equal(new_states[i].canvas, examples[i].target)
                )
                if len(child_done) >= budget.min_unified:
                    program = Program(tuple(child.program), tuple(child.scopes))
                    blind = tuple(
                        i for i in child_done
                        if _blind_replay_matches(program, examples[i], caps, budget)
                    )
                    if len(blind) >= budget.min_unified:
                        child.preds = _test_predictions(program, task, caps, budget)
                        child.blind = blind
                        if child.preds is None:
                            _debug(f"  child vetoed (test application) "
                                   f"{clause_text(induced.clause)[:80]}")
                            break  # invalid program; leave the state unclaimed
                    else:
                        _debug(f"  child not blind-reproducible "
                               f"(done={child_done} blind={blind})")
                sig_key = (child.unified,
                           tuple(new_states[i].canvas.cells for i in child.unified))
                if sig_key not in seen:
                    seen.add(sig_key)
                    heapq.heappush(heap, (child.priority(), child.seq, child))
                break

    return best_solution


def supported(task: Task) -> bool:
    """Only same-size input/output transformations are in scope."""
    return all(
        ex.output is not None
        and ex.input.width == ex.output.width
        and ex.input.height == ex.output.height
        for ex in task.train
    )


def solve_task(task: Task, budget: Budget | None = None) -> Solution:
    budget = budget or Budget()
    if not supported(task):
        raise Unsolved("unsupported: input/output dimensions differ")
    phases = [ExtractionCaps(sub_lines=False, max_rectangles=budget.max_rectangles,
                             allow_partial=True)]
    if budget.sub_line_phase:
        phases.append(ExtractionCaps(sub_lines=True, max_rectangles=budget.max_rectangles,
                                     allow_partial=True))
    solutions = []
    for caps in phases:
        _debug(f"=== phase sub_lines={caps.sub_lines}")
        sol = _solve_phase(task, caps, budget)
        if sol is not None:
            if len(sol.unified) == len(task.train):
                return sol  # nothing left to unify; later phases cannot beat it
            solutions.append(sol)
    if solutions:
        return min(solutions, key=lambda s: (s.score, -len(s.unified)))
    raise Unsolved("search budget exhausted without a complete program")


def verify_on_train(program: Program, task: Task, budget: Budget | None = None,
                    caps: ExtractionCaps | None = None) -> list:
    """Per train example: does the program rebuild the output exactly?"""
    budget = budget or Budget()
    caps = caps or ExtractionCaps(sub_lines=False, max_rectangles=budget.max_rectangles,
                                  allow_partial=True)
    out = []
    for ex in task.train:
        bg = infer_background(ex.input)
        input_rep = extract_objects(ex.input, bg, caps)
        state = GridState.initial(input_rep, ex.input, cap_per_scope=budget.detect_cap)
        res = apply_program_deductive(
            program, state, ex.output,
            max_order_objects=budget.max_order_objects,
            max_nodes=budget.order_search_nodes,
            gen_kwargs={"max_objects": budget.max_objects,
                        "max_solutions": budget.max_solutions},
        )
        out.append(bool(res.ok and res.canvas is not None and grids_equal(res.canvas, ex.output)))
    return out
