"""Clause evaluation as object generation, and program application.

A clause body is evaluated left to right against the promoted fact base
(object pools plus within-input relation instances). Each body solution is
completed through the head relation's generative semantics into zero or more
concrete objects. Applying a program draws generated objects step by step
onto a canvas; an object whose footprint touches an already-drawn cell is
blocked and skipped, never overwriting anything.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from arclogic.grid import Grid, filled
from arclogic.objects import (
    HORIZONTAL,
    VERTICAL,
    GridObject,
    Line,
    Point,
    Rectangle,
    Representation,
    footprint,
    kind,
    sort_key,
)
from arclogic.clauses import (
    Affine,
    Clause,
    Const,
    EQUAL,
    GREATERTHAN,
    GridConst,
    LOWERTHAN,
    Literal,
    MEMBER,
    POOL_NAME,
    Program,
    Var,
    ATTRS_PRED,
)
from arclogic import relations as rel

_UNBOUND = object()

POOL_KIND = {v: k for k, v in POOL_NAME.items()}


class GenerationCapExceeded(Exception):
    pass


@dataclass
class GenContext:
    """Promoted fact base one clause is evaluated against."""

    width: int
    height: int
    background: int
    pools: dict            # kind -> tuple of objects, deterministic order
    instances: dict        # relation -> tuple of II RelationInstance
    max_objects: int = 5000
    max_solutions: int = 200_000
    completion_cache: dict = field(default_factory=dict)

    @classmethod
    def from_state(cls, state: "GridState", **kw) -> "GenContext":
        return cls(
            state.canvas.width, state.canvas.height, state.background,
            state.pools, state.instances, **kw,
        )


def object_attrs(o: GridObject) -> tuple:
    if isinstance(o, Point):
        return (o.x, o.y, o.color)
    if isinstance(o, Line):
        return (o.x1, o.y1, o.x2, o.y2, o.color, o.length, o.orientation, o.direction)
    c = o.corners
    return c[0] + c[1] + c[2] + c[3] + (o.color, o.clean, o.area)


def _eval_term(t, bindings, ctx):
    if isinstance(t, Var):
        return bindings.get(t.name, _UNBOUND)
    if isinstance(t, Const):
        return t.value
    if isinstance(t, GridConst):
        return ctx.width if t.name == "grid_width" else ctx.height
    if isinstance(t, Affine):
        v = bindings.get(t.var.name, _UNBOUND)
        if v is _UNBOUND:
            return _UNBOUND
        return t.a * v + t.b
    raise TypeError(f"not a term: {t!r}")


def _unify(t, value, bindings, ctx):
    """Unify term t with a concrete value; returns updated bindings or None."""
    if isinstance(t, Var):
        got = bindings.get(t.name, _UNBOUND)
        if got is _UNBOUND:
            out = dict(bindings)
            out[t.name] = value
            return out
        return bindings if got == value else None
    got = _eval_term(t, bindings, ctx)
    if got is _UNBOUND:
        return None
    return bindings if got == value else None


def _member_pool_vars(body) -> dict:
    """Var name -> pool kind for every member literal (distinctness groups)."""
    out = {}
    for lit in body:
        if lit.pred == MEMBER and isinstance(lit.args[0], Var):
            out[lit.args[0].name] = POOL_KIND[lit.args[1]]
    return out


def _solutions(body, idx, bindings, ctx, pool_vars, counter, limit=None):
    if idx == len(body):
        counter[0] += 1
        if counter[0] > (limit if limit is not None else ctx.max_solutions):
            raise GenerationCapExceeded("body solution cap")
        yield bindings
        return
    lit = body[idx]
    pred = lit.pred

    if pred == MEMBER:
        var, pool_name = lit.args
        pool = ctx.pools.get(POOL_KIND[pool_name], ())
        bound = bindings.get(var.name, _UNBOUND)
        if bound is not _UNBOUND:
            if bound in pool:
                yield from _solutions(body, idx + 1, bindings, ctx, pool_vars, counter, limit)
            return
        taken = {
            bindings[name]
            for name, k in pool_vars.items()
            if k == POOL_KIND[pool_name] and name != var.name and name in bindings
        }
        for o in pool:
            if o in taken:
                continue
            nb = dict(bindings)
            nb[var.name] = o
            yield from _solutions(body, idx + 1, nb, ctx, pool_vars, counter, limit)
        return

    if pred in ATTRS_PRED.values():
        o = _eval_term(lit.args[0], bindings, ctx)
        if o is _UNBOUND:
            return
        values = object_attrs(o)
        nb = dict(bindings)
        for t, v in zip(lit.args[1:], values):
            if isinstance(t, Var):
                got = nb.get(t.name, _UNBOUND)
                if got is _UNBOUND:
                    nb[t.name] = v
                elif got != v:
                    return
            elif _eval_term(t, nb, ctx) != v:
                return
        yield from _solutions(body, idx + 1, nb, ctx, pool_vars, counter, limit)
        return

    if pred == EQUAL:
        a, b = lit.args
        va = _eval_term(a, bindings, ctx)
        vb = _eval_term(b, bindings, ctx)
        if va is _UNBOUND and vb is _UNBOUND:
            return
        if va is _UNBOUND:
            nb = _unify(a, vb, bindings, ctx)
        elif vb is _UNBOUND:
            nb = _unify(b, va, bindings, ctx)
        else:
            nb = bindings if va == vb else None
        if nb is not None:
            yield from _solutions(body, idx + 1, nb, ctx, pool_vars, counter, limit)
        return

    if pred in (GREATERTHAN, LOWERTHAN):
        va = _eval_term(lit.args[0], bindings, ctx)
        vb = _eval_term(lit.args[1], bindings, ctx)
        if va is _UNBOUND or vb is _UNBOUND:
            return
        ok = va > vb if pred == GREATERTHAN else va < vb
        if ok:
            yield from _solutions(body, idx + 1, bindings, ctx, pool_vars, counter, limit)
        return

    # detected-relation literal: enumerate ground instances from the fact base
    index = ctx.instances.get(pred)
    if index is None:
        return
    arg0 = lit.args[0]
    bound0 = _eval_term(arg0, bindings, ctx) if not isinstance(arg0, Var) else bindings.get(arg0.name, _UNBOUND)
    instances = index.for_obj1(bound0) if bound0 is not _UNBOUND else index.all
    for inst in instances:
        nb = _unify(arg0, inst.obj1, bindings, ctx)
        if nb is None:
            continue
        nb = _unify(lit.args[1], inst.obj2, nb, ctx)
        if nb is None:
            continue
        vals = inst.values
        if pred == rel.TRANSLATE:
            vals = inst.values[:2]  # head arity ignores color2
        ok = True
        for t, v in zip(lit.args[2:], vals):
            nb = _unify(t, v, nb, ctx)
            if nb is None:
                ok = False
                break
        if ok:
            yield from _solutions(body, idx + 1, nb, ctx, pool_vars, counter, limit)


def solutions(clause: Clause, ctx: GenContext):
    """Deterministic stream of body bindings."""
    pool_vars = _member_pool_vars(clause.body)
    counter = [0]
    subject = clause.head_vars[0]
    if not any(
        lit.pred == MEMBER and isinstance(lit.args[0], Var) and lit.args[0].name == subject.name
        for lit in clause.body
    ) and not any(
        isinstance(a, Var) and a.name == subject.name
        for lit in clause.body
        for a in lit.args
    ):
        # unconstrained subject: range over its pool
        for o in ctx.pools.get(clause.subject_kind, ()):
            seed = {subject.name: o}
            yield from _solutions(clause.body, 0, seed, ctx, pool_vars, counter)
        return
    yield from _solutions(clause.body, 0, {}, ctx, pool_vars, counter)


def _shift(o: GridObject, dx: int, dy: int) -> GridObject:
    if isinstance(o, Point):
        return Point(o.x + dx, o.y + dy, o.color)
    if isinstance(o, Line):
        return Line(o.x1 + dx, o.y1 + dy, o.x2 + dx, o.y2 + dy, o.color)
    mask = None
    if o.mask is not None:
        mask = frozenset((x + dx, y + dy) for x, y in o.mask)
    return Rectangle(o.x1 + dx, o.y1 + dy, o.x2 + dx, o.y2 + dy, o.color, o.clean, mask)


def _in_bounds(o: GridObject, w: int, h: int) -> bool:
    if isinstance(o, Point):
        return 0 <= o.x < w and 0 <= o.y < h
    return 0 <= o.x1 and 0 <= o.y1 and o.x2 < w and o.y2 < h


def _complete_line_from_point(head_vars, bindings, ctx):
    p = bindings.get(head_vars[0].name, _UNBOUND)
    if p is _UNBOUND or not isinstance(p, Point):
        return
    len_b = bindings.get(head_vars[2].name, _UNBOUND)
    ori_b = bindings.get(head_vars[3].name, _UNBOUND)
    dir_b = bindings.get(head_vars[4].name, _UNBOUND)
    lens = [len_b] if len_b is not _UNBOUND else list(range(2, max(ctx.width, ctx.height) + 1))
    oris = [ori_b] if ori_b is not _UNBOUND else [HORIZONTAL, VERTICAL]
    for length in lens:
        if not isinstance(length, int) or length < 2:
            continue
        for ori in oris:
            dirs = ("left", "right") if ori == HORIZONTAL else ("up", "down")
            for d in dirs if dir_b is _UNBOUND else (dir_b,):
                if d not in dirs:
                    continue
                if d == "right":
                    line = (p.x, p.y, p.x + length - 1, p.y)
                elif d == "left":
                    line = (p.x - length + 1, p.y, p.x, p.y)
                elif d == "down":
                    line = (p.x, p.y, p.x, p.y + length - 1)
                else:
                    line = (p.x, p.y - length + 1, p.x, p.y)
                x1, y1, x2, y2 = line
                if x1 < 0 or y1 < 0 or x2 >= ctx.width or y2 >= ctx.height:
                    continue
                yield Line(x1, y1, x2, y2, p.color)


def _complete_translate(head_vars, bindings, ctx):
    o = bindings.get(head_vars[0].name, _UNBOUND)
    if o is _UNBOUND:
        return
    dx_b = bindings.get(head_vars[2].name, _UNBOUND)
    dy_b = bindings.get(head_vars[3].name, _UNBOUND)
    dxs = [dx_b] if dx_b is not _UNBOUND else list(range(-(ctx.width - 1), ctx.width))
    dys = [dy_b] if dy_b is not _UNBOUND else list(range(-(ctx.height - 1), ctx.height))
    for dx in dxs:
        for dy in dys:
            if not isinstance(dx, int) or not isinstance(dy, int):
                continue
            shifted = _shift(o, dx, dy)
            if _in_bounds(shifted, ctx.width, ctx.height):
                yield shifted


def _complete_copy(head_vars, bindings, ctx):
    o = bindings.get(head_vars[0].name, _UNBOUND)
    if o is _UNBOUND:
        return
    color_b = bindings.get(head_vars[2].name, _UNBOUND)
    clean_b = bindings.get(head_vars[3].name, _UNBOUND)
    colors = [color_b] if color_b is not _UNBOUND else list(range(10))
    cleans = [clean_b] if clean_b is not _UNBOUND else [100]
    for color in colors:
        if not isinstance(color, int) or not 0 <= color <= 9:
            continue
        for clean in cleans:
            if isinstance(o, Point):
                if clean == 100:
                    yield Point(o.x, o.y, color)
            elif isinstance(o, Line):
                if clean == 100:
                    yield Line(o.x1, o.y1, o.x2, o.y2, color)
            else:
                if clean == 100:
                    yield Rectangle(o.x1, o.y1, o.x2, o.y2, color, 100)
                elif clean == o.clean:
                    yield Rectangle(o.x1, o.y1, o.x2, o.y2, color, o.clean, o.mask)


_COMPLETERS = {
    "line_from_point": _complete_line_from_point,
    "translate": _complete_translate,
    "copy": _complete_copy,
}


def complete_head(relation: str, head_vars, bindings, ctx: GenContext,
                  key_names=None) -> tuple:
    """Objects one body solution completes into; memoized on what matters.

    Completion depends only on the bound subject object and the bound head
    attribute values, so results are shared across candidate evaluations.
    """
    if key_names is None:
        key_names = head_key_names(head_vars)
    get = bindings.get
    key = (relation, get(key_names[0], _UNBOUND), get(key_names[1], _UNBOUND),
           get(key_names[2], _UNBOUND),
           get(key_names[3], _UNBOUND) if len(key_names) > 3 else None)
    cached = ctx.completion_cache.get(key)
    if cached is not None:
        return cached
    out = tuple(_COMPLETERS[relation](head_vars, bindings, ctx))
    ctx.completion_cache[key] = out
    return out


def head_key_names(head_vars) -> tuple:
    return tuple(v.name for i, v in enumerate(head_vars) if i != 1)


def extend_solutions(body_prefix, bindings_list, literal: Literal, ctx: GenContext,
                     limit: int | None = None):
    """Extend each binding with one more literal; deterministic order.

    Flat evaluator equivalent to one _solutions step, specialized for the
    candidate-scoring hot path."""
    if limit is None:
        limit = ctx.max_solutions
    pred = literal.pred
    args = literal.args
    out = []

    if pred == MEMBER:
        var, pool_name = args
        pool = ctx.pools.get(POOL_KIND[pool_name], ())
        pool_vars = _member_pool_vars(body_prefix + (literal,))
        group = [n for n, k in pool_vars.items()
                 if k == POOL_KIND[pool_name] and n != var.name]
        for b in bindings_list:
            got = b.get(var.name, _UNBOUND)
            if got is not _UNBOUND:
                if got in pool:
                    out.append(b)
                continue
            taken = {b[n] for n in group if n in b}
            for o in pool:
                if o in taken:
                    continue
                nb = dict(b)
                nb[var.name] = o
                out.append(nb)
            if len(out) > limit:
                raise GenerationCapExceeded("body solution cap")
        return out

    if pred in ATTRS_PRED.values():
        subject = args[0]
        attr_args = args[1:]
        for b in bindings_list:
            o = b.get(subject.name, _UNBOUND) if isinstance(subject, Var) else _eval_term(subject, b, ctx)
            if o is _UNBOUND:
                continue
            values = object_attrs(o)
            nb = dict(b)
            ok = True
            for t, v in zip(attr_args, values):
                if isinstance(t, Var):
                    got = nb.get(t.name, _UNBOUND)
                    if got is _UNBOUND:
                        nb[t.name] = v
                    elif got != v:
                        ok = False
                        break
                elif _eval_term(t, nb, ctx) != v:
                    ok = False
                    break
            if ok:
                out.append(nb)
                if len(out) > limit:
                    raise GenerationCapExceeded("body solution cap")
        return out

    if pred == EQUAL:
        a, c = args
        for b in bindings_list:
            va = _eval_term(a, b, ctx)
            vc = _eval_term(c, b, ctx)
            if va is _UNBOUND and vc is _UNBOUND:
                continue
            if va is _UNBOUND or vc is _UNBOUND:
                t, v = (a, vc) if va is _UNBOUND else (c, va)
                if isinstance(t, Var):
                    nb = dict(b)
                    nb[t.name] = v
                    out.append(nb)
                continue
            if va == vc:
                out.append(b)
        if len(out) > limit:
            raise GenerationCapExceeded("body solution cap")
        return out

    if pred in (GREATERTHAN, LOWERTHAN):
        a, c = args
        gt = pred == GREATERTHAN
        for b in bindings_list:
            va = _eval_term(a, b, ctx)
            vc = _eval_term(c, b, ctx)
            if va is _UNBOUND or vc is _UNBOUND:
                continue
            if (va > vc) if gt else (va < vc):
                out.append(b)
        if len(out) > limit:
            raise GenerationCapExceeded("body solution cap")
        return out

    index = ctx.instances.get(pred)
    if index is None:
        return out
    arg0, arg1 = args[0], args[1]
    rest = args[2:]
    trim = pred == rel.TRANSLATE
    for b in bindings_list:
        bound0 = b.get(arg0.name, _UNBOUND) if isinstance(arg0, Var) else _eval_term(arg0, b, ctx)
        instances = index.for_obj1(bound0) if bound0 is not _UNBOUND else index.all
        for inst in instances:
            nb = _unify(arg0, inst.obj1, b, ctx)
            if nb is None:
                continue
            nb = _unify(arg1, inst.obj2, nb, ctx)
            if nb is None:
                continue
            vals = inst.values[:2] if trim else inst.values
            ok = True
            for t, v in zip(rest, vals):
                nb = _unify(t, v, nb, ctx)
                if nb is None:
                    ok = False
                    break
            if ok:
                out.append(nb)
        if len(out) > limit:
            raise GenerationCapExceeded("body solution cap")
    return out


def generate_objects(clause: Clause, ctx: GenContext) -> list:
    """All objects the clause generates, deduplicated, deterministic order."""
    seen = set()
    out = []
    for bindings in solutions(clause, ctx):
        for obj in complete_head(clause.relation, clause.head_vars, bindings, ctx):
            if obj in seen:
                continue
            seen.add(obj)
            out.append(obj)
            if len(out) > ctx.max_objects:
                raise GenerationCapExceeded(
                    f"clause generated more than {ctx.max_objects} objects"
                )
    return out


def clause_covers(clause: Clause, obj: GridObject, ctx: GenContext) -> bool:
    return obj in generate_objects(clause, ctx)


def check_consistency(objects) -> bool:
    """False when two different-colored objects overlap (order search needed)."""
    objs = list(objects)
    for i, a in enumerate(objs):
        fa = footprint(a)
        for b in objs[i + 1:]:
            if a.color != b.color and fa & footprint(b):
                return False
    return True


# ---------------------------------------------------------------------------
# Grid states and program application


@dataclass
class GridState:
    canvas: Grid
    occupied: frozenset
    background: int
    pools: dict       # kind -> tuple (original input objects + promoted)
    instances: dict   # relation -> tuple of II instances over the pools

    @classmethod
    def initial(cls, input_rep: Representation, input_grid: Grid, cap_per_scope=100_000):
        pools = {
            k: tuple(sorted(input_rep.by_kind(k), key=sort_key))
            for k in ("point", "line", "rectangle")
        }
        instances = _index_instances(
            rel.detect_all(input_rep, None, input_grid, None,
                           cap_per_scope=cap_per_scope, strict=False)
        )
        bg = input_rep.background
        canvas = filled(input_grid.width, input_grid.height, bg)
        return cls(canvas, frozenset(), bg, pools, instances)

    def promote(self, drawn, canvas: Grid, occupied: frozenset) -> "GridState":
        """New state with drawn objects added to the input-side fact base."""
        pools = {k: list(v) for k, v in self.pools.items()}
        for o in drawn:
            if o not in pools[kind(o)]:
                pools[kind(o)].append(o)
        pools = {k: tuple(v) for k, v in pools.items()}
        new_rep = Representation(self.background, tuple(itertools.chain(*pools.values())))
        instances = _index_instances(
            rel.detect_all(new_rep, None, canvas, None, strict=False)
        )
        return GridState(canvas, occupied, self.background, pools, instances)


class InstanceIndex:
    """Instances of one relation, addressable by their first object."""

    __slots__ = ("all", "_by_obj1")

    def __init__(self, instances):
        self.all = tuple(instances)
        by = {}
        for inst in self.all:
            by.setdefault(inst.obj1, []).append(inst)
        self._by_obj1 = {k: tuple(v) for k, v in by.items()}

    def for_obj1(self, obj):
        return self._by_obj1.get(obj, ())


def _index_instances(instances) -> dict:
    by_rel: dict = {}
    for inst in instances:
        by_rel.setdefault(inst.relation, []).append(inst)
    return {k: InstanceIndex(v) for k, v in by_rel.items()}


def apply_step(state: GridState, order) -> tuple:
    """Draw objects in the given order with blocking.

    Returns (new_state, drawn, blocked). Drawn objects are promoted.
    """
    cells = bytearray(state.canvas.cells)
    w = state.canvas.width
    occupied = set(state.occupied)
    drawn, blocked = [], []
    for o in order:
        fp = footprint(o)
        if any(c in occupied for c in fp):
            blocked.append(o)
            continue
        for (x, y) in fp:
            cells[y * w + x] = o.color
        occupied.update(fp)
        drawn.append(o)
    canvas = Grid(state.canvas.width, state.canvas.height, bytes(cells))
    new_state = state.promote(drawn, canvas, frozenset(occupied))
    return new_state, drawn, blocked


@dataclass
class ApplicationTrace:
    steps: list = field(default_factory=list)  # (ordered objects, drawn, blocked)
    canvases: list = field(default_factory=list)

    def dump(self) -> str:
        from arclogic.objects import describe

        lines = []
        for i, (order, drawn, blocked) in enumerate(self.steps):
            lines.append(f"step {i}")
            drawn_set = set(drawn)
            for o in order:
                mark = "drawn" if o in drawn_set else "blocked"
                lines.append(f"  {mark} {describe(o)}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class ApplicationResult:
    ok: bool
    canvas: Grid | None
    trace: ApplicationTrace | None
    covered: int
    reason: str = ""


def _classify(objects, target: Grid):
    """Split generated objects into target-consistent and inconsistent."""
    pos, neg = [], []
    for o in objects:
        good = True
        for (x, y) in footprint(o):
            if not (0 <= x < target.width and 0 <= y < target.height) or target.get(x, y) != o.color:
                good = False
                break
        (pos if good else neg).append(o)
    return pos, neg


def training_order(objects, target: Grid):
    """Target-consistent objects first (largest footprint leading, so a small
    consistent object cannot block a bigger one it sits inside), then the
    rest in canonical order.
    """
    pos, neg = _classify(objects, target)
    pos.sort(key=lambda o: (-len(footprint(o)), sort_key(o)))
    return pos + sorted(neg, key=sort_key)


def greedy_order(objects):
    """Target-blind fallback: largest footprint first, canonical tie-break."""
    return sorted(objects, key=lambda o: (-len(footprint(o)), sort_key(o)))


def greedy_order_contrarian(objects):
    """Same size-first greedy with the tie-break reversed; disagreement
    between the two orders exposes an ambiguous program."""
    return sorted(
        objects,
        key=lambda o: (-len(footprint(o)), tuple(-v for v in sort_key(o))),
    )


def _conflict_free_sets(objects, occupied, limit_objects=12):
    """Maximal drawable subsets reachable by some draw order.

    Objects already clashing with occupied cells can never draw and are
    dropped. Returns draw orders (canonical order within the subset); None
    when the step is too large to enumerate.
    """
    live = [o for o in sorted(objects, key=sort_key)
            if not (footprint(o) & occupied)]
    if len(live) > limit_objects:
        return None
    fps = [footprint(o) for o in live]
    n = len(live)
    results = []
    seen = set()
    for bits in range(1 << n):
        subset = [i for i in range(n) if bits >> i & 1]
        ok = True
        for ai in range(len(subset)):
            for bi in range(ai + 1, len(subset)):
                if fps[subset[ai]] & fps[subset[bi]]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        cover = frozenset().union(*(fps[i] for i in subset)) if subset else frozenset()
        # maximality: no excluded object fits alongside
        maximal = all(
            (fps[i] & cover) for i in range(n) if i not in subset
        )
        if not maximal:
            continue
        key = frozenset(subset)
        if key in seen:
            continue
        seen.add(key)
        results.append([live[i] for i in subset])
    results.sort(key=lambda objs: (-sum(len(footprint(o)) for o in objs),
                                   [sort_key(o) for o in objs]))
    return results


def apply_program_deductive(
    program: Program,
    initial: GridState,
    target: Grid | None,
    max_order_objects: int = 12,
    max_nodes: int = 20_000,
    gen_kwargs: dict | None = None,
) -> ApplicationResult:
    """Apply a program searching over drawing orders.

    With a target (training): succeed on the first order sequence whose final
    canvas equals the target, trying target-consistent-first orders before
    exhaustive draw-set branching. Without a target (test): return the
    application maximizing drawn surface, falling back to the greedy
    largest-first order on oversized steps.
    """
    gen_kwargs = gen_kwargs or {}

    best = {"result": None, "ambiguous": False}
    nodes = [0]

    def finish(state, trace):
        covered = len(state.occupied)
        res = ApplicationResult(True, state.canvas, trace, covered)
        if target is not None:
            return res if state.canvas.cells == target.cells else None
        cur = best["result"]
        if cur is None or covered > cur.covered:
            best["result"] = res
            best["ambiguous"] = False
        elif covered == cur.covered and state.canvas.cells != cur.canvas.cells:
            # two distinct canvases tie on covered surface: the program does
            # not determine its own output
            best["ambiguous"] = True
        return None

    def rec(step_idx, state, trace):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return None
        if step_idx == len(program.clauses):
            return finish(state, trace)
        clause = program.clauses[step_idx]
        ctx = GenContext.from_state(state, **gen_kwargs)
        try:
            objects = generate_objects(clause, ctx)
        except GenerationCapExceeded:
            return None

        orders = []
        if target is not None:
            orders.append(training_order(objects, target))
        sets = _conflict_free_sets(objects, state.occupied, max_order_objects)
        if sets is None:
            orders.append(greedy_order(objects))
            if target is None:
                orders.append(greedy_order_contrarian(objects))
        else:
            orders.extend(sets)
        tried = set()
        for order in orders:
            sig = tuple(sort_key(o) for o in order)
            if sig in tried:
                continue
            tried.add(sig)
            new_state, drawn, blocked = apply_step(state, order)
            new_trace = ApplicationTrace(
                trace.steps + [(list(order), drawn, blocked)],
                trace.canvases + [new_state.canvas],
            )
            res = rec(step_idx + 1, new_state, new_trace)
            if res is not None:
                return res
        return None

    res = rec(0, initial, ApplicationTrace())
    if res is not None:
        return res
    if target is None and best["result"] is not None:
        if best["ambiguous"]:
            return ApplicationResult(
                False, None, None, 0,
                reason="ambiguous: distinct canvases tie on covered surface",
            )
        return best["result"]
    return ApplicationResult(False, None, None, 0, reason="no order reached the target")
