"""Top-down clause induction over typed candidate literals.

Induction starts from a bare head plus the member literal binding the subject
object, then greedily appends the candidate with maximal information gain.
A candidate bundles a payload literal with the support literals it needs
(fresh member bindings, attribute accessors, relation literals), so chains
like ``member(Line2), line_attrs(Line2, ...), greaterthan(Len1, Len2)`` are
scored and added atomically.

Positive/negative examples come from the generated objects themselves: a
generated object is positive when its whole footprint matches the target
output grid. Objects whose footprint is already fully built are neutral for
gain purposes: drawing them is a no-op, blocking discards them anyway.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field

from arclogic.clauses import (
    ATTR_SLOTS,
    ATTRS_PRED,
    Affine,
    Clause,
    Const,
    EQUAL,
    GREATERTHAN,
    GridConst,
    KIND_TITLE,
    LOWERTHAN,
    Literal,
    MEMBER,
    POOL_NAME,
    TYPE_COLOR,
    TYPE_DIRECTION,
    TYPE_INT,
    TYPE_ORIENTATION,
    Var,
    literal_text,
    make_head,
)
from arclogic.grid import Grid
from arclogic.interpreter import (
    GenContext,
    GenerationCapExceeded,
    complete_head,
    extend_solutions,
    object_attrs,
    solutions,
)
from arclogic.objects import footprint, kind as object_kind
from arclogic import relations as rel

GENERATOR_RELATIONS = ("line_from_point", "translate", "copy")
BODY_RELATIONS = (rel.LINE_FROM_POINT, rel.TRANSLATE, rel.COPY, rel.PATH_TO)

ORIENTATION_VALUES = ("horizontal", "vertical")
DIRECTION_VALUES = ("down", "left", "right", "up")

# raw coordinates never appear as plain constants in clause bodies; lengths,
# areas and fill percentages do
COORD_SLOTS = frozenset({"x", "y", "x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4"})

# dimension tags: int quantities only ever relate within a dimension, the way
# the clause listings pair X_dir with dx-like values and Len with lengths
HEAD_INT_DIM = {"X_dir": "dx", "Y_dir": "dy", "Len": "len", "Clean_out": "clean"}
SLOT_DIM = {"len": "len", "area": "area", "clean": "clean"}
REL_VALUE_DIM = {
    rel.TRANSLATE: ("dx", "dy"),
    rel.PATH_TO: ("dx", "dy", None, None),
    rel.LINE_FROM_POINT: ("len", None, None),
    rel.COPY: (None, "clean"),
}

POOL_KIND = {v: k for k, v in POOL_NAME.items()}


class NoClause(Exception):
    pass


@dataclass(frozen=True)
class TargetSignature:
    relation: str
    kind: str  # kind of the subject (first head argument)


@dataclass
class IlpConfig:
    max_clause_len: int = 8
    min_unified: int = 2
    max_object_vars: int = 4
    affine_a: tuple = (-3, -2, -1, 1, 2, 3)
    affine_b: tuple = tuple(range(-5, 6))
    int_constants: tuple = tuple(range(0, 31))
    color_constants: tuple = tuple(range(10))
    max_objects: int = 5000
    max_solutions: int = 200_000
    max_eval_solutions: int = 25_000

    def gen_kwargs(self) -> dict:
        return {"max_objects": self.max_objects, "max_solutions": self.max_solutions}


@dataclass(frozen=True)
class ExampleSet:
    """Per-example positive/negative partition of the generated objects."""

    pairs: tuple  # ((pos tuple, neg tuple), ...) aligned with examples

    def totals(self):
        p = sum(len(pos) for pos, _ in self.pairs)
        n = sum(len(neg) for _, neg in self.pairs)
        return p, n


def object_consistent(o, target: Grid) -> bool:
    for (x, y) in footprint(o):
        if not (0 <= x < target.width and 0 <= y < target.height):
            return False
        if target.get(x, y) != o.color:
            return False
    return True


def generate_objects_list(clause: Clause, ctx: GenContext) -> list:
    from arclogic.interpreter import generate_objects

    return generate_objects(clause, ctx)


def construct_pos_neg(clause: Clause, ctxs, targets) -> ExampleSet:
    """Partition generated objects per example by target-grid consistency."""
    pairs = []
    for ctx, target in zip(ctxs, targets):
        objs = generate_objects_list(clause, ctx)
        pos, neg = [], []
        for o in objs:
            (pos if object_consistent(o, target) else neg).append(o)
        pairs.append((tuple(pos), tuple(neg)))
    return ExampleSet(tuple(pairs))


@dataclass
class Coverage:
    """Occupancy-aware working sets used by the gain computation."""

    pos: tuple      # per example: tuple of live positive objects
    neg: tuple      # per example: tuple of live negative objects
    aborted: bool = False

    def unified(self, min_unified: int):
        live = tuple(i for i, p in enumerate(self.pos) if p)
        return live if len(live) >= min_unified else None


def foil_gain(before: Coverage, after: Coverage, examples) -> float:
    """t * (log2(p1/(p1+n1)) - log2(p0/(p0+n0))) summed over the examples."""
    p0 = sum(len(before.pos[i]) for i in examples)
    n0 = sum(len(before.neg[i]) for i in examples)
    p1 = sum(len(after.pos[i]) for i in examples)
    n1 = sum(len(after.neg[i]) for i in examples)
    if p1 == 0 or p0 == 0:
        return float("-inf")
    t = sum(len(set(before.pos[i]) & set(after.pos[i])) for i in examples)
    return t * (math.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))


# ---------------------------------------------------------------------------
# Candidate generation


@dataclass(frozen=True)
class Candidate:
    payload: Literal
    support: tuple = ()

    @property
    def literals(self) -> tuple:
        return self.support + (self.payload,)


# D13 candidate classes; member and attribute accessors appear only as
# support, so ranking starts at the equality group.
_CLASS_EQ_VAR = 1
_CLASS_EQ_GRID = 2
_CLASS_EQ_CONST = 3
_CLASS_AFFINE = 4
_CLASS_COMPARE = 5
_CLASS_RELATION = 6


def candidate_rank(cand: Candidate) -> tuple:
    p = cand.payload
    if p.pred == EQUAL:
        other = p.args[1]
        if isinstance(other, Var):
            cls = _CLASS_EQ_VAR
        elif isinstance(other, GridConst):
            cls = _CLASS_EQ_GRID
        elif isinstance(other, Affine):
            cls = _CLASS_AFFINE
        else:
            cls = _CLASS_EQ_CONST
    elif p.pred in (GREATERTHAN, LOWERTHAN):
        cls = _CLASS_COMPARE
    else:
        cls = _CLASS_RELATION
    return (cls, literal_text(p), len(cand.support),
            tuple(literal_text(l) for l in cand.support))


_SLOT_BASE = {
    "x": "X", "y": "Y", "x1": "X", "y1": "Y", "x2": "X", "y2": "Y",
    "x3": "X", "y3": "Y", "x4": "X", "y4": "Y",
    "color": "Color", "len": "Len", "orientation": "Orientation",
    "direction": "Direction", "clean": "Clean", "area": "Area",
}


def _slot_var_name(obj_name: str, obj_kind: str, slot: str) -> str:
    suffix = obj_name
    title = KIND_TITLE[obj_kind]
    if suffix.startswith(title):
        suffix = suffix[len(title):]
    base = _SLOT_BASE[slot]
    if slot[-1].isdigit():
        return f"{base}{suffix}{slot[-1]}"
    return f"{base}{suffix}"


def _attrs_literal(obj_name: str, obj_kind: str) -> Literal:
    args = [Var(obj_name, obj_kind)]
    for slot, slot_type in ATTR_SLOTS[obj_kind]:
        args.append(Var(_slot_var_name(obj_name, obj_kind, slot), slot_type))
    return Literal(ATTRS_PRED[obj_kind], tuple(args))


@dataclass
class _BodyInfo:
    obj_vars: dict = field(default_factory=dict)      # name -> kind
    member_vars: dict = field(default_factory=dict)   # name -> kind
    attrs_done: dict = field(default_factory=dict)    # obj var name -> attrs Literal
    bound: dict = field(default_factory=dict)         # var name -> type
    slot_sources: dict = field(default_factory=dict)  # var name -> (kind, slot)
    rel_values: dict = field(default_factory=dict)    # var name -> (relation, value index)
    rel_count: int = 0


def _analyze(clause: Clause) -> _BodyInfo:
    info = _BodyInfo()
    for lit in clause.body:
        if lit.pred == MEMBER:
            v = lit.args[0]
            k = POOL_KIND[lit.args[1]]
            info.obj_vars[v.name] = k
            info.member_vars[v.name] = k
            info.bound[v.name] = k
        elif lit.pred in ATTRS_PRED.values():
            obj_var = lit.args[0]
            obj_kind = obj_var.type
            info.attrs_done[obj_var.name] = lit
            for (slot, _), a in zip(ATTR_SLOTS[obj_kind], lit.args[1:]):
                if isinstance(a, Var):
                    info.bound[a.name] = a.type
                    info.slot_sources[a.name] = (obj_kind, slot)
        elif lit.pred == EQUAL:
            a, b = lit.args
            if isinstance(a, Var) and a.name not in info.bound:
                info.bound[a.name] = a.type
            if isinstance(b, Var) and b.name not in info.bound:
                info.bound[b.name] = b.type
        elif lit.pred in BODY_RELATIONS:
            info.rel_count += 1
            for i, a in enumerate(lit.args):
                if isinstance(a, Var) and a.name not in info.bound:
                    info.bound[a.name] = a.type
                    if a.type in ("point", "line", "rectangle"):
                        info.obj_vars[a.name] = a.type
                    elif i >= 2 and a.type == TYPE_INT:
                        info.rel_values[a.name] = (lit.pred, i - 2)
    subject = clause.head_vars[0]
    if subject.name not in info.bound:
        info.obj_vars[subject.name] = clause.subject_kind
        info.bound[subject.name] = clause.subject_kind
    return info


def _attr_support(obj_name, obj_kind, info):
    """(support literals, slot -> Var), reusing an existing attrs literal."""
    existing = info.attrs_done.get(obj_name)
    if existing is not None:
        slots = {slot: arg for (slot, _), arg in zip(ATTR_SLOTS[obj_kind], existing.args[1:])}
        return (), slots
    lit = _attrs_literal(obj_name, obj_kind)
    slots = {slot: arg for (slot, _), arg in zip(ATTR_SLOTS[obj_kind], lit.args[1:])}
    return (lit,), slots


_ATTR_INDEX = {
    k: {slot: i for i, (slot, _) in enumerate(slots)} for k, slots in ATTR_SLOTS.items()
}


def _observed_slot_values(obj_kind, slot, pools_union):
    idx = _ATTR_INDEX[obj_kind][slot]
    return sorted({object_attrs(o)[idx] for o in pools_union.get(obj_kind, ())})


def _relation_literals(info, db_instances, head_wirable):
    """Relation-literal schemas over the detected instance groups."""
    out = []
    groups = set()
    for relation, insts in db_instances.items():
        for inst in insts:
            groups.add((relation, object_kind(inst.obj1), object_kind(inst.obj2)))
    k = info.rel_count + 1
    for relation, k1, k2 in sorted(groups):
        obj1_opts = [name for name, kd in sorted(info.obj_vars.items()) if kd == k1]
        if not obj1_opts:
            obj1_opts.append(f"{KIND_TITLE[k1]}_a{k}")
        obj2_name = f"{KIND_TITLE[k2]}_b{k}"
        for obj1_name in obj1_opts:
            base = (Var(obj1_name, k1), Var(obj2_name, k2))
            if relation == rel.TRANSLATE:
                variants = [(Var(f"X_dir_{k}", TYPE_INT), Var(f"Y_dir_{k}", TYPE_INT))]
                if head_wirable.get("X_dir") and head_wirable.get("Y_dir"):
                    variants.append((Var("X_dir", TYPE_INT), Var("Y_dir", TYPE_INT)))
                for vals in variants:
                    out.append(Literal(relation, base + vals))
            elif relation == rel.PATH_TO:
                tail = (
                    Var(f"Orientation_{k}", TYPE_ORIENTATION),
                    Var(f"Direction_{k}", TYPE_DIRECTION),
                )
                variants = [(Var(f"X_dir_{k}", TYPE_INT), Var(f"Y_dir_{k}", TYPE_INT))]
                if head_wirable.get("X_dir") and head_wirable.get("Y_dir"):
                    variants.append((Var("X_dir", TYPE_INT), Var("Y_dir", TYPE_INT)))
                for vals in variants:
                    out.append(Literal(relation, base + vals + tail))
            elif relation == rel.COPY:
                vals = (Var(f"Color_{k}", TYPE_COLOR), Var(f"Clean_{k}", TYPE_INT))
                out.append(Literal(relation, base + vals))
            else:  # line_from_point
                vals = (
                    Var(f"Len_{k}", TYPE_INT),
                    Var(f"Orientation_{k}", TYPE_ORIENTATION),
                    Var(f"Direction_{k}", TYPE_DIRECTION),
                )
                out.append(Literal(relation, base + vals))
    return out


def generate_candidates(clause: Clause, db_instances: dict, cfg: IlpConfig,
                        pools_union: dict) -> list:
    """Typed candidates in deterministic rank order.

    db_instances: union of the within-input instance stores of the unified
    examples. pools_union: kind -> merged object pool (for observed attribute
    values and fresh member support).
    """
    info = _analyze(clause)
    head_vars = clause.head_vars
    generated = clause.generated_var.name
    unbound_head = {
        v.name: v for v in head_vars[2:] if v.name not in info.bound
    }
    head_wirable = {name: True for name in unbound_head}

    existing_body = set(clause.body)
    cands: list = []

    def add(payload, support=()):
        if payload in existing_body:
            return
        support = tuple(l for l in support if l not in existing_body)
        if len(clause.body) + len(support) + 1 > cfg.max_clause_len:
            return
        cands.append(Candidate(payload, support))

    bound_by_type: dict = {}
    for name, t in sorted(info.bound.items()):
        bound_by_type.setdefault(t, []).append(name)

    # --- equality with another variable
    def int_dim_of(var_name):
        if var_name in HEAD_INT_DIM:
            return HEAD_INT_DIM[var_name]
        src = info.slot_sources.get(var_name)
        if src is not None:
            return SLOT_DIM.get(src[1])
        rv = info.rel_values.get(var_name)
        if rv is not None:
            relation, pos = rv
            dims = REL_VALUE_DIM.get(relation, ())
            return dims[pos] if pos < len(dims) else None
        return None

    for name in sorted(unbound_head):
        hv = unbound_head[name]
        for other in bound_by_type.get(hv.type, []):
            if hv.type == TYPE_INT and int_dim_of(other) != int_dim_of(hv.name):
                continue
            add(Literal(EQUAL, (hv, Var(other, hv.type))))
        for obj_name, obj_kind in sorted(info.obj_vars.items()):
            support, slots = _attr_support(obj_name, obj_kind, info)
            for slot, slot_type in ATTR_SLOTS[obj_kind]:
                if slot_type != hv.type or slots[slot].name == hv.name:
                    continue
                if hv.type == TYPE_INT and SLOT_DIM.get(slot) != int_dim_of(hv.name):
                    continue
                add(Literal(EQUAL, (hv, slots[slot])), support)
    for t in (TYPE_INT, TYPE_COLOR, TYPE_ORIENTATION, TYPE_DIRECTION):
        names = bound_by_type.get(t, [])
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                slot_a = info.slot_sources.get(a, (None, None))[1]
                slot_b = info.slot_sources.get(b, (None, None))[1]
                if slot_a != slot_b and slot_a is not None and slot_b is not None:
                    continue
                if slot_a in COORD_SLOTS or slot_b in COORD_SLOTS:
                    continue
                add(Literal(EQUAL, (Var(a, t), Var(b, t))))

    # --- equality with a grid constant
    for name in sorted(unbound_head):
        if unbound_head[name].type == TYPE_INT:
            for gc in ("grid_height", "grid_width"):
                add(Literal(EQUAL, (unbound_head[name], GridConst(gc))))
    for name in bound_by_type.get(TYPE_INT, []):
        for gc in ("grid_height", "grid_width"):
            add(Literal(EQUAL, (Var(name, TYPE_INT), GridConst(gc))))
    for obj_name, obj_kind in sorted(info.obj_vars.items()):
        support, slots = _attr_support(obj_name, obj_kind, info)
        if not support:
            continue  # covered by the bound-variable loop above
        for slot, slot_type in ATTR_SLOTS[obj_kind]:
            if slot_type == TYPE_INT:
                for gc in ("grid_height", "grid_width"):
                    add(Literal(EQUAL, (slots[slot], GridConst(gc))), support)

    # --- equality with a constant
    for name in sorted(unbound_head):
        hv = unbound_head[name]
        if hv.type == TYPE_INT:
            values = cfg.int_constants
        elif hv.type == TYPE_COLOR:
            values = cfg.color_constants
        elif hv.type == TYPE_ORIENTATION:
            values = ORIENTATION_VALUES
        else:
            values = DIRECTION_VALUES
        for v in values:
            add(Literal(EQUAL, (hv, Const(v, hv.type))))
    # bound attribute variables: only constants actually observed in a pool
    for name, (obj_kind, slot) in sorted(info.slot_sources.items()):
        if slot in COORD_SLOTS:
            continue
        t = info.bound.get(name)
        for v in _observed_slot_values(obj_kind, slot, pools_union):
            add(Literal(EQUAL, (Var(name, t), Const(v, t))))
    # attribute slots not yet exposed: bring the accessor along as support
    for obj_name, obj_kind in sorted(info.obj_vars.items()):
        support, slots = _attr_support(obj_name, obj_kind, info)
        if not support:
            continue
        for slot, slot_type in ATTR_SLOTS[obj_kind]:
            if slot in COORD_SLOTS:
                continue
            for v in _observed_slot_values(obj_kind, slot, pools_union):
                add(Literal(EQUAL, (slots[slot], Const(v, slot_type))), support)

    # --- relation literals, standalone and as affine support
    rel_literals = _relation_literals(info, db_instances, head_wirable)
    int_heads = sorted(n for n, v in unbound_head.items() if v.type == TYPE_INT)
    head_names = {v.name for v in head_vars}
    def rel_arg_dims(lit):
        dims = REL_VALUE_DIM.get(lit.pred, ())
        out = {}
        for pos, a in enumerate(lit.args[2:]):
            if isinstance(a, Var) and a.type == TYPE_INT and pos < len(dims):
                out[a.name] = dims[pos]
        return out

    for lit in rel_literals:
        connected = any(
            isinstance(a, Var) and (a.name in info.bound or a.name in head_names)
            for a in lit.args
        )
        if connected:
            add(lit)
        arg_dims = rel_arg_dims(lit)
        new_ints = [
            a for a in lit.args
            if isinstance(a, Var) and a.type == TYPE_INT
            and a.name not in info.bound and a.name not in unbound_head
        ]
        for hv_name in int_heads:
            hv = unbound_head[hv_name]
            hv_dim = HEAD_INT_DIM.get(hv_name)
            for v in new_ints:
                if arg_dims.get(v.name) != hv_dim or hv_dim is None:
                    continue
                for a in cfg.affine_a:
                    for b in cfg.affine_b:
                        if (a, b) == (1, 0):
                            continue
                        add(Literal(EQUAL, (hv, Affine(a, v, b))), (lit,))
    for hv_name in int_heads:
        hv = unbound_head[hv_name]
        hv_dim = HEAD_INT_DIM.get(hv_name)
        for name, (relation, pos) in sorted(info.rel_values.items()):
            dims = REL_VALUE_DIM.get(relation, ())
            if pos >= len(dims) or dims[pos] != hv_dim or hv_dim is None:
                continue
            for a in cfg.affine_a:
                for b in cfg.affine_b:
                    if (a, b) == (1, 0):
                        continue
                    add(Literal(EQUAL, (hv, Affine(a, Var(name, TYPE_INT), b))))

    # --- comparisons between int attribute variables; one side may be fresh
    int_sources = []
    for obj_name, obj_kind in sorted(info.obj_vars.items()):
        support, slots = _attr_support(obj_name, obj_kind, info)
        for slot, slot_type in ATTR_SLOTS[obj_kind]:
            if slot_type == TYPE_INT and slot not in COORD_SLOTS:
                int_sources.append((slot, slots[slot], support))
    fresh_sources = []
    subject_kind = clause.subject_kind
    n_members = sum(1 for k in info.member_vars.values() if k == subject_kind)
    if n_members < cfg.max_object_vars and pools_union.get(subject_kind):
        fresh_name = f"{KIND_TITLE[subject_kind]}{n_members + 1}"
        if fresh_name not in info.obj_vars:
            member_lit = Literal(
                MEMBER, (Var(fresh_name, subject_kind), POOL_NAME[subject_kind])
            )
            attr_lit = _attrs_literal(fresh_name, subject_kind)
            slots = {
                slot: arg
                for (slot, _), arg in zip(ATTR_SLOTS[subject_kind], attr_lit.args[1:])
            }
            for slot, slot_type in ATTR_SLOTS[subject_kind]:
                if slot_type == TYPE_INT and slot not in COORD_SLOTS:
                    fresh_sources.append((slot, slots[slot], (member_lit, attr_lit)))
    for slot_a, var_a, sup_a in int_sources:
        for slot_b, var_b, sup_b in int_sources + fresh_sources:
            if var_a.name == var_b.name or slot_a != slot_b:
                continue
            support = tuple(dict.fromkeys(sup_a + sup_b))
            add(Literal(GREATERTHAN, (var_a, var_b)), support)
            add(Literal(LOWERTHAN, (var_a, var_b)), support)

    def mentions_generated(c: Candidate) -> bool:
        for lit in c.literals:
            for a in lit.args:
                if isinstance(a, Var) and a.name == generated:
                    return True
                if isinstance(a, Affine) and a.var.name == generated:
                    return True
        return False

    cands = [c for c in cands if not mentions_generated(c)]
    seen = set()
    unique = []
    for c in sorted(cands, key=candidate_rank):
        key = (c.payload, c.support)
        if key not in seen:
            seen.add(key)
            unique.append(c)
    return unique


# ---------------------------------------------------------------------------
# Induction


@dataclass
class InducedClause:
    clause: Clause
    clean: bool          # zero live negatives over the unified examples
    unified: tuple       # indices of the examples the clause unifies over
    coverage: Coverage


def seed_clause(sig: TargetSignature) -> Clause:
    head = make_head(sig.relation, sig.kind)
    member = Literal(MEMBER, (head[0], POOL_NAME[sig.kind]))
    return Clause(sig.relation, sig.kind, head, (member,))


class _Inducer:
    """One induction run; caches solutions, completions and classifications."""

    def __init__(self, ctxs, targets, occupieds, cfg):
        self.ctxs = ctxs
        self.targets = targets
        self.occupieds = occupieds
        self.cfg = cfg
        self.class_cache = [dict() for _ in ctxs]  # obj -> (consistent, live)

    def classify(self, i, obj):
        got = self.class_cache[i].get(obj)
        if got is None:
            fp = footprint(obj)
            live = not fp <= self.occupieds[i]
            got = (object_consistent(obj, self.targets[i]), live)
            self.class_cache[i][obj] = got
        return got

    def coverage_from_solutions(self, clause, per_example_solutions) -> Coverage:
        from arclogic.interpreter import head_key_names

        key_names = head_key_names(clause.head_vars)
        relation = clause.relation
        head_vars = clause.head_vars
        pos_all, neg_all = [], []
        for i, sols in enumerate(per_example_solutions):
            if sols is None:
                return Coverage((), (), aborted=True)
            ctx = self.ctxs[i]
            seen_keys = set()
            seen = set()
            pos, neg = [], []
            count = 0
            for b in sols:
                get = b.get
                key = (get(key_names[0]), get(key_names[1]), get(key_names[2]),
                       get(key_names[3]) if len(key_names) > 3 else None)
                if key in seen_keys:
                    continue  # same bound head values: same completions
                seen_keys.add(key)
                for obj in complete_head(relation, head_vars, b, ctx, key_names):
                    if obj in seen:
                        continue
                    seen.add(obj)
                    count += 1
                    if count > ctx.max_objects:
                        return Coverage((), (), aborted=True)
                    consistent, live = self.classify(i, obj)
                    if not live:
                        continue
                    (pos if consistent else neg).append(obj)
            pos_all.append(tuple(pos))
            neg_all.append(tuple(neg))
        return Coverage(tuple(pos_all), tuple(neg_all))

    def base_solutions(self, clause):
        out = []
        for ctx in self.ctxs:
            try:
                out.append(list(solutions(clause, ctx)))
            except GenerationCapExceeded:
                out.append(None)
        return out

    def extended(self, body_prefix, per_example_solutions, literals, limit=None):
        out = []
        for i, sols in enumerate(per_example_solutions):
            if sols is None:
                out.append(None)
                continue
            try:
                cur = sols
                prefix = body_prefix
                for lit in literals:
                    cur = extend_solutions(prefix, cur, lit, self.ctxs[i],
                                           limit=limit if limit is not None
                                           else self.cfg.max_eval_solutions)
                    prefix = prefix + (lit,)
                out.append(cur)
            except GenerationCapExceeded:
                out.append(None)
        return out


def _pos_unions(cov: Coverage, unified) -> dict:
    out = {}
    for i in unified:
        u = set()
        for o in cov.pos[i]:
            u |= footprint(o)
        out[i] = frozenset(u)
    return out


def negatives_order_neutral(cov: Coverage, unified, occupieds) -> bool:
    """True when blocking can discard every live negative.

    Drawing the positives largest-first must block every negative, and no
    negative may share a footprint with a positive (same place, different
    attributes: the drawing order could not choose between them).
    """
    for i in unified:
        occ = set(occupieds[i])
        pos_fps = []
        for o in sorted(cov.pos[i], key=lambda o: (-len(footprint(o)), sort_key_obj(o))):
            fp = footprint(o)
            pos_fps.append(fp)
            if not fp & occ:
                occ |= fp
        fp_set = set(pos_fps)
        for o in cov.neg[i]:
            fp = footprint(o)
            if not fp & occ:
                return False
            if fp in fp_set:
                return False
    return True


def sort_key_obj(o):
    from arclogic.objects import sort_key

    return sort_key(o)


def induce_clause(sig: TargetSignature, ctxs, targets, occupieds, cfg: IlpConfig,
                  tabu=()) -> InducedClause:
    """Greedy FOIL specialization with the cross-example unification constraint.

    Refinement is phased. Safe refinements come first: literals that keep the
    unified example set and the covered positive surface intact while strictly
    shrinking the negatives. When no safe refinement exists and the remaining
    negatives are all neutralized by drawing order (blocked by positives or
    already-built cells), the clause is returned with residual negatives:
    the deductive application decides their fate. Otherwise ordinary maximal
    information gain drives specialization.

    Payload literals in `tabu` are never proposed; the search layer uses this
    to reroute after a clause that led to a dead program step.

    Raises NoClause when no clause covers a live positive in at least
    cfg.min_unified examples.
    """
    inducer = _Inducer(ctxs, targets, occupieds, cfg)
    clause = seed_clause(sig)
    base_sols = inducer.base_solutions(clause)
    cov = inducer.coverage_from_solutions(clause, base_sols)
    if cov.aborted:
        raise NoClause(f"{sig.relation}/{sig.kind}: generation cap at the seed clause")
    unified = cov.unified(cfg.min_unified)
    if unified is None:
        raise NoClause(f"{sig.relation}/{sig.kind}: no unified coverage at the seed clause")

    db_instances: dict = {}
    for i in unified:
        for relation, index in ctxs[i].instances.items():
            db_instances.setdefault(relation, [])
            db_instances[relation].extend(index.all)
    pools_union: dict = {}
    for i in unified:
        for k, pool in ctxs[i].pools.items():
            pools_union.setdefault(k, [])
            for o in pool:
                if o not in pools_union[k]:
                    pools_union[k].append(o)
    pools_union = {k: tuple(v) for k, v in pools_union.items()}
    tabu = set(tabu)

    while True:
        n_live = sum(len(cov.neg[i]) for i in unified)
        if n_live == 0:
            return InducedClause(clause, True, unified, cov)
        if len(clause.body) >= cfg.max_clause_len:
            return InducedClause(clause, False, unified, cov)

        unions = _pos_unions(cov, unified)
        candidates = generate_candidates(clause, db_instances, cfg, pools_union)
        support_cache: dict = {}
        best = None       # (gain, candidate, coverage, unified)
        best_safe = None  # ((pos count, neg count, rank), ...)
        for cand in candidates:
            if cand.payload in tabu:
                continue
            sup_sols = support_cache.get(cand.support)
            if sup_sols is None:
                sup_sols = inducer.extended(clause.body, base_sols, cand.support)
                support_cache[cand.support] = sup_sols
            new_sols = inducer.extended(
                clause.body + cand.support, sup_sols, (cand.payload,)
            )
            new_clause = Clause(
                clause.relation, clause.subject_kind, clause.head_vars,
                clause.body + cand.literals,
            )
            new_cov = inducer.coverage_from_solutions(new_clause, new_sols)
            if new_cov.aborted:
                continue
            new_unified = tuple(i for i in unified if new_cov.pos[i])
            if len(new_unified) < cfg.min_unified:
                continue
            if new_unified == unified:
                n_new = sum(len(new_cov.neg[i]) for i in unified)
                if n_new < n_live and _pos_unions(new_cov, unified) == unions:
                    # safe refinement: same positive surface with fewer
                    # objects is the less redundant description of it
                    p_new = sum(len(new_cov.pos[i]) for i in unified)
                    safe_key = (p_new, n_new, candidate_rank(cand))
                    if best_safe is None or safe_key < best_safe[0]:
                        best_safe = (safe_key, cand, new_cov, new_unified, new_clause)
            gain = foil_gain(cov, new_cov, new_unified)
            if gain <= 1e-12:
                continue
            if best is None or gain > best[0] + 1e-12:
                best = (gain, cand, new_cov, new_unified, new_clause)

        if best_safe is not None:
            _, cand, cov, unified, clause = best_safe
        elif negatives_order_neutral(cov, unified, occupieds):
            return InducedClause(clause, False, unified, cov)
        elif best is not None:
            _, cand, cov, unified, clause = best
        else:
            return InducedClause(clause, False, unified, cov)
        prefix = clause.body[:-len(cand.literals)]
        base_sols = inducer.extended(prefix, base_sols, cand.literals)
