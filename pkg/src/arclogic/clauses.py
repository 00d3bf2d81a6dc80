"""Typed terms, literals, clauses and programs, plus the clause text format.

A clause's head names a generator relation; evaluating its body against the
promoted fact base yields bindings, and the head completes each binding into
concrete output objects. The object variable in the second head position is
never bound by the body: it is the thing being generated.
"""

from __future__ import annotations

from dataclasses import dataclass

from arclogic.grid import PALETTE

TYPE_INT = "int"
TYPE_COLOR = "color"
TYPE_ORIENTATION = "orientation"
TYPE_DIRECTION = "direction"

KINDS = ("point", "line", "rectangle")
KIND_TITLE = {"point": "Point", "line": "Line", "rectangle": "Rectangle"}
POOL_NAME = {"point": "Input_points", "line": "Input_lines", "rectangle": "Input_rectangles"}

MEMBER = "member"
EQUAL = "equal"
GREATERTHAN = "greaterthan"
LOWERTHAN = "lowerthan"
POINT_ATTRS = "point_attrs"
LINE_ATTRS = "line_attrs"
RECTANGLE_ATTRS = "rectangle_attrs"

ATTRS_PRED = {"point": POINT_ATTRS, "line": LINE_ATTRS, "rectangle": RECTANGLE_ATTRS}

# attribute slots exposed per object kind, in literal-argument order
ATTR_SLOTS = {
    "point": (("x", TYPE_INT), ("y", TYPE_INT), ("color", TYPE_COLOR)),
    "line": (
        ("x1", TYPE_INT), ("y1", TYPE_INT), ("x2", TYPE_INT), ("y2", TYPE_INT),
        ("color", TYPE_COLOR), ("len", TYPE_INT),
        ("orientation", TYPE_ORIENTATION), ("direction", TYPE_DIRECTION),
    ),
    "rectangle": (
        ("x1", TYPE_INT), ("y1", TYPE_INT), ("x2", TYPE_INT), ("y2", TYPE_INT),
        ("x3", TYPE_INT), ("y3", TYPE_INT), ("x4", TYPE_INT), ("y4", TYPE_INT),
        ("color", TYPE_COLOR), ("clean", TYPE_INT), ("area", TYPE_INT),
    ),
}


@dataclass(frozen=True)
class Var:
    name: str
    type: str


@dataclass(frozen=True)
class Const:
    value: object
    type: str


@dataclass(frozen=True)
class GridConst:
    """Per-example symbolic constant: grid_width or grid_height."""

    name: str


@dataclass(frozen=True)
class Affine:
    """a * var + b over an int variable."""

    a: int
    var: Var
    b: int


Term = Var | Const | GridConst | Affine


@dataclass(frozen=True)
class Literal:
    pred: str
    args: tuple


@dataclass(frozen=True)
class Clause:
    relation: str       # line_from_point | translate | copy
    subject_kind: str   # kind of the first head argument
    head_vars: tuple    # Var objects, generated object var in position 1
    body: tuple         # Literal sequence

    @property
    def generated_var(self) -> Var:
        return self.head_vars[1]


@dataclass(frozen=True)
class Program:
    clauses: tuple      # Clause sequence, applied in order
    scopes: tuple       # per-clause scope tag: IO for the first, IO/OO after

    def __post_init__(self):
        if self.clauses and self.scopes and self.scopes[0] != "IO":
            raise ValueError("first program step must have IO scope")


def make_head(relation: str, subject_kind: str) -> tuple:
    k = KIND_TITLE[subject_kind]
    if relation == "line_from_point":
        return (
            Var("Point", "point"),
            Var("Line_out", "line"),
            Var("Len", TYPE_INT),
            Var("Orientation", TYPE_ORIENTATION),
            Var("Direction", TYPE_DIRECTION),
        )
    if relation == "translate":
        return (
            Var(f"{k}1", subject_kind),
            Var(f"{k}_out", subject_kind),
            Var("X_dir", TYPE_INT),
            Var("Y_dir", TYPE_INT),
        )
    if relation == "copy":
        return (
            Var(f"{k}1", subject_kind),
            Var(f"{k}_out", subject_kind),
            Var("Color_out", TYPE_COLOR),
            Var("Clean_out", TYPE_INT),
        )
    raise ValueError(f"{relation} is not a generator relation")


def term_text(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, GridConst):
        return t.name
    if isinstance(t, Affine):
        coeff = t.var.name if t.a == 1 else f"{t.a}*{t.var.name}"
        if t.b == 0:
            return coeff
        return f"{coeff}+{t.b}" if t.b > 0 else f"{coeff}-{-t.b}"
    if t.type == TYPE_COLOR:
        return f"'{PALETTE[t.value]}'"
    if t.type in (TYPE_ORIENTATION, TYPE_DIRECTION):
        return f"'{t.value}'"
    return str(t.value)


def literal_text(lit: Literal) -> str:
    args = ",".join(
        a if isinstance(a, str) else term_text(a) for a in lit.args
    )
    return f"{lit.pred}({args})"


def clause_text(clause: Clause) -> str:
    head_args = ",".join(v.name for v in clause.head_vars)
    head = f"{clause.relation}({head_args})"
    if not clause.body:
        return f"{head}."
    body = ", ".join(literal_text(l) for l in clause.body)
    return f"{head} :- {body}."


def program_text(program: Program) -> str:
    return "\n".join(clause_text(c) for c in program.clauses) + "\n"


def clause_len(clause: Clause) -> int:
    return len(clause.body)


def program_score(program: Program) -> int:
    """Occam score: total body-literal count; lower is simpler."""
    return sum(clause_len(c) for c in program.clauses)
