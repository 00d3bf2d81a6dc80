"""Detection of ground relation instances between extracted objects.

Four relations: line_from_point, translate, copy and point_straight_path_to.
Each detected instance is tagged with its scope: II (within the input grid),
OO (within the output grid) or IO (input object related to output object).
"""

from __future__ import annotations

from dataclasses import dataclass

from arclogic import kernels
from arclogic.grid import Grid
from arclogic.objects import (
    DIAGONAL,
    DIRECTIONS8,
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

LINE_FROM_POINT = "line_from_point"
TRANSLATE = "translate"
COPY = "copy"
PATH_TO = "point_straight_path_to"

SCOPE_II = "II"
SCOPE_OO = "OO"
SCOPE_IO = "IO"


class DetectionCapExceeded(Exception):
    pass


@dataclass(frozen=True)
class RelationInstance:
    relation: str
    obj1: GridObject
    obj2: GridObject
    values: tuple  # relation-specific extras, see detectors
    scope: str


def detect_translate(a: GridObject, b: GridObject, scope=SCOPE_II) -> RelationInstance | None:
    """Uniform non-zero shift between congruent same-kind objects.

    values = (xdir, ydir, color2).
    """
    if kind(a) != kind(b):
        return None
    if isinstance(a, Point):
        dx, dy = b.x - a.x, b.y - a.y
    elif isinstance(a, Line):
        if a.orientation != b.orientation or a.length != b.length:
            return None
        dx, dy = b.x1 - a.x1, b.y1 - a.y1
    else:
        if a.bbox_width != b.bbox_width or a.bbox_height != b.bbox_height:
            return None
        dx, dy = b.x1 - a.x1, b.y1 - a.y1
        shifted = frozenset((x + dx, y + dy) for x, y in footprint(a))
        if shifted != footprint(b):
            return None
    if (dx, dy) == (0, 0):
        return None
    return RelationInstance(TRANSLATE, a, b, (dx, dy, b.color), scope)


def detect_copy(a: GridObject, b: GridObject, scope=SCOPE_II) -> RelationInstance | None:
    """Same-kind object at identical position, any color.

    values = (color2, clean2).
    """
    if kind(a) != kind(b):
        return None
    if isinstance(a, Point):
        if (a.x, a.y) != (b.x, b.y):
            return None
        return RelationInstance(COPY, a, b, (b.color, 100), scope)
    if (a.x1, a.y1, a.x2, a.y2) != (b.x1, b.y1, b.x2, b.y2):
        return None
    clean2 = b.clean if isinstance(b, Rectangle) else 100
    return RelationInstance(COPY, a, b, (b.color, clean2), scope)


def detect_line_from_point(p: Point, line: Line, scope=SCOPE_II) -> RelationInstance | None:
    """Line of the point's color growing out of the point.

    values = (length, orientation, direction) with direction pointing away
    from the point.
    """
    if not isinstance(p, Point) or not isinstance(line, Line):
        return None
    if line.color != p.color:
        return None
    if (line.x1, line.y1) == (p.x, p.y):
        direction = "right" if line.orientation == HORIZONTAL else "down"
    elif (line.x2, line.y2) == (p.x, p.y):
        direction = "left" if line.orientation == HORIZONTAL else "up"
    else:
        return None
    return RelationInstance(
        LINE_FROM_POINT, p, line, (line.length, line.orientation, direction), scope
    )


def _footprint_mask(o: GridObject, w: int, h: int) -> bytes:
    mask = bytearray(w * h)
    for (x, y) in footprint(o):
        if 0 <= x < w and 0 <= y < h:
            mask[y * w + x] = 1
    return bytes(mask)


def detect_point_straight_path_to(
    p: Point, o: GridObject, g: Grid, bg: int, scope=SCOPE_II, _mask=None
):
    """Clear straight walks from p that stop flush against o.

    One instance per compass direction whose walk crosses only background and
    whose next cell enters the object. values = (xdir, ydir, orientation,
    direction) where (xdir, ydir) is the total displacement to the cell
    adjacent to the object, ready to feed a translate of the point.
    """
    if not isinstance(p, Point) or o == p:
        return []
    mask = _mask if _mask is not None else _footprint_mask(o, g.width, g.height)
    if mask[p.y * g.width + p.x]:
        return []  # point sits inside the object
    out = []
    for name, dx, dy in DIRECTIONS8:
        steps = kernels.walk_path(g.cells, g.width, g.height, p.x, p.y, dx, dy, bg, mask)
        if steps < 0:
            continue
        orientation = DIAGONAL if dx and dy else (HORIZONTAL if dx else VERTICAL)
        out.append(
            RelationInstance(PATH_TO, p, o, (dx * steps, dy * steps, orientation, name), scope)
        )
    return out


class _Collector:
    """Per-scope instance sink; truncates deterministically at the cap."""

    def __init__(self, cap: int, strict: bool):
        self.cap = cap
        self.strict = strict
        self.items: list = []
        self.truncated = False

    def add(self, inst) -> bool:
        if inst is None:
            return True
        if len(self.items) >= self.cap:
            if self.strict:
                raise DetectionCapExceeded(inst.scope)
            self.truncated = True
            return False
        self.items.append(inst)
        return True

    def extend(self, insts) -> bool:
        for inst in insts:
            if not self.add(inst):
                return False
        return True


def _detect_within(rep: Representation, g: Grid, scope: str, sink: _Collector):
    objs = sorted(rep.objects, key=sort_key)
    points = [o for o in objs if isinstance(o, Point)]
    by_kind = {
        "point": points,
        "line": [o for o in objs if isinstance(o, Line)],
        "rectangle": [o for o in objs if isinstance(o, Rectangle)],
    }
    for group in by_kind.values():
        for a in group:
            for b in group:
                if a is b:
                    continue
                if not sink.add(detect_translate(a, b, scope)):
                    return
                if not sink.add(detect_copy(a, b, scope)):
                    return
    for p in points:
        for line in by_kind["line"]:
            if not sink.add(detect_line_from_point(p, line, scope)):
                return
    for o in objs:
        if isinstance(o, Point):
            continue
        mask = _footprint_mask(o, g.width, g.height)
        for p in points:
            if not sink.extend(
                detect_point_straight_path_to(p, o, g, rep.background, scope, _mask=mask)
            ):
                return


def _detect_across(in_rep: Representation, out_rep: Representation, sink: _Collector):
    in_objs = sorted(in_rep.objects, key=sort_key)
    out_objs = sorted(out_rep.objects, key=sort_key)
    out_by_kind = {
        "point": [o for o in out_objs if isinstance(o, Point)],
        "line": [o for o in out_objs if isinstance(o, Line)],
        "rectangle": [o for o in out_objs if isinstance(o, Rectangle)],
    }
    for a in in_objs:
        for b in out_by_kind[kind(a)]:
            if not sink.add(detect_translate(a, b, SCOPE_IO)):
                return
            if not sink.add(detect_copy(a, b, SCOPE_IO)):
                return
    for p in (o for o in in_objs if isinstance(o, Point)):
        for line in out_by_kind["line"]:
            if not sink.add(detect_line_from_point(p, line, SCOPE_IO)):
                return


def detect_all(
    input_rep: Representation,
    output_rep: Representation | None,
    input_grid: Grid,
    output_grid: Grid | None,
    cap_per_scope: int = 100_000,
    strict: bool = True,
) -> list:
    """All relation instances across the II, OO and IO scopes.

    point_straight_path_to is detected within a single grid only (II and OO);
    an input-to-output walk has no grid to walk on. With strict=False the
    per-scope cap truncates instead of raising.
    """
    out: list = []
    for scope_run in ("II", "OO", "IO"):
        sink = _Collector(cap_per_scope, strict)
        if scope_run == "II":
            _detect_within(input_rep, input_grid, SCOPE_II, sink)
        elif output_rep is None or output_grid is None:
            continue
        elif scope_run == "OO":
            _detect_within(output_rep, output_grid, SCOPE_OO, sink)
        else:
            _detect_across(input_rep, output_rep, sink)
        out.extend(sink.items)
    return out


def census(instances) -> str:
    """Counts per relation kind per scope, as stable text."""
    counts: dict = {}
    for inst in instances:
        key = (inst.scope, inst.relation)
        counts[key] = counts.get(key, 0) + 1
    lines = [f"{scope} {relation} {n}" for (scope, relation), n in sorted(counts.items())]
    return "\n".join(lines) + ("\n" if lines else "")
