"""Object model and extraction: Points, Lines and Rectangles over a grid.

Extraction deliberately produces multiple overlapping views of the same
cells (every non-background cell is a Point even when it sits inside a Line
or Rectangle) so later relation search can pick whichever representation the
task logic needs.
"""

from __future__ import annotations

from dataclasses import dataclass

from arclogic import kernels
from arclogic.grid import Grid, infer_background

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
DIAGONAL = "diagonal"

# compass directions as (name, dx, dy); scan order fixes determinism
DIRECTIONS8 = (
    ("up", 0, -1),
    ("down", 0, 1),
    ("left", -1, 0),
    ("right", 1, 0),
    ("up_left", -1, -1),
    ("up_right", 1, -1),
    ("down_left", -1, 1),
    ("down_right", 1, 1),
)
DIRECTION_VECTORS = {name: (dx, dy) for name, dx, dy in DIRECTIONS8}


class CapExceeded(Exception):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class OutOfBounds(Exception):
    pass


@dataclass(frozen=True)
class Point:
    x: int
    y: int
    color: int

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash(("P", self.x, self.y, self.color))
            object.__setattr__(self, "_h", h)
        return h


@dataclass(frozen=True)
class Line:
    """Axis-aligned segment, endpoints canonicalized so (x1,y1) <= (x2,y2)."""

    x1: int
    y1: int
    x2: int
    y2: int
    color: int

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash(("L", self.x1, self.y1, self.x2, self.y2, self.color))
            object.__setattr__(self, "_h", h)
        return h

    def __post_init__(self):
        if (self.x1, self.y1) > (self.x2, self.y2):
            raise ValueError("line endpoints not canonical")
        if self.x1 != self.x2 and self.y1 != self.y2:
            raise ValueError("line is not axis-aligned")

    @property
    def length(self) -> int:
        return abs(self.x2 - self.x1) + abs(self.y2 - self.y1) + 1

    @property
    def orientation(self) -> str:
        return HORIZONTAL if self.y1 == self.y2 else VERTICAL

    @property
    def direction(self) -> str:
        return "right" if self.y1 == self.y2 else "down"


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned box, >= 2x2. For clean < 100 the own-color cells are kept
    in `mask` so the object can be re-drawn without inventing cells."""

    x1: int
    y1: int
    x2: int
    y2: int
    color: int
    clean: int
    mask: frozenset | None = None

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash(("R", self.x1, self.y1, self.x2, self.y2, self.color, self.clean))
            object.__setattr__(self, "_h", h)
        return h

    @property
    def bbox_width(self) -> int:
        return self.x2 - self.x1 + 1

    @property
    def bbox_height(self) -> int:
        return self.y2 - self.y1 + 1

    @property
    def area(self) -> int:
        return self.bbox_width * self.bbox_height

    @property
    def corners(self):
        """(x,y) pairs: top-left, top-right, bottom-left, bottom-right."""
        return (
            (self.x1, self.y1), (self.x2, self.y1),
            (self.x1, self.y2), (self.x2, self.y2),
        )


GridObject = Point | Line | Rectangle


def kind(o: GridObject) -> str:
    if isinstance(o, Point):
        return "point"
    if isinstance(o, Line):
        return "line"
    return "rectangle"


def footprint(o: GridObject) -> frozenset:
    if isinstance(o, Point):
        return frozenset({(o.x, o.y)})
    if isinstance(o, Line):
        if o.y1 == o.y2:
            return frozenset((x, o.y1) for x in range(o.x1, o.x2 + 1))
        return frozenset((o.x1, y) for y in range(o.y1, o.y2 + 1))
    if o.mask is not None:
        return o.mask
    return frozenset(
        (x, y) for y in range(o.y1, o.y2 + 1) for x in range(o.x1, o.x2 + 1)
    )


def sort_key(o: GridObject):
    """Canonical object order: kind, position, color. Used for determinism."""
    if isinstance(o, Point):
        return (0, o.y, o.x, 0, 0, o.color, 0)
    if isinstance(o, Line):
        return (1, o.y1, o.x1, o.y2, o.x2, o.color, 0)
    return (2, o.y1, o.x1, o.y2, o.x2, o.color, o.clean)


@dataclass(frozen=True)
class ExtractionCaps:
    sub_lines: bool = False
    max_rectangles: int = 512
    min_clean: int = 50
    allow_partial: bool = False


@dataclass(frozen=True)
class Representation:
    background: int
    objects: tuple
    partial: bool = False

    def by_kind(self, k: str):
        return tuple(o for o in self.objects if kind(o) == k)


def extract_objects(g: Grid, bg: int | None = None, caps: ExtractionCaps = ExtractionCaps()) -> Representation:
    """Extract Points, Lines and Rectangles per non-background color mask.

    Points: every non-background cell. Lines: maximal runs of length >= 2
    (plus all sub-runs when caps.sub_lines). Rectangles: every solid >= 2x2
    sub-rectangle up to caps.max_rectangles, and one box per non-solid
    connected component whose fill percentage reaches caps.min_clean.
    """
    if bg is None:
        bg = infer_background(g)
    cells, w, h = g.cells, g.width, g.height
    colors = sorted({c for c in cells if c != bg})

    objects = []
    partial = False

    for color in colors:
        for y in range(h):
            base = y * w
            for x in range(w):
                if cells[base + x] == color:
                    objects.append(Point(x, y, color))

    for color in colors:
        for vert, x1, y1, x2, y2 in kernels.maximal_runs(cells, w, h, color):
            objects.append(Line(x1, y1, x2, y2, color))
            if caps.sub_lines:
                length = (y2 - y1 if vert else x2 - x1) + 1
                for sub_len in range(2, length):
                    for off in range(length - sub_len + 1):
                        if vert:
                            objects.append(Line(x1, y1 + off, x1, y1 + off + sub_len - 1, color))
                        else:
                            objects.append(Line(x1 + off, y1, x1 + off + sub_len - 1, y1, color))

    rect_budget = caps.max_rectangles
    rects = []
    seen_rects = set()
    for color in colors:
        # noisy rectangles first: maximal no-background boxes are the only
        # view of an occluded region, a truncated enumeration must keep them
        candidates = kernels.near_solid_boxes(cells, w, h, color, bg, caps.min_clean)
        candidates.sort(key=lambda r: (-(r[2] - r[0] + 1) * (r[3] - r[1] + 1), r))
        kept = []
        for x1, y1, x2, y2, own in candidates:
            if any(k[0] <= x1 and k[1] <= y1 and k[2] >= x2 and k[3] >= y2 for k in kept):
                continue
            kept.append((x1, y1, x2, y2, own))
        for x1, y1, x2, y2, own in sorted(kept):
            area = (x2 - x1 + 1) * (y2 - y1 + 1)
            clean = own * 100 // area
            mask = None
            if clean < 100:
                mask = frozenset(
                    (x, y)
                    for y in range(y1, y2 + 1)
                    for x in range(x1, x2 + 1)
                    if cells[y * w + x] == color
                )
            r = Rectangle(x1, y1, x2, y2, color, clean, mask)
            if r not in seen_rects:
                seen_rects.add(r)
                rects.append(r)
    for color in colors:
        found, truncated = kernels.solid_rects(cells, w, h, color, max(0, rect_budget - len(rects)))
        for x1, y1, x2, y2 in found:
            r = Rectangle(x1, y1, x2, y2, color, 100)
            if r not in seen_rects:
                seen_rects.add(r)
                rects.append(r)
        if truncated:
            partial = True
            break
    if partial and not caps.allow_partial:
        raise CapExceeded(
            f"rectangle enumeration exceeded cap {caps.max_rectangles}",
            partial=Representation(bg, tuple(objects + rects), partial=True),
        )
    objects.extend(rects)
    return Representation(bg, tuple(objects), partial=partial)


def draw(o: GridObject, g: Grid) -> Grid:
    """Paint the object footprint onto a copy of g."""
    cells = bytearray(g.cells)
    w = g.width
    for (x, y) in sorted(footprint(o)):
        if not g.in_bounds(x, y):
            raise OutOfBounds(f"cell ({x},{y}) outside {g.width}x{g.height}")
        cells[y * w + x] = o.color
    return Grid(g.width, g.height, bytes(cells))


def describe(o: GridObject) -> str:
    if isinstance(o, Point):
        return f"point x={o.x} y={o.y} color={o.color}"
    if isinstance(o, Line):
        return (
            f"line x1={o.x1} y1={o.y1} x2={o.x2} y2={o.y2} color={o.color} "
            f"len={o.length} orientation={o.orientation}"
        )
    return (
        f"rectangle x1={o.x1} y1={o.y1} x2={o.x2} y2={o.y2} color={o.color} "
        f"clean={o.clean} area={o.area}"
    )


def representation_dump(rep: Representation) -> str:
    """One object per line, stable order; used by snapshot tests and the CLI."""
    lines = [f"background {rep.background}"]
    for o in sorted(rep.objects, key=sort_key):
        lines.append(describe(o))
    return "\n".join(lines) + "\n"
