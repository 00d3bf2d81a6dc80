"""Grid value model, task ingestion, background inference and rendering.

Grids are immutable: cells live in a flat row-major ``bytes`` buffer, so they
hash cheaply and can be shared freely across concurrent solves. Coordinates
are (x = column, y = row) with the origin at the top-left; y grows downward.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PALETTE = (
    "black", "blue", "red", "green", "yellow",
    "grey", "fuchsia", "orange", "azure", "brown",
)
COLOR_BY_NAME = {name: value for value, name in enumerate(PALETTE)}

MAX_SIDE = 30


class TaskError(Exception):
    """Base class for task-document and grid-construction failures."""


class MalformedDocument(TaskError):
    pass


class RaggedGrid(TaskError):
    pass


class ColorOutOfRange(TaskError):
    pass


class TooFewTrain(TaskError):
    pass


def color_name(value: int) -> str:
    return PALETTE[value]


@dataclass(frozen=True)
class Grid:
    width: int
    height: int
    cells: bytes

    def __post_init__(self):
        if not (1 <= self.width <= MAX_SIDE and 1 <= self.height <= MAX_SIDE):
            raise RaggedGrid(f"grid dimensions {self.width}x{self.height} out of range")
        if len(self.cells) != self.width * self.height:
            raise RaggedGrid("cell buffer does not match dimensions")

    @classmethod
    def from_rows(cls, rows) -> "Grid":
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise MalformedDocument("grid must be a non-empty list of rows")
        width = len(rows[0])
        if width == 0:
            raise RaggedGrid("empty row")
        buf = bytearray()
        for row in rows:
            if len(row) != width:
                raise RaggedGrid("rows of unequal length")
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= 9:
                    raise ColorOutOfRange(f"cell value {v!r} outside 0..9")
                buf.append(v)
        return cls(width, len(rows), bytes(buf))

    def get(self, x: int, y: int) -> int:
        return self.cells[y * self.width + x]

    def rows(self):
        w = self.width
        return [list(self.cells[y * w:(y + 1) * w]) for y in range(self.height)]

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


def filled(width: int, height: int, color: int) -> Grid:
    return Grid(width, height, bytes([color]) * (width * height))


def grids_equal(a: Grid, b: Grid) -> bool:
    return a.width == b.width and a.height == b.height and a.cells == b.cells


def infer_background(g: Grid) -> int:
    """Most frequent color; ties break toward the lowest color value."""
    counts = [0] * 10
    for c in g.cells:
        counts[c] += 1
    return max(range(10), key=lambda v: (counts[v], -v))


def render_text(g: Grid) -> str:
    w = g.width
    lines = []
    for y in range(g.height):
        lines.append("".join(str(c) for c in g.cells[y * w:(y + 1) * w]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TaskExample:
    input: Grid
    output: Grid | None = None


@dataclass(frozen=True)
class Task:
    id: str
    train: tuple = field(default_factory=tuple)
    test: tuple = field(default_factory=tuple)


def _parse_example(obj, require_output: bool) -> TaskExample:
    if not isinstance(obj, dict) or "input" not in obj:
        raise MalformedDocument("example must be an object with an 'input' grid")
    grid_in = Grid.from_rows(obj["input"])
    grid_out = None
    if "output" in obj and obj["output"] is not None:
        grid_out = Grid.from_rows(obj["output"])
    elif require_output:
        raise MalformedDocument("train example missing 'output'")
    return TaskExample(grid_in, grid_out)


def parse_task(raw, task_id: str = "") -> Task:
    """Parse an ARC task document: {"train": [...], "test": [...]}."""
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.decode("utf-8")
    if isinstance(raw, str):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as e:
            raise MalformedDocument(f"not valid JSON: {e}") from None
    else:
        doc = raw
    if not isinstance(doc, dict) or "train" not in doc or "test" not in doc:
        raise MalformedDocument("document must contain 'train' and 'test' arrays")
    if not isinstance(doc["train"], list) or not isinstance(doc["test"], list):
        raise MalformedDocument("'train' and 'test' must be arrays")
    train = tuple(_parse_example(e, require_output=True) for e in doc["train"])
    test = tuple(_parse_example(e, require_output=False) for e in doc["test"])
    if len(train) < 2:
        raise TooFewTrain(f"need at least 2 train examples, got {len(train)}")
    if not test:
        raise MalformedDocument("empty 'test' array")
    return Task(task_id, train, test)


def render_task(task: Task) -> str:
    """Serialize a Task back to the document format parse_task accepts."""
    def ex(e: TaskExample):
        d = {"input": e.input.rows()}
        if e.output is not None:
            d["output"] = e.output.rows()
        return d

    return json.dumps(
        {"train": [ex(e) for e in task.train], "test": [ex(e) for e in task.test]},
        separators=(",", ":"),
    )
