"""Pure-Python grid kernels.

Same signatures as the compiled twin in ``_native.pyx``; all functions take a
flat row-major ``bytes`` buffer plus dimensions. These sit on the hot paths of
object extraction, relation detection and clause coverage testing.
"""

IMPL = "pure"


def maximal_runs(cells, w, h, color):
    """Maximal horizontal/vertical runs of `color` with length >= 2.

    Returns tuples (vertical, x1, y1, x2, y2) in scan order.
    """
    out = []
    for y in range(h):
        base = y * w
        x = 0
        while x < w:
            if cells[base + x] == color:
                x0 = x
                while x < w and cells[base + x] == color:
                    x += 1
                if x - x0 >= 2:
                    out.append((0, x0, y, x - 1, y))
            else:
                x += 1
    for x in range(w):
        y = 0
        while y < h:
            if cells[y * w + x] == color:
                y0 = y
                while y < h and cells[y * w + x] == color:
                    y += 1
                if y - y0 >= 2:
                    out.append((1, x, y0, x, y - 1))
            else:
                y += 1
    return out


def solid_rects(cells, w, h, color, cap):
    """All solid rectangles of `color` with width >= 2 and height >= 2.

    Returns (rects, truncated) with rects as (x1, y1, x2, y2) tuples in
    (y1, x1, y2, x2) scan order; truncated is set when `cap` was hit.
    """
    # summed-area table over the color mask
    sat = [0] * ((w + 1) * (h + 1))
    for y in range(h):
        row = (y + 1) * (w + 1)
        prev = y * (w + 1)
        acc = 0
        for x in range(w):
            if cells[y * w + x] == color:
                acc += 1
            sat[row + x + 1] = acc + sat[prev + x + 1]

    def area(x1, y1, x2, y2):
        return (
            sat[(y2 + 1) * (w + 1) + x2 + 1]
            - sat[y1 * (w + 1) + x2 + 1]
            - sat[(y2 + 1) * (w + 1) + x1]
            + sat[y1 * (w + 1) + x1]
        )

    out = []
    for y1 in range(h - 1):
        for x1 in range(w - 1):
            if cells[y1 * w + x1] != color:
                continue
            for y2 in range(y1 + 1, h):
                if area(x1, y1, x1, y2) != y2 - y1 + 1:
                    break
                for x2 in range(x1 + 1, w):
                    bw, bh = x2 - x1 + 1, y2 - y1 + 1
                    if area(x1, y1, x2, y2) != bw * bh:
                        break
                    if len(out) >= cap:
                        return out, True
                    out.append((x1, y1, x2, y2))
    return out, False


def near_solid_boxes(cells, w, h, color, bg, min_clean):
    """Candidate noisy rectangles of `color`: boxes >= 2x2 with no background
    cell, own-color cells on every edge row/column and fill >= min_clean %.

    Non-own cells inside are other colors occluding the rectangle. Returns
    (x1, y1, x2, y2, own_count) candidates; the caller keeps maximal ones.
    """
    own_sat = [0] * ((w + 1) * (h + 1))
    bg_sat = [0] * ((w + 1) * (h + 1))
    for y in range(h):
        row = (y + 1) * (w + 1)
        prev = y * (w + 1)
        acc_own = acc_bg = 0
        for x in range(w):
            v = cells[y * w + x]
            if v == color:
                acc_own += 1
            if v == bg:
                acc_bg += 1
            own_sat[row + x + 1] = acc_own + own_sat[prev + x + 1]
            bg_sat[row + x + 1] = acc_bg + bg_sat[prev + x + 1]

    def count(sat, x1, y1, x2, y2):
        return (
            sat[(y2 + 1) * (w + 1) + x2 + 1]
            - sat[y1 * (w + 1) + x2 + 1]
            - sat[(y2 + 1) * (w + 1) + x1]
            + sat[y1 * (w + 1) + x1]
        )

    rows_with = [y for y in range(h) if count(own_sat, 0, y, w - 1, y) > 0]
    out = []
    for y1 in rows_with:
        for y2 in rows_with:
            if y2 <= y1:
                continue
            # columns allowed: no background cell in rows y1..y2
            ok = [count(bg_sat, x, y1, x, y2) == 0 for x in range(w)]
            has_own = [count(own_sat, x, y1, x, y2) > 0 for x in range(w)]
            x = 0
            while x < w:
                if not ok[x]:
                    x += 1
                    continue
                run_start = x
                while x < w and ok[x]:
                    x += 1
                run_end = x - 1
                # split the run at own-empty columns and also keep the
                # trimmed full run; containment filtering happens upstream
                spans = []
                a = run_start
                while a <= run_end:
                    if not has_own[a]:
                        a += 1
                        continue
                    b = a
                    while b <= run_end and has_own[b]:
                        b += 1
                    spans.append((a, b - 1))
                    a = b
                if spans:
                    trimmed = (spans[0][0], spans[-1][1])
                    if trimmed not in spans:
                        spans.append(trimmed)
                for (x1, x2) in spans:
                    if x2 - x1 < 1:
                        continue
                    if count(own_sat, x1, y1, x2, y1) == 0:
                        continue
                    if count(own_sat, x1, y2, x2, y2) == 0:
                        continue
                    own = count(own_sat, x1, y1, x2, y2)
                    area = (x2 - x1 + 1) * (y2 - y1 + 1)
                    if own * 100 // area < min_clean:
                        continue
                    out.append((x1, y1, x2, y2, own))
    return out


def clean_count(cells, w, h, color, x1, y1, x2, y2):
    """Number of cells equal to `color` inside the inclusive box."""
    n = 0
    for y in range(y1, y2 + 1):
        base = y * w
        for x in range(x1, x2 + 1):
            if cells[base + x] == color:
                n += 1
    return n


def rect_matches(cells, w, h, color, x1, y1, x2, y2):
    """True when every cell of the inclusive box holds `color`."""
    if x1 < 0 or y1 < 0 or x2 >= w or y2 >= h:
        return False
    for y in range(y1, y2 + 1):
        base = y * w
        for x in range(x1, x2 + 1):
            if cells[base + x] != color:
                return False
    return True


def line_matches(cells, w, h, color, x1, y1, x2, y2):
    """True when every cell on the axis-aligned segment holds `color`."""
    if x1 < 0 or y1 < 0 or x2 >= w or y2 >= h:
        return False
    if y1 == y2:
        base = y1 * w
        for x in range(x1, x2 + 1):
            if cells[base + x] != color:
                return False
        return True
    for y in range(y1, y2 + 1):
        if cells[y * w + x1] != color:
            return False
    return True


def walk_path(cells, w, h, px, py, dx, dy, bg, target_mask):
    """Walk from (px, py) by unit steps (dx, dy) over background cells.

    Returns the number of background steps taken before the next cell lands
    on `target_mask`, or -1 when the walk exits the grid or hits a
    non-background cell first. A return of 0 means the target is immediately
    adjacent in that direction.
    """
    steps = 0
    x, y = px + dx, py + dy
    while 0 <= x < w and 0 <= y < h:
        idx = y * w + x
        if target_mask[idx]:
            return steps
        if cells[idx] != bg:
            return -1
        steps += 1
        x += dx
        y += dy
    return -1
