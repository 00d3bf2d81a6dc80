# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels; signature-compatible twin of _pure.py."""

import array

IMPL = "native"


def maximal_runs(const unsigned char[:] cells, int w, int h, int color):
    cdef int x, y, x0, y0
    out = []
    for y in range(h):
        x = 0
        while x < w:
            if cells[y * w + x] == color:
                x0 = x
                while x < w and cells[y * w + x] == color:
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


def solid_rects(const unsigned char[:] cells, int w, int h, int color, int cap):
    cdef int x, y, x1, y1, x2, y2, bw, bh, acc
    cdef int stride = w + 1
    cdef list out = []
    sat_py = array.array("I", bytes((w + 1) * (h + 1) * 4))
    cdef unsigned int[:] sat = sat_py
    for y in range(h):
        acc = 0
        for x in range(w):
            if cells[y * w + x] == color:
                acc += 1
            sat[(y + 1) * stride + x + 1] = acc + sat[y * stride + x + 1]

    cdef unsigned int want
    for y1 in range(h - 1):
        for x1 in range(w - 1):
            if cells[y1 * w + x1] != color:
                continue
            for y2 in range(y1 + 1, h):
                if (sat[(y2 + 1) * stride + x1 + 1] - sat[y1 * stride + x1 + 1]
                        - sat[(y2 + 1) * stride + x1] + sat[y1 * stride + x1]) != y2 - y1 + 1:
                    break
                for x2 in range(x1 + 1, w):
                    bw = x2 - x1 + 1
                    bh = y2 - y1 + 1
                    want = bw * bh
                    if (sat[(y2 + 1) * stride + x2 + 1] - sat[y1 * stride + x2 + 1]
                            - sat[(y2 + 1) * stride + x1] + sat[y1 * stride + x1]) != want:
                        break
                    if len(out) >= cap:
                        return out, True
                    out.append((x1, y1, x2, y2))
    return out, False


def near_solid_boxes(const unsigned char[:] cells, int w, int h, int color,
                     int bg, int min_clean):
    """Candidate noisy rectangles; see the pure twin for the definition."""
    cdef int x, y, x1, x2, y1, y2, a, b, run_start, run_end, own, area
    cdef int stride = w + 1
    cdef int acc_own, acc_bg, v
    own_py = array.array("i", bytes((w + 1) * (h + 1) * 4))
    bg_py = array.array("i", bytes((w + 1) * (h + 1) * 4))
    cdef int[:] own_sat = own_py
    cdef int[:] bg_sat = bg_py
    for y in range(h):
        acc_own = 0
        acc_bg = 0
        for x in range(w):
            v = cells[y * w + x]
            if v == color:
                acc_own += 1
            if v == bg:
                acc_bg += 1
            own_sat[(y + 1) * stride + x + 1] = acc_own + own_sat[y * stride + x + 1]
            bg_sat[(y + 1) * stride + x + 1] = acc_bg + bg_sat[y * stride + x + 1]

    ok_py = bytearray(w)
    has_py = bytearray(w)
    cdef unsigned char[:] ok = ok_py
    cdef unsigned char[:] has_own = has_py
    out = []
    spans = []
    for y1 in range(h):
        if own_sat[(y1 + 1) * stride + w] - own_sat[y1 * stride + w] == 0:
            continue
        for y2 in range(y1 + 1, h):
            if own_sat[(y2 + 1) * stride + w] - own_sat[y2 * stride + w] == 0:
                continue
            for x in range(w):
                ok[x] = 1 if (bg_sat[(y2 + 1) * stride + x + 1] - bg_sat[y1 * stride + x + 1]
                              - bg_sat[(y2 + 1) * stride + x] + bg_sat[y1 * stride + x]) == 0 else 0
                has_own[x] = 1 if (own_sat[(y2 + 1) * stride + x + 1] - own_sat[y1 * stride + x + 1]
                                   - own_sat[(y2 + 1) * stride + x] + own_sat[y1 * stride + x]) > 0 else 0
            x = 0
            while x < w:
                if not ok[x]:
                    x += 1
                    continue
                run_start = x
                while x < w and ok[x]:
                    x += 1
                run_end = x - 1
                del spans[:]
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
                    trimmed = (spans[0][0], spans[len(spans) - 1][1])
                    if trimmed not in spans:
                        spans.append(trimmed)
                for (x1, x2) in spans:
                    if x2 - x1 < 1:
                        continue
                    if (own_sat[(y1 + 1) * stride + x2 + 1] - own_sat[y1 * stride + x2 + 1]
                            - own_sat[(y1 + 1) * stride + x1] + own_sat[y1 * stride + x1]) == 0:
                        continue
                    if (own_sat[(y2 + 1) * stride + x2 + 1] - own_sat[y2 * stride + x2 + 1]
                            - own_sat[(y2 + 1) * stride + x1] + own_sat[y2 * stride + x1]) == 0:
                        continue
                    own = (own_sat[(y2 + 1) * stride + x2 + 1] - own_sat[y1 * stride + x2 + 1]
                           - own_sat[(y2 + 1) * stride + x1] + own_sat[y1 * stride + x1])
                    area = (x2 - x1 + 1) * (y2 - y1 + 1)
                    if own * 100 // area < min_clean:
                        continue
                    out.append((x1, y1, x2, y2, own))
    return out


def clean_count(const unsigned char[:] cells, int w, int h, int color,
                int x1, int y1, int x2, int y2):
    cdef int x, y, n = 0
    for y in range(y1, y2 + 1):
        for x in range(x1, x2 + 1):
            if cells[y * w + x] == color:
                n += 1
    return n


def rect_matches(const unsigned char[:] cells, int w, int h, int color,
                 int x1, int y1, int x2, int y2):
    cdef int x, y
    if x1 < 0 or y1 < 0 or x2 >= w or y2 >= h:
        return False
    for y in range(y1, y2 + 1):
        for x in range(x1, x2 + 1):
            if cells[y * w + x] != color:
                return False
    return True


def line_matches(const unsigned char[:] cells, int w, int h, int color,
                 int x1, int y1, int x2, int y2):
    cdef int x, y
    if x1 < 0 or y1 < 0 or x2 >= w or y2 >= h:
        return False
    if y1 == y2:
        for x in range(x1, x2 + 1):
            if cells[y1 * w + x] != color:
                return False
        return True
    for y in range(y1, y2 + 1):
        if cells[y * w + x1] != color:
            return False
    return True


def walk_path(const unsigned char[:] cells, int w, int h, int px, int py,
              int dx, int dy, int bg, const unsigned char[:] target_mask):
    cdef int steps = 0
    cdef int x = px + dx
    cdef int y = py + dy
    cdef int idx
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
