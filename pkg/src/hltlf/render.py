"""Text and SVG views of plans."""

from xml.sax.saxutils import escape

PALETTE = ["#f28e2b", "#4e79a7", "#59a14f", "#e15759", "#b07aa1",
           "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac"]
IDLE = "#d0d0d0"


def ascii_trace(grid, rows, every=1):
    """One map frame per instant with robots drawn as their index (1-9, then letters)."""
    frames = []
    for t, row in enumerate(rows):
        if t % every and t != len(rows) - 1:
            continue
        marks = {}
        tags = []
        for r, (cell, status, leaf) in enumerate(row):
            glyph = _glyph(r)
            marks[tuple(cell)] = glyph
            tags.append(f"{glyph}:{status}:{leaf or 'ε'}")
        frames.append(f"t={t}  " + " ".join(tags) + "\n" + grid.render(marks))
    return "\n\n".join(frames) + "\n"


def _glyph(r):
    return str(r + 1) if r < 9 else chr(ord("a") + r - 9)


def timeline_text(rows, leaves):
    """Compact per-robot timeline: leaf initials while active, '.' when idle."""
    short = {l: _short(l, i) for i, l in enumerate(leaves)}
    n = len(rows[0]) if rows else 0
    lines = []
    for r in range(n):
        cells = [short[row[r][2]] if row[r][2] else "." for row in rows]
        lines.append(f"robot {_glyph(r)} |" + "".join(cells) + "|")
    legend = "  ".join(f"{v}={k}" for k, v in short.items())
    return "\n".join(lines + [legend]) + "\n"


def _short(name, i):
    return chr(ord("A") + i) if i < 26 else "?"


def gantt_svg(rows, leaves, robot_names=None, cell=14, height=22):
    """Gantt chart: one row per robot, colored while serving a leaf, gray when idle."""
    n = len(rows[0]) if rows else 0
    names = robot_names or [str(r + 1) for r in range(n)]
    color = {l: PALETTE[i % len(PALETTE)] for i, l in enumerate(leaves)}
    left, top = 70, 30
    width = left + cell * max(len(rows), 1) + 20
    total_h = top + height * n + 40 + 16 * ((len(leaves) + 3) // 4)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{total_h}" '
           f'font-family="sans-serif" font-size="11">']
    for r in range(n):
        y = top + r * height
        out.append(f'<text x="8" y="{y + height * 0.65:.1f}">robot {escape(names[r])}</text>')
        t = 0
        while t < len(rows):
            leaf = rows[t][r][2]
            end = t
            while end + 1 < len(rows) and rows[end + 1][r][2] == leaf:
                end += 1
            fill = color.get(leaf, IDLE) if leaf else IDLE
            title = escape(leaf) if leaf else "idle"
            out.append(f'<rect x="{left + t * cell}" y="{y + 2}" width="{(end - t + 1) * cell}" '
                       f'height="{height - 4}" fill="{fill}" stroke="white"><title>{title} '
                       f'{t}-{end}</title></rect>')
            t = end + 1
    axis_y = top + n * height + 14
    for t in range(0, len(rows), 5):
        out.append(f'<text x="{left + t * cell}" y="{axis_y}">{t}</text>')
    for i, l in enumerate(leaves):
        x = left + (i % 4) * 150
        y = axis_y + 16 + (i // 4) * 16
        out.append(f'<rect x="{x}" y="{y - 9}" width="10" height="10" fill="{color[l]}"/>')
        out.append(f'<text x="{x + 14}" y="{y}">{escape(l)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def output_timeline(outputs, names):
    """Per-specification marks, one character per instant ('*' marked)."""
    width = max(len(n) for n in names) if names else 0
    lines = []
    for n in names:
        marks = "".join("*" if m else "." for m in outputs[n])
        lines.append(f"{n.ljust(width)} |{marks}|")
    return "\n".join(lines) + "\n"
