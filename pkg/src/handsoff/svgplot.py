"""Self-contained SVG line plot of a one-dimensional value table."""

__all__ = ["UnsupportedDimensionError", "value_plot_svg"]

WIDTH, HEIGHT = 800, 600
MARGIN = {"left": 80, "right": 30, "top": 40, "bottom": 70}


class UnsupportedDimensionError(ValueError):
    pass


def _f(v):
    return format(float(v), ".12g")


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def _runs(xs, ys, ok):
    run = []
    for x, y, good in zip(xs, ys, ok):
        if good:
            run.append((x, y))
        elif run:
            yield run
            run = []
    if run:
        yield run


def value_plot_svg(table, title=None):
    """Render ``table`` (1-D) as SVG text.

    Returns ``(svg, warnings)``.  Consecutive feasible points form one
    polyline; an infeasible row breaks the line; an isolated feasible point
    is drawn as a marker.
    """
    if table.n != 1:
        raise UnsupportedDimensionError(f"plot supports 1-D tables only, got n={table.n}")
    xs = [float(x) for x in table.grid[:, 0]]
    ys = [float(v) for v in table.values]
    ok = [bool(f) for f in table.feasible]
    warnings = []

    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    feas_y = [y for y, g in zip(ys, ok) if g]
    if not feas_y:
        warnings.append("no feasible points; plot area left empty")
    y_lo = 0.0
    y_hi = max(feas_y) if feas_y else 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    y_hi *= 1.05

    left, right = MARGIN["left"], WIDTH - MARGIN["right"]
    top, bottom = MARGIN["top"], HEIGHT - MARGIN["bottom"]

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * (right - left)

    def py(y):
        return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g stroke="black" stroke-width="1">'
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>'
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/></g>',
    ]
    out.append('<g font-family="sans-serif" font-size="12" fill="black">')
    for t in _ticks(x_lo, x_hi):
        X = _f(px(t))
        out.append(f'<line x1="{X}" y1="{bottom}" x2="{X}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{bottom + 20}" text-anchor="middle">{_f(round(t, 6))}</text>')
    for t in _ticks(y_lo, y_hi):
        Y = _f(py(t))
        out.append(f'<line x1="{left - 5}" y1="{Y}" x2="{left}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{Y}" text-anchor="end" '
                   f'dominant-baseline="middle">{_f(round(t, 6))}</text>')
    out.append(f'<text x="{_f((left + right) / 2)}" y="{HEIGHT - 25}" '
               f'text-anchor="middle" font-size="14">xi</text>')
    out.append(f'<text x="20" y="{_f((top + bottom) / 2)}" text-anchor="middle" font-size="14" '
               f'transform="rotate(-90 20 {_f((top + bottom) / 2)})">V0(xi)</text>')
    if title:
        out.append(f'<text x="{_f((left + right) / 2)}" y="24" text-anchor="middle" '
                   f'font-size="16">{_escape(title)}</text>')
    out.append("</g>")

    for run in _runs(xs, ys, ok):
        if len(run) == 1:
            x, y = run[0]
            out.append(f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="3" fill="navy"/>')
        else:
            pts = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in run)
            out.append(f'<polyline fill="none" stroke="navy" stroke-width="2" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n", warnings


def _escape(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
