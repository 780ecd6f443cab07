# src/svg_figure.py
from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from .cohomology import NotApplicableError, cohomology, triangle_points
from .pic_lattice import DivisorClass, MinimalModelBasis
from .toric_surface import ToricSurface

SCALE = 32  # svg units per lattice step
MARGIN = 2  # lattice steps around the drawing


class SvgCanvas:
    """
    Minimal string-building SVG writer; coordinates are lattice points, the
    canvas maps them to pixels (y grows upwards on the lattice).
    """

    def __init__(self, xmin: int, xmax: int, ymin: int, ymax: int):
        self.xmin, self.xmax, self.ymin, self.ymax = xmin, xmax, ymin, ymax
        self.width = (xmax - xmin) * SCALE
        self.height = (ymax - ymin) * SCALE
        self.body: List[str] = []

    def px(self, x) -> float:
        return float((Fraction(x) - self.xmin) * SCALE)

    def py(self, y) -> float:
        return float((self.ymax - Fraction(y)) * SCALE)

    def header(self) -> str:
        return (
            '<?xml version="1.0" standalone="no"?>\n'
            f'<svg version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" xmlns="http://www.w3.org/2000/svg">\n'
            '<defs><clipPath id="frame">'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}"/></clipPath></defs>\n'
        )

    def group_start(self, name: str) -> None:
        self.body.append(f'<g id="{name}" clip-path="url(#frame)">\n')

    def group_end(self) -> None:
        self.body.append("</g>\n")

    def line(self, p, q, stroke: str = "#999999", extra: str = "") -> None:
        self.body.append(
            f'<line x1="{self.px(p[0]):.2f}" y1="{self.py(p[1]):.2f}" '
            f'x2="{self.px(q[0]):.2f}" y2="{self.py(q[1]):.2f}" stroke="{stroke}" {extra}/>\n'
        )

    def polygon(self, pts: Sequence, fill: str, extra: str = "") -> None:
        coords = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in pts)
        self.body.append(f'<polygon points="{coords}" fill="{fill}" {extra}/>\n')

    def polyline(self, pts: Sequence, stroke: str = "#000000", extra: str = "") -> None:
        coords = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in pts)
        self.body.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" {extra}/>\n')

    def circle(self, p, r: float, fill: str, stroke: str = "#000000") -> None:
        self.body.append(
            f'<circle cx="{self.px(p[0]):.2f}" cy="{self.py(p[1]):.2f}" r="{r:.1f}" '
            f'fill="{fill}" stroke="{stroke}"/>\n'
        )

    def get_svg(self) -> str:
        return self.header() + "".join(self.body) + "</svg>\n"


def polygonal_line(X: ToricSurface, D: DivisorClass) -> List[Tuple[int, int]]:
    """
    Closed polygonal line of D: edges d_i times l_i turned clockwise by 90
    degrees, starting where the lines of l_{n-1} and l_0 meet.
    """
    c = cohomology(X, D).c
    n = X.n
    u, v = X.rays[-1], X.rays[0]
    # (u; v) m = (-c_{n-1}, -c_0), det(u, v) = 1
    bu, bv = -c[-1], -c[0]
    start = (v[1] * bu - u[1] * bv, -v[0] * bu + u[0] * bv)
    pts = [start]
    x, y = start
    for i in range(n):
        lx, ly = X.rays[i]
        x, y = x + D.coords[i] * ly, y - D.coords[i] * lx
        pts.append((x, y))
    return pts


def _bounds(points: Iterable[Tuple[int, int]]) -> Tuple[int, int, int, int]:
    pts = list(points) or [(0, 0)]
    xs = [p[0] for p in pts] + [0]
    ys = [p[1] for p in pts] + [0]
    return min(xs) - MARGIN, max(xs) + MARGIN, min(ys) - MARGIN, max(ys) + MARGIN


def render_report(X: ToricSurface, D: DivisorClass, basis: Optional[MinimalModelBasis] = None) -> str:
    """
    Layers, bottom to top: boundary lines H_i, triangles T, dots for G_D,
    open circles for G_D°, the polygonal line of D.
    """
    rep = cohomology(X, D)
    poly = polygonal_line(X, D)
    triangles = []
    if basis is not None:
        for k in range(1, basis.t + 1):
            try:
                tri = triangle_points(X, D, basis, k)
            except NotApplicableError:
                continue
            if tri.total:
                triangles.append(tri)
    tri_pts = [p for t in triangles for p in t.total]
    xmin, xmax, ymin, ymax = _bounds(list(rep.sections) + list(rep.interior) + poly + tri_pts)
    canvas = SvgCanvas(xmin, xmax, ymin, ymax)
    reach = (xmax - xmin) + (ymax - ymin)

    canvas.group_start("hyperplanes")
    for (lx, ly), ci in zip(X.rays, rep.c):
        norm = lx * lx + ly * ly
        base = (Fraction(-ci * lx, norm), Fraction(-ci * ly, norm))
        p = (base[0] - reach * ly, base[1] + reach * lx)
        q = (base[0] + reach * ly, base[1] - reach * lx)
        canvas.line(p, q, extra='stroke-width="1"')
    canvas.group_end()

    canvas.group_start("triangles")
    for t in triangles:
        hull = _triangle_corners(t.total)
        canvas.polygon(hull, fill="#cfe3ff", extra='fill-opacity="0.6" stroke="#6b9bd1"')
    canvas.group_end()

    canvas.group_start("sections")
    for p in rep.sections:
        canvas.circle(p, 4.0, fill="#000000")
    canvas.group_end()

    canvas.group_start("interior")
    for p in rep.interior:
        canvas.circle(p, 7.0, fill="none")
    canvas.group_end()

    canvas.group_start("polygonal-line")
    canvas.polyline(poly, stroke="#c0392b", extra='stroke-width="2"')
    canvas.group_end()
    return canvas.get_svg()


def _triangle_corners(points: Iterable[Tuple[int, int]]) -> List[Tuple[int, int]]:
    # corners of a lattice triangle = its extreme points, in counterclockwise order
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: List[Tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def save_svg(svg: str, out_path: str | Path) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    print(f"Saved: {out}")
    return out
