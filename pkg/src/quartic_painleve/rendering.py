"""Minimal deterministic SVG emission for sign rasters and traced curves.

Elements are written in a fixed order (raster cells row-major, then
curves in the order given, then axes), so repeated runs produce
byte-identical files.
"""

from __future__ import annotations

from mpmath import mpc

SHADE = "#b8c4d8"
CURVE_COLORS = ("#a03030", "#3060a0", "#208050", "#806020", "#603080", "#b06090")


def _fmt(v):
    return f"{float(v):.4f}"


class SvgCanvas:
    def __init__(self, bbox, width=640, height=640):
        self.re_min, self.re_max, self.im_min, self.im_max = (float(v) for v in bbox)
        self.width = width
        self.height = height
        self.parts = []

    def x(self, re):
        return (float(re) - self.re_min) / (self.re_max - self.re_min) * self.width

    def y(self, im):
        return (1 - (float(im) - self.im_min) / (self.im_max - self.im_min)) * self.height

    def add_raster(self, rows, positive_only=True):
        """Shade raster cells where the sign is +1 (the Re phi > 0 region)."""
        res = len(rows)
        if res == 0:
            return
        cw = self.width / res
        ch = self.height / res
        for iy, row in enumerate(rows):
            for ix, s in enumerate(row):
                if s == 1:
                    px = ix * cw
                    py = self.height - (iy + 1) * ch
                    self.parts.append(
                        f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(cw)}"'
                        f' height="{_fmt(ch)}" fill="{SHADE}" stroke="none"/>'
                    )

    def add_polyline(self, points, color, width=1.5):
        coords = " ".join(f"{_fmt(self.x(mpc(z).real))},{_fmt(self.y(mpc(z).imag))}" for z in points)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"/>'
        )

    def add_axes(self):
        self.parts.append(
            f'<line x1="0" y1="{_fmt(self.y(0))}" x2="{self.width}" y2="{_fmt(self.y(0))}"'
            ' stroke="#404040" stroke-width="0.7"/>'
        )
        self.parts.append(
            f'<line x1="{_fmt(self.x(0))}" y1="0" x2="{_fmt(self.x(0))}" y2="{self.height}"'
            ' stroke="#404040" stroke-width="0.7"/>'
        )

    def render(self):
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}"'
            f' height="{self.height}" viewBox="0 0 {self.width} {self.height}">'
        )
        return head + "\n" + "\n".join(self.parts) + "\n</svg>\n"


def region_figure(rows, bbox, curves=(), width=640, height=640):
    """SVG with the Re phi > 0 region shaded and curves overlaid."""
    canvas = SvgCanvas(bbox, width, height)
    canvas.add_raster(rows)
    for i, curve in enumerate(curves):
        canvas.add_polyline(curve.points, CURVE_COLORS[i % len(CURVE_COLORS)])
    canvas.add_axes()
    return canvas.render()


def write_svg(path, content):
    with open(path, "w") as fh:
        fh.write(content)
    return path
