"""Plain SVG pictures of planar tilings by translated regions."""
from __future__ import annotations

import math

from gmpy2 import mpq

from .verify import _lattice_polytope, _tiling_pieces, covering_keys

__all__ = ["SvgScene", "tiling_svg"]

FACE_COLORS = {0: "#d9534f", 1: "#5bc0de", 2: "#f0f0f0"}


def _ordered(points):
    cx = sum(float(p[0]) for p in points) / len(points)
    cy = sum(float(p[1]) for p in points) / len(points)
    return sorted(points, key=lambda p: math.atan2(float(p[1]) - cy, float(p[0]) - cx))


class SvgScene:
    """Collects layers of polygons, polylines and dots; renders deterministically."""

    def __init__(self, scale=40, margin=1):
        self.scale = scale
        self.margin = margin
        self.layers = []  # (name, [svg element strings])
        self._pts = []

    def _xy(self, p):
        return "%.4f,%.4f" % (float(p[0]) * self.scale, -float(p[1]) * self.scale)

    def layer(self, name):
        items = []
        self.layers.append((name, items))
        return items

    def polygon(self, items, pts, fill, stroke="#333", width=0.6, opacity=1.0):
        if len(pts) < 3:
            return
        pts = _ordered(pts)
        self._pts.extend(pts)
        items.append('<polygon points="%s" fill="%s" fill-opacity="%.2f" stroke="%s" stroke-width="%.2f"/>'
                     % (" ".join(self._xy(p) for p in pts), fill, opacity, stroke, width))

    def dot(self, items, p, r=2.0, fill="#000"):
        self._pts.append(p)
        x, y = self._xy(p).split(",")
        items.append('<circle cx="%s" cy="%s" r="%.1f" fill="%s"/>' % (x, y, r, fill))

    def render(self):
        if self._pts:
            xs = [float(p[0]) for p in self._pts]
            ys = [float(p[1]) for p in self._pts]
        else:
            xs = ys = [0.0]
        m = self.margin
        x0, x1 = (min(xs) - m) * self.scale, (max(xs) + m) * self.scale
        y0, y1 = (-max(ys) - m) * self.scale, (-min(ys) + m) * self.scale
        out = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="%.2f %.2f %.2f %.2f">'
               % (x0, y0, x1 - x0, y1 - y0)]
        for name, items in self.layers:
            out.append('<g id="%s">' % name)
            out.extend(items)
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"


def tiling_svg(ctx, policy, P, t):
    """Picture of the tiling of the covering complex of tP (lattice coordinates)."""
    sctx, P = _lattice_polytope(ctx, P)
    if sctx.n != 2:
        raise ValueError("SVG output is only available in the plane")
    e, X, pieces = _tiling_pieces(sctx, policy, P, t)
    target = covering_keys(e, P, t)
    lat = P.lattice
    sc = SvgScene()
    dc = sc.layer("domain-complex")
    inside = {z for z in target if P.contains(tuple(mpq(x, t) for x in z))}
    for z in sorted(target):
        cell = e.T.translate(z)
        sc.polygon(dc, cell.vertices(), "#bbbbbb" if z in inside else "#e6e6e6",
                   stroke="none", width=0)
    regions = sc.layer("regions")
    for z in sorted(pieces):
        for i, cells in pieces[z]:
            for c in cells:
                sc.polygon(regions, c.translate(z).vertices(), FACE_COLORS.get(lat.dims[i], "#999"),
                           opacity=0.55)
    outline = sc.layer("polytope")
    sc.polygon(outline, [tuple(t * x for x in v) for v in P.vertices], "none",
               stroke="#000", width=1.6)
    dots = sc.layer("lattice")
    for z in sorted(target):
        sc.dot(dots, z, r=1.2, fill="#555")
    feas = sc.layer("feasible")
    for i in sorted(X):
        for x in X[i]:
            sc.dot(feas, x, r=2.6, fill=FACE_COLORS.get(lat.dims[i], "#000") if lat.dims[i] < 2 else "#222")
    return sc.render()
