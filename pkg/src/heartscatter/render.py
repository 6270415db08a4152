"""SVG rendering of a 2D slice of a wall structure.

The slice plane is spanned by two fan rays; wall traces are the exact
rational intersections of wall supports with the plane, scaled into a unit
viewport only at print time.  Walls lying inside the plane are drawn as
shaded sectors, transverse walls as rays, and walls attached to an in-plane
joint but leaving the plane as up/down arrow markers.
"""

from __future__ import annotations

from math import hypot

from .lattice import Cone, solve_columns, vec_dot
from .scattering import WallStructure, enumerate_joints


class RenderError(ValueError):
    pass


def _plane_trace(support: Cone, u, v, normal):
    """Intersection of a 2D cone with the plane span(u, v).

    Returns ('sector', (a1, b1), (a2, b2)) if the support lies in the plane,
    ('ray', (a, b)) for a transverse 1-dimensional trace, or None.
    """
    pair = [vec_dot(normal, g) for g in support.generators]
    coords = [solve_columns([u, v], g) for g in support.generators]
    if all(p == 0 for p in pair):
        if any(c is None for c in coords):
            return None
        (a1, b1), (a2, b2) = coords
        return ("sector", (a1, b1), (a2, b2))
    if all(p > 0 for p in pair) or all(p < 0 for p in pair):
        return None
    g1, g2 = support.generators
    p1, p2 = pair
    if p1 == 0:
        point = g1
    elif p2 == 0:
        point = g2
    else:
        point = tuple(abs(p2) * x + abs(p1) * y for x, y in zip(g1, g2))
    sol = solve_columns([u, v], point)
    if sol is None:
        return None
    return ("ray", tuple(sol))


def render_slice(ws: WallStructure, ray_a: int, ray_b: int, size: int = 640) -> str:
    """SVG of the slice plane spanned by two fan rays.

    In rank 2 the slice is the whole plane and every wall is an in-plane ray.
    """
    u = ws.fan.rays[ray_a]
    v = ws.fan.rays[ray_b]
    if ws.rank == 2:
        return _render_plane(ws, u, v, size)
    try:
        normal = Cone((u, v)).span_normal()
    except Exception as exc:
        raise RenderError(f"slice rays do not span a plane: {exc}") from exc
    cx = cy = size / 2
    scale = size * 0.42

    def place(direction):
        x, y = float(direction[0]), float(direction[1])
        norm = hypot(x, y)
        if norm == 0:
            return cx, cy
        return cx + scale * x / norm, cy - scale * y / norm

    lines = []
    sectors = []
    labels = []
    for w in ws.sorted_walls():
        trace = _plane_trace(w.support, u, v, normal)
        if trace is None:
            continue
        text = w.function.pretty()
        if trace[0] == "sector":
            x1, y1 = place(trace[1])
            x2, y2 = place(trace[2])
            sectors.append(
                f'<path d="M {cx:.1f} {cy:.1f} L {x1:.1f} {y1:.1f} L {x2:.1f} {y2:.1f} Z" '
                f'fill="#9ecae8" fill-opacity="0.35" stroke="none"/>'
            )
            mx, my = (x1 + x2) / 2, (y1 + y2) / 2
            labels.append((mx, my, text))
        else:
            x, y = place(trace[1])
            lines.append(
                f'<line x1="{cx:.1f}" y1="{cy:.1f}" x2="{x:.1f}" y2="{y:.1f}" '
                f'stroke="#2166ac" stroke-width="2"/>'
            )
            labels.append((x, y, text))
    markers = []
    for joint in enumerate_joints(ws):
        if joint.ray is None:
            continue
        if vec_dot(normal, joint.ray) != 0:
            continue
        sol = solve_columns([u, v], joint.ray)
        if sol is None:
            continue
        jx, jy = place(tuple(sol))
        arrows = set()
        for widx in joint.adjacent_walls:
            wall = ws.walls[widx]
            for g in wall.support.generators:
                side = vec_dot(normal, g)
                if side > 0:
                    arrows.add("up")
                elif side < 0:
                    arrows.add("down")
        markers.append(f'<circle cx="{jx:.1f}" cy="{jy:.1f}" r="4" fill="#b2182b"/>')
        if "up" in arrows:
            markers.append(
                f'<path d="M {jx:.1f} {jy - 6:.1f} l -4 8 l 8 0 Z" fill="#b2182b"/>'
            )
        if "down" in arrows:
            markers.append(
                f'<path d="M {jx:.1f} {jy + 6:.1f} l -4 -8 l 8 0 Z" fill="#b2182b"/>'
            )
    texts = [
        f'<text x="{x:.1f}" y="{y:.1f}" font-size="11" font-family="monospace" '
        f'fill="#333">{_escape(t)}</text>'
        for x, y, t in labels
    ]
    body = "\n".join(sectors + lines + markers + texts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect width="{size}" height="{size}" fill="white"/>\n'
        f"{body}\n</svg>\n"
    )


def _render_plane(ws: WallStructure, u, v, size: int) -> str:
    cx = cy = size / 2
    scale = size * 0.42

    def place(direction):
        x, y = float(direction[0]), float(direction[1])
        norm = hypot(x, y)
        if norm == 0:
            return cx, cy
        return cx + scale * x / norm, cy - scale * y / norm

    basis = solve_columns([u, v], (1, 0)), solve_columns([u, v], (0, 1))
    if basis[0] is None or basis[1] is None:
        raise RenderError("slice rays do not span the plane")
    lines, labels = [], []
    for w in ws.sorted_walls():
        ray = w.support.generators[0]
        coords = solve_columns([u, v], ray)
        x, y = place(tuple(coords))
        lines.append(
            f'<line x1="{cx:.1f}" y1="{cy:.1f}" x2="{x:.1f}" y2="{y:.1f}" '
            f'stroke="#2166ac" stroke-width="2"/>'
        )
        labels.append((x, y, w.function.pretty()))
    texts = [
        f'<text x="{x:.1f}" y="{y:.1f}" font-size="11" font-family="monospace" '
        f'fill="#333">{_escape(t)}</text>'
        for x, y, t in labels
    ]
    body = "\n".join(lines + texts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect width="{size}" height="{size}" fill="white"/>\n'
        f"{body}\n</svg>\n"
    )


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
