"""Walls, wall-crossing automorphisms, path-ordered products, joints, and
order-by-order consistency completion.

A wall is a codimension-one simplicial cone with an attached unit series;
crossing it transversally maps z^m to f^<n,m> z^m with n the primitive
normal positive on the approach side.  A structure is consistent when the
composition of crossings around every codimension-two joint is the identity
modulo the truncation order.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cmp_to_key

from .curves import CC_ZERO
from .lattice import (
    Cone,
    Fan,
    PLFunction,
    Vec,
    is_zero,
    kernel_covector,
    primitive,
    proportional,
    unimodular_completion,
    apply_matrix,
    vec_dot,
    vec_neg,
)
from .series import Registry, Series, exp_nilpotent_ranked

DEFAULT_BUDGET = 10_000
BUDGET_ENV = "HEARTSCATTER_BUDGET"


class ScatteringError(ValueError):
    pass


class BudgetExceeded(ScatteringError):
    pass


# ---------------------------------------------------------------------------
# walls and structures

@dataclass(frozen=True)
class Wall:
    support: Cone
    direction: Vec | None  # None for merged walls with mixed term directions
    function: Series
    incoming: bool

    def span_normal(self) -> Vec:
        return self.support.span_normal()


def make_wall(support: Cone, function: Series, check: bool = True) -> Wall:
    """Build a wall, deriving direction and incoming flag from the function.

    All term directions must be tangent to the support; if they are all
    negative multiples of one primitive vector that vector is the direction,
    otherwise direction is None (allowed for hand-entered equivalent walls).
    """
    direction = None
    single = True
    normal = support.span_normal() if support.dim == support.rank - 1 else None
    for (zexp, _klass), _c in function.terms.items():
        if is_zero(zexp):
            continue
        if check and normal is not None and vec_dot(normal, zexp) != 0:
            raise ScatteringError(f"term z^{zexp} not tangent to wall {support}")
        d = primitive(vec_neg(zexp))
        if direction is None:
            direction = d
        elif direction != d:
            single = False
    if not single:
        direction = None
    incoming = direction is not None and support.contains(vec_neg(direction))
    return Wall(support, direction, function, incoming)


@dataclass(frozen=True)
class WallStructure:
    fan: Fan
    pl: PLFunction | None
    walls: tuple  # tuple[Wall, ...]
    cutoff: int

    @property
    def rank(self) -> int:
        return self.fan.rank

    @property
    def registry(self) -> Registry:
        for w in self.walls:
            return w.function.registry
        raise ScatteringError("registry of an empty structure is undefined")

    def with_walls(self, walls) -> "WallStructure":
        return replace(self, walls=tuple(walls))

    def sorted_walls(self):
        return sorted(self.walls, key=lambda w: (w.support.generators, w.direction or ()))


@dataclass(frozen=True)
class Joint:
    ray: Vec | None  # None in rank 2 (the origin)
    adjacent_walls: tuple  # wall indices


def merge_walls(walls) -> list:
    """Multiply functions of walls sharing (support, direction); keep order
    deterministic."""
    merged: dict = {}
    order: list = []
    for w in walls:
        key = (w.support.generators, w.direction)
        if key in merged:
            old = merged[key]
            merged[key] = replace(old, function=old.function * w.function,
                                  incoming=old.incoming or w.incoming)
        else:
            merged[key] = w
            order.append(key)
    return [merged[k] for k in order if not merged[k].function.is_one()]


# ---------------------------------------------------------------------------
# crossing a single wall

def crossing_exponent(n: Vec, zexp: Vec) -> int:
    return vec_dot(n, zexp)


def apply_crossing(s: Series, f: Series, n: Vec) -> Series:
    """Image of a series under z^m -> f^<n,m> z^m."""
    out = Series.zero(s.registry, s.cutoff)
    powers: dict = {}
    for (zexp, klass), coeff in s.terms.items():
        e = vec_dot(n, zexp)
        if e not in powers:
            powers[e] = f ** e
        out = out + powers[e].mul_term(coeff, zexp, klass)
    return out


def cross(wall: Wall, zexp: Vec, side_sign: int, klass=CC_ZERO, coeff=1) -> Series:
    """One wall crossing applied to the monomial coeff·t^klass·z^zexp.

    side_sign orients the primitive span normal (positive on the approach
    side); <n, m> = 0 leaves the monomial unchanged.
    """
    n = wall.span_normal()
    if side_sign < 0:
        n = vec_neg(n)
    f = wall.function
    e = vec_dot(n, zexp)
    mono = Series.term(f.registry, f.cutoff, coeff, zexp, klass)
    if e == 0:
        return mono
    return (f ** e).mul_term(coeff, zexp, klass)


# ---------------------------------------------------------------------------
# automorphisms

@dataclass(frozen=True)
class RingAutomorphism:
    """Images of the coordinate monomials z^{e_k} for a lattice basis."""

    images: tuple  # tuple[Series, ...]

    @staticmethod
    def identity(registry: Registry, cutoff: int, rank: int) -> "RingAutomorphism":
        return RingAutomorphism(tuple(
            Series.term(registry, cutoff, 1, tuple(1 if i == k else 0 for i in range(rank)))
            for k in range(rank)
        ))

    @property
    def rank(self) -> int:
        return len(self.images)

    def then_crossing(self, f: Series, n: Vec) -> "RingAutomorphism":
        """Compose with one wall crossing applied after this automorphism."""
        return RingAutomorphism(tuple(apply_crossing(img, f, n) for img in self.images))

    def apply(self, s: Series) -> Series:
        out = Series.zero(s.registry, s.cutoff)
        cache: dict = {}
        for (zexp, klass), coeff in s.terms.items():
            acc = Series.term(s.registry, s.cutoff, coeff, (0,) * len(zexp), klass)
            for k, e in enumerate(zexp):
                if e == 0:
                    continue
                if (k, e) not in cache:
                    cache[(k, e)] = self.images[k] ** e
                acc = acc * cache[(k, e)]
            out = out + acc
        return out

    def is_identity(self) -> bool:
        for k, img in enumerate(self.images):
            unit = Series.term(img.registry, img.cutoff, 1,
                               tuple(1 if i == k else 0 for i in range(self.rank)))
            if img != unit:
                return False
        return True

    def defect_parts(self):
        """u_k = image_k * z^{-e_k} as unit series 1 + g_k."""
        out = []
        for k, img in enumerate(self.images):
            e_k = tuple(1 if i == k else 0 for i in range(self.rank))
            out.append(img.mul_term(1, vec_neg(e_k)))
        return out


# ---------------------------------------------------------------------------
# joints and loop events

def enumerate_joints(ws: WallStructure) -> list:
    """All codimension-two joints: boundary rays of walls plus 1-dimensional
    pairwise wall intersections, sorted lexicographically."""
    if not ws.walls:
        return []
    if ws.rank == 2:
        return [Joint(None, tuple(range(len(ws.walls))))]
    from .lattice import cone_line_intersection

    rays = set()
    for w in ws.walls:
        rays.update(w.support.generators)
    for i in range(len(ws.walls)):
        for j in range(i + 1, len(ws.walls)):
            r = cone_line_intersection(ws.walls[i].support, ws.walls[j].support)
            if r is not None:
                rays.add(r)
    joints = []
    for ray in sorted(rays):
        adjacent = tuple(i for i, w in enumerate(ws.walls) if w.support.contains(ray))
        joints.append(Joint(ray, adjacent))
    return joints


def _perp_cw(d):
    return (d[1], -d[0])


def _ccw_cmp(a, b) -> int:
    """Exact CCW comparison of nonzero 2D integer vectors by angle in [0, 2pi)
    measured from the positive x-axis of the (already rotated) frame."""
    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    cross = a[0] * b[1] - a[1] * b[0]
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return 0


@dataclass(frozen=True)
class _Event:
    direction: Vec      # primitive quotient direction
    normal: Vec         # primitive span normal, positive on the approach side
    function: Series    # product of coincident wall functions
    wall_indices: tuple


def _joint_frame(ws: WallStructure, joint: Joint):
    """Quotient projection and lift for the joint's transverse plane."""
    if ws.rank == 2:
        def proj(v):
            return tuple(v)

        def lift(q):
            return tuple(q)

        return proj, lift
    U = unimodular_completion(joint.ray)
    Uinv = _integer_inverse(U)

    def proj(v):
        return apply_matrix(U, v)[1:]

    def lift(q):
        return apply_matrix_cols(Uinv, (0,) + tuple(q))

    return proj, lift


def _integer_inverse(U):
    n = len(U)
    cols = []
    for k in range(n):
        e_k = tuple(1 if i == k else 0 for i in range(n))
        from .lattice import solve_columns

        sol = solve_columns([tuple(row[i] for row in U) for i in range(n)], e_k)
        cols.append([int(x) for x in sol])
    return [[cols[j][i] for j in range(n)] for i in range(n)]  # rows of U^{-1}


def apply_matrix_cols(M, v):
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M)))


def joint_events(ws: WallStructure, joint: Joint) -> list:
    """Crossing events of a small counterclockwise loop around the joint, in
    traversal order starting from a deterministic generic base chamber."""
    proj, lift = _joint_frame(ws, joint)
    by_dir: dict = {}
    for widx in joint.adjacent_walls:
        w = ws.walls[widx]
        if ws.rank == 2:
            dirs = [primitive(w.support.generators[0])]
        else:
            projs = [proj(g) for g in w.support.generators]
            dirs = sorted({primitive(p) for p in projs if not is_zero(p)})
            if not dirs:
                raise ScatteringError("wall support projects to zero at its joint")
        for d in dirs:
            by_dir.setdefault(d, []).append(widx)
    if not by_dir:
        return []
    # deterministic generic reference direction: not parallel to any event ray
    big = 1 + max(abs(d[0]) for d in by_dir)
    w0 = (big, 1)
    rot = lambda v: (w0[0] * v[0] + w0[1] * v[1], w0[0] * v[1] - w0[1] * v[0])
    ordered = sorted(by_dir, key=cmp_to_key(lambda a, b: _ccw_cmp(rot(a), rot(b))))
    events = []
    for d in ordered:
        widxs = tuple(sorted(by_dir[d]))
        n = ws.walls[widxs[0]].span_normal()
        for widx in widxs[1:]:
            if not proportional(n, ws.walls[widx].span_normal()):
                raise ScatteringError("non-coplanar walls share a projected ray")
        if vec_dot(n, lift(_perp_cw(d))) < 0:
            n = vec_neg(n)
        f = ws.walls[widxs[0]].function
        for widx in widxs[1:]:
            f = f * ws.walls[widx].function
        events.append(_Event(d, n, f, widxs))
    return events


def loop_product(ws: WallStructure, joint: Joint, cutoff: int | None = None) -> RingAutomorphism:
    """Composition of crossings around the joint, counterclockwise in the
    deterministic quotient frame."""
    cutoff = ws.cutoff if cutoff is None else cutoff
    auto = RingAutomorphism.identity(ws.registry, cutoff, ws.rank)
    for ev in joint_events(ws, joint):
        auto = auto.then_crossing(ev.function.truncate(cutoff), ev.normal)
    return auto


def verify_consistent(ws: WallStructure) -> bool:
    return all(loop_product(ws, j).is_identity() for j in enumerate_joints(ws))


# ---------------------------------------------------------------------------
# defects and completion

def defect(ws: WallStructure, joint: Joint, k: int) -> list:
    """Order-k part of the loop-product log at a joint, decomposed into wall
    derivations: list of (zexp, klass, coefficient, normal).

    Requires consistency at the joint to order k-1; an empty list means the
    joint is consistent at order k.
    """
    auto = loop_product(ws, joint, cutoff=k)
    units = auto.defect_parts()
    rank = ws.rank
    vectors: dict = {}
    for i, u in enumerate(units):
        g = u.copy()
        g._accumulate((0,) * rank, CC_ZERO, Fraction(-1))
        if not g.is_zero() and g.min_order() < k:
            raise ScatteringError(
                f"joint {joint.ray}: inconsistent below order {k} (order {g.min_order()})"
            )
        for (zexp, klass), coeff in g.order_part(k).terms.items():
            vectors.setdefault((zexp, klass), [Fraction(0)] * rank)[i] = coeff
    out = []
    for (zexp, klass), w in sorted(vectors.items()):
        if all(c == 0 for c in w):
            continue
        if joint.ray is not None and proportional(zexp, joint.ray):
            raise ScatteringError(f"radial defect z^{zexp} at joint {joint.ray}")
        span = [zexp] if joint.ray is None else [joint.ray, zexp]
        n_hat = kernel_covector(span, rank)
        lead = next(i for i in range(rank) if n_hat[i] != 0)
        c = w[lead] / n_hat[lead]
        if [c * x for x in n_hat] != w:
            raise ScatteringError(
                f"defect at joint {joint.ray}: derivation for z^{zexp} is not a wall derivation"
            )
        out.append((zexp, klass, c, n_hat))
    return out


def _correction_wall(ws: WallStructure, joint: Joint, zexp, klass, c, n_hat) -> Wall:
    """Outgoing wall cancelling one defect term in the joint's loop."""
    mdir = primitive(vec_neg(zexp))
    if joint.ray is None:
        support = Cone((mdir,))
    else:
        support = Cone((tuple(joint.ray), mdir))
    # crossing sign of the new wall at its position in the ccw loop
    proj, lift = _joint_frame(ws, joint)
    d = primitive(proj(mdir)) if ws.rank == 3 else mdir
    n_loop = n_hat if vec_dot(n_hat, lift(_perp_cw(d))) > 0 else vec_neg(n_hat)
    sign = 1 if n_loop == n_hat else -1
    coeff = -c * sign
    body = Series.term(ws.registry, ws.cutoff, coeff, zexp, klass)
    func = exp_nilpotent_ranked(body, ws.rank)
    wall = make_wall(support, func)
    if wall.incoming:
        raise ScatteringError("correction wall came out incoming")
    return wall


def complete(ws: WallStructure, order: int | None = None, budget: int | None = None) -> WallStructure:
    """Order-by-order consistency completion.

    For k = 1..N, repeatedly: compute all joint defects at order k against the
    frozen structure, insert/merge the correcting outgoing walls in batch, and
    rescan until a clean sweep.  The result has identity loop products at
    every joint modulo order N+1.
    """
    N = ws.cutoff if order is None else order
    if budget is None:
        budget = int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))
    walls = merge_walls(ws.walls)
    for k in range(1, N + 1):
        inserted = 0
        while True:
            cur = ws.with_walls(walls)
            pending = []
            for joint in enumerate_joints(cur):
                for term in defect(cur, joint, k):
                    pending.append((joint, term))
            if not pending:
                break
            for joint, (zexp, klass, c, n_hat) in pending:
                new = _correction_wall(cur, joint, zexp, klass, c, n_hat)
                walls = merge_walls(walls + [new])
                inserted += 1
                if inserted > budget:
                    raise BudgetExceeded(
                        f"insertion budget {budget} exceeded at order {k}"
                    )
    out = ws.with_walls(walls)
    if N >= ws.cutoff:
        # orders above the completed range may carry exponential tails, so the
        # integrality postcondition only applies to a full completion
        for w in out.walls:
            for _key, coeff in w.function.terms.items():
                if coeff.denominator != 1:
                    raise ScatteringError(
                        f"non-integer completed wall function on {w.support}: "
                        f"{w.function.canonical_text()}"
                    )
    return out


# ---------------------------------------------------------------------------
# widgets (initial walls of a blow-up center component)

def widget(fan: Fan, ray_index: int, t_name: str, intersections: dict,
           registry: Registry, cutoff: int) -> list:
    """Incoming walls attached to one blown-up hypersurface component: one
    wall per codimension-one cone containing the center ray, with function
    (1 + t z^{m_i})^{multiplicity}."""
    if not 0 <= ray_index < len(fan.rays):
        raise ScatteringError(f"ray index {ray_index} not in fan")
    m_i = fan.rays[ray_index]
    walls = []
    for facet_key in fan._facets():
        facet = Cone(facet_key)
        if not facet.contains(m_i):
            continue
        mult = intersections.get(facet_key, 0)
        if mult < 0:
            raise ScatteringError("negative intersection number")
        if mult == 0:
            continue
        one = Series.one(registry, cutoff, fan.rank)
        lin = one + Series.term(registry, cutoff, 1, m_i, ((t_name, 1),))
        walls.append(make_wall(facet, lin ** mult))
    return walls


# ---------------------------------------------------------------------------
# path-ordered products along explicit paths

def path_ordered_product(ws: WallStructure, waypoints, cutoff: int | None = None) -> RingAutomorphism:
    """Composition of crossings along the piecewise-linear path through the
    given rational waypoints (which must avoid Sing and cross transversally)."""
    cutoff = ws.cutoff if cutoff is None else cutoff
    auto = RingAutomorphism.identity(ws.registry, cutoff, ws.rank)
    from .lattice import solve_columns

    for pt in waypoints:
        pt = tuple(Fraction(x) for x in pt)
        for w in ws.walls:
            coeffs = solve_columns(w.support.generators, pt)
            if coeffs is not None and all(c >= 0 for c in coeffs):
                raise ScatteringError(f"waypoint {pt} lies on wall {w.support}")
    for a, b in zip(waypoints, waypoints[1:]):
        a = tuple(Fraction(x) for x in a)
        b = tuple(Fraction(x) for x in b)
        d = tuple(y - x for x, y in zip(a, b))
        hits: dict = {}
        for widx, w in enumerate(ws.walls):
            n = w.span_normal()
            dn = vec_dot(n, d)
            an = vec_dot(n, a)
            if dn == 0:
                if an == 0:
                    raise ScatteringError("path segment lies in a wall plane")
                continue
            s = -Fraction(an) / dn
            if not 0 < s < 1:
                continue
            point = tuple(x + s * y for x, y in zip(a, d))
            coeffs = w.support.coefficients(point)
            if coeffs is None or any(c < 0 for c in coeffs):
                continue
            if any(c == 0 for c in coeffs):
                raise ScatteringError(f"path hits the boundary of wall {w.support}")
            hits.setdefault(s, []).append(widx)
        for s in sorted(hits):
            widxs = hits[s]
            n = ws.walls[widxs[0]].span_normal()
            for widx in widxs[1:]:
                if not proportional(n, ws.walls[widx].span_normal()):
                    raise ScatteringError("path crosses a joint")
            if vec_dot(n, d) > 0:
                n = vec_neg(n)  # positive on the approach side
            f = ws.walls[widxs[0]].function
            for widx in widxs[1:]:
                f = f * ws.walls[widx].function
            auto = auto.then_crossing(f.truncate(cutoff), n)
    return auto


# ---------------------------------------------------------------------------
# export

def wall_table_json(ws: WallStructure) -> str:
    rows = []
    for w in ws.sorted_walls():
        rows.append({
            "support": [list(g) for g in w.support.generators],
            "direction": list(w.direction) if w.direction else None,
            "function": w.function.canonical_text(),
            "incoming": w.incoming,
        })
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def wall_table_text(ws: WallStructure) -> str:
    lines = ["support | function", "------- | --------"]
    for w in ws.sorted_walls():
        gens = ",".join("(" + ",".join(str(c) for c in g) + ")" for g in w.support.generators)
        lines.append(f"<{gens}> | {w.function.pretty()}")
    return "\n".join(lines) + "\n"
