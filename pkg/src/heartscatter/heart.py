"""Blow-up data, the localized curve-class monoid, wall refinement, and the
translation of the completed toric-stage structure into the wall structure
carrying curve classes.

Toric-stage walls carry series in formal variables t_i z^{m_i}; translating
a wall inside a maximal cone sigma substitutes

    t_{ij} z^{m_i}  ->  t^{ -E_i^j + psi(m_i) - psi_sigma(m_i) } z^{m_i},

where psi is the piecewise-linear function with the boundary-curve kinks,
psi(m_i) its honest value at the point m_i, and psi_sigma its linear
representative on sigma.  Summed over a term this equals the curve class
psi(-m_bar) + sum_ij a_ij psi(m_i) - sum_ij a_ij E_i^j attached to the term.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curves import CC_ZERO, CurveClass, cc, cc_add, cc_scale, cc_sub
from .lattice import (
    Cone,
    Fan,
    PLFunction,
    is_zero,
    primitive,
    proportional,
    solve_columns,
    vec_add,
    vec_dot,
    vec_neg,
    vec_scale,
)
from .scattering import WallStructure, make_wall, merge_walls, widget
from .series import Registry


class HeartError(ValueError):
    pass


@dataclass(frozen=True)
class Component:
    """One connected component of a blow-up center: an exceptional-class
    label plus intersection multiplicities per codimension-one cone."""

    label: str
    intersections: tuple  # tuple[(facet_key, int), ...]

    def multiplicity(self, facet_key) -> int:
        for key, mult in self.intersections:
            if key == facet_key:
                return mult
        return 0


@dataclass(frozen=True)
class Center:
    ray_index: int
    components: tuple  # tuple[Component, ...]


@dataclass(frozen=True)
class BlowupData:
    """A complete fan, blow-up centers on distinct rays, and the kink data of
    the piecewise-linear function with boundary-curve-class kinks."""

    fan: Fan
    centers: tuple
    psi: PLFunction
    cutoff: int

    @staticmethod
    def build(fan: Fan, centers, kinks: dict, cutoff: int, base_cone: int = 0) -> "BlowupData":
        psi = PLFunction.build(fan, base_cone, kinks)
        bd = BlowupData(fan, tuple(centers), psi, cutoff)
        bd.validate()
        return bd

    def validate(self):
        seen = set()
        for center in self.centers:
            if center.ray_index in seen:
                raise HeartError("blow-up centers must sit on distinct rays")
            seen.add(center.ray_index)
            for comp in center.components:
                for _key, mult in comp.intersections:
                    if mult < 0:
                        raise HeartError("intersection numbers must be >= 0")
        labels = [comp.label for c in self.centers for comp in c.components]
        if len(labels) != len(set(labels)):
            raise HeartError("exceptional-class labels must be distinct")

    # -- registries and naming ---------------------------------------------

    def t_name(self, center: Center, comp: Component) -> str:
        if len(center.components) == 1:
            return f"t{center.ray_index + 1}"
        return f"t{center.ray_index + 1}_{comp.label}"

    def toric_registry(self) -> Registry:
        names = [self.t_name(c, comp) for c in self.centers for comp in c.components]
        return Registry.toric_stage(names)

    def heart_registry(self) -> Registry:
        weights = {}
        invertible = []
        for _key, klass in self.psi.kinks:
            for name, _e in klass:
                weights[name] = 1
        for center in self.centers:
            for comp in center.components:
                if comp.label in weights:
                    raise HeartError(f"class name collision: {comp.label!r}")
                weights[comp.label] = 0
                invertible.append(comp.label)
        return Registry.build(weights, invertible)

    def exceptional_of(self, t_name: str):
        for center in self.centers:
            for comp in center.components:
                if self.t_name(center, comp) == t_name:
                    return center, comp
        raise HeartError(f"unknown toric-stage variable {t_name!r}")


def build_initial(bd: BlowupData) -> WallStructure:
    """Union of the widgets of all centers and components, in toric-stage
    variables."""
    registry = bd.toric_registry()
    walls = []
    for center in bd.centers:
        for comp in center.components:
            inter = dict(comp.intersections)
            walls.extend(widget(bd.fan, center.ray_index, bd.t_name(center, comp),
                                inter, registry, bd.cutoff))
    return WallStructure(bd.fan, bd.psi, tuple(merge_walls(walls)), bd.cutoff)


# ---------------------------------------------------------------------------
# curve class of a wall monomial

def beta_class(bd: BlowupData, exponents: dict, sigma: int) -> CurveClass:
    """Curve class attached to the wall monomial prod (t_{ij} z^{m_i})^{a_ij}
    on a wall inside maximal cone sigma:

        psi(-m_bar) + sum a_ij psi(m_i) - sum a_ij E_i^j

    with psi evaluated at honest lattice points.  exponents maps toric-stage
    variable names to their a_ij.
    """
    fan = bd.fan
    m_bar = (0,) * fan.rank
    out = CC_ZERO
    for t_name, a in exponents.items():
        center, comp = bd.exceptional_of(t_name)
        m_i = fan.rays[center.ray_index]
        m_bar = vec_add(m_bar, vec_scale(a, m_i))
        out = cc_add(out, cc_scale(a, bd.psi.value_at_point(m_i)))
        out = cc_add(out, cc_scale(-a, cc({comp.label: 1})))
    if not is_zero(m_bar):
        point = vec_neg(m_bar)
        sigma_cone = bd.fan.maximal_cones[sigma]
        coeffs = solve_columns(sigma_cone.generators, point)
        if coeffs is not None and all(c >= 0 for c in coeffs):
            out = cc_add(out, bd.psi.value(sigma, point))
        else:
            out = cc_add(out, bd.psi.value_at_point(point))
    return out


# ---------------------------------------------------------------------------
# refinement into maximal cones

def owning_cone(fan: Fan, support: Cone) -> int | None:
    """Lowest-index maximal cone containing the support, or None."""
    for idx, mc in enumerate(fan.maximal_cones):
        if all(mc.contains(g) for g in support.generators):
            return idx
    return None


def _plane_coords(basis, v):
    sol = solve_columns(basis, v)
    if sol is None:
        return None
    return tuple(sol)


def refine(ws: WallStructure, fan: Fan) -> WallStructure:
    """Split wall supports along the fan's codimension-one cones so every
    wall lies in a single maximal cone; functions are unchanged."""
    if ws.rank == 2:
        return ws  # 1-dimensional supports always sit inside a maximal cone
    out = []
    for w in ws.walls:
        if owning_cone(fan, w.support) is not None:
            out.append(w)
            continue
        out.extend(_split_wall(w, fan))
    return ws.with_walls(merge_walls(out))


def _split_wall(w, fan: Fan):
    g1, g2 = w.support.generators
    normal = w.support.span_normal()
    candidates = {g1, g2}
    for facet_key in fan._facets():
        facet = Cone(facet_key)
        pair = [vec_dot(normal, g) for g in facet.generators]
        if all(p == 0 for p in pair):
            candidates.update(facet.generators)
            continue
        if pair[0] == 0:
            candidates.add(facet.generators[0])
            continue
        if pair[1] == 0:
            candidates.add(facet.generators[1])
            continue
        if (pair[0] > 0) != (pair[1] > 0):
            a, b = facet.generators
            ray = primitive(tuple(abs(pair[1]) * x + abs(pair[0]) * y for x, y in zip(a, b)))
            candidates.add(ray)
    inside = [r for r in candidates if w.support.contains(r)]
    rays = sorted(inside, key=lambda r: _angle_key(_plane_coords([g1, g2], r)))
    pieces = []
    for a, b in zip(rays, rays[1:]):
        if proportional(a, b):
            continue
        piece = Cone((a, b))
        probe = piece.interior_point()
        if not w.support.contains(probe):
            continue
        if owning_cone(fan, piece) is None:
            raise HeartError(f"refinement piece {piece} crosses a maximal cone")
        pieces.append(make_wall(piece, w.function, check=False))
    if not pieces:
        raise HeartError(f"refinement of wall {w.support} produced no pieces")
    return pieces


def _angle_key(coords):
    # coords (alpha, beta) >= 0 in the (g1, g2) basis of a salient cone;
    # sweep from g1 (beta/alpha = 0) toward g2 (alpha = 0)
    from fractions import Fraction

    alpha, beta = Fraction(coords[0]), Fraction(coords[1])
    if alpha > 0:
        return (0, beta / alpha)
    return (1, Fraction(0))


# ---------------------------------------------------------------------------
# the localized structure over the curve-class monoid

def to_heart(ws: WallStructure, bd: BlowupData, check: bool = True) -> WallStructure:
    """Translate a completed, refined toric-stage structure into curve-class
    variables; exceptional classes enter with exponent -1 per center bend and
    the toric classes come from the kinks of psi."""
    registry = bd.heart_registry()
    fan = bd.fan
    out = []
    for w in ws.walls:
        sigma = owning_cone(fan, w.support)
        if sigma is None:
            raise HeartError(f"wall {w.support} not inside a maximal cone; refine first")
        rule = {}
        for center in bd.centers:
            m_i = fan.rays[center.ray_index]
            honest = bd.psi.value_at_point(m_i)
            local = bd.psi.value(sigma, m_i)
            for comp in center.components:
                klass = cc_sub(cc_add(cc({comp.label: -1}), honest), local)
                rule[bd.t_name(center, comp)] = (m_i, m_i, klass)
        func = w.function.substitute(rule, registry)
        new = make_wall(w.support, func, check=False)
        if new.incoming != w.incoming:
            raise HeartError(f"incoming flag changed on wall {w.support}")
        if check and not w.incoming:
            _check_beta(bd, w, rule, sigma)
        out.append(new)
    return WallStructure(ws.fan, bd.psi, tuple(out), ws.cutoff)


def _check_beta(bd: BlowupData, src, rule, sigma: int):
    """Translated term classes must match the beta formula wherever the
    wall's maximal cone contains the term's outgoing ray (for refinement
    pieces in a far chart the stored class legitimately differs from the
    honest value by the kinks crossed)."""
    sigma_cone = bd.fan.maximal_cones[sigma]
    for (zexp, klass), _c in src.function.terms.items():
        if is_zero(zexp) and klass == CC_ZERO:
            continue
        if not sigma_cone.contains(vec_neg(zexp)):
            continue
        expected = beta_class(bd, dict(klass), sigma)
        got = CC_ZERO
        for name, exp in klass:
            got = cc_add(got, cc_scale(exp, rule[name][2]))
        if got != expected:
            raise HeartError(
                f"class mismatch on wall {src.support} term z^{zexp}: "
                f"substitution gives {got}, beta formula gives {expected}"
            )
