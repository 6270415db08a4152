"""Broken lines, theta functions, mirror relations, and the single-center
comparison against the momentum-graph model of the blown-up product.

A broken line is traced backward from the endpoint: the final segment's
velocity is seeded from a finite candidate set, each backward wall crossing
either passes straight or bends into a term of f^<n,v>, and the branch is
accepted when the backward ray escapes with the requested asymptotic
direction.  Curve classes pick up kink contributions at every crossing of a
codimension-one fan cone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import CC_ZERO, CurveClass, cc, cc_add, cc_scale, cc_text
from .lattice import (
    Cone,
    Fan,
    PLFunction,
    Vec,
    is_zero,
    primitive,
    proportional,
    solve_columns,
    unimodular_completion,
    vec_add,
    vec_dot,
    vec_neg,
    vec_scale,
    vec_sub,
)
from .scattering import WallStructure, complete
from .series import Registry, Series

_PRIMES = (7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67)

DEFAULT_BEND_CAP = 12


class ThetaError(ValueError):
    pass


class NonGenericEndpoint(ThetaError):
    pass


# ---------------------------------------------------------------------------
# endpoints

def default_endpoint(fan: Fan, base_cone: int, seed: int = 0):
    """Deterministic generic rational point in the interior of a maximal cone:
    coefficients 1 + 1/p_k on the generators, with distinct odd primes."""
    gens = fan.maximal_cones[base_cone].generators
    point = (Fraction(0),) * fan.rank
    for k, g in enumerate(gens):
        c = 1 + Fraction(1, _PRIMES[(k + seed) % len(_PRIMES)])
        point = tuple(x + c * y for x, y in zip(point, g))
    return point


def kink_transport(klass: CurveClass, kappa: CurveClass, normal: Vec, direction: Vec) -> CurveClass:
    """Transport a monomial's class across a codimension-one cone: add
    kappa * <n, direction> with n positive on the side the monomial leaves."""
    return cc_add(klass, cc_scale(vec_dot(normal, direction), kappa))


# ---------------------------------------------------------------------------
# broken lines

@dataclass(frozen=True)
class BrokenLine:
    endpoint: tuple
    asymptotic_direction: Vec
    segments: tuple           # ((point or None, velocity), ...) from infinity to p
    coefficient: Fraction
    direction: Vec            # final velocity
    klass: CurveClass

    @property
    def final_monomial(self):
        return self.coefficient, self.direction, self.klass


@dataclass
class _Context:
    ws: WallStructure
    m0: Vec
    cutoff: int
    bend_cap: int
    kinks: dict      # plane-normal lookups for facets
    results: list


def _facet_data(ws: WallStructure):
    if ws.pl is None:
        return []
    out = []
    for key, _pair in ws.fan._facets().items():
        facet = Cone(key)
        out.append((facet, facet.span_normal(), ws.pl.kink(tuple(sorted(key)))))
    return out


def _ray_crossings(ws, facets, q, v):
    """Crossings of the backward ray q + s v (s > 0): sorted list of
    (s, point, normal_B, walls, kappa).  normal_B is primitive and positive on
    the backward-destination side, so <normal_B, v> > 0."""
    hits: dict = {}

    def record(s, cone_obj, normal, payload):
        point = tuple(x + s * d for x, d in zip(q, v))
        coeffs = solve_columns(cone_obj.generators, point)
        if coeffs is None or any(c < 0 for c in coeffs):
            return
        if any(c == 0 for c in coeffs):
            raise NonGenericEndpoint(f"path hits the boundary of {cone_obj}")
        entry = hits.setdefault(s, {"normal": None, "walls": [], "kappa": None})
        if entry["normal"] is None:
            entry["normal"] = normal
        elif not proportional(entry["normal"], normal):
            raise NonGenericEndpoint("path crosses a joint of non-coplanar cones")
        kind, obj = payload
        if kind == "wall":
            entry["walls"].append(obj)
        else:
            if entry["kappa"] is not None:
                raise NonGenericEndpoint("path crosses overlapping fan facets")
            entry["kappa"] = obj

    for widx, w in enumerate(ws.walls):
        n = w.span_normal()
        dn = vec_dot(n, v)
        qn = vec_dot(n, q)
        if dn == 0:
            if qn == 0 and _ray_meets_cone(w.support, q, v):
                raise NonGenericEndpoint(f"path lies inside wall {w.support}")
            continue
        s = -Fraction(qn) / dn
        if s > 0:
            record(s, w.support, n, ("wall", widx))
    for facet, n, kappa in facets:
        dn = vec_dot(n, v)
        qn = vec_dot(n, q)
        if dn == 0:
            if qn == 0 and _ray_meets_cone(facet, q, v):
                raise NonGenericEndpoint(f"path lies inside facet {facet}")
            continue
        s = -Fraction(qn) / dn
        if s > 0:
            record(s, facet, n, ("facet", kappa))
    out = []
    for s in sorted(hits):
        entry = hits[s]
        n = entry["normal"]
        if vec_dot(n, v) < 0:
            n = vec_neg(n)
        point = tuple(x + s * d for x, d in zip(q, v))
        out.append((s, point, n, entry["walls"], entry["kappa"]))
    return out


def _ray_meets_cone(cone_obj: Cone, q, v) -> bool:
    """Does {q + s v : s >= 0} meet the cone (assuming q, v in its span)?"""
    base = solve_columns(cone_obj.generators, q)
    step = solve_columns(cone_obj.generators, v)
    if base is None or step is None:
        return False
    lo, hi = Fraction(0), None
    for b, d in zip(base, step):
        if d == 0:
            if b < 0:
                return False
        elif d > 0:
            lo = max(lo, -b / d)
        else:
            bound = -b / d
            hi = bound if hi is None else min(hi, bound)
    return hi is None or lo <= hi


def _candidate_velocities(ws: WallStructure, m0: Vec, N: int, bend_cap: int):
    dirs0 = set()
    dirs_pos = {}
    for w in ws.walls:
        for (zexp, klass) in w.function.terms:
            if is_zero(zexp):
                continue
            o = w.function.registry.order(klass)
            if o == 0:
                dirs0.add(primitive(zexp))
            else:
                cur = dirs_pos.get(zexp)
                dirs_pos[zexp] = o if cur is None else min(cur, o)
    pos_items = sorted(dirs_pos.items())
    sums = set()

    def rec(i, vec, spent):
        if i == len(pos_items):
            sums.add(vec)
            return
        zexp, o = pos_items[i]
        k = 0
        while spent + k * o <= N:
            rec(i + 1, vec_add(vec, vec_scale(k, zexp)), spent + k * o)
            k += 1

    rec(0, tuple(m0), 0)
    zero_items = sorted(dirs0)
    out = set()

    def rec0(i, vec, used):
        if i == len(zero_items):
            out.add(vec)
            return
        d = zero_items[i]
        k = 0
        while used + k <= bend_cap:
            rec0(i + 1, vec_add(vec, vec_scale(k, d)), used + k)
            k += 1

    for base in sums:
        rec0(0, base, 0)
    return sorted(out, key=lambda v: (sum(abs(x) for x in v), v))


def enumerate_broken_lines(ws: WallStructure, m0: Vec, p, N: int | None = None,
                           bend_cap: int = DEFAULT_BEND_CAP) -> list:
    """All broken lines with asymptotic direction m0 and endpoint p whose
    final monomial has order <= N."""
    m0 = primitive(tuple(m0))
    N = ws.cutoff if N is None else N
    p = tuple(Fraction(x) for x in p)
    _assert_generic(ws, p)
    facets = _facet_data(ws)
    registry = ws.registry if ws.walls else _fallback_registry(ws)
    ctx = _Context(ws, m0, N, bend_cap, {}, [])
    for v in _candidate_velocities(ws, m0, N, bend_cap):
        if is_zero(v):
            continue
        _walk(ctx, facets, registry, p, v, Fraction(1), CC_ZERO, bend_cap, [(p, v)])
    # deterministic report order
    ctx.results.sort(key=lambda bl: (registry.order(bl.klass), bl.direction, bl.klass))
    return ctx.results


def _fallback_registry(ws: WallStructure):
    if ws.pl is None:
        return Registry.build({})
    weights = {}
    for _key, klass in ws.pl.kinks:
        for name, _e in klass:
            weights[name] = 1
    return Registry.build(weights)


def _assert_generic(ws: WallStructure, p):
    for w in ws.walls:
        coeffs = solve_columns(w.support.generators, p)
        if coeffs is not None and all(c >= 0 for c in coeffs):
            raise NonGenericEndpoint(f"endpoint lies on wall {w.support}")
    if ws.pl is not None:
        for key in ws.fan._facets():
            coeffs = solve_columns(tuple(key), p)
            if coeffs is not None and all(c >= 0 for c in coeffs):
                raise NonGenericEndpoint("endpoint lies on a codimension-one cone")


def _walk(ctx, facets, registry, q, v, coeff, klass, cap0, trail):
    if registry.order(klass) > ctx.cutoff:
        return
    crossings = _ray_crossings(ctx.ws, facets, q, v)
    if not crossings:
        if v == ctx.m0:
            segments = tuple([(None, trail[-1][1])] + [(pt, vel) for pt, vel in reversed(trail)])
            ctx.results.append(BrokenLine(
                endpoint=trail[0][0], asymptotic_direction=ctx.m0,
                segments=segments, coefficient=coeff, direction=trail[0][1],
                klass=klass,
            ))
        return
    s, point, n_b, wall_idxs, kappa = crossings[0]
    e = vec_dot(n_b, v)
    assert e > 0
    kink = cc_scale(e, kappa) if kappa is not None else CC_ZERO
    if wall_idxs:
        f = ctx.ws.walls[wall_idxs[0]].function
        for widx in wall_idxs[1:]:
            f = f * ctx.ws.walls[widx].function
        image = f ** e
        for (zexp, tklass), c in sorted(image.terms.items()):
            new_klass = cc_add(cc_add(klass, tklass), kink)
            if registry.order(new_klass) > ctx.cutoff:
                continue
            if is_zero(zexp):
                _walk(ctx, facets, registry, point, v, coeff * c, new_klass, cap0, trail)
            else:
                o = f.registry.order(tklass)
                units = _unit_count(zexp)
                if o == 0 and units > cap0:
                    continue
                v_prev = vec_sub(v, zexp)
                if is_zero(v_prev) or vec_dot(n_b, v_prev) <= 0:
                    continue
                new_cap = cap0 - (units if o == 0 else 0)
                _walk(ctx, facets, registry, point, v_prev, coeff * c, new_klass,
                      new_cap, trail + [(point, v_prev)])
    else:
        new_klass = cc_add(klass, kink)
        if registry.order(new_klass) <= ctx.cutoff:
            _walk(ctx, facets, registry, point, v, coeff, new_klass, cap0, trail)


def _unit_count(zexp) -> int:
    from math import gcd

    g = 0
    for c in zexp:
        g = gcd(g, abs(c))
    return g


def theta(ws: WallStructure, m0: Vec, p=None, N: int | None = None,
          base_cone: int = 0, seed: int = 0, bend_cap: int = DEFAULT_BEND_CAP) -> Series:
    """Sum of final monomials over all broken lines with asymptotic direction
    m0 and endpoint p (defaulted to a generic point of base_cone)."""
    N = ws.cutoff if N is None else N
    retry = p is None
    if p is None:
        p = default_endpoint(ws.fan, base_cone, seed)
    try:
        lines = enumerate_broken_lines(ws, m0, p, N, bend_cap)
    except NonGenericEndpoint:
        if not retry:
            raise
        p = default_endpoint(ws.fan, base_cone, seed + 1)
        lines = enumerate_broken_lines(ws, m0, p, N, bend_cap)
    registry = ws.registry if ws.walls else _fallback_registry(ws)
    out = Series.zero(registry, N)
    for bl in lines:
        out = out + Series.term(registry, N, bl.coefficient, bl.direction, bl.klass)
    for _key, c in out.terms.items():
        if c.denominator != 1 or c < 0:
            raise ThetaError(f"theta coefficient {c} is not a nonnegative integer")
    return out


# ---------------------------------------------------------------------------
# expressing series in theta generators

def _solve_nonneg(rays, target, bound):
    """Deterministic minimal nonnegative integer combination of the rays
    equal to target: minimal total degree, then lexicographically smallest."""
    rank = len(target)
    for total in range(bound + 1):
        found = _solve_nonneg_rec(rays, target, total, ())
        if found is not None:
            return found
    return None


def _solve_nonneg_rec(rays, target, total, prefix):
    if not rays:
        return prefix if (total == 0 and is_zero(target)) else None
    head, tail = rays[0], rays[1:]
    for k in range(total + 1):
        rest = vec_sub(target, vec_scale(k, head))
        found = _solve_nonneg_rec(tail, rest, total - k, prefix + (k,))
        if found is not None:
            return found
    return None


def express_in_thetas(g: Series, thetas, rays, max_steps: int = 100_000):
    """Greedy reduction of g to a polynomial in the given theta series:
    returns [(coefficient, klass, exponents)] with exponents aligned to rays.

    Repeatedly subtracts c * t^beta * prod theta_i^{k_i} matching the leading
    term (order, then lexicographic monomial); the remainder must reach 0.
    """
    leads = []
    for th in thetas:
        (zexp, klass), c = th.sorted_terms()[0]
        leads.append((zexp, klass, c))
    poly = []
    rem = g
    steps = 0
    while not rem.is_zero():
        steps += 1
        if steps > max_steps:
            raise ThetaError("not theta-expressible: reduction did not terminate")
        (zexp, klass), coeff = rem.sorted_terms()[0]
        bound = sum(abs(x) for x in zexp) + 2 * rem.cutoff + 4
        ks = _solve_nonneg(rays, zexp, bound)
        if ks is None:
            raise ThetaError(f"not theta-expressible: no theta monomial matches z^{zexp}")
        beta = klass
        c = Fraction(coeff)
        prod = Series.one(g.registry, g.cutoff, len(zexp))
        for k, th, (lz, lk, lc) in zip(ks, thetas, leads):
            if k:
                prod = prod * th ** k
                beta = cc_add(beta, cc_scale(-k, lk))
                c /= lc ** k
        if any(e < 0 for _n, e in beta if g.registry.weight(_n) > 0):
            raise ThetaError(f"not theta-expressible: class t^[{cc_text(beta)}] not effective")
        term = prod.mul_term(c, (0,) * len(zexp), beta)
        new_rem = rem - term
        if not new_rem.is_zero():
            old_key = (g.registry.order(klass), zexp, klass)
            (z2, k2), _c2 = new_rem.sorted_terms()[0]
            new_key = (g.registry.order(k2), z2, k2)
            if new_key <= old_key:
                raise ThetaError("not theta-expressible: leading term did not drop")
        rem = new_rem
        poly.append((c, beta, tuple(ks)))
    return poly


# ---------------------------------------------------------------------------
# mirror presentations

@dataclass(frozen=True)
class MirrorPresentation:
    generators: tuple        # theta symbol names per fan ray
    thetas: tuple            # the theta series per fan ray
    product: Series
    polynomial: tuple        # ((coeff, klass, exponents), ...)
    text: str


def _theta_symbol(i: int) -> str:
    return f"ϑ{i + 1}"


def _poly_text(poly, names) -> str:
    parts = []
    for coeff, klass, ks in poly:
        factors = []
        if klass != CC_ZERO:
            factors.append(f"t^[{cc_text(klass)}]")
        for name, k in zip(names, ks):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        body = "·".join(factors) if factors else "1"
        if coeff != 1:
            body = f"{coeff}·{body}"
        parts.append(body)
    return " + ".join(parts)


def mirror_presentation(bd, heart_ws: WallStructure, p=None, N: int | None = None,
                        base_cone: int = 0, seed: int = 0) -> MirrorPresentation:
    """Product identity for the theta generators attached to the fan rays.

    The fan rays must sum to zero (the configured product relation); the
    right-hand side is the theta expression of the product, with a factored
    form emitted when the product of the blow-up unit factors matches.
    """
    fan = heart_ws.fan
    N = heart_ws.cutoff if N is None else N
    total = (0,) * fan.rank
    for r in fan.rays:
        total = vec_add(total, r)
    if not is_zero(total):
        raise ThetaError("fan rays do not sum to zero; no product relation configured")
    if p is None:
        p = default_endpoint(fan, base_cone, seed)
    thetas = [theta(heart_ws, r, p, N, base_cone=base_cone) for r in fan.rays]
    names = tuple(_theta_symbol(i) for i in range(len(fan.rays)))
    product = thetas[0]
    for th in thetas[1:]:
        product = product * th
    poly = express_in_thetas(product, thetas, list(fan.rays))
    lhs = "·".join(names)
    rhs = _factored_text(bd, poly, names, thetas, product)
    if rhs is None:
        rhs = _poly_text(poly, names)
    text = f"{lhs} = {rhs}"
    return MirrorPresentation(names, tuple(thetas), product, tuple(poly), text)


def _factored_text(bd, poly, names, thetas, product):
    """Try the closed form t^[beta0] * prod (1 + t^[-E] theta_c)^mult."""
    if bd is None:
        if len(poly) == 1 and poly[0][0] == 1 and all(k == 0 for k in poly[0][2]):
            return f"t^[{cc_text(poly[0][1])}]"
        return None
    factors = []
    candidate = None
    beta0 = None
    for coeff, klass, ks in poly:
        if all(k == 0 for k in ks):
            beta0 = klass
    if beta0 is None:
        return None
    rank = bd.fan.rank
    candidate = Series.term(product.registry, product.cutoff, 1, (0,) * rank, beta0)
    text_factors = []
    for center in bd.centers:
        cone_theta = thetas[center.ray_index]
        for comp in center.components:
            mults = {m for _k, m in comp.intersections}
            if len(mults) != 1:
                return None
            d = mults.pop()
            if d == 0:
                continue
            unit = Series.one(product.registry, product.cutoff, rank) + \
                cone_theta.mul_term(1, (0,) * rank, cc({comp.label: -1}))
            candidate = candidate * unit ** d
            exp = f"^{d}" if d > 1 else ""
            text_factors.append(f"(1 + t^[-{comp.label}]·{names[center.ray_index]}){exp}")
    if candidate == product:
        body = "·".join(text_factors + [f"t^[{cc_text(beta0)}]"]) if text_factors \
            else f"t^[{cc_text(beta0)}]"
        return body
    return None


# ---------------------------------------------------------------------------
# single-center comparison with the momentum-graph model

def graph_model_check(bd, N: int | None = None, seed: int = 0) -> bool:
    """For the blow-up of a product (segment x V) along a single boundary
    hypersurface: the theta generators must match the coordinate generators
    of the momentum-graph model under z^axis -> 1 + t^[-E] z^{-axis}.
    """
    if len(bd.centers) != 1 or len(bd.centers[0].components) != 1:
        raise ThetaError("graph model comparison is defined for a single hypersurface")
    N = bd.cutoff if N is None else N
    fan = bd.fan
    center = bd.centers[0]
    comp = center.components[0]
    m_c = fan.rays[center.ray_index]
    axis = vec_neg(m_c)
    if axis not in fan.rays:
        raise ThetaError("center axis has no opposite ray; fan is not a product")
    U = unimodular_completion(axis)
    v_rays = []
    for r in fan.rays:
        if r in (axis, m_c):
            continue
        if apply_matrix_first(U, r) != 0:
            raise ThetaError("fan is not a product along the center axis")
        v_rays.append(r)

    # pipeline: initial -> completed -> refined -> curve-class walls
    from .heart import build_initial, refine, to_heart

    ws0 = build_initial(bd)
    completed = complete(ws0, N)
    heart_ws = to_heart(refine(completed, fan), bd)
    p = default_endpoint(fan, 0, seed)
    e_label = comp.label

    def stripped_theta(ray):
        th = theta(heart_ws, ray, p, N)
        return _strip_to(th, {e_label})

    reg_e = Registry.build({e_label: 0}, [e_label])
    one = Series.one(reg_e, N, fan.rank)

    # kinks of the hypersurface height function on the quotient fan
    phi = _quotient_height(bd, U)

    ok = True
    # axis generators
    th0 = stripped_theta(m_c)
    th0p = stripped_theta(axis)
    ok &= th0 == Series.term(reg_e, N, 1, m_c)
    ok &= th0p == Series.term(reg_e, N, 1, axis)
    # v0 = z^axis; Psi(v0) = 1 + t^[-E] z^{-axis} must equal 1 + t^[-E] theta0
    psi_v0 = one + Series.term(reg_e, N, 1, m_c, cc({e_label: -1}))
    ok &= psi_v0 == one + th0.mul_term(1, (0,) * fan.rank, cc({e_label: -1}))
    # v_i = z^{r} (z^axis)^{phi(r)}; Psi(v_i) = z^{r} (1 + t^[-E] z^{-axis})^{phi(r)}
    for r in v_rays:
        h = phi(r)
        psi_vi = (one + Series.term(reg_e, N, 1, m_c, cc({e_label: -1}))) ** h
        psi_vi = psi_vi.mul_term(1, r)
        ok &= psi_vi == stripped_theta(r)
    # w0' = (-t^E + t^E z^axis)^{-1}; Psi of the inverse's body must be z^{-axis}
    body = Series.term(reg_e, N, -1, (0,) * fan.rank, cc({e_label: 1})) + \
        Series.term(reg_e, N, 1, axis, cc({e_label: 1}))
    psi_body = _substitute_axis(body, axis, m_c, e_label, reg_e, N)
    ok &= psi_body == Series.term(reg_e, N, 1, m_c)
    return bool(ok)


def apply_matrix_first(U, v) -> int:
    return sum(U[0][i] * v[i] for i in range(len(v)))


def _strip_to(s: Series, keep):
    reg = Registry.build({name: 0 for name in keep}, keep)
    out = Series.zero(reg, s.cutoff)
    for (zexp, klass), coeff in s.terms.items():
        kept = tuple((n, e) for n, e in klass if n in keep)
        out = out + Series.term(reg, s.cutoff, coeff, zexp, kept)
    return out


def _substitute_axis(s: Series, axis, m_c, e_label, reg, N):
    """z^{k*axis} -> (1 + t^[-E] z^{-axis})^k, identity on other directions."""
    out = Series.zero(reg, N)
    unit = Series.one(reg, N, len(axis)) + Series.term(reg, N, 1, m_c, cc({e_label: -1}))
    for (zexp, klass), coeff in s.terms.items():
        k = _axis_multiplicity(zexp, axis)
        rest = vec_sub(zexp, vec_scale(k, axis))
        img = (unit ** k).mul_term(coeff, rest, klass)
        out = out + img
    return out


def _axis_multiplicity(zexp, axis) -> int:
    if is_zero(zexp):
        return 0
    # largest k with zexp - k*axis independent of axis (exact for axis = e0-like)
    lead = next(i for i in range(len(axis)) if axis[i] != 0)
    k, rem = divmod(zexp[lead], axis[lead])
    if rem != 0:
        raise ThetaError("monomial not factorable through the axis")
    return k


def _quotient_height(bd, U, base_cone: int = 0):
    """Height function of the hypersurface on the quotient fan: honest PL
    values with integer kinks given by the component multiplicities, zero on
    the projection of the ambient base cone."""
    fan = bd.fan
    center = bd.centers[0]
    comp = center.components[0]
    m_c = fan.rays[center.ray_index]
    axis = vec_neg(m_c)
    q_rays = []
    q_cones = []
    for mc in fan.maximal_cones:
        if m_c not in mc.generators:
            continue
        others = [g for g in mc.generators if g != m_c]
        idxs = []
        for g in others:
            pr = primitive(tuple(apply_row_rest(U, g)))
            if pr not in q_rays:
                q_rays.append(pr)
            idxs.append(q_rays.index(pr))
        q_cones.append(tuple(sorted(idxs)))
    quotient = Fan.build(q_rays, q_cones)
    base_gens = bd.fan.maximal_cones[base_cone].generators
    if axis not in base_gens and m_c not in base_gens:
        raise ThetaError("base cone must contain the product axis")
    base_proj = tuple(sorted(
        q_rays.index(primitive(tuple(apply_row_rest(U, g))))
        for g in base_gens if g not in (axis, m_c)
    ))
    base_q = next(
        i for i, mc in enumerate(quotient.maximal_cones)
        if tuple(sorted(q_rays.index(g) for g in mc.generators)) == base_proj
    )
    kinks = {}
    for key in quotient._facets():
        lifted = Cone(tuple([m_c] + [unproject(U, g) for g in key]))
        mult = comp.multiplicity(tuple(sorted(lifted.generators)))
        kinks[key] = cc(h=mult)
    pl = PLFunction.build(quotient, base_q, kinks)

    def phi(ray):
        pr = primitive(tuple(apply_row_rest(U, ray)))
        val = pl.value_at_point(pr)
        return dict(val).get("h", 0)

    return phi


def apply_row_rest(U, v):
    return tuple(sum(U[i][j] * v[j] for j in range(len(v))) for i in range(1, len(U)))


def unproject(U, q):
    """A lift of a quotient vector (first coordinate zero in the U frame)."""
    from .scattering import _integer_inverse

    Uinv = _integer_inverse(U)
    full = (0,) + tuple(q)
    return tuple(sum(Uinv[i][j] * full[j] for j in range(len(full))) for i in range(len(Uinv)))
