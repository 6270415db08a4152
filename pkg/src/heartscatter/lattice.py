"""Exact lattice geometry: integer vectors, simplicial cones, complete fans,
quotient projections along rays, and piecewise-linear functions with
curve-class kinks.

Everything is done over Z / Q with fractions; no floats enter any predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .curves import CC_ZERO, CurveClass, cc_add, cc_scale

Vec = tuple  # tuple[int, ...]


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# vector helpers

def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vec_scale(k, a: Vec) -> Vec:
    return tuple(k * x for x in a)


def vec_dot(a: Vec, b: Vec):
    return sum(x * y for x, y in zip(a, b))


def is_zero(a: Vec) -> bool:
    return all(x == 0 for x in a)


def primitive(v: Vec) -> Vec:
    """v divided by the gcd of its coordinates."""
    if is_zero(v):
        raise LatticeError("zero has no primitive")
    g = 0
    for c in v:
        g = gcd(g, abs(c))
    return tuple(c // g for c in v)


def proportional(a: Vec, b: Vec) -> bool:
    """True iff a and b span the same line (both nonzero)."""
    return all(a[i] * b[j] == a[j] * b[i] for i in range(len(a)) for j in range(i + 1, len(a)))


# ---------------------------------------------------------------------------
# exact linear algebra (small dense systems over Q)

def solve_columns(cols, target):
    """Solve sum_i x_i * cols[i] = target for linearly independent cols.

    Returns the list of Fraction coefficients, or None if target is not in
    the span.  Raises LatticeError if the columns are dependent.
    """
    n = len(target)
    k = len(cols)
    rows = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    piv_rows = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            raise LatticeError("cone generators are linearly dependent")
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_rows.append(r)
        r += 1
    for i in range(r, n):
        if rows[i][k] != 0:
            return None
    return [rows[i][k] for i in piv_rows]


def matrix_rank(vectors) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    n = len(rows[0]) if rows else 0
    for c in range(n):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pv = rows[rank][c]
        rows[rank] = [x / pv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def kernel_covector(span, rank: int) -> Vec:
    """Primitive integer covector vanishing on `span` (rank must be n-1).

    Sign normalized so the first nonzero entry is positive; callers flip by
    orientation.
    """
    span = list(span)
    n = rank
    # Row reduce the span matrix and read one kernel vector of the row space.
    rows = [[Fraction(x) for x in v] for v in span]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if r != n - 1:
        raise LatticeError(f"span has rank {r}, expected {n - 1}")
    free = next(c for c in range(n) if c not in pivots)
    sol = [Fraction(0)] * n
    sol[free] = Fraction(1)
    for row, c in zip(rows, pivots):
        sol[c] = -row[free]
    den = 1
    for x in sol:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = tuple(int(x * den) for x in sol)
    ints = primitive(ints)
    lead = next(x for x in ints if x != 0)
    return ints if lead > 0 else vec_neg(ints)


def unimodular_completion(ray: Vec):
    """Integer matrix U (list of rows) with det +-1 and U @ ray = e1.

    Deterministic Hermite-style gcd elimination; used to fix quotient bases.
    """
    r = list(primitive(ray))
    n = len(r)
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def rowop(i, j, q):  # row_i -= q * row_j, same on the work vector
        r[i] -= q * r[j]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def rowswap(i, j):
        r[i], r[j] = r[j], r[i]
        U[i], U[j] = U[j], U[i]

    for i in range(1, n):
        while r[i] != 0:
            if r[0] == 0 or (r[i] != 0 and abs(r[i]) < abs(r[0])):
                rowswap(0, i)
            if r[i] != 0:
                rowop(i, 0, r[i] // r[0])
    if r[0] < 0:
        r[0] = -r[0]
        U[0] = [-a for a in U[0]]
    assert r[0] == 1 and all(x == 0 for x in r[1:])
    return U


def apply_matrix(U, v: Vec) -> Vec:
    return tuple(sum(row[i] * v[i] for i in range(len(v))) for row in U)


def project_along(ray: Vec, vectors) -> list:
    """Images in a fixed integral basis of the quotient lattice M / <ray>."""
    U = unimodular_completion(ray)
    return [apply_matrix(U, v)[1:] for v in vectors]


# ---------------------------------------------------------------------------
# cones

@dataclass(frozen=True)
class Cone:
    """Simplicial rational cone with apex at the origin.

    Generators are stored primitive and sorted, so equal cones compare equal.
    """

    generators: tuple

    def __post_init__(self):
        gens = tuple(sorted(primitive(g) for g in self.generators))
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise LatticeError("empty cone")
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if proportional(gens[i], gens[j]):
                    raise LatticeError("cone generators are proportional")
        if matrix_rank(gens) != len(gens):
            raise LatticeError("cone is not simplicial: dependent generators")

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def rank(self) -> int:
        return len(self.generators[0])

    def coefficients(self, v: Vec):
        """Exact coefficients of v in the generator basis, or None."""
        return solve_columns(self.generators, v)

    def contains(self, v: Vec) -> bool:
        coeffs = self.coefficients(v)
        return coeffs is not None and all(c >= 0 for c in coeffs)

    def contains_interior(self, v: Vec) -> bool:
        coeffs = self.coefficients(v)
        return coeffs is not None and all(c > 0 for c in coeffs)

    def interior_point(self) -> Vec:
        out = self.generators[0]
        for g in self.generators[1:]:
            out = vec_add(out, g)
        return out

    def span_normal(self) -> Vec:
        """Primitive covector vanishing on the span (dim must be rank-1)."""
        return kernel_covector(self.generators, self.rank)

    def __repr__(self):
        return "Cone" + str(tuple(self.generators))


def cone(*gens) -> Cone:
    return Cone(tuple(tuple(g) for g in gens))


def cone_contains(c: Cone, v: Vec) -> bool:
    return c.contains(v)


def normal_covector(span) -> Vec:
    span = [tuple(v) for v in span]
    return kernel_covector(span, len(span[0]))


def cone_line_intersection(a: Cone, b: Cone):
    """Ray of a 1-dimensional intersection of two 2D cones, else None.

    Cones with equal span (possibly overlapping in dimension 2) return None;
    their boundary rays are collected separately by callers.
    """
    if a.rank != 3 or a.dim != 2 or b.dim != 2:
        return None
    na, nb = a.span_normal(), b.span_normal()
    if proportional(na, nb):
        return None
    # direction of span(a) cap span(b): cross product of the two normals
    w = (
        na[1] * nb[2] - na[2] * nb[1],
        na[2] * nb[0] - na[0] * nb[2],
        na[0] * nb[1] - na[1] * nb[0],
    )
    if is_zero(w):
        return None
    w = primitive(w)
    for cand in (w, vec_neg(w)):
        if a.contains(cand) and b.contains(cand):
            return cand
    return None


# ---------------------------------------------------------------------------
# fans

@dataclass(frozen=True)
class Fan:
    """Complete simplicial fan, maximal cones given by ray indices."""

    rays: tuple
    maximal_cones: tuple  # tuple[Cone, ...]

    @staticmethod
    def build(rays, maximal) -> "Fan":
        rays = tuple(primitive(tuple(r)) for r in rays)
        cones = tuple(Cone(tuple(rays[i] for i in ix)) for ix in maximal)
        fan = Fan(rays, cones)
        fan._facets()  # force facet pairing validation
        return fan

    @property
    def rank(self) -> int:
        return len(self.rays[0])

    @lru_cache(maxsize=None)
    def _facets(self):
        """Interior codimension-one cones -> (Cone, idx_a, idx_b)."""
        seen: dict = {}
        for idx, mc in enumerate(self.maximal_cones):
            gens = mc.generators
            for drop in range(len(gens)):
                facet = tuple(sorted(g for i, g in enumerate(gens) if i != drop))
                seen.setdefault(facet, []).append(idx)
        out = {}
        for facet, cones_at in sorted(seen.items()):
            if len(cones_at) == 2:
                out[facet] = tuple(cones_at)
            elif len(cones_at) > 2:
                raise LatticeError(f"facet {facet} shared by {len(cones_at)} cones")
            else:
                raise LatticeError(f"fan not complete: facet {facet} on the boundary")
        return out

    @property
    def codim1_cones(self):
        return [Cone(f) for f in self._facets()]

    def facet_key(self, c: Cone):
        return tuple(sorted(c.generators))

    def adjacent(self, facet_key):
        return self._facets()[facet_key]

    def cone_containing(self, v) -> int:
        """Index of the first maximal cone containing v (exact)."""
        for idx, mc in enumerate(self.maximal_cones):
            if mc.coefficients(tuple(v)) is not None and all(
                x >= 0 for x in mc.coefficients(tuple(v))
            ):
                return idx
        raise LatticeError(f"fan not complete at {v}")

    def cone_containing_point(self, p) -> int:
        """Same as cone_containing but for rational points."""
        for idx, mc in enumerate(self.maximal_cones):
            coeffs = solve_columns(mc.generators, tuple(p))
            if coeffs is not None and all(x >= 0 for x in coeffs):
                return idx
        raise LatticeError(f"fan not complete at {p}")

    def check_complete(self, grid: int = 2) -> None:
        """Desk-scale completeness check on an integer sample grid."""
        from itertools import product

        for p in product(range(-grid, grid + 1), repeat=self.rank):
            if is_zero(p):
                continue
            self.cone_containing(p)


# ---------------------------------------------------------------------------
# piecewise-linear functions with kinks

@dataclass(frozen=True)
class PLFunction:
    """PL function on a fan, determined by a base cone where it vanishes and
    curve-class kinks across interior codimension-one cones.

    The linear representative on each maximal cone is a covector with
    curve-class values, reconstructed by accumulating kinks along cone paths
    from the base cone; reconstruction must be path-independent.
    """

    fan: Fan
    base_cone: int
    kinks: tuple  # tuple[(facet_key, CurveClass), ...] canonical

    @staticmethod
    def build(fan: Fan, base_cone: int, kinks) -> "PLFunction":
        items = tuple(sorted((tuple(sorted(tuple(g) for g in k)), v) for k, v in kinks.items()))
        pl = PLFunction(fan, base_cone, items)
        pl.representatives()  # force path-independence validation
        return pl

    def kink(self, facet_key) -> CurveClass:
        for key, v in self.kinks:
            if key == facet_key:
                return v
        raise LatticeError(f"no kink recorded for facet {facet_key}")

    @lru_cache(maxsize=None)
    def representatives(self):
        """Per maximal cone: tuple of CurveClass, one per coordinate."""
        fan = self.fan
        n = fan.rank
        reps: dict = {self.base_cone: tuple(CC_ZERO for _ in range(n))}
        frontier = [self.base_cone]
        facets = fan._facets()
        while frontier:
            cur = frontier.pop(0)
            for facet_key, (a, b) in facets.items():
                if cur not in (a, b):
                    continue
                other = b if cur == a else a
                kappa = self.kink(facet_key)
                n_far = kernel_covector(facet_key, n)
                far_pt = fan.maximal_cones[other].interior_point()
                if vec_dot(n_far, far_pt) < 0:
                    n_far = vec_neg(n_far)
                # representative on the far cone: rep + kappa * <n_far, .>
                rep = tuple(
                    cc_add(self.representatives_raw(reps, cur)[i], cc_scale(n_far[i], kappa))
                    for i in range(n)
                )
                if other in reps:
                    if reps[other] != rep:
                        raise LatticeError(
                            "kink data inconsistent: path-dependent reconstruction"
                        )
                else:
                    reps[other] = rep
                    frontier.append(other)
        if len(reps) != len(fan.maximal_cones):
            raise LatticeError("fan cone-path graph is disconnected")
        return tuple(reps[i] for i in range(len(fan.maximal_cones)))

    @staticmethod
    def representatives_raw(reps, idx):
        return reps[idx]

    def value(self, cone_index: int, m: Vec) -> CurveClass:
        """Value at m of the linear representative on the given maximal cone."""
        rep = self.representatives()[cone_index]
        out = CC_ZERO
        for coord, klass in zip(m, rep):
            out = cc_add(out, cc_scale(coord, klass))
        return out

    def value_at_point(self, m: Vec) -> CurveClass:
        """Honest PL value at the lattice point m (evaluated in its own cone)."""
        return self.value(self.fan.cone_containing(m), m)


def pl_value(f: PLFunction, cone_index: int, m) -> CurveClass:
    return f.value(cone_index, tuple(m))
