"""Lattice geometry: primitives, cone membership, normals, projections, and
piecewise-linear values pinned by the worked projective-space examples."""

import random
from fractions import Fraction

import pytest

from heartscatter.curves import cc
from heartscatter.lattice import (
    Cone,
    Fan,
    LatticeError,
    PLFunction,
    cone_contains,
    kernel_covector,
    normal_covector,
    primitive,
    project_along,
    unimodular_completion,
    apply_matrix,
    vec_add,
    vec_dot,
)
from conftest import E1, E2, E3, E4, line_kinks, p2_fan, p3_fan


def test_primitive_examples():
    assert primitive((2, 4, 6)) == (1, 2, 3)
    assert primitive((1, 0, 0)) == (1, 0, 0)
    assert primitive((-2, -2, 0)) == (-1, -1, 0)
    with pytest.raises(LatticeError):
        primitive((0, 0, 0))


def test_cone_contains_examples():
    c = Cone((E1, E3, E4))
    assert cone_contains(c, (0, -1, 0))  # e1+e3+e4 = -e2
    assert not cone_contains(Cone((E1, E2)), (0, 0, 1))
    assert cone_contains(Cone((E1,)), (1, 0, 0))


def test_cone_contains_generators():
    for gens in [(E1, E2), (E2, E4), (E1, E3, E4), ((2, 1, 0), (0, 0, 1))]:
        c = Cone(gens)
        for g in c.generators:
            assert c.contains(g)


def _kernel_oracle(span, n):
    """Independent exact row-reduction kernel for rank n-1 spans."""
    rows = [[Fraction(x) for x in v] for v in span]
    pivots = {}
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots[c] = r
        r += 1
    free = next(c for c in range(n) if c not in pivots)
    sol = [Fraction(0)] * n
    sol[free] = Fraction(1)
    for c, r_i in pivots.items():
        sol[c] = -rows[r_i][free]
    den = 1
    for x in sol:
        den = den * x.denominator
    out = primitive(tuple(int(x * den) for x in sol))
    lead = next(x for x in out if x != 0)
    return out if lead > 0 else tuple(-x for x in out)


def test_normal_covector_examples():
    n = normal_covector([E1, E2])
    assert n in ((0, 0, 1), (0, 0, -1))
    n = normal_covector([(1, 0, 0), (0, -1, 0)])
    assert n in ((0, 0, 1), (0, 0, -1))
    span = [(1, 0, 0), (-1, -1, 0)]
    got = normal_covector(span)
    oracle = _kernel_oracle(span, 3)
    assert got in (oracle, tuple(-x for x in oracle))
    for v in span:
        assert vec_dot(got, v) == 0
    assert primitive(got) == got


def test_normal_covector_random_spans():
    rng = random.Random(7)
    for _ in range(50):
        while True:
            a = tuple(rng.randint(-4, 4) for _ in range(3))
            b = tuple(rng.randint(-4, 4) for _ in range(3))
            try:
                Cone((a, b))
                break
            except LatticeError:
                continue
        n = normal_covector([a, b])
        assert vec_dot(n, a) == 0 and vec_dot(n, b) == 0
        assert primitive(n) == n
        assert n == _kernel_oracle([a, b], 3)


def test_normal_covector_rank_error():
    with pytest.raises(LatticeError):
        normal_covector([E1])


def test_unimodular_completion():
    for ray in [(1, 0, 0), (0, 1, 0), (-1, -1, -1), (2, 3, 5), (0, -1, 0)]:
        r = primitive(ray)
        U = unimodular_completion(r)
        assert apply_matrix(U, r) == (1, 0, 0)


def test_project_along_examples():
    imgs = project_along((1, 0, 0), [E2, E3])
    assert imgs[0] != (0, 0) and imgs[1] != (0, 0)
    # independent generators of the quotient plane
    assert imgs[0][0] * imgs[1][1] - imgs[0][1] * imgs[1][0] != 0
    assert project_along((1, 0, 0), [E1]) == [(0, 0)]
    # quotient-basis oracle: (-1,-1,0) = (0,-1,0) modulo the ray
    got = project_along((1, 0, 0), [(-1, -1, 0)])[0]
    ref = project_along((1, 0, 0), [(0, -1, 0)])[0]
    assert got == ref == (-1, 0)


def test_project_along_homomorphism():
    rng = random.Random(11)
    for _ in range(40):
        ray = primitive(tuple(rng.choice([-2, -1, 1, 2]) for _ in range(3)))
        a = tuple(rng.randint(-5, 5) for _ in range(3))
        b = tuple(rng.randint(-5, 5) for _ in range(3))
        pa, pb, pab = project_along(ray, [a, b, vec_add(a, b)])
        assert vec_add(pa, pb) == pab


def test_fan_facets_and_completeness():
    fan = p3_fan()
    assert len(fan._facets()) == 6
    fan.check_complete()
    fan2 = p2_fan()
    assert len(fan2._facets()) == 3
    fan2.check_complete()


def test_fan_incomplete_rejected():
    with pytest.raises(LatticeError):
        Fan.build([E1, E2, E3], [(0, 1, 2)])


def _p3_pl(base=0):
    fan = p3_fan()
    return fan, PLFunction.build(fan, base, line_kinks(fan))


def test_pl_value_p3_example():
    fan, pl = _p3_pl()
    # base <e1,e2,e3>: representative on <e1,e2,e4> is -z*[L]
    idx = fan.maximal_cones.index(Cone((E1, E2, E4)))
    assert pl.value(idx, (-1, -1, -1)) == cc(L=1)
    assert pl.value(idx, (0, 0, 1)) == cc(L=-1)
    base_idx = fan.maximal_cones.index(Cone((E1, E2, E3)))
    for m in [E1, E2, E3, (2, -3, 5)]:
        assert pl.value(base_idx, m) == ()


def test_pl_value_p2_example():
    fan = p2_fan()
    pl = PLFunction.build(fan, fan.maximal_cones.index(Cone(((1, 0), (0, 1)))), line_kinks(fan))
    idx = fan.maximal_cones.index(Cone(((0, 1), (-1, -1))))
    assert pl.value(idx, (-1, -1)) == cc(L=1)


def test_pl_value_honest_points():
    fan, pl = _p3_pl()
    assert pl.value_at_point((-1, -1, -1)) == cc(L=1)
    assert pl.value_at_point((-1, 0, 0)) == cc(L=1)
    assert pl.value_at_point((1, 0, 0)) == ()


def test_pl_kink_relation():
    """Across every facet, the two representatives differ by kink * normal."""
    for fan in (p3_fan(), p2_fan()):
        pl = PLFunction.build(fan, 0, line_kinks(fan))
        n = fan.rank
        for facet_key, (a, b) in fan._facets().items():
            n_far = kernel_covector(facet_key, n)
            far_pt = fan.maximal_cones[b].interior_point()
            if vec_dot(n_far, far_pt) < 0:
                n_far = tuple(-x for x in n_far)
            kappa = pl.kink(facet_key)
            rep_a = pl.representatives()[a]
            rep_b = pl.representatives()[b]
            for i in range(n):
                from heartscatter.curves import cc_add, cc_scale, cc_neg

                assert cc_add(rep_b[i], cc_neg(rep_a[i])) == cc_scale(n_far[i], kappa)


def test_pl_path_independence_is_validated():
    """Wrong kink data must be rejected by reconstruction."""
    fan = p3_fan()
    kinks = line_kinks(fan)
    bad_key = next(iter(kinks))
    kinks[bad_key] = cc(L=2)
    with pytest.raises(LatticeError):
        PLFunction.build(fan, 0, kinks)


def test_cone_rejects_degenerate():
    with pytest.raises(LatticeError):
        Cone(((1, 0, 0), (2, 0, 0)))
    with pytest.raises(LatticeError):
        Cone(((1, 0, 0), (0, 1, 0), (1, 1, 0)))
