"""Shared fixtures: the projective-space fans, blow-up data builders, and the
hand-entered finite equivalent structure for the two-lines example."""

from __future__ import annotations

import pytest

from heartscatter.curves import cc
from heartscatter.heart import BlowupData, Center, Component
from heartscatter.lattice import Cone, Fan
from heartscatter.scattering import WallStructure, make_wall
from heartscatter.series import Series

E1, E2, E3, E4 = (1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)
ME1, ME2, ME12 = (-1, 0, 0), (0, -1, 0), (-1, -1, 0)


def p3_fan() -> Fan:
    return Fan.build([E1, E2, E3, E4], [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def p2_fan() -> Fan:
    return Fan.build([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


def line_kinks(fan: Fan) -> dict:
    return {facet: cc(L=1) for facet in fan._facets()}


def make_center(fan: Fan, ray_index: int, label: str, degree: int = 1) -> Center:
    inter = {
        facet: degree
        for facet in fan._facets()
        if Cone(facet).contains(fan.rays[ray_index])
    }
    return Center(ray_index, (Component(label, tuple(sorted(inter.items()))),))


def two_lines_data(cutoff: int) -> BlowupData:
    fan = p3_fan()
    return BlowupData.build(
        fan,
        [make_center(fan, 0, "E1"), make_center(fan, 1, "E2")],
        line_kinks(fan),
        cutoff,
    )


def one_hypersurface_data(degree: int, cutoff: int) -> BlowupData:
    fan = p3_fan()
    return BlowupData.build(
        fan, [make_center(fan, 0, "E", degree)], line_kinks(fan), cutoff
    )


def degrees_data(d1: int, d2: int, cutoff: int) -> BlowupData:
    fan = p3_fan()
    return BlowupData.build(
        fan,
        [make_center(fan, 0, "E1", d1), make_center(fan, 1, "E2", d2)],
        line_kinks(fan),
        cutoff,
    )


def finite_two_lines_structure(cutoff: int, with_pl: bool = False) -> WallStructure:
    """The finite consistent equivalent of the two-lines completion, entered
    by hand from its reference wall table (toric-stage variables)."""
    bd = two_lines_data(cutoff)
    reg = bd.toric_registry()

    def func(*terms):
        s = Series.one(reg, cutoff, 3)
        for zexp, klass in terms:
            s = s + Series.term(reg, cutoff, 1, zexp, cc(klass))
        return s

    t1x = (E1, {"t1": 1})
    t2y = (E2, {"t2": 1})
    t12xy = ((1, 1, 0), {"t1": 1, "t2": 1})
    rows = [
        ([(E1, E2), (E1, E3), (E1, E4)], func(t1x)),
        ([(E1, E2), (E2, E3), (E2, E4)], func(t2y)),
        ([(E3, ME1), (E4, ME1)], func(t1x)),
        ([(E3, ME2), (E4, ME2)], func(t2y)),
        ([(ME2, ME12), (ME1, ME12), (E3, ME12), (E4, ME12)], func(t12xy)),
        ([(E1, ME2)], func(t2y, t12xy)),
        ([(E2, ME1)], func(t1x, t12xy)),
    ]
    walls = []
    for supports, f in rows:
        for gens in supports:
            walls.append(make_wall(Cone(gens), f))
    return WallStructure(bd.fan, bd.psi if with_pl else None, tuple(walls), cutoff)


def finite_two_lines_heart_rows(bd: BlowupData, cutoff: int):
    """Expected wall table of the two-lines structure in curve classes, keyed
    by (support generators, function terms)."""
    reg = bd.heart_registry()

    def func(*terms):
        s = Series.one(reg, cutoff, 3)
        for zexp, klass in terms:
            s = s + Series.term(reg, cutoff, 1, zexp, cc(klass))
        return s

    x_in = (E1, {"E1": -1})
    y_in = (E2, {"E2": -1})
    x_out = (E1, {"L": 1, "E1": -1})
    y_out = (E2, {"L": 1, "E2": -1})
    xy = ((1, 1, 0), {"L": 1, "E1": -1, "E2": -1})
    rows = [
        ([(E1, E2), (E1, E3), (E1, E4)], func(x_in)),
        ([(E1, E2), (E2, E3), (E2, E4)], func(y_in)),
        ([(E3, ME1), (E4, ME1)], func(x_out)),
        ([(E3, ME2), (E4, ME2)], func(y_out)),
        ([(ME2, ME12), (ME1, ME12), (E3, ME12), (E4, ME12)], func(xy)),
        ([(E1, ME2)], func(y_out, xy)),
        ([(E2, ME1)], func(x_out, xy)),
    ]
    table = []
    for supports, f in rows:
        for gens in supports:
            table.append((Cone(gens).generators, f))
    return table


@pytest.fixture(scope="session")
def fan_p3():
    return p3_fan()


@pytest.fixture(scope="session")
def fan_p2():
    return p2_fan()
