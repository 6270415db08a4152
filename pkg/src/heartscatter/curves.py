"""Exponent vectors over named curve-class generators.

A curve class is stored as a canonical sorted tuple of (name, exponent)
pairs with all exponents nonzero, so classes are hashable and usable as
dict keys alongside lattice exponents.
"""

from __future__ import annotations

CurveClass = tuple  # tuple[tuple[str, int], ...], sorted by name

CC_ZERO: CurveClass = ()


def cc(mapping=None, **named) -> CurveClass:
    """Build a class from a dict or keyword exponents: cc(L=1, E1=-1)."""
    merged: dict = dict(mapping or {})
    for name, exp in named.items():
        merged[name] = merged.get(name, 0) + exp
    return tuple(sorted((n, e) for n, e in merged.items() if e != 0))


def cc_dict(c: CurveClass) -> dict:
    return dict(c)


def cc_add(a: CurveClass, b: CurveClass) -> CurveClass:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for name, exp in b:
        new = merged.get(name, 0) + exp
        if new:
            merged[name] = new
        else:
            del merged[name]
    return tuple(sorted(merged.items()))


def cc_neg(a: CurveClass) -> CurveClass:
    return tuple((n, -e) for n, e in a)


def cc_sub(a: CurveClass, b: CurveClass) -> CurveClass:
    return cc_add(a, cc_neg(b))


def cc_scale(k: int, a: CurveClass) -> CurveClass:
    if k == 0:
        return CC_ZERO
    return tuple((n, k * e) for n, e in a)


def cc_get(a: CurveClass, name: str) -> int:
    for n, e in a:
        if n == name:
            return e
    return 0


def cc_text(a: CurveClass) -> str:
    """Human form: () -> '0', ((E1,-1),(L,1)) -> 'L-E1'."""
    if not a:
        return "0"
    parts = []
    for name, exp in sorted(a, key=lambda item: (item[1] < 0, item[0])):
        if exp == 1:
            parts.append((f"+{name}", f"{name}"))
        elif exp == -1:
            parts.append((f"-{name}", f"-{name}"))
        else:
            sign = "+" if exp > 0 else "-"
            parts.append((f"{sign}{abs(exp)}{name}", f"{exp}{name}"))
    # First part drops the leading '+'.
    out = parts[0][1]
    for tail, _ in parts[1:]:
        out += tail
    return out
