"""Exact sparse arithmetic in the truncated monoid ring.

Terms are monomials z^m t^beta with exact rational coefficients, where m is
an integer lattice exponent (Laurent) and beta an exponent vector over named
curve-class generators.  A registry assigns each generator a grading weight
(1 for toric-stage variables and toric curve classes, 0 for exceptional
classes, which are the invertible ones); a series stores no term whose
grading order exceeds its cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .curves import CC_ZERO, CurveClass, cc_add, cc_neg, cc_scale, cc_text
from .lattice import Vec, is_zero, vec_add, vec_neg, vec_scale


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class Registry:
    """Grading weights and invertibility of curve-class generators."""

    weights: tuple  # tuple[(name, weight), ...] sorted
    invertible: frozenset = frozenset()

    @staticmethod
    def build(weights: dict, invertible=()) -> "Registry":
        return Registry(tuple(sorted(weights.items())), frozenset(invertible))

    @staticmethod
    def toric_stage(t_names) -> "Registry":
        return Registry.build({name: 1 for name in t_names})

    def weight(self, name: str) -> int:
        for n, w in self.weights:
            if n == name:
                return w
        raise SeriesError(f"unknown class generator {name!r}")

    def order(self, klass: CurveClass) -> int:
        return sum(self.weight(n) * e for n, e in klass)

    def admissible(self, klass: CurveClass) -> bool:
        """True iff every positive-weight exponent is >= 0."""
        return all(e >= 0 for n, e in klass if self.weight(n) > 0)


Key = tuple  # (zexp: Vec, klass: CurveClass)


class Series:
    """Finite sum of exact-rational-coefficient monomials, truncated at a
    global grading order."""

    __slots__ = ("registry", "cutoff", "terms")

    def __init__(self, registry: Registry, cutoff: int, terms=None):
        self.registry = registry
        self.cutoff = cutoff
        self.terms: dict = {}
        if terms:
            for (zexp, klass), coeff in terms.items():
                self._accumulate(zexp, klass, coeff)

    # -- construction -------------------------------------------------------

    @staticmethod
    def zero(registry, cutoff) -> "Series":
        return Series(registry, cutoff)

    @staticmethod
    def one(registry, cutoff, rank) -> "Series":
        return Series.term(registry, cutoff, 1, (0,) * rank, CC_ZERO)

    @staticmethod
    def term(registry, cutoff, coeff, zexp, klass=CC_ZERO) -> "Series":
        s = Series(registry, cutoff)
        s._accumulate(tuple(zexp), klass, Fraction(coeff))
        return s

    def _accumulate(self, zexp, klass, coeff):
        order = self.registry.order(klass)
        if order < 0:
            raise SeriesError(f"negative-order monomial t^[{cc_text(klass)}]")
        if order > self.cutoff or coeff == 0:
            return
        key = (zexp, klass)
        new = self.terms.get(key, 0) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def copy(self) -> "Series":
        s = Series(self.registry, self.cutoff)
        s.terms = dict(self.terms)
        return s

    # -- predicates ---------------------------------------------------------

    @property
    def rank(self) -> int:
        for (zexp, _), _c in self.terms.items():
            return len(zexp)
        raise SeriesError("rank of the zero series is undefined")

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        if len(self.terms) != 1:
            return False
        ((zexp, klass), coeff), = self.terms.items()
        return is_zero(zexp) and klass == CC_ZERO and coeff == 1

    def constant_coefficient(self) -> Fraction:
        for (zexp, klass), coeff in self.terms.items():
            if is_zero(zexp) and klass == CC_ZERO:
                return coeff
        return Fraction(0)

    def min_order(self) -> int:
        if not self.terms:
            return self.cutoff + 1
        return min(self.registry.order(k) for (_, k) in self.terms)

    def order_part(self, order: int) -> "Series":
        s = Series(self.registry, self.cutoff)
        for (zexp, klass), coeff in self.terms.items():
            if self.registry.order(klass) == order:
                s.terms[(zexp, klass)] = coeff
        return s

    def truncate(self, cutoff: int) -> "Series":
        s = Series(self.registry, cutoff)
        for (zexp, klass), coeff in self.terms.items():
            s._accumulate(zexp, klass, coeff)
        return s

    def __eq__(self, other):
        return (
            isinstance(other, Series)
            and self.registry == other.registry
            and self.cutoff == other.cutoff
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.registry, self.cutoff, frozenset(self.terms.items())))

    # -- ring operations ----------------------------------------------------

    def _check_compat(self, other: "Series"):
        if self.registry != other.registry:
            raise SeriesError("mismatched class registries")
        if self.cutoff != other.cutoff:
            raise SeriesError("mismatched cutoffs")

    def __add__(self, other: "Series") -> "Series":
        self._check_compat(other)
        s = self.copy()
        for (zexp, klass), coeff in other.terms.items():
            s._accumulate(zexp, klass, coeff)
        return s

    def __neg__(self) -> "Series":
        s = Series(self.registry, self.cutoff)
        s.terms = {k: -c for k, c in self.terms.items()}
        return s

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other: "Series") -> "Series":
        self._check_compat(other)
        reg = self.registry
        out = Series(reg, self.cutoff)
        # Orders are nonnegative, so pre-bucketing by order prunes products.
        other_by_order: dict = {}
        for (zexp, klass), coeff in other.terms.items():
            other_by_order.setdefault(reg.order(klass), []).append((zexp, klass, coeff))
        for (z1, k1), c1 in self.terms.items():
            o1 = reg.order(k1)
            for o2, bucket in other_by_order.items():
                if o1 + o2 > self.cutoff:
                    continue
                for z2, k2, c2 in bucket:
                    out._accumulate(vec_add(z1, z2), cc_add(k1, k2), c1 * c2)
        return out

    def scale(self, coeff) -> "Series":
        coeff = Fraction(coeff)
        s = Series(self.registry, self.cutoff)
        if coeff:
            s.terms = {k: c * coeff for k, c in self.terms.items()}
        return s

    def mul_term(self, coeff, zexp, klass=CC_ZERO) -> "Series":
        out = Series(self.registry, self.cutoff)
        for (z, k), c in self.terms.items():
            out._accumulate(vec_add(z, tuple(zexp)), cc_add(k, klass), c * Fraction(coeff))
        return out

    def _unit_split(self):
        """Split f = c * t^beta z^m * (1 + g) with g of order >= 1.

        The order-zero part must be a single term; otherwise f is not a unit
        of the truncated ring.
        """
        order0 = [(key, c) for key, c in self.terms.items() if self.registry.order(key[1]) == 0]
        if len(order0) != 1:
            raise SeriesError("not a unit")
        (zexp, klass), coeff = order0[0]
        g = self.mul_term(1 / coeff, vec_neg(zexp), cc_neg(klass))
        g._accumulate((0,) * len(zexp), CC_ZERO, Fraction(-1))
        return coeff, zexp, klass, g

    def inverse(self) -> "Series":
        coeff, zexp, klass, g = self._unit_split()
        rank = len(zexp)
        # geometric series on the nilpotent part
        out = Series.one(self.registry, self.cutoff, rank)
        power = Series.one(self.registry, self.cutoff, rank)
        k = 1
        while True:
            power = power * g
            if power.is_zero():
                break
            out = out + power.scale((-1) ** k)
            k += 1
        return out.mul_term(1 / coeff, vec_neg(zexp), cc_neg(klass))

    def __pow__(self, k: int) -> "Series":
        if k < 0:
            return self.inverse() ** (-k)
        rank = None
        for (zexp, _kl) in self.terms:
            rank = len(zexp)
            break
        if rank is None:
            if k == 0:
                raise SeriesError("0^0 in a ring of unknown rank")
            return self.copy()
        out = Series.one(self.registry, self.cutoff, rank)
        base = self.copy()
        e = k
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    # -- transcendental on nilpotent/unit parts ------------------------------

    def log_unit(self) -> "Series":
        """log f for f with constant term exactly 1."""
        if self.constant_coefficient() != 1:
            raise SeriesError("log requires constant term 1")
        one = Series.one(self.registry, self.cutoff, self.rank)
        g = self - one
        if not g.is_zero() and g.min_order() < 1:
            raise SeriesError("log requires the non-constant part to have order >= 1")
        out = Series.zero(self.registry, self.cutoff)
        power = one
        k = 1
        while True:
            power = power * g
            if power.is_zero():
                break
            out = out + power.scale(Fraction((-1) ** (k + 1), k))
            k += 1
        return out

    def exp_nilpotent(self) -> "Series":
        """exp g for g with all terms of order >= 1."""
        if self.is_zero():
            raise SeriesError("exp of the zero series needs an ambient rank; use exp_nilpotent_ranked")
        return exp_nilpotent_ranked(self, self.rank)

    # -- substitution homomorphisms -----------------------------------------

    def substitute(self, rule: dict, new_registry: Registry) -> "Series":
        """Homomorphic image under t_var z^{m} -> coeff * t^{klass} z^{zexp}.

        `rule` maps a toric-stage variable name to (m, zexp, klass) where m is
        the source direction paired with the variable.  Every term must factor
        through the rule's sources: its z-exponent must equal the weighted sum
        of the source directions given by its t-exponents.
        """
        out = Series(new_registry, self.cutoff)
        for (zexp, klass), coeff in self.terms.items():
            expect = (0,) * len(zexp)
            img_z = (0,) * len(zexp)
            img_k = CC_ZERO
            for name, exp in klass:
                if name not in rule:
                    raise SeriesError(f"no substitution rule for {name!r}")
                if exp < 0:
                    raise SeriesError(f"non-factorable term: negative {name!r} exponent")
                m_i, tz, tk = rule[name]
                expect = vec_add(expect, vec_scale(exp, m_i))
                img_z = vec_add(img_z, vec_scale(exp, tz))
                img_k = cc_add(img_k, cc_scale(exp, tk))
            if expect != zexp:
                raise SeriesError(
                    f"non-factorable term: z^{zexp} does not match t-exponents {cc_text(klass)}"
                )
            out._accumulate(img_z, img_k, coeff)
        return out

    # -- output -------------------------------------------------------------

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda item: (self.registry.order(item[0][1]), item[0][0], item[0][1]),
        )

    def canonical_text(self) -> str:
        """Canonical form 'c·t^[beta]·z^(m)', sorted by (order, monomial)."""
        if not self.terms:
            return "0"
        parts = []
        for (zexp, klass), coeff in self.sorted_terms():
            parts.append(f"{coeff}·t^[{cc_text(klass)}]·z^{_ztext(zexp)}")
        return " + ".join(parts)

    def pretty(self, varnames=None) -> str:
        """Human form with x,y,z names for low rank: '1 + t^[-E1]·x'."""
        if not self.terms:
            return "0"
        parts = []
        for (zexp, klass), coeff in self.sorted_terms():
            factors = []
            if klass != CC_ZERO:
                factors.append(f"t^[{cc_text(klass)}]")
            mono = _monomial_text(zexp, varnames)
            if mono:
                factors.append(mono)
            if not factors:
                body = str(abs(coeff))
            else:
                body = "·".join(factors)
                if abs(coeff) != 1:
                    body = f"{abs(coeff)}·{body}"
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Series({self.pretty()!r}, N={self.cutoff})"


def exp_nilpotent_ranked(g: Series, rank: int) -> Series:
    if not g.is_zero() and g.min_order() < 1:
        raise SeriesError("exp requires all terms of order >= 1")
    out = Series.one(g.registry, g.cutoff, rank)
    power = Series.one(g.registry, g.cutoff, rank)
    k = 1
    while True:
        power = power * g
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, factorial(k)))
        k += 1
    return out


def _ztext(zexp) -> str:
    return "(" + ",".join(str(x) for x in zexp) + ")"


_DEFAULT_VARS = ("x", "y", "z", "w")


def _monomial_text(zexp, varnames=None) -> str:
    names = varnames or _DEFAULT_VARS
    if len(zexp) > len(names):
        return f"z^{_ztext(zexp)}"
    factors = []
    for name, e in zip(names, zexp):
        if e == 0:
            continue
        if e == 1:
            factors.append(name)
        else:
            factors.append(f"{name}^{e}")
    return "·".join(factors)


def mul(f: Series, g: Series) -> Series:
    return f * g


def power(f: Series, k: int) -> Series:
    return f ** k


def log_unit(f: Series) -> Series:
    return f.log_unit()


def exp_nilpotent(g: Series, rank=None) -> Series:
    if rank is not None:
        return exp_nilpotent_ranked(g, rank)
    return g.exp_nilpotent()


def substitute(f: Series, rule: dict, new_registry: Registry) -> Series:
    return f.substitute(rule, new_registry)
