"""Cox coordinates of the universal torsor, their Picard grading and the
log-anticanonical height.

The Cox ring is Z[a,b,c,x,y,z]/(a^2 + bc - yz), graded by Pic(X) = Z^2 in
the basis (H, E) where H is the pullback of a plane and E the exceptional
divisor.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

GENERATORS = ("a", "b", "c", "x", "y", "z")

# Python ints are exact; these limits make the same range guarantees as a
# fixed-width implementation would.  Heights above MONOMIAL_LIMIT are refused.
COORD_LIMIT = 2**40
MONOMIAL_LIMIT = 2**127 - 1


class ExactArithmeticError(OverflowError):
    """A coordinate or monomial left the supported exact-arithmetic range."""


class DivisorTag(str, enum.Enum):
    """Boundary divisor: D1 is the preimage of V(b), D2 the preimage of V(a)."""

    D1 = "D1"
    D2 = "D2"

    @classmethod
    def parse(cls, value: "str | DivisorTag") -> "DivisorTag":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown divisor {value!r}, expected D1 or D2") from None


@dataclass(frozen=True, order=True)
class PicDegree:
    d1: int
    d2: int

    def __add__(self, other: "PicDegree") -> "PicDegree":
        return PicDegree(self.d1 + other.d1, self.d2 + other.d2)

    def scale(self, k: int) -> "PicDegree":
        return PicDegree(k * self.d1, k * self.d2)

    def as_tuple(self) -> tuple[int, int]:
        return (self.d1, self.d2)


GRADING: dict[str, PicDegree] = {
    "a": PicDegree(1, 0),
    "b": PicDegree(1, 0),
    "c": PicDegree(1, 0),
    "x": PicDegree(1, -1),
    "y": PicDegree(2, -1),
    "z": PicDegree(0, 1),
}

# Class of the log-anticanonical bundle omega(D)^v = 3H - E.
LOG_ANTICANONICAL = PicDegree(3, -1)


@dataclass(frozen=True)
class Monomial:
    """Exponent vector over the generators (a, b, c, x, y, z)."""

    exponents: tuple[int, int, int, int, int, int] = (0, 0, 0, 0, 0, 0)

    def __post_init__(self) -> None:
        if len(self.exponents) != 6:
            raise ValueError("a monomial needs six exponents")
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be non-negative")

    @classmethod
    def from_powers(cls, **powers: int) -> "Monomial":
        unknown = set(powers) - set(GENERATORS)
        if unknown:
            raise ValueError(f"unknown generators {sorted(unknown)}")
        return cls(tuple(powers.get(g, 0) for g in GENERATORS))  # type: ignore[arg-type]

    def evaluate(self, point: "CoxPoint") -> int:
        value = 1
        for coord, e in zip(point.coords(), self.exponents):
            value *= coord**e
        return value


def cox_degree(m: Monomial, grading: Mapping[str, PicDegree] = GRADING) -> PicDegree:
    """Pic(X)-degree of a monomial: exponent-weighted sum of generator degrees."""
    total = PicDegree(0, 0)
    for gen, e in zip(GENERATORS, m.exponents):
        total = total + grading[gen].scale(e)
    return total


# The seven sections of L_[3,-1] defining the height, and the four sections
# of L_[1,0] defining the metric on O(D_i).
HEIGHT_MONOMIALS: tuple[Monomial, ...] = (
    Monomial.from_powers(a=2, x=1),
    Monomial.from_powers(b=2, x=1),
    Monomial.from_powers(c=2, x=1),
    Monomial.from_powers(z=2, x=3),
    Monomial.from_powers(a=1, y=1),
    Monomial.from_powers(b=1, y=1),
    Monomial.from_powers(c=1, y=1),
)
PLANE_MONOMIALS: tuple[Monomial, ...] = (
    Monomial.from_powers(a=1),
    Monomial.from_powers(b=1),
    Monomial.from_powers(c=1),
    Monomial.from_powers(x=1, z=1),
)


def grading_violations(grading: Mapping[str, PicDegree] = GRADING) -> list[str]:
    """Names of height/plane monomials whose degree is off under ``grading``.

    Empty for the correct table.  Accepting a grading argument lets the
    verification harness feed in a corrupted table.
    """
    bad = []
    for m in HEIGHT_MONOMIALS:
        if cox_degree(m, grading) != LOG_ANTICANONICAL:
            bad.append(_monomial_name(m))
    for m in PLANE_MONOMIALS:
        if cox_degree(m, grading) != PicDegree(1, 0):
            bad.append(_monomial_name(m))
    return bad


def _monomial_name(m: Monomial) -> str:
    parts = []
    for g, e in zip(GENERATORS, m.exponents):
        if e == 1:
            parts.append(g)
        elif e > 1:
            parts.append(f"{g}^{e}")
    return "*".join(parts) or "1"


def gcd_all(values: Iterable[int]) -> int:
    """Non-negative gcd; gcd() of an all-zero tuple is 0."""
    return math.gcd(*values)


@dataclass(frozen=True)
class CoxPoint:
    a: int
    b: int
    c: int
    x: int
    y: int
    z: int

    def __post_init__(self) -> None:
        for name in GENERATORS:
            v = getattr(self, name)
            if not isinstance(v, int):
                raise TypeError(f"coordinate {name} must be an int, got {type(v).__name__}")
            if abs(v) > COORD_LIMIT:
                raise ExactArithmeticError(f"|{name}| = {abs(v)} exceeds 2**40")

    def coords(self) -> tuple[int, int, int, int, int, int]:
        return (self.a, self.b, self.c, self.x, self.y, self.z)

    def equation(self) -> int:
        """Value of a^2 + bc - yz; zero on the torsor."""
        return self.a * self.a + self.b * self.c - self.y * self.z

    def negate_a(self) -> "CoxPoint":
        return CoxPoint(-self.a, self.b, self.c, self.x, self.y, self.z)

    def negate_yz(self) -> "CoxPoint":
        return CoxPoint(self.a, self.b, self.c, self.x, -self.y, -self.z)


def is_torsor_point(p: CoxPoint) -> bool:
    return (
        p.equation() == 0
        and gcd_all((p.a, p.b, p.c, p.z)) == 1
        and gcd_all((p.x, p.y)) == 1
    )


def satisfies_divisor_restriction(p: CoxPoint, d: DivisorTag) -> bool:
    """Membership in the torsor over U_1 (b = +-1) or U_2 (a = +-1)."""
    d = DivisorTag.parse(d)
    unit = p.b if d is DivisorTag.D1 else p.a
    return abs(unit) == 1 and p.equation() == 0 and math.gcd(p.x, p.y) == 1


def in_open_subvariety(p: CoxPoint, d: DivisorTag) -> bool:
    """Complement of V(abxz) for D1, of V(abcxz) for D2."""
    d = DivisorTag.parse(d)
    if d is DivisorTag.D1:
        return p.a != 0 and p.x != 0 and p.z != 0
    return p.b != 0 and p.c != 0 and p.x != 0 and p.z != 0


def height(p: CoxPoint) -> int:
    """max(|a^2 x|, |b^2 x|, |c^2 x|, |z^2 x^3|, |a y|, |b y|, |c y|)."""
    a, b, c, x, y, z = p.coords()
    ax = abs(x)
    values = (
        a * a * ax,
        b * b * ax,
        c * c * ax,
        z * z * ax * ax * ax,
        abs(a * y),
        abs(b * y),
        abs(c * y),
    )
    h = max(values)
    if h > MONOMIAL_LIMIT:
        raise ExactArithmeticError("height monomial exceeds signed 128-bit range")
    return h
