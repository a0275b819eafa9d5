"""Exact scalar fields: prime fields F_p and the rationals.

Field objects operate on *raw* values (plain ``int`` residues for F_p,
``fractions.Fraction`` for Q).  Raw values combine with the ordinary Python
operators; ``field.reduce`` brings a raw result back to canonical form.  The
polynomial and linear-algebra layers work on raw values for speed.

:class:`FieldValue` is the user-facing wrapper that carries its field along
and refuses to mix fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

# products of two residues must fit in a signed 64-bit integer
MAX_MODULUS = 2**31 - 1
MAX_ENUMERATE = 1 << 16


class FieldError(ValueError):
    """Invalid field construction or an operation across different fields."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    for d in range(3, math.isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    return True


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


class Field:
    """Common interface.  Subclasses: :class:`PrimeField`, :class:`RationalField`."""

    characteristic: int

    def reduce(self, x):
        raise NotImplementedError

    def coerce(self, value):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.reduce(a * self.inv(b))

    def is_zero(self, a) -> bool:
        return self.reduce(a) == 0

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def format(self, a) -> str:
        raise NotImplementedError

    def parse(self, s: str):
        return self.coerce(Fraction(s.strip()))

    def __call__(self, value) -> "FieldValue":
        return FieldValue(self, self.coerce(value))

    def elements(self) -> Iterator:
        raise NotImplementedError

    @property
    def order(self) -> float:
        raise NotImplementedError


class PrimeField(Field):
    __slots__ = ("p",)

    def __init__(self, p: int):
        p = int(p)
        if not is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        if p > MAX_MODULUS:
            raise FieldError(f"modulus {p} exceeds the supported maximum {MAX_MODULUS}")
        self.p = p

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def order(self) -> int:
        return self.p

    def reduce(self, x):
        return x % self.p

    def coerce(self, value):
        if isinstance(value, FieldValue):
            if value.field != self:
                raise FieldError(f"cannot coerce {value.field!r} value into {self!r}")
            return value.raw
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Fraction):
            num = value.numerator % self.p
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator of {value} vanishes mod {self.p}")
            return num * self.inv(den) % self.p
        # numpy integers and the like
        return int(value) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = xgcd(a, self.p)
        return s % self.p

    def format(self, a) -> str:
        return str(a % self.p)

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __str__(self):
        return f"F_{self.p}"


class RationalField(Field):
    characteristic = 0

    @property
    def order(self) -> float:
        return math.inf

    def reduce(self, x):
        if isinstance(x, Fraction):
            return x
        return Fraction(x)

    def coerce(self, value):
        if isinstance(value, FieldValue):
            if value.field != self:
                raise FieldError(f"cannot coerce {value.field!r} value into Q")
            return value.raw
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, float):
            raise FieldError("floating point values are not exact field elements")
        return Fraction(value)

    def parse(self, s: str):
        return Fraction(s.strip())

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return Fraction(a) / b

    def format(self, a) -> str:
        a = Fraction(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def elements(self) -> Iterator[Fraction]:
        """0, 1, -1, 2, -2, ... (an enumeration of the integers)."""
        yield Fraction(0)
        k = 1
        while True:
            yield Fraction(k)
            yield Fraction(-k)
            k += 1

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "RationalField()"

    def __str__(self):
        return "Q"


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_descriptor(desc: Union[str, int, None]) -> Field:
    """Parse ``"Q"`` / ``"F_7"`` / ``"7"`` / ``7`` into a field."""
    if desc is None:
        return QQ
    if isinstance(desc, int):
        return PrimeField(desc)
    s = str(desc).strip()
    if s.upper() in ("Q", "QQ"):
        return QQ
    if s.upper().startswith("F_"):
        s = s[2:]
    elif s.upper().startswith("F") or s.upper().startswith("GF"):
        s = s.lstrip("GFgf")
    try:
        return PrimeField(int(s))
    except ValueError:
        raise FieldError(f"unrecognised field descriptor {desc!r}") from None


@dataclass(frozen=True)
class FieldValue:
    """An immutable element of a specific exact field."""

    field: Field
    raw: object

    def __post_init__(self):
        object.__setattr__(self, "raw", self.field.coerce(self.raw))

    def _other(self, other) -> object:
        if isinstance(other, FieldValue):
            if other.field != self.field:
                raise FieldError(f"mixed-field operands: {self.field} and {other.field}")
            return other.raw
        if isinstance(other, (int, Fraction)):
            return self.field.coerce(other)
        return NotImplemented

    def _wrap(self, raw) -> "FieldValue":
        return FieldValue(self.field, self.field.reduce(raw))

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.raw + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.raw - o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(o - self.raw)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.raw * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldValue(self.field, self.field.div(self.raw, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldValue(self.field, self.field.div(o, self.raw))

    def __neg__(self):
        return self._wrap(-self.raw)

    def __pow__(self, e: int):
        if e < 0:
            return FieldValue(self.field, self.field.inv(self.raw)) ** (-e)
        if isinstance(self.field, PrimeField):
            return FieldValue(self.field, pow(self.raw, e, self.field.p))
        return FieldValue(self.field, self.raw**e)

    def inverse(self) -> "FieldValue":
        return FieldValue(self.field, self.field.inv(self.raw))

    def is_zero(self) -> bool:
        return self.raw == 0

    def __eq__(self, other):
        if isinstance(other, FieldValue):
            return self.field == other.field and self.raw == other.raw
        if isinstance(other, (int, Fraction)):
            try:
                return self.raw == self.field.coerce(other)
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.raw))

    def __str__(self):
        return self.field.format(self.raw)

    def __repr__(self):
        return f"{self.field.format(self.raw)} in {self.field}"


def field_arith(a: FieldValue, b: FieldValue, op: str) -> FieldValue:
    """Apply one of ``add``, ``sub``, ``mul``, ``div`` to two values of one field."""
    if not isinstance(a, FieldValue) or not isinstance(b, FieldValue):
        raise TypeError("field_arith expects FieldValue operands")
    if a.field != b.field:
        raise FieldError(f"mixed-field operands: {a.field} and {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def field_enumerate(p: int, max_order: int = MAX_ENUMERATE) -> list[FieldValue]:
    """All elements 0, 1, ..., p-1 of F_p."""
    F = PrimeField(p)
    if p > max_order:
        raise FieldError(f"refusing to enumerate F_{p}: exceeds configured maximum {max_order}")
    return [FieldValue(F, i) for i in range(p)]
