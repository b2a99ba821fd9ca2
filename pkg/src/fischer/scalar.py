"""Exact scalars over the rationals and prime fields F_p (p odd).

A :class:`FieldSpec` names the field; :class:`Scalar` is an immutable element
of it. Prime-field values are residues in ``[0, p)``; rational values are
:class:`fractions.Fraction` instances, so nothing is ever rounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class FieldMismatchError(ValueError):
    """Raised when two scalars from different fields are combined."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A field of characteristic ``p`` (odd prime) or the rationals (``p == 0``)."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not (is_prime(self.p) and self.p != 2):
            raise ValueError(f"field characteristic must be 0 or an odd prime, got {self.p}")

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``"0"``/``"Q"`` as the rationals, otherwise an odd prime."""
        text = str(text).strip()
        if text.upper() in ("0", "Q", "QQ"):
            return cls(0)
        if text.upper().startswith("F_"):
            text = text[2:]
        return cls(int(text))

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def label(self) -> str:
        return "Q" if self.p == 0 else f"F_{self.p}"

    def __str__(self):
        return str(self.p)

    # raw values: int residues for F_p, Fraction for Q

    def normalize(self, value):
        if self.p:
            if isinstance(value, Fraction):
                if value.denominator % self.p == 0:
                    raise ZeroDivisionError(f"{value} has no image in {self.label}")
                return value.numerator * pow(value.denominator, -1, self.p) % self.p
            return int(value) % self.p
        return Fraction(value)

    def __call__(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatchError(f"{value!r} is not in {self.label}")
            return value
        if isinstance(value, str):
            return self.parse_element(value)
        return Scalar(self, value)

    def parse_element(self, text: str) -> "Scalar":
        """Parse ``"a"`` or ``"a/b"``; ``b`` must be invertible in the field."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Scalar(self, int(num)) / Scalar(self, int(den))
        return Scalar(self, int(text))

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, 0)

    @property
    def one(self) -> "Scalar":
        return Scalar(self, 1)

    def delta_default(self) -> "Scalar":
        return delta_default(self)


Coercible = Union["Scalar", int, Fraction]


class Scalar:
    """An immutable exact field element."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", field.normalize(value))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _coerce(self, other: Coercible) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"cannot combine {self.field.label} and {other.field.label}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.value - other.value)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.value * other.value)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.field, -self.value)

    def inv(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError(f"0 has no inverse in {self.field.label}")
        if self.field.p:
            return Scalar(self.field, pow(self.value, -1, self.field.p))
        return Scalar(self.field, 1 / self.value)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        if self.field.p:
            return Scalar(self.field, pow(self.value, k, self.field.p))
        return Scalar(self.field, self.value ** k)

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.normalize(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"Scalar({self.field.label}, {self.value})"


def delta_default(field: FieldSpec) -> Scalar:
    """The Matsuo parameter 1/4, i.e. the inverse of 1+1+1+1 in ``field``."""
    one = field.one
    return (one + one + one + one).inv()
