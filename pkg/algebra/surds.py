#!/usr/bin/env python3
"""
Exact arithmetic in Q(√2, √3)
Elements are a + b√2 + c√3 + d√6 with rational coefficients
"""

from __future__ import annotations

import math
from fractions import Fraction


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QuadraticSurd:
    """Element a + b√2 + c√3 + d√6 of the biquadratic field Q(√2, √3)"""

    __slots__ = ('_coef',)

    def __init__(self, a=0, b=0, c=0, d=0) -> None:
        self._coef = (_as_fraction(a), _as_fraction(b), _as_fraction(c), _as_fraction(d))

    @property
    def coef(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self._coef

    @classmethod
    def from_rational(cls, x) -> QuadraticSurd:
        return cls(x, 0, 0, 0)

    @classmethod
    def sqrt2(cls) -> QuadraticSurd:
        return cls(0, 1, 0, 0)

    @classmethod
    def sqrt3(cls) -> QuadraticSurd:
        return cls(0, 0, 1, 0)

    @classmethod
    def sqrt6(cls) -> QuadraticSurd:
        return cls(0, 0, 0, 1)

    def __repr__(self) -> str:
        return f"QuadraticSurd{tuple(str(x) for x in self._coef)}"

    def __str__(self) -> str:
        parts = []
        for value, radical in zip(self._coef, ('', '√2', '√3', '√6')):
            if value:
                parts.append(f"{value}{radical}" if radical else f"{value}")
        return ' + '.join(parts) if parts else '0'

    def _coerce(self, other) -> QuadraticSurd | None:
        if isinstance(other, QuadraticSurd):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd.from_rational(other)
        return None

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        return other is not None and self._coef == other.coef

    def __hash__(self) -> int:
        return hash(self._coef)

    def __bool__(self) -> bool:
        return any(self._coef)

    def is_rational(self) -> bool:
        return not any(self._coef[1:])

    def __neg__(self) -> QuadraticSurd:
        return QuadraticSurd(*(-x for x in self._coef))

    def __add__(self, other) -> QuadraticSurd:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QuadraticSurd(*(x + y for x, y in zip(self._coef, other.coef)))

    __radd__ = __add__

    def __sub__(self, other) -> QuadraticSurd:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> QuadraticSurd:
        return (-self) + other

    def __mul__(self, other) -> QuadraticSurd:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a1, b1, c1, d1 = self._coef
        a2, b2, c2, d2 = other.coef
        # √2√3 = √6, √2√6 = 2√3, √3√6 = 3√2, √6√6 = 6
        return QuadraticSurd(
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * d1 * d2,
            a1 * b2 + b1 * a2 + 3 * c1 * d2 + 3 * d1 * c2,
            a1 * c2 + c1 * a2 + 2 * b1 * d2 + 2 * d1 * b2,
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def __float__(self) -> float:
        a, b, c, d = self._coef
        return float(a) + float(b) * math.sqrt(2) + float(c) * math.sqrt(3) + float(d) * math.sqrt(6)

    def to_json(self) -> list[str]:
        return [str(x) for x in self._coef]


ZERO = QuadraticSurd()
ONE = QuadraticSurd(1)
# √(3/2) = √6/2 and 1/√2 = √2/2
SQRT_THREE_HALVES = QuadraticSurd(0, 0, 0, Fraction(1, 2))
INV_SQRT2 = QuadraticSurd(0, Fraction(1, 2), 0, 0)
