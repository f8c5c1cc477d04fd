#!/usr/bin/env python3
"""
Octonion Arithmetic for jordan-spectral
Exact octonions over Q with a fixed multiplication table

Basis θ0 = 1, θ1..θ7 in binary Cayley-Dickson order, so that
θi θj = OCTONION_SIGNS[i][j] · θ(i xor j). The table is shipped as data;
cayley_dickson_product() rebuilds it from the doubling formula
(a, b)(c, d) = (ac - d̄b, da + bc̄) and serves as an independent oracle.
"""

from __future__ import annotations

import os
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from errors import IncompatibleOperandsError

OCTONION_DIM = 8

OCTONION_SIGNS = (
    (1, 1, 1, 1, 1, 1, 1, 1),
    (1, -1, 1, -1, 1, -1, -1, 1),
    (1, -1, -1, 1, 1, 1, -1, -1),
    (1, 1, -1, -1, 1, -1, 1, -1),
    (1, -1, -1, -1, -1, 1, 1, 1),
    (1, 1, -1, 1, -1, -1, -1, 1),
    (1, 1, 1, -1, -1, 1, -1, -1),
    (1, -1, 1, 1, -1, -1, 1, -1),
)


def basis_product(i: int, j: int) -> tuple[int, int]:
    """
    Product of two basis octonions

    Args:
        i, j: Basis indices in 0..7

    Returns:
        tuple: (sign, k) with θi θj = sign · θk
    """
    return OCTONION_SIGNS[i][j], i ^ j


def octonion_tensor() -> np.ndarray:
    """Integer tensor T[i, j, k] with θi θj = Σk T[i, j, k] θk"""
    tensor = np.zeros((OCTONION_DIM,) * 3, dtype=np.int64)
    for i in range(OCTONION_DIM):
        for j in range(OCTONION_DIM):
            tensor[i, j, i ^ j] = OCTONION_SIGNS[i][j]
    return tensor


def conjugation_signs() -> np.ndarray:
    """Diagonal of octonion conjugation: +1 on θ0, -1 on θ1..θ7"""
    signs = -np.ones(OCTONION_DIM, dtype=np.int64)
    signs[0] = 1
    return signs


# ===== Doubling oracle =====

def _cd_conj(x: tuple) -> tuple:
    if len(x) == 1:
        return x
    half = len(x) // 2
    return _cd_conj(x[:half]) + tuple(-v for v in x[half:])


def _cd_add(x: tuple, y: tuple) -> tuple:
    return tuple(a + b for a, b in zip(x, y))


def _cd_sub(x: tuple, y: tuple) -> tuple:
    return tuple(a - b for a, b in zip(x, y))


def cayley_dickson_product(x: Sequence, y: Sequence) -> tuple:
    """
    Multiply two hypercomplex numbers of length 2^k by recursive doubling

    Args:
        x, y: Coefficient sequences of equal power-of-two length

    Returns:
        tuple: Coefficients of x·y
    """
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise IncompatibleOperandsError(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) == 1:
        return (x[0] * y[0],)
    half = len(x) // 2
    a, b = x[:half], x[half:]
    c, d = y[:half], y[half:]
    first = _cd_sub(cayley_dickson_product(a, c), cayley_dickson_product(_cd_conj(d), b))
    second = _cd_add(cayley_dickson_product(d, a), cayley_dickson_product(b, _cd_conj(c)))
    return first + second


def doubling_sign_table() -> tuple[tuple[int, ...], ...]:
    """Rebuild the sign table from cayley_dickson_product"""
    rows = []
    for i in range(OCTONION_DIM):
        row = []
        for j in range(OCTONION_DIM):
            ei = [0] * OCTONION_DIM
            ej = [0] * OCTONION_DIM
            ei[i] = 1
            ej[j] = 1
            product = cayley_dickson_product(ei, ej)
            row.append(product[i ^ j])
        rows.append(tuple(row))
    return tuple(rows)


class Octonion:
    """Exact octonion with rational coefficients"""

    __slots__ = ('_coef',)

    def __init__(self, coefficients: Sequence = (0,) * OCTONION_DIM) -> None:
        coefficients = tuple(Fraction(c) for c in coefficients)
        if len(coefficients) != OCTONION_DIM:
            raise IncompatibleOperandsError(
                f"octonion needs {OCTONION_DIM} coefficients, got {len(coefficients)}")
        self._coef = coefficients

    @classmethod
    def unit(cls, i: int, scale=1) -> Octonion:
        coefficients = [0] * OCTONION_DIM
        coefficients[i] = scale
        return cls(coefficients)

    @classmethod
    def real(cls, value) -> Octonion:
        return cls.unit(0, value)

    @property
    def coef(self) -> tuple[Fraction, ...]:
        return self._coef

    def __repr__(self) -> str:
        return f"Octonion({[str(c) for c in self._coef]})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Octonion) and self._coef == other.coef

    def __hash__(self) -> int:
        return hash(self._coef)

    def __add__(self, other: Octonion) -> Octonion:
        return Octonion(a + b for a, b in zip(self._coef, other.coef))

    def __sub__(self, other: Octonion) -> Octonion:
        return Octonion(a - b for a, b in zip(self._coef, other.coef))

    def __neg__(self) -> Octonion:
        return Octonion(-a for a in self._coef)

    def __mul__(self, other) -> Octonion:
        if isinstance(other, (int, Fraction)):
            return Octonion(a * other for a in self._coef)
        if not isinstance(other, Octonion):
            return NotImplemented
        out = [Fraction(0)] * OCTONION_DIM
        for i, a in enumerate(self._coef):
            if not a:
                continue
            for j, b in enumerate(other.coef):
                if b:
                    out[i ^ j] += OCTONION_SIGNS[i][j] * a * b
        return Octonion(out)

    def __rmul__(self, other) -> Octonion:
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def conjugate(self) -> Octonion:
        return Octonion([self._coef[0]] + [-c for c in self._coef[1:]])

    def norm_squared(self) -> Fraction:
        return sum((c * c for c in self._coef), Fraction(0))

    def real_part(self) -> Fraction:
        return self._coef[0]

    def is_zero(self) -> bool:
        return not any(self._coef)


def associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion:
    """(ab)c - a(bc)"""
    return (a * b) * c - a * (b * c)


def test_octonions():
    """Quick console check of the shipped table"""
    print("🧮 Checking octonion table against Cayley-Dickson doubling...")
    if doubling_sign_table() == OCTONION_SIGNS:
        print("✅ Table matches doubling construction")
    else:
        print("❌ Table mismatch")
    t1, t2, t4 = Octonion.unit(1), Octonion.unit(2), Octonion.unit(4)
    print(f"  (θ1θ2)θ4 = {((t1 * t2) * t4).coef}")
    print(f"  θ1(θ2θ4) = {(t1 * (t2 * t4)).coef}")


if __name__ == "__main__":
    test_octonions()
