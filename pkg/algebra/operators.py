#!/usr/bin/env python3
"""
Exact Linear Operators for jordan-spectral

A LinearOperator is an integer scipy.sparse CSR matrix together with one
positive common denominator. Composition, sums and Kronecker products stay
exact; the denominator is reduced by the gcd of all entries after each step.
"""

from __future__ import annotations

import math
import os
import sys
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from errors import DimensionMismatchError

# Largest magnitude an int64 accumulation may reach before we refuse
INT64_SAFE = 1 << 62
# Integers below this survive a float64 BLAS product exactly
FLOAT_EXACT = 1 << 52


def exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Exact (batched) product of integer arrays

    Uses float64 BLAS when every partial sum is provably below 2^52,
    otherwise integer matmul.

    Args:
        a, b: int64 arrays compatible with np.matmul

    Returns:
        np.ndarray: int64 product
    """
    max_a = int(np.abs(a).max()) if a.size else 0
    max_b = int(np.abs(b).max()) if b.size else 0
    inner = a.shape[-1] if a.ndim else 1
    bound = max_a * max_b * max(inner, 1)
    if bound < FLOAT_EXACT:
        return np.rint(np.matmul(a.astype(np.float64), b.astype(np.float64))).astype(np.int64)
    if bound >= INT64_SAFE:
        raise ArithmeticError(f"integer product bound {bound} exceeds int64")
    return np.matmul(a, b)


def lcm_many(values: Iterable[int]) -> int:
    result = 1
    for v in values:
        result = result * v // math.gcd(result, v)
    return result


def inverse_mod(value: int, prime: int) -> int:
    return pow(int(value) % prime, prime - 2, prime)


class LinearOperator:
    """Exact rational matrix stored as integer CSR numerators over one denominator"""

    def __init__(self, matrix, den: int = 1) -> None:
        m = sp.csr_matrix(matrix, dtype=np.int64, copy=True)
        m.sum_duplicates()
        m.eliminate_zeros()
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("operator denominator is zero")
        if den < 0:
            m = -m
            den = -den
        if m.nnz == 0:
            den = 1
        else:
            g = math.gcd(den, int(np.gcd.reduce(np.abs(m.data))))
            if g > 1:
                m.data //= g
                den //= g
        self._matrix = m
        self._den = den

    # ===== Construction =====

    @classmethod
    def from_entries(cls, shape: tuple[int, int], entries: Mapping[tuple[int, int], Fraction]) -> LinearOperator:
        """
        Build from a {(row, col): value} mapping

        Args:
            shape: (codomain_dim, domain_dim)
            entries: Rational entries; zeros are dropped

        Returns:
            LinearOperator
        """
        items = [(r, c, Fraction(v)) for (r, c), v in entries.items() if v]
        den = lcm_many(v.denominator for _, _, v in items)
        rows = np.fromiter((r for r, _, _ in items), dtype=np.int64, count=len(items))
        cols = np.fromiter((c for _, c, _ in items), dtype=np.int64, count=len(items))
        data = np.array([v.numerator * (den // v.denominator) for _, _, v in items], dtype=np.int64)
        return cls(sp.csr_matrix((data, (rows, cols)), shape=shape), den)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> LinearOperator:
        shape = (len(rows), len(rows[0]) if rows else 0)
        return cls.from_entries(shape, {(r, c): v for r, row in enumerate(rows) for c, v in enumerate(row) if v})

    @classmethod
    def identity(cls, n: int) -> LinearOperator:
        return cls(sp.identity(n, dtype=np.int64, format='csr'))

    @classmethod
    def zero(cls, m: int, n: int | None = None) -> LinearOperator:
        return cls(sp.csr_matrix((m, m if n is None else n), dtype=np.int64))

    @classmethod
    def block(cls, blocks: Sequence[Sequence[LinearOperator | None]]) -> LinearOperator:
        """Assemble a block operator; None marks a zero block"""
        den = lcm_many(b.den for row in blocks for b in row if b is not None)
        scaled = [[None if b is None else b.matrix * (den // b.den) for b in row] for row in blocks]
        return cls(sp.bmat(scaled, format='csr', dtype=np.int64), den)

    # ===== Accessors =====

    @property
    def matrix(self) -> sp.csr_matrix:
        return self._matrix

    @property
    def den(self) -> int:
        return self._den

    @property
    def shape(self) -> tuple[int, int]:
        return self._matrix.shape

    @property
    def nnz(self) -> int:
        return self._matrix.nnz

    def is_zero(self) -> bool:
        return self._matrix.nnz == 0

    def entries(self) -> dict[tuple[int, int], Fraction]:
        coo = self._matrix.tocoo()
        return {(int(r), int(c)): Fraction(int(v), self._den)
                for r, c, v in zip(coo.row, coo.col, coo.data)}

    def entry(self, row: int, col: int) -> Fraction:
        return Fraction(int(self._matrix[row, col]), self._den)

    def to_rows(self) -> list[list[Fraction]]:
        dense = self._matrix.toarray()
        return [[Fraction(int(v), self._den) for v in row] for row in dense]

    def to_dense_float(self) -> np.ndarray:
        return self._matrix.toarray().astype(np.float64) / self._den

    def max_abs_entry(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return Fraction(int(np.abs(self._matrix.data).max()), self._den)

    # ===== Arithmetic =====

    def _check_same_shape(self, other: LinearOperator) -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(f"operator shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: LinearOperator) -> LinearOperator:
        self._check_same_shape(other)
        den = lcm_many((self._den, other.den))
        return LinearOperator(self._matrix * (den // self._den) + other.matrix * (den // other.den), den)

    def __sub__(self, other: LinearOperator) -> LinearOperator:
        return self + (-other)

    def __neg__(self) -> LinearOperator:
        return LinearOperator(-self._matrix, self._den)

    def scale(self, factor) -> LinearOperator:
        factor = Fraction(factor)
        return LinearOperator(self._matrix * factor.numerator, self._den * factor.denominator)

    def __mul__(self, factor) -> LinearOperator:
        if isinstance(factor, (int, Fraction)):
            return self.scale(factor)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: LinearOperator) -> LinearOperator:
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatchError(f"cannot compose {self.shape} with {other.shape}")
        if self.nnz and other.nnz:
            bound = int(np.abs(self._matrix.data).max()) * int(np.abs(other.matrix.data).max()) * self.shape[1]
            if bound >= INT64_SAFE:
                raise ArithmeticError("operator composition would overflow int64")
        return LinearOperator(self._matrix @ other.matrix, self._den * other.den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearOperator) or self.shape != other.shape:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def transpose(self) -> LinearOperator:
        return LinearOperator(self._matrix.T, self._den)

    def kron(self, other: LinearOperator) -> LinearOperator:
        return LinearOperator(sp.kron(self._matrix, other.matrix, format='csr'), self._den * other.den)

    def trace(self) -> Fraction:
        return Fraction(int(self._matrix.diagonal().sum()), self._den)

    # ===== Application =====

    @cached_property
    def _columns(self) -> tuple[list[int], list[int], list[int]]:
        csc = self._matrix.tocsc()
        csc.sort_indices()
        return csc.indptr.tolist(), csc.indices.tolist(), csc.data.tolist()

    def apply_sparse(self, vector: Mapping[int, object], modulus: int | None = None) -> dict[int, object]:
        """
        Apply to a sparse vector

        Args:
            vector: {index: value} with Fraction values, or residues when modulus is set
            modulus: Prime for modular application, or None for exact Q

        Returns:
            dict: Nonzero entries of the image
        """
        indptr, indices, data = self._columns
        acc: dict[int, object] = {}
        for col, value in vector.items():
            for pos in range(indptr[col], indptr[col + 1]):
                row = indices[pos]
                acc[row] = acc.get(row, 0) + value * data[pos]
        if modulus is None:
            den = self._den
            return {r: Fraction(v) / den for r, v in acc.items() if v}
        inv_den = inverse_mod(self._den, modulus)
        out = {}
        for r, v in acc.items():
            v = v * inv_den % modulus
            if v:
                out[r] = v
        return out

    def apply(self, vector: Sequence) -> tuple[Fraction, ...]:
        if len(vector) != self.shape[1]:
            raise DimensionMismatchError(f"vector length {len(vector)} does not match domain {self.shape[1]}")
        image = self.apply_sparse({i: Fraction(v) for i, v in enumerate(vector) if v})
        return tuple(image.get(i, Fraction(0)) for i in range(self.shape[0]))

    def as_vector(self) -> dict[int, Fraction]:
        """Row-major flattening into {row * ncols + col: value}"""
        ncols = self.shape[1]
        return {r * ncols + c: v for (r, c), v in self.entries().items()}

    @classmethod
    def from_vector(cls, vector: Mapping[int, Fraction], shape: tuple[int, int]) -> LinearOperator:
        ncols = shape[1]
        return cls.from_entries(shape, {divmod(i, ncols): v for i, v in vector.items()})

    def __repr__(self) -> str:
        return f"LinearOperator(shape={self.shape}, nnz={self.nnz}, den={self._den})"


def commutator(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    """[a, b] = ab - ba"""
    return a @ b - b @ a


def anticommutator(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    return a @ b + b @ a
