"""Octonion table and exact arithmetic"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.octonion import (OCTONION_SIGNS, Octonion, associator, basis_product, cayley_dickson_product,
                              doubling_sign_table)
from errors import IncompatibleOperandsError

coefficient = st.fractions(min_value=-4, max_value=4, max_denominator=6)
octonions = st.lists(coefficient, min_size=8, max_size=8).map(Octonion)


def test_table_matches_cayley_dickson_doubling():
    assert doubling_sign_table() == OCTONION_SIGNS


def test_imaginary_units_square_to_minus_one():
    for i in range(1, 8):
        assert Octonion.unit(i) * Octonion.unit(i) == Octonion.real(-1)


def test_basis_product_is_xor_indexed():
    for i in range(8):
        for j in range(8):
            sign, k = basis_product(i, j)
            assert k == i ^ j
            assert sign in (1, -1)


def test_distinct_imaginary_units_anticommute():
    for i in range(1, 8):
        for j in range(1, 8):
            if i != j:
                assert Octonion.unit(i) * Octonion.unit(j) == -(Octonion.unit(j) * Octonion.unit(i))


def test_octonions_are_not_associative():
    units = [Octonion.unit(i) for i in range(1, 8)]
    assert any(not associator(a, b, c).is_zero() for a in units for b in units for c in units)


def test_product_agrees_with_doubling_formula():
    x = Octonion([1, 2, 0, -1, Fraction(1, 2), 0, 3, 1])
    y = Octonion([0, 1, 1, 0, 2, -1, 0, Fraction(1, 3)])
    assert (x * y).coef == tuple(cayley_dickson_product(x.coef, y.coef))


def test_wrong_length_rejected():
    with pytest.raises(IncompatibleOperandsError):
        Octonion([1, 2, 3])


@settings(max_examples=60, deadline=None)
@given(octonions, octonions)
def test_alternative_laws(x, y):
    assert (x * x) * y == x * (x * y)
    assert (y * x) * x == y * (x * x)


@settings(max_examples=1000, deadline=None)
@given(octonions, octonions)
def test_norm_is_multiplicative(x, y):
    assert (x * y).norm_squared() == x.norm_squared() * y.norm_squared()


@settings(max_examples=60, deadline=None)
@given(octonions, octonions)
def test_conjugation_reverses_products(x, y):
    assert (x * y).conjugate() == y.conjugate() * x.conjugate()


@settings(max_examples=40, deadline=None)
@given(octonions, octonions, octonions)
def test_moufang_identity(x, y, z):
    assert (x * y) * (z * x) == x * ((y * z) * x)
