"""Structure constants, identity sweeps, algebra files and the trace form"""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.algebra_core import (AlgebraSpec, build_n_point_algebra, build_reals, check_identity, direct_sum,
                                  first_nonassociative_triple, idempotent_from_column, inner_product,
                                  is_idempotent, is_positive_definite, is_primitive_candidate, jordan_trace,
                                  ldl_pivots, left_mult_operator, parse_algebra_file, primitive_idempotents_standard,
                                  product, right_mult_operator, serialize_algebra, sigma_basis,
                                  structure_constant_values, trace_gram_matrix)
from algebra.octonion import Octonion
from errors import (AlgebraFileError, DuplicateTripletError, FlagViolationError, IdentityAxiomError,
                    IncompatibleOperandsError, NonIdempotentError)

small = st.integers(min_value=-3, max_value=3)


def j3o_elements(spec):
    return st.lists(small, min_size=27, max_size=27).map(spec.element)


# ===== J3(O) =====

def test_j3o_shape(j3o):
    assert j3o.dim == 27
    assert j3o.identity_index is None
    assert j3o.identity == ((0, 1), (9, 1), (18, 1))
    assert j3o.scale == 2
    assert j3o.degree == 3


def test_j3o_structure_constant_values(j3o):
    allowed = {Fraction(s, d) for s in (1, -1) for d in (1, 2, 4)}
    assert set(structure_constant_values(j3o)) <= allowed


def test_identity_is_two_sided_unit(j3o):
    unit = j3o.identity_element()
    for k in range(j3o.dim):
        e = j3o.basis_element(k)
        assert product(unit, e) == e
        assert product(e, unit) == e


def test_j3o_is_jordan(j3o):
    report = check_identity(j3o, 'jordan')
    assert report.passed
    assert report.violations == 0
    assert report.checked == 27 * 28 * 29 // 6


def test_j3o_is_commutative_and_power_associative(j3o):
    assert check_identity(j3o, 'commutative').passed
    assert check_identity(j3o, 'power_assoc_low').passed


def test_j3o_is_not_associative(j3o):
    report = check_identity(j3o, 'associative')
    assert not report.passed
    i, j, k = report.witness
    a, b, c = (j3o.basis_element(x) for x in (i, j, k))
    assert product(product(a, b), c) != product(a, product(b, c))
    assert first_nonassociative_triple(j3o) == report.witness


def test_unknown_identity_rejected(j3o):
    with pytest.raises(IncompatibleOperandsError):
        check_identity(j3o, 'alternative')


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_jordan_identity_on_random_elements(j3o, data):
    a = data.draw(j3o_elements(j3o))
    b = data.draw(j3o_elements(j3o))
    a2 = product(a, a)
    assert product(product(a2, b), a) == product(a2, product(b, a))
    assert product(a, b) == product(b, a)


# ===== Small algebras =====

def test_small_algebras(r2, m2, j2r):
    assert check_identity(r2, 'associative').passed
    assert check_identity(m2, 'associative').passed
    assert not check_identity(m2, 'commutative').passed
    assert check_identity(j2r, 'jordan').passed
    assert build_reals().dim == 1


def test_left_and_right_multiplication_differ_for_matrices(m2):
    e12 = m2.basis_element(1)
    assert left_mult_operator(e12) != right_mult_operator(e12)
    e21 = m2.basis_element(2)
    assert left_mult_operator(e12).apply(e21.coeffs) == product(e12, e21).coeffs
    assert right_mult_operator(e12).apply(e21.coeffs) == product(e21, e12).coeffs


def test_direct_sum(j3o):
    two = build_n_point_algebra(2)
    assert two.dim == 54
    assert len(two.identity) == 6
    assert two.degree == 6
    assert direct_sum([j3o, j3o]).structure_constants == two.structure_constants


def test_elements_of_different_algebras_do_not_multiply(j3o, r2):
    with pytest.raises(IncompatibleOperandsError):
        product(j3o.identity_element(), r2.identity_element())


# ===== Algebra files =====

def test_file_round_trip(m2, j2r):
    for spec in (m2, j2r):
        again = parse_algebra_file(serialize_algebra(spec))
        assert again.structure_constants == spec.structure_constants
        assert again.identity == spec.identity
        assert again.flags == spec.flags


def test_j3o_file_keeps_vector_identity(j3o):
    data = json.loads(serialize_algebra(j3o))
    assert 'identity_index' not in data
    assert data['identity'] == [[0, 1, 1], [9, 1, 1], [18, 1, 1]]


def test_syntax_error_carries_position():
    with pytest.raises(AlgebraFileError) as info:
        parse_algebra_file('{"dim": 1,\n "structure_constants": [}')
    assert info.value.line == 2


def test_duplicate_triplet_rejected():
    text = json.dumps({'dim': 1, 'identity_index': 0,
                       'structure_constants': [[0, 0, 0, 1, 1], [0, 0, 0, 1, 1]]})
    with pytest.raises(DuplicateTripletError):
        parse_algebra_file(text)


def test_bad_identity_rejected():
    text = json.dumps({'dim': 2, 'identity_index': 0,
                       'structure_constants': [[0, 0, 0, 1, 1], [1, 1, 1, 1, 1]]})
    with pytest.raises(IdentityAxiomError):
        parse_algebra_file(text)


def test_false_flag_rejected(m2):
    data = json.loads(serialize_algebra(m2))
    data['flags'] = ['commutative']
    with pytest.raises(FlagViolationError):
        parse_algebra_file(json.dumps(data))


def test_missing_identity_rejected():
    with pytest.raises(AlgebraFileError):
        parse_algebra_file(json.dumps({'dim': 1, 'structure_constants': [[0, 0, 0, 1, 1]]}))


# ===== Trace form =====

def test_trace_gram_matrix(j3o):
    gram = trace_gram_matrix(j3o)
    for i in range(27):
        expected = Fraction(1, 3) if i in (0, 9, 18) else Fraction(2, 3)
        assert gram[i][i] == expected
        assert all(gram[i][j] == 0 for j in range(27) if j != i)
    assert is_positive_definite(gram)
    assert len(ldl_pivots(gram)) == 27


def test_ldl_stops_at_nonpositive_pivot():
    pivots = ldl_pivots([[1, 2], [2, 1]])
    assert pivots == [1, -3]
    assert not is_positive_definite([[1, 2], [2, 1]])


def test_inner_product_of_identity(j3o):
    unit = j3o.identity_element()
    assert jordan_trace(unit) == 3
    assert inner_product(unit, unit) == 1


def test_sigma_basis(j3o):
    sigma = sigma_basis(j3o)
    assert sigma.passed
    assert len(sigma.rows) == 27
    assert not sigma.failures


def test_sigma_matrix_keeps_every_position(j3o):
    matrix = sigma_basis(j3o).to_dict()['matrix']
    assert len(matrix) == 27
    assert all(len(row) == 27 for row in matrix)
    zero = ['0', '0', '0', '0']
    assert matrix[0][0] == matrix[0][9] == matrix[0][18] == ['1', '0', '0', '0']
    assert matrix[0][1] == zero
    assert matrix[1][0] == ['0', '0', '0', '1/2']
    assert matrix[1][18] == zero
    assert matrix[3][1] == ['0', '0', '0', '1/2']


# ===== Idempotents =====

def test_standard_idempotents(j3o):
    ps = primitive_idempotents_standard(j3o)
    assert len(ps) == 3
    for p in ps:
        assert is_idempotent(p)
        assert jordan_trace(p) == 1
    assert product(ps[0], ps[1]).is_zero()
    assert ps[0] + ps[1] + ps[2] == j3o.identity_element()
    assert all(is_primitive_candidate(p) for p in ps)
    assert is_idempotent(ps[0] + ps[1])
    assert not is_primitive_candidate(ps[0] + ps[1])


def test_idempotent_from_column(j3o):
    p = idempotent_from_column(Octonion.real(Fraction(3, 5)), Octonion.unit(1, Fraction(4, 5)), Octonion(), j3o)
    assert is_idempotent(p)
    assert jordan_trace(p) == 1
    e1 = idempotent_from_column(Octonion.real(1), Octonion(), Octonion(), j3o)
    assert e1 == j3o.basis_element(0)


def test_non_unit_column_rejected(j3o):
    with pytest.raises(NonIdempotentError):
        idempotent_from_column(Octonion.real(1), Octonion.real(1), Octonion(), j3o)
