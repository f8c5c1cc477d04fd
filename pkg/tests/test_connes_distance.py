"""Pure states, commutator norms and the Connes distance on two points"""

import math
from fractions import Fraction

import pytest

from algebra.surds import ONE, QuadraticSurd
from errors import DegenerateDiracError, IncompatibleOperandsError, NonIdempotentError
from geometry.connes_distance import (DistanceQuery, check_norm_formula, commutator_norm, connes_distance,
                                      mixed_state, pure_state)
from geometry.spectral_triple import DiracOperator


@pytest.fixture(scope='module')
def e1(j3o):
    return j3o.basis_element(0)


def _query(rep, p, kappa, **kwargs):
    kwargs.setdefault('restarts', 2)
    return DistanceQuery(pure_state(1, p, rep), pure_state(2, p, rep), DiracOperator.from_kappa(kappa), **kwargs)


def test_surd_arithmetic():
    root2 = QuadraticSurd.sqrt2()
    assert root2 * root2 == 2
    assert QuadraticSurd.sqrt3() * QuadraticSurd.sqrt6() == QuadraticSurd(0, 3)
    assert float(root2 * Fraction(2) - ONE) == pytest.approx(2 * math.sqrt(2) - 1)
    assert str(root2 * 2) == '2√2'
    assert (root2 - root2).to_json() == ['0', '0', '0', '0']


def test_pure_state_is_normalized_and_positive(two_point_rep, e1, j3o):
    state = pure_state(1, e1, two_point_rep)
    assert state.normalization() == 1
    samples = [two_point_rep.algebra.basis_element(k) for k in (0, 1, 27, 30)]
    assert state.is_positive_on(samples)
    assert state(two_point_rep.algebra.basis_element(27)) == 0


def test_pure_state_rejects_non_idempotents(two_point_rep, j3o, e1):
    with pytest.raises(NonIdempotentError):
        pure_state(1, e1 * 2, two_point_rep)
    with pytest.raises(NonIdempotentError):
        pure_state(1, e1 + j3o.basis_element(9), two_point_rep)
    with pytest.raises(IncompatibleOperandsError):
        pure_state(3, e1, two_point_rep)


def test_mixed_state_weights(two_point_rep, e1):
    x, y = pure_state(1, e1, two_point_rep), pure_state(2, e1, two_point_rep)
    mixed = mixed_state([x, y], [Fraction(1, 4), Fraction(3, 4)])
    assert mixed.normalization() == 1
    assert len(mixed.support) == 2
    with pytest.raises(IncompatibleOperandsError):
        mixed_state([x, y], [-1, 2])
    with pytest.raises(IncompatibleOperandsError):
        mixed_state([x, y], [Fraction(1, 2)])


def test_query_validation(two_point_rep, e1):
    with pytest.raises(ValueError):
        _query(two_point_rep, e1, 1, tolerance=0)
    with pytest.raises(ValueError):
        _query(two_point_rep, e1, 1, restarts=0)


@pytest.mark.parametrize('kappa', [1, 3])
def test_commutator_norm_of_a_diagonal_idempotent(two_point_rep, kappa):
    a = two_point_rep.algebra.basis_element(0)
    norm = commutator_norm(DiracOperator.from_kappa(kappa), a, two_point_rep)
    assert norm == pytest.approx(kappa / math.sqrt(3), rel=1e-7)


def test_published_norm_formula_does_not_hold(two_point_rep):
    report = check_norm_formula(DiracOperator.from_kappa(1), two_point_rep)
    assert report['samples'] == 49
    assert not report['holds_everywhere']
    assert not report['holds_positive_orthant']
    assert report['max_deviation'] > 0.1


def test_norm_formula_needs_kappa(two_point_rep):
    upper = DiracOperator.from_kappa(1).blocks[(1, 2)]
    D = DiracOperator.from_coefficients(upper, two_point_rep)
    with pytest.raises(IncompatibleOperandsError):
        check_norm_formula(D, two_point_rep)


def test_vanishing_dirac_is_degenerate(two_point_rep, e1):
    with pytest.raises(DegenerateDiracError):
        connes_distance(_query(two_point_rep, e1, 0), two_point_rep, threads=1)


def test_distance_between_the_two_points(two_point_rep, e1):
    result = connes_distance(_query(two_point_rep, e1, 1), two_point_rep, threads=1)
    assert result.distance == pytest.approx(2 * math.sqrt(2), rel=1e-6)
    assert result.analytic_exact == QuadraticSurd.sqrt2() * 2
    assert result.inverse_kappa == pytest.approx(1.0)
    assert result.agreement['constraint_tight']
    assert not result.agreement['within_inverse_kappa']
    assert any('exceeds 1/κ' in f for f in result.findings)
    assert result.paths['restricted'] == pytest.approx(math.sqrt(3), rel=1e-2)
    assert len(result.maximizer) == 54
    assert result.to_dict()['analytic_exact'] == ['0', '2', '0', '0']


@pytest.mark.slow
@pytest.mark.parametrize('kappa', [Fraction(1, 2), 2, 4])
def test_distance_scales_inversely_with_kappa(two_point_rep, e1, kappa):
    result = connes_distance(_query(two_point_rep, e1, kappa, restarts=4), two_point_rep)
    assert result.distance == pytest.approx(2 * math.sqrt(2) / float(kappa), rel=1e-6)
    assert result.agreement['analytic_vs_best']


def test_identity_commutes_with_dirac(two_point_rep):
    assert commutator_norm(DiracOperator.from_kappa(1), two_point_rep.algebra.identity_element(), two_point_rep) == 0.0


def test_commutator_norm_is_homogeneous(two_point_rep):
    D = DiracOperator.from_kappa(2)
    a = two_point_rep.algebra.basis_element(1) + two_point_rep.algebra.basis_element(27)
    assert commutator_norm(D, a * 2, two_point_rep) == pytest.approx(2 * commutator_norm(D, a, two_point_rep))


@pytest.mark.slow
def test_distance_is_symmetric(two_point_rep, e1):
    D = DiracOperator.from_kappa(1)
    x, y = pure_state(1, e1, two_point_rep), pure_state(2, e1, two_point_rep)
    forward = connes_distance(DistanceQuery(x, y, D, restarts=2), two_point_rep)
    backward = connes_distance(DistanceQuery(y, x, D, restarts=2), two_point_rep)
    assert forward.distance == pytest.approx(backward.distance, rel=1e-6)
