"""Two-point spectral triple: Dirac constraints, grading, one-forms"""

from fractions import Fraction

import pytest

from algebra.operators import LinearOperator
from errors import IncompatibleOperandsError
from geometry.spectral_triple import (DiracOperator, build_n_point_rep, check_leibniz_for_dirac,
                                      derivation_compatibility, dirac_as_hom, dirac_is_symmetric,
                                      generate_connes_oneforms, grading_checks, solve_dirac_constraints,
                                      standard_block)


def test_representation_is_symmetric(two_point_rep):
    assert two_point_rep.hilbert_dim == 54
    assert two_point_rep.check_symmetry()['passed']


def test_standard_block_is_rank_one(j3o):
    block = standard_block(j3o)
    rows = {r for r, _ in block.entries()}
    assert rows == {i for i, _ in j3o.identity}


@pytest.mark.parametrize('kappa', [Fraction(1, 2), 1, 2])
def test_standard_dirac_satisfies_every_check(two_point_rep, kappa):
    D = DiracOperator.from_kappa(kappa)
    assert D.kappa == Fraction(kappa)
    assert dirac_is_symmetric(D, two_point_rep)
    assert all(grading_checks(D, two_point_rep).values())
    assert check_leibniz_for_dirac(D, two_point_rep)['passed']
    assert derivation_compatibility(D, two_point_rep)['passed']


def test_perturbed_block_breaks_leibniz(two_point_rep):
    upper = LinearOperator.from_entries((27, 27), {(0, 0): 1})
    D = DiracOperator.from_coefficients(upper, two_point_rep)
    assert D.kappas is None
    report = check_leibniz_for_dirac(D, two_point_rep)
    assert not report['passed']
    assert report['witness'] is not None
    assert Fraction(report['max_violation']) > 0


def test_kappa_must_be_symmetric_and_off_diagonal(j2r):
    with pytest.raises(IncompatibleOperandsError):
        DiracOperator.from_kappas({(1, 2): 1, (2, 1): 2}, j2r)
    with pytest.raises(IncompatibleOperandsError):
        DiracOperator.from_kappas({(1, 1): 1}, j2r)


def test_coefficient_form_needs_two_points(j2r):
    rep = build_n_point_rep(3, j2r)
    with pytest.raises(IncompatibleOperandsError):
        DiracOperator.from_coefficients(LinearOperator.zero(3), rep)


def test_vanishing_dirac_has_no_oneforms(j2r):
    rep = build_n_point_rep(2, j2r)
    D = DiracOperator.from_kappa(0, j2r)
    assert D.is_zero()
    assert generate_connes_oneforms(D, rep).dim == 0


def test_oneforms_stay_off_diagonal(j2r):
    rep = build_n_point_rep(2, j2r)
    forms = generate_connes_oneforms(DiracOperator.from_kappa(1, j2r), rep, modulus=0)
    assert forms.off_diagonal
    assert 0 < forms.dim <= forms.bound == 36 - 18


def test_hom_sector_ranks_come_from_the_built_map(j2r):
    rep = build_n_point_rep(2, j2r)
    hom = dirac_as_hom(DiracOperator.from_kappa(2, j2r), rep, track_closure=True)
    assert hom.image_sectors == {'12': 9, '21': 9}
    assert hom.kernel_sectors == {'11': 9, '22': 9}
    assert hom.gamma == {'12': '-2', '21': '-2'}
    assert hom.tracked['mismatched'] == 0
    assert 0 < hom.tracked['image_rank'] <= 18


def test_vanishing_kappa_leaves_every_sector_in_the_kernel(j2r):
    rep = build_n_point_rep(2, j2r)
    hom = dirac_as_hom(DiracOperator.from_kappa(0, j2r), rep)
    assert hom.image_sectors == {}
    assert hom.kernel_sectors == {'11': 9, '12': 9, '21': 9, '22': 9}


@pytest.mark.slow
def test_dirac_kernel_is_the_standard_block(two_point_rep):
    solution = solve_dirac_constraints(two_point_rep)
    assert solution.kernel_dim == 1
    assert solution.matches_standard
    assert solution.leibniz['passed']
    assert all(solution.grading.values())
    assert solution.to_dict()['certificate']['conclusive']


@pytest.mark.slow
def test_connes_oneforms_fill_the_off_diagonal_blocks(two_point_rep):
    forms = generate_connes_oneforms(DiracOperator.from_kappa(2), two_point_rep)
    assert forms.dim == forms.bound == 1458
    assert forms.to_dict()['exact_over_q']


@pytest.mark.slow
def test_dirac_as_bimodule_map(two_point_rep):
    hom = dirac_as_hom(DiracOperator.from_kappa(3), two_point_rep)
    assert hom.image_sectors == {'12': 729, '21': 729}
    assert hom.kernel_sectors == {'11': 729, '22': 729}
    assert hom.gamma == {'12': '-3', '21': '-3'}
    assert hom.hermitian_kappas
