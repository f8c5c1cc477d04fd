"""Module actions, split bimodules and bimodule homomorphisms"""

import pytest

from algebra.operators import LinearOperator
from bimodules.jordan_modules import (ModuleAction, build_free_bimodule, build_split_bimodule,
                                      check_associative_rep, check_module_axioms, check_split_compatibility,
                                      classify_bimodule_homs, regular_action, sector_list, symmetrized_action,
                                      _sector_preserving)
from errors import DimensionMismatchError, EmptyModuleError, IncompatibleOperandsError


def test_regular_j3o_action_is_a_jordan_module(j3o):
    report = check_module_axioms(regular_action(j3o))
    assert report.passed
    assert report.method == 'dense'
    assert report.mult1_violations == 0
    assert report.jordact_violations == 0


def test_regular_j3o_action_is_not_associative(j3o):
    report = check_associative_rep(regular_action(j3o))
    assert not report['passed']
    a, b = report['witness']
    assert 0 <= a <= b < 27


def test_action_needs_one_operator_per_basis_element(j2r):
    with pytest.raises(DimensionMismatchError):
        ModuleAction(j2r, 3, (LinearOperator.identity(3),))


def test_sector_list_orders_sectors():
    assert sector_list({(2, 1): 1, (1, 2): 2}) == [(1, 2), (1, 2), (2, 1)]


def test_split_bimodule_shape(j2r):
    module = build_split_bimodule(2, {(1, 2): 2, (2, 1): 1}, j2r)
    assert module.dim == 3 * 3 * 3
    assert module.multiplicity_dim == 3
    assert module.algebra.dim == 6
    assert module.index(1, 2, 0) == (1 * 3 + 2) * 3
    assert module.sector_of(2) == (2, 1)


def test_split_bimodule_actions_are_jordan_modules(j2r):
    module = build_split_bimodule(2, {(1, 1): 1, (1, 2): 1, (2, 1): 1}, j2r)
    assert check_split_compatibility(module)['passed']
    assert check_module_axioms(module.left).passed
    assert check_module_axioms(module.right).passed


def test_empty_and_out_of_range_sectors(j2r):
    with pytest.raises(EmptyModuleError):
        build_split_bimodule(2, {(1, 2): 0}, j2r)
    with pytest.raises(IncompatibleOperandsError):
        build_split_bimodule(2, {(1, 3): 1}, j2r)
    with pytest.raises(EmptyModuleError):
        build_free_bimodule(0, j2r)


@pytest.mark.parametrize('source, target, expected', [
    ({(1, 2): 1}, {(1, 2): 1}, 1),
    ({(1, 2): 1}, {(2, 1): 1}, 0),
    ({(1, 2): 1}, {(1, 2): 3}, 3),
    ({(1, 1): 1, (1, 2): 2}, {(1, 1): 1, (1, 2): 1}, 3),
    ({(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): 1}, {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): 1}, 4),
])
def test_split_hom_dimensions(j2r, source, target, expected):
    homs = classify_bimodule_homs(build_split_bimodule(2, source, j2r), build_split_bimodule(2, target, j2r),
                                  method='brute')
    assert homs.dim == expected
    assert homs.gamma_form
    assert homs.sector_preserving


def test_factorized_matches_brute_force(j2r):
    source = build_split_bimodule(2, {(1, 1): 1, (1, 2): 2}, j2r)
    target = build_split_bimodule(2, {(1, 1): 2, (1, 2): 1}, j2r)
    brute = classify_bimodule_homs(source, target, method='brute')
    factorized = classify_bimodule_homs(source, target, method='factorized')
    assert brute.dim == factorized.dim == 4
    assert factorized.sector_preserving
    assert factorized.certificate['leg_commutant_dims'] == [1, 1]
    assert factorized.certificate['candidate_rank'] == 4
    assert factorized.certificate['upper_bound'] == 4
    assert factorized.certificate['conclusive']


def test_factorized_rejects_cross_sector_units(j2r):
    source = build_split_bimodule(2, {(1, 2): 1, (2, 1): 1}, j2r)
    target = build_split_bimodule(2, {(1, 2): 1, (2, 1): 1}, j2r)
    homs = classify_bimodule_homs(source, target, method='factorized')
    assert homs.dim == 2
    assert homs.certificate['sector_pairs'] == 2
    assert homs.certificate['cross_sector_rejected'] == 2
    assert homs.certificate['conclusive']


def test_sector_check_reads_operator_entries(j2r):
    module = build_split_bimodule(2, {(1, 1): 1, (1, 2): 1}, j2r)
    mixing = module.embed_gamma(LinearOperator.from_entries((2, 2), {(0, 1): 1}))
    assert not _sector_preserving(mixing, module, module)
    assert _sector_preserving(module.embed_gamma(LinearOperator.identity(2)), module, module)


@pytest.mark.slow
def test_free_j3o_homs_through_auto(j3o):
    homs = classify_bimodule_homs(build_free_bimodule(2, j3o), build_free_bimodule(3, j3o), method='auto')
    assert homs.dim == 6
    assert homs.sector_preserving


@pytest.mark.slow
def test_split_j3o_two_points_through_auto(j3o):
    source = build_split_bimodule(2, {(1, 2): 1, (2, 1): 1}, j3o)
    target = build_split_bimodule(2, {(1, 2): 1}, j3o)
    homs = classify_bimodule_homs(source, target, method='auto')
    assert homs.method == 'factorized'
    assert homs.dim == 1
    assert homs.sector_preserving
    assert homs.certificate['candidate_rank'] == homs.certificate['upper_bound'] == 1
    assert homs.certificate['cross_sector_rejected'] == 1
    assert homs.certificate['conclusive']


def test_free_bimodule_homs(j2r):
    homs = classify_bimodule_homs(build_free_bimodule(2, j2r), build_free_bimodule(3, j2r))
    assert homs.dim == 6
    assert homs.method == 'brute'
    assert homs.to_dict()['dim'] == 6


def test_regular_j3o_endomorphisms_are_scalars(j3o):
    module = build_free_bimodule(1, j3o)
    homs = classify_bimodule_homs(module, module)
    assert homs.dim == 1
    assert homs.basis[0].gamma.shape == (1, 1)


def test_mixed_module_kinds_rejected(j2r):
    with pytest.raises(IncompatibleOperandsError):
        classify_bimodule_homs(build_free_bimodule(1, j2r), build_split_bimodule(1, {(1, 1): 1}, j2r))


def test_unknown_method_rejected(j2r):
    module = build_free_bimodule(1, j2r)
    with pytest.raises(IncompatibleOperandsError):
        classify_bimodule_homs(module, module, method='guess')


@pytest.mark.slow
def test_symmetrized_action_fails_while_legs_pass(j3o):
    module = build_split_bimodule(1, {(1, 1): 1}, j3o)
    assert check_module_axioms(module.left, stop_at_first=True).passed
    assert check_module_axioms(module.right, stop_at_first=True).passed
    report = check_module_axioms(symmetrized_action(module), stop_at_first=True)
    assert not report.passed
    assert report.jordact_witness is not None or report.mult1_witness is not None
