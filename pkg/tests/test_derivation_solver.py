"""Leibniz systems, derivation kernels and one-form spans"""

import pytest

from derivations.associative_oracle import associative_oracle_suite, multiplication_map
from derivations.derivation_solver import (inner_derivation_span, parse_sector_pattern, solve_n_point,
                                           universal_oneform_span)
from algebra.algebra_core import build_n_point_algebra, build_real_diagonal
from errors import IncompatibleOperandsError


def test_sector_patterns():
    assert parse_sector_pattern('all', 2) == {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): 1}
    assert parse_sector_pattern('diag', 2) == {(1, 1): 1, (2, 2): 1}
    assert parse_sector_pattern('offdiag', 2) == {(1, 2): 1, (2, 1): 1}
    assert parse_sector_pattern('11, 12:2, 12', 2) == {(1, 1): 1, (1, 2): 3}


@pytest.mark.parametrize('pattern', ['13', '1', 'ab', '31:2'])
def test_bad_sector_patterns(pattern):
    with pytest.raises(IncompatibleOperandsError):
        parse_sector_pattern(pattern, 2)


def test_two_point_solve_agrees_with_monolithic(j2r):
    result = solve_n_point(2, base=j2r)
    assert len(result.sectors) == 4
    assert result.agreement is True
    summary = result.to_dict()
    assert summary['verified']
    assert summary['cross_sector_vanishing']
    assert summary['kernel_dim'] == result.monolithic.kernel_dim
    assert set(summary['sector_dims']) == {'11', '12', '21', '22'}


def test_every_sector_carries_an_ansatz(j2r):
    result = solve_n_point(2, {(1, 2): 1}, cross_check=False, base=j2r)
    (sector,) = result.sectors
    assert sector.kernel_dim >= 1
    assert list(sector.parametrization) == ['kappa_12']
    assert sector.verification['passed']
    assert result.monolithic is None


@pytest.mark.slow
def test_exceptional_one_point_kernel_is_one_dimensional():
    result = solve_n_point(1)
    assert result.kernel_dim == 1
    (sector,) = result.sectors
    assert sector.ansatz_spans_kernel
    assert sector.certificate.conclusive


@pytest.mark.slow
def test_exceptional_two_point_kernel():
    result = solve_n_point(2, cross_check=False)
    assert result.kernel_dim == 4
    assert all(s.kernel_dim == 1 for s in result.sectors)


@pytest.mark.slow
def test_exceptional_two_point_kernel_matches_monolithic_solve():
    result = solve_n_point(2)
    assert result.agreement is True
    assert result.monolithic is not None
    assert result.monolithic.kernel_dim == 4
    assert result.kernel_dim == 4
    assert result.monolithic.certificate.conclusive


def test_inner_derivations_of_exceptional_algebra(j3o):
    span = inner_derivation_span(j3o)
    assert span.dim == 52
    assert span.generators == 27 * 26 // 2
    assert span.kills_identity


def test_inner_derivations_of_two_points():
    assert inner_derivation_span(build_n_point_algebra(2)).dim == 104


def test_inner_derivations_of_symmetric_matrices(j2r):
    assert inner_derivation_span(j2r).dim == 1


def test_inner_derivation_basis_is_thread_independent(j3o):
    single = inner_derivation_span(j3o, threads=1)
    pooled = inner_derivation_span(j3o, threads=8)
    assert single.dim == pooled.dim == 52
    assert single.basis == pooled.basis


def test_seed_ranks(j3o, j2r):
    assert universal_oneform_span(1, seeds_only=True).seed_rank == 26
    assert universal_oneform_span(2, seeds_only=True).seed_rank == 53
    assert universal_oneform_span(2, seeds_only=True, base=j2r).seed_rank == 5


def test_universal_span_small_base_is_full(j2r):
    span = universal_oneform_span(1, base=j2r, modulus=0)
    assert span.seed_rank == 2
    assert span.dim <= span.ambient_dim == 9
    assert span.to_dict()['closure']['field'] == 'Q'


@pytest.mark.slow
@pytest.mark.parametrize('n, expected', [(1, 729), (2, 2916)])
def test_universal_span_fills_the_bimodule(n, expected):
    span = universal_oneform_span(n)
    assert span.dim == expected
    assert span.full
    assert span.to_dict()['exact_over_q']


def test_universal_span_needs_a_point():
    with pytest.raises(IncompatibleOperandsError):
        universal_oneform_span(0)


def test_multiplication_map_shape():
    m = multiplication_map(build_real_diagonal(2))
    assert (m.nrows, m.ncols) == (2, 4)


def test_associative_oracles():
    suite = associative_oracle_suite()
    assert suite['passed']
    r2, m2 = suite['cases']
    assert (r2['ker_m_dim'], r2['derivation_kernel_dim']) == (2, 2)
    assert (m2['ker_m_dim'], m2['derivation_kernel_dim']) == (12, 12)
    assert m2['generated_equals_ker_m']
