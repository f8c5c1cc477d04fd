"""Sparse exact elimination, modular certificates and span closures"""

from fractions import Fraction

import numpy as np
import pytest

import config
from algebra.operators import LinearOperator
from errors import DimensionMismatchError, InconclusiveCertificateError, KernelCertificateError, PrimeDivisionError
from linalg.exact_linalg import (EchelonBasis, SparseMatrix, certify_kernel, column_components, deduplicate_rows,
                                 exact_kernel, kernel_mod_p, rank_of_span, rational_reconstruct, solve_kernel,
                                 span_closure)

P = config.PRIMES[0]


def test_repeated_entries_rejected():
    with pytest.raises(DimensionMismatchError):
        SparseMatrix.from_coo(2, 2, [0, 0], [1, 1], [1, 2])


def test_repeated_entries_summed_on_request():
    m = SparseMatrix.from_coo(2, 2, [0, 0, 1], [1, 1, 0], [1, 2, -1], sum_duplicates=True)
    assert dict(((r, c), v) for r, c, v in m.entries()) == {(0, 1): 3, (1, 0): -1}


def test_entries_are_normalized():
    m = SparseMatrix.from_entries(1, 3, [(0, 0, Fraction(2, 4)), (0, 2, Fraction(3, -6)), (0, 1, 0)])
    assert m.nnz == 2
    assert list(m.entries()) == [(0, 0, Fraction(1, 2)), (0, 2, Fraction(-1, 2))]


def test_residual():
    m = SparseMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
    assert m.residual({0: 1, 1: -1, 2: 1}) == {}
    assert m.residual({0: Fraction(1, 3)}) == {0: Fraction(1, 3)}


def test_deduplicate_rows():
    m = SparseMatrix.from_entries(5, 3, [(0, 0, 1), (0, 1, 2), (2, 0, 1), (2, 1, 2), (3, 2, 5), (4, 0, 1)])
    out, empty, duplicates = deduplicate_rows(m)
    assert (empty, duplicates) == (1, 1)
    assert out.nrows == 3
    assert rank_of_span(out.row_dicts(), 3) == 3


def test_column_components():
    rows = np.array([0, 0, 1, 1, 2], dtype=np.int64)
    cols = np.array([0, 2, 2, 3, 4], dtype=np.int64)
    count, labels = column_components(3, 6, rows, cols)
    assert count == 2
    assert labels.tolist() == [0, -1, 0, 0, 1, -1]


def test_rational_reconstruction():
    for value in (Fraction(3, 7), Fraction(-22, 5), Fraction(0), Fraction(1, 2)):
        residue = value.numerator * pow(value.denominator, -1, P) % P
        assert rational_reconstruct(residue, P) == value


def test_kernel_mod_p_rank():
    m = SparseMatrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    result = kernel_mod_p(m, P)
    assert result.rank == 2
    assert result.kernel_dim == 1
    assert len(result.kernel) == 1


def test_prime_dividing_a_denominator():
    m = SparseMatrix.from_entries(1, 1, [(0, 0, Fraction(1, 7))])
    with pytest.raises(PrimeDivisionError):
        kernel_mod_p(m, 7)


def test_exact_kernel():
    m = SparseMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
    kernel = exact_kernel(m)
    assert len(kernel) == 1
    assert m.residual(kernel[0]) == {}


def test_solve_kernel_conclusive():
    m = SparseMatrix.from_rows([[1, -1, 0, 0], [0, 1, -1, 0], [Fraction(1, 2), 0, Fraction(-1, 2), 0]])
    certificate = solve_kernel(m, [{0: 1, 1: 1, 2: 1}])
    assert certificate.conclusive
    assert certificate.kernel_dim == 2
    assert certificate.kernel_dim_bounds == (2, 2)
    assert len(certificate.primes) == 2
    assert certificate.to_dict()['kernel_dim'] == 2


def test_solve_kernel_without_candidates_uses_modular_lift():
    # too many columns for the exact pass, so the kernel must come from CRT lifting
    n = config.EXACT_Q_MAX_COLUMNS + 2
    rows = np.arange(n - 1)
    m = SparseMatrix.from_coo(n - 1, n, np.r_[rows, rows], np.r_[rows, rows + 1],
                              np.r_[np.ones(n - 1, dtype=np.int64), -np.ones(n - 1, dtype=np.int64)])
    certificate = solve_kernel(m)
    assert not certificate.exact_q
    assert certificate.conclusive
    assert certificate.kernel_dim == 1
    assert m.residual(certificate.kernel_basis[0]) == {}


def test_bad_candidate_names_row():
    m = SparseMatrix.from_rows([[1, 0], [0, 1]])
    with pytest.raises(KernelCertificateError) as info:
        certify_kernel(m, [{1: 1}])
    assert info.value.row == 1


def test_inconclusive_without_candidates_raises():
    m = SparseMatrix.from_rows([[1, -1]])
    certificate = certify_kernel(m, [])
    assert certificate.kernel_dim_bounds == (0, 1)
    assert not certificate.conclusive
    with pytest.raises(ValueError):
        certify_kernel(m, [], primes=[P, P])
    error = InconclusiveCertificateError("kernel certificate inconclusive", 0, 1)
    assert (error.lower, error.upper) == (0, 1)


def test_echelon_basis_tracks_payload():
    basis = EchelonBasis(3)
    basis.insert({0: 1, 1: 1}, {0: 5})
    basis.insert({1: 1}, {1: 7})
    assert not basis.insert({0: 2, 1: 3})
    image = basis.image_of({0: 2, 1: 3})
    assert image == {0: 10, 1: 7}
    with pytest.raises(DimensionMismatchError):
        basis.image_of({2: 1})


def test_span_closure_over_q_and_mod_p():
    shift = LinearOperator.from_entries((4, 4), {(1, 0): 1, (2, 1): 1, (3, 2): 1})
    closure = span_closure([{0: Fraction(1)}], [shift], 4)
    assert closure.dim == 4
    assert closure.full
    assert closure.to_dict()['field'] == 'Q'
    modular = span_closure([{0: 1}], [shift], 4, modulus=P)
    assert modular.dim == 4
    assert modular.to_dict()['field'] == f"F_{P}"
    partial = span_closure([{2: Fraction(1)}], [shift], 4)
    assert partial.dim == 2


def test_span_closure_is_thread_independent():
    up = LinearOperator.from_entries((5, 5), {(1, 0): 1, (2, 1): 1, (3, 2): 1, (4, 3): 2})
    down = LinearOperator.from_entries((5, 5), {(0, 1): 3, (1, 2): 1, (2, 3): 1, (3, 4): 1})
    single = span_closure([{2: Fraction(1)}], [up, down], 5, threads=1)
    pooled = span_closure([{2: Fraction(1)}], [up, down], 5, threads=4)
    assert single.dim == pooled.dim == 5
    assert single.candidates_tried == pooled.candidates_tried
    assert single.basis.rows() == pooled.basis.rows()


def test_span_closure_stops_at_upper_bound():
    shift = LinearOperator.from_entries((4, 4), {(1, 0): 1, (2, 1): 1, (3, 2): 1})
    closure = span_closure([{0: Fraction(1)}], [shift], 4, upper_bound=2)
    assert closure.dim == 2
