#!/usr/bin/env python3
"""
Derivation Solver for jordan-spectral

Assembles the Leibniz constraint system for derivations Δ: A → M of the
n-point algebra A = J ⊕ ... ⊕ J into a split bimodule M = J ⊗ V ⊗ J,
solves it with a kernel certificate, and re-verifies every derivation by
direct evaluation of Δ[x∘y] = Δ[x]·y + x·Δ[y] on basis pairs.

Unknowns X[a, i, j, v, k] are the coefficients of e_j ⊗ v ⊗ e_k in
Δ[e^{(a)i}]. For basis elements x = e^{(a)i}, y = e^{(a')m} and a module
coordinate (j, v, k) with v in sector (b, c), the Leibniz row reads

    [a = a'] Σ_q f(i,m,q) X[a,q,j,v,k]
      - [c = a'] Σ_k' f(k',m,k) X[a,i,j,v,k']
      - [b = a]  Σ_j' f(i,j',j) X[a',m,j',v,k]  = 0

Rows never mix multiplicity indices, so the system splits by v.
"""

from __future__ import annotations

import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import config
from errors import DimensionMismatchError, IncompatibleOperandsError
from algebra.algebra_core import AlgebraSpec
from algebra.operators import LinearOperator, commutator
from bimodules.jordan_modules import ModuleAction, SplitBimodule, build_split_bimodule
from linalg.exact_linalg import (
    EchelonBasis,
    KernelCertificate,
    SparseMatrix,
    deduplicate_rows,
    rank_of_span,
    solve_kernel,
    span_closure,
)

logger = logging.getLogger(__name__)

Sector = tuple[int, int]


# ===== Unknowns and systems =====

@dataclass(frozen=True)
class DerivationUnknowns:
    """Column layout of X[a, i, j, v, k] for the multiplicity indices in module_v"""
    n_points: int
    base_dim: int
    sectors: tuple
    module_v: tuple

    @property
    def local_dim(self) -> int:
        return len(self.module_v)

    @property
    def ncols(self) -> int:
        d = self.base_dim
        return self.n_points * d * d * self.local_dim * d

    def column(self, a: int, i: int, j: int, lv: int, k: int) -> int:
        d = self.base_dim
        return (((a * d + i) * d + j) * self.local_dim + lv) * d + k

    def decode(self, col: int) -> tuple[int, int, int, int, int]:
        d, V = self.base_dim, self.local_dim
        col, k = divmod(col, d)
        col, lv = divmod(col, V)
        col, j = divmod(col, d)
        a, i = divmod(col, d)
        return a, i, j, lv, k


@dataclass
class ConstraintSystem:
    """Leibniz constraint matrix with provenance"""
    matrix: SparseMatrix
    unknowns: DerivationUnknowns
    module: SplitBimodule
    instantiations: int
    empty_dropped: int
    duplicates_dropped: int
    assembly_seconds: float = 0.0

    @property
    def rows(self) -> int:
        return self.matrix.nrows

    def to_dict(self) -> dict:
        return {
            'unknowns': self.unknowns.ncols,
            'instantiations': self.instantiations,
            'rows_after_dedup': self.matrix.nrows,
            'empty_rows_dropped': self.empty_dropped,
            'duplicate_rows_dropped': self.duplicates_dropped,
            'nnz': self.matrix.nnz,
            'sectors': [f"{b}{c}" for b, c in self.unknowns.sectors],
            'equation': 'expanded from Δ[x∘y] = Δ[x]·y + x·Δ[y]',
        }


def _grid(shape: tuple[int, ...]) -> list[np.ndarray]:
    return [g.ravel() for g in np.indices(shape, dtype=np.int64)]


def assemble_leibniz_system(algebra: AlgebraSpec, module: SplitBimodule,
                            v_indices: Sequence[int] | None = None) -> ConstraintSystem:
    """
    Leibniz system for derivations algebra → module

    Args:
        algebra: The n-point algebra the module is built over
        module: Split bimodule J ⊗ V ⊗ J
        v_indices: Multiplicity indices to include (default all)

    Returns:
        ConstraintSystem with empty and duplicate rows dropped

    Raises:
        DimensionMismatchError: if the module acts by a different algebra
    """
    if not algebra.same_as(module.algebra):
        raise DimensionMismatchError(f"module acts by {module.algebra.name}, not {algebra.name}")
    started = time.perf_counter()
    v_indices = tuple(range(module.multiplicity_dim)) if v_indices is None else tuple(v_indices)
    sectors = tuple(module.sector_of(v) for v in v_indices)
    n, d, V = module.n_points, module.base.dim, len(v_indices)
    nd = n * d
    unknowns = DerivationUnknowns(n, d, sectors, v_indices)
    b_idx = np.array([b - 1 for b, _ in sectors], dtype=np.int64)
    c_idx = np.array([c - 1 for _, c in sectors], dtype=np.int64)

    tensor = module.base.int_tensor
    I, M, Q = (x.astype(np.int64) for x in np.nonzero(tensor))
    vals = tensor[I, M, Q]
    t = I.size

    def row_of(x, y, j, lv, k):
        return (((x * nd + y) * d + j) * V + lv) * d + k

    # [a = a'] Σ_q f(i,m,q) X[a,q,j,v,k]
    a_, t_, j_, l_, k_ = _grid((n, t, d, V, d))
    rows1 = row_of(a_ * d + I[t_], a_ * d + M[t_], j_, l_, k_)
    cols1 = unknowns.column(a_, Q[t_], j_, l_, k_)
    nums1 = vals[t_]

    # -[c = a'] Σ_k' f(k',m,k) X[a,i,j,v,k']
    x_, t_, j_, l_ = _grid((nd, t, d, V))
    y_ = c_idx[l_] * d + M[t_]
    rows2 = row_of(x_, y_, j_, l_, Q[t_])
    cols2 = unknowns.column(x_ // d, x_ % d, j_, l_, I[t_])
    nums2 = -vals[t_]

    # -[b = a] Σ_j' f(i,j',j) X[a',m,j',v,k]
    y_, t_, k_, l_ = _grid((nd, t, d, V))
    x_ = b_idx[l_] * d + I[t_]
    rows3 = row_of(x_, y_, Q[t_], l_, k_)
    cols3 = unknowns.column(y_ // d, y_ % d, M[t_], l_, k_)
    nums3 = -vals[t_]

    instantiations = nd * nd * d * V * d
    raw = SparseMatrix.from_coo(
        instantiations, unknowns.ncols,
        np.concatenate([rows1, rows2, rows3]),
        np.concatenate([cols1, cols2, cols3]),
        np.concatenate([nums1, nums2, nums3]),
        sum_duplicates=True,
    )
    matrix, empty, duplicates = deduplicate_rows(raw)
    elapsed = time.perf_counter() - started
    logger.info(f"📐 Leibniz system: {instantiations} instantiations → {matrix.nrows} rows × "
                f"{unknowns.ncols} unknowns ({empty} empty, {duplicates} duplicate) in {elapsed:.1f}s")
    return ConstraintSystem(matrix, unknowns, module, instantiations, empty, duplicates, elapsed)


# ===== Derivation maps =====

def ansatz_vector(unknowns: DerivationUnknowns, lv: int, identity: Sequence[tuple[int, Fraction]]) -> dict[int, Fraction]:
    """Δ_v[e^{(a)i}] = [a = b] e_i ⊗ v ⊗ e⁰ - [a = c] e⁰ ⊗ v ⊗ e_i for sector v = (b, c)"""
    b, c = unknowns.sectors[lv]
    out: dict[int, Fraction] = {}
    for a in range(unknowns.n_points):
        for i in range(unknowns.base_dim):
            for t, value in identity:
                if a == b - 1:
                    col = unknowns.column(a, i, i, lv, t)
                    out[col] = out.get(col, 0) + value
                if a == c - 1:
                    col = unknowns.column(a, i, t, lv, i)
                    out[col] = out.get(col, 0) - value
    return {k: Fraction(v) for k, v in out.items() if v}


def to_module_vectors(unknowns: DerivationUnknowns, module: SplitBimodule,
                      vector: Mapping[int, Fraction]) -> dict[int, dict[int, Fraction]]:
    """Regroup a kernel vector as {algebra basis index x: Δ[e_x] as module vector}"""
    d = unknowns.base_dim
    out: dict[int, dict[int, Fraction]] = {}
    for col, value in vector.items():
        a, i, j, lv, k = unknowns.decode(col)
        out.setdefault(a * d + i, {})[module.index(j, unknowns.module_v[lv], k)] = value
    return out


def delta_operator(delta: Mapping[int, Mapping[int, Fraction]], module_dim: int, algebra_dim: int) -> LinearOperator:
    """Matrix of Δ: column x is Δ[e_x]"""
    return LinearOperator.from_entries((module_dim, algebra_dim),
                                       {(r, x): v for x, column in delta.items() for r, v in column.items()})


def verify_derivation(left: ModuleAction, right: ModuleAction,
                      delta: Mapping[int, Mapping[int, Fraction]]) -> dict:
    """
    Evaluate Δ[x∘y] - Δ[x]·y - x·Δ[y] on every basis pair

    Args:
        left, right: Left and right module actions over the same algebra
        delta: {basis index: Δ[e_x] as sparse module vector}

    Returns:
        dict: passed, checked pairs, violation count, first witness,
            and whether Δ kills the identity
    """
    spec = left.algebra
    dim = spec.dim
    D = delta_operator(delta, left.module_dim, dim)
    violations = []
    for y in range(dim):
        # column x holds Δ[e_x∘e_y] - Δ[e_x]·e_y
        partial = D @ spec.basis_right_operators[y] - right.operators[y] @ D
        dy = delta.get(y, {})
        columns: dict[int, dict[int, Fraction]] = {}
        for (r, c), v in partial.entries().items():
            columns.setdefault(c, {})[r] = v
        for x in range(dim):
            expected = left.operators[x].apply_sparse(dy) if dy else {}
            column = columns.get(x, {})
            keys = set(column) | set(expected)
            if any(column.get(r, 0) != expected.get(r, 0) for r in keys):
                violations.append((x, y))
    identity = {i: v for i, v in spec.identity}
    image = D.apply_sparse(identity)
    return {
        'passed': not violations,
        'checked': dim * dim,
        'violations': len(violations),
        'witness': list(violations[0]) if violations else None,
        'kills_identity': not image,
    }


# ===== Solving =====

@dataclass
class DerivationSolution:
    """Certified derivation kernel and its κ-parametrization"""
    certificate: KernelCertificate
    system: ConstraintSystem
    parametrization: dict
    verification: dict
    ansatz_spans_kernel: bool
    cross_sector_vanishing: bool

    @property
    def kernel_dim(self) -> int:
        return self.certificate.kernel_dim

    def to_dict(self) -> dict:
        return {
            'kernel_dim': self.kernel_dim,
            'parameters': sorted(self.parametrization),
            'ansatz_spans_kernel': self.ansatz_spans_kernel,
            'cross_sector_vanishing': self.cross_sector_vanishing,
            'verification': self.verification,
            'system': self.system.to_dict(),
            'certificate': self.certificate.to_dict(),
        }


def _cross_sector_ok(unknowns: DerivationUnknowns, vectors: Sequence[Mapping[int, Fraction]]) -> bool:
    for vector in vectors:
        for col, value in vector.items():
            a, _, _, lv, _ = unknowns.decode(col)
            if value and a + 1 not in unknowns.sectors[lv]:
                return False
    return True


def solve_derivation_space(system: ConstraintSystem, threads: int | None = None) -> DerivationSolution:
    """
    Certified kernel of a Leibniz system, seeded with one ansatz derivation per sector

    Every ansatz derivation and every kernel basis vector is re-verified by
    direct Leibniz evaluation, independent of the constraint matrix.

    Raises:
        InconclusiveCertificateError: bounds still apart after every prime
    """
    unknowns = system.unknowns
    module = system.module
    identity = module.base.identity
    parametrization = {}
    for lv, (b, c) in enumerate(unknowns.sectors):
        vector = ansatz_vector(unknowns, lv, identity)
        if vector:
            name = f"kappa_{b}{c}"
            if name in parametrization:
                name = f"{name}_{unknowns.module_v[lv]}"
            parametrization[name] = vector
    certificate = solve_kernel(system.matrix, list(parametrization.values()), threads=threads)

    results = []
    for vector in list(parametrization.values()) + certificate.kernel_basis:
        results.append(verify_derivation(module.left, module.right, to_module_vectors(unknowns, module, vector)))
    verification = {
        'derivations_checked': len(results),
        'passed': all(r['passed'] for r in results),
        'kills_identity': all(r['kills_identity'] for r in results),
        'first_failure': next((r for r in results if not r['passed']), None),
    }
    spans = rank_of_span(parametrization.values(), unknowns.ncols) == certificate.kernel_dim
    vanishing = _cross_sector_ok(unknowns, certificate.kernel_basis)
    status = "✅" if verification['passed'] else "❌"
    logger.info(f"{status} Derivation kernel dimension {certificate.kernel_dim} "
                f"({len(parametrization)} ansatz parameters, spans kernel: {spans})")
    return DerivationSolution(certificate, system, parametrization, verification, spans, vanishing)


def parse_sector_pattern(pattern: str, n: int) -> dict[Sector, int]:
    """
    Sector dimensions from 'all', 'diag', 'offdiag' or a list like '11,12:2,21'

    Raises:
        IncompatibleOperandsError: malformed pattern or sector out of range
    """
    pattern = (pattern or 'all').strip()
    if pattern == 'all':
        return {(b, c): 1 for b in range(1, n + 1) for c in range(1, n + 1)}
    if pattern == 'diag':
        return {(b, b): 1 for b in range(1, n + 1)}
    if pattern == 'offdiag':
        return {(b, c): 1 for b in range(1, n + 1) for c in range(1, n + 1) if b != c}
    dims: dict[Sector, int] = {}
    for item in pattern.split(','):
        label, _, count = item.strip().partition(':')
        if len(label) != 2 or not label.isdigit():
            raise IncompatibleOperandsError(f"bad sector '{item}' (expected e.g. 12 or 12:2)")
        b, c = int(label[0]), int(label[1])
        if not (1 <= b <= n and 1 <= c <= n):
            raise IncompatibleOperandsError(f"sector {label} outside 1..{n}")
        dims[(b, c)] = dims.get((b, c), 0) + (int(count) if count else 1)
    return dims


@dataclass
class NPointResult:
    """Decomposed per-sector solve, with the optional monolithic cross-check"""
    n_points: int
    sector_dims: dict
    sectors: list
    monolithic: DerivationSolution | None
    agreement: bool | None

    @property
    def kernel_dim(self) -> int:
        return sum(s.kernel_dim for s in self.sectors)

    def to_dict(self) -> dict:
        return {
            'n_points': self.n_points,
            'sector_dims': {f"{b}{c}": v for (b, c), v in sorted(self.sector_dims.items())},
            'kernel_dim': self.kernel_dim,
            'sectors': [s.to_dict() for s in self.sectors],
            'cross_sector_vanishing': all(s.cross_sector_vanishing for s in self.sectors),
            'verified': all(s.verification['passed'] for s in self.sectors),
            'monolithic': self.monolithic.to_dict() if self.monolithic else None,
            'agreement': self.agreement,
        }


def solve_n_point(n: int, sector_dims: Mapping[Sector, int] | None = None, cross_check: bool | None = None,
                  base: AlgebraSpec | None = None, threads: int | None = None) -> NPointResult:
    """
    Derivations of the n-point algebra into J ⊗ V ⊗ J

    Args:
        n: Number of points
        sector_dims: {(b, c): dim V^{bc}} (default one copy of R per sector)
        cross_check: Also solve the monolithic system (default: n = 2)
        base: Factor algebra (default J3(O))
        threads: Worker threads for modular elimination
    """
    sector_dims = dict(sector_dims or parse_sector_pattern('all', n))
    module = build_split_bimodule(n, sector_dims, base)
    solutions = []
    for v in range(module.multiplicity_dim):
        logger.info(f"🧮 Sector {module.sector_of(v)} (multiplicity index {v})")
        system = assemble_leibniz_system(module.algebra, module, [v])
        solutions.append(solve_derivation_space(system, threads))
    cross_check = (n == 2) if cross_check is None else cross_check
    monolithic = agreement = None
    if cross_check:
        logger.info("🧮 Monolithic cross-check")
        monolithic = solve_derivation_space(assemble_leibniz_system(module.algebra, module), threads)
        agreement = monolithic.kernel_dim == sum(s.kernel_dim for s in solutions)
        if not agreement:
            logger.error(f"❌ Monolithic kernel {monolithic.kernel_dim} disagrees with the sector sum")
    return NPointResult(n, module.sector_dims, solutions, monolithic, agreement)


# ===== Inner derivations =====

@dataclass
class InnerDerivationSpan:
    """Span of the commutators [π(e_i), π(e_j)], i < j"""
    dim: int
    basis: list
    generators: int
    kills_identity: bool | None

    def to_dict(self) -> dict:
        return {'dim': self.dim, 'generators': self.generators, 'kills_identity': self.kills_identity}


def inner_derivation_span(algebra: AlgebraSpec, action: ModuleAction | None = None,
                          threads: int | None = None) -> InnerDerivationSpan:
    """
    Span of [S_{e_i}, S_{e_j}] (or [π(e_i), π(e_j)] for a given action)

    Commutators are formed on worker threads; they enter the echelon basis
    in (i, j) order.

    Returns:
        InnerDerivationSpan with an echelon (triangular) basis of flattened operators
    """
    ops = action.operators if action is not None else algebra.basis_left_operators
    module_dim = ops[0].shape[0]
    echelon = EchelonBasis(module_dim * module_dim)
    identity = {i: v for i, v in algebra.identity} if module_dim == algebra.dim else None
    kills = True if identity is not None else None
    pairs = [(i, j) for i in range(len(ops)) for j in range(i + 1, len(ops))]

    def bracket(pair):
        return commutator(ops[pair[0]], ops[pair[1]])

    workers = config.resolve_threads(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            deltas = list(pool.map(bracket, pairs))
    else:
        deltas = [bracket(pair) for pair in pairs]
    for delta in deltas:
        if delta.is_zero():
            continue
        if identity is not None and delta.apply_sparse(identity):
            kills = False
        echelon.insert(delta.as_vector())
    logger.info(f"✅ Inner derivation span: dimension {len(echelon)} from {len(pairs)} commutators")
    return InnerDerivationSpan(len(echelon), echelon.rows(), len(pairs), kills)


# ===== Universal one-forms =====

@dataclass
class UniversalSpan:
    """Bimodule generated by the images Δ[e^{(a)i}] inside J ⊗ R^{n²} ⊗ J"""
    n_points: int
    dim: int
    ambient_dim: int
    seed_rank: int
    closure: dict | None

    @property
    def full(self) -> bool:
        return self.dim == self.ambient_dim

    def to_dict(self) -> dict:
        return {
            'n_points': self.n_points,
            'dim': self.dim,
            'ambient_dim': self.ambient_dim,
            'seed_rank': self.seed_rank,
            'full': self.full,
            # the mod-p rank of integral vectors bounds the rank over Q from below
            'exact_over_q': self.full or (self.closure or {}).get('field') == 'Q',
            'closure': self.closure,
        }


def universal_seeds(module: SplitBimodule) -> list[dict[int, Fraction]]:
    """Δ[e^{(a)i}] = Σ_c (e_i ⊗^{ac} e⁰ - e⁰ ⊗^{ca} e_i) as module vectors"""
    d = module.base.dim
    identity = module.base.identity
    seeds = []
    for a in range(1, module.n_points + 1):
        for i in range(d):
            vec: dict[int, Fraction] = {}
            for v in range(module.multiplicity_dim):
                b, c = module.sector_of(v)
                for t, value in identity:
                    if b == a:
                        key = module.index(i, v, t)
                        vec[key] = vec.get(key, 0) + value
                    if c == a:
                        key = module.index(t, v, i)
                        vec[key] = vec.get(key, 0) - value
            seeds.append({k: Fraction(x) for k, x in vec.items() if x})
    return seeds


def universal_oneform_span(n: int, seeds_only: bool = False, base: AlgebraSpec | None = None,
                           modulus: int | None = None, threads: int | None = None) -> UniversalSpan:
    """
    Close the seeds Δ[e^{(a)i}] under π_L and π_R

    The closure runs mod the first configured prime unless modulus = 0
    (exact over Q).
    """
    if n < 1:
        raise IncompatibleOperandsError(f"need at least one point, got n = {n}")
    module = build_split_bimodule(n, {(b, c): 1 for b in range(1, n + 1) for c in range(1, n + 1)}, base)
    seeds = universal_seeds(module)
    seed_rank = rank_of_span(seeds, module.dim)
    logger.info(f"📐 Universal one-form seeds: {len(seeds)} vectors of rank {seed_rank}")
    if seeds_only:
        return UniversalSpan(n, seed_rank, module.dim, seed_rank, None)
    if modulus is None:
        modulus = config.PRIMES[0]
    generators = list(module.left.operators) + list(module.right.operators)
    closure = span_closure(seeds, generators, module.dim, modulus=modulus or None, threads=threads)
    return UniversalSpan(n, closure.dim, module.dim, seed_rank, closure.to_dict())
