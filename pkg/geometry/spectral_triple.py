#!/usr/bin/env python3
"""
Spectral Triple for jordan-spectral

The n-point geometry (A, H, D) with A = J ⊕ ... ⊕ J acting on H = A by
π(a) = diag(S_{a_1}, ..., S_{a_n}), the Dirac constraint solve, grading
and inner-derivation compatibility, Connes one-forms and the bimodule map
from universal one-forms onto them.

The admissibility condition [D, π(ab)] = [D, π(a)π(b)] is expanded
directly from the representation and the off-diagonal ansatz for D, with
operator composition as the product on End(H).
"""

from __future__ import annotations

import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import sympy

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import config
from errors import HomIntertwiningError, IncompatibleOperandsError
from algebra.algebra_core import AlgebraSpec, build_j3o, direct_sum, trace_gram_matrix
from algebra.operators import LinearOperator, anticommutator, commutator, exact_matmul, lcm_many
from bimodules.jordan_modules import ModuleAction, build_split_bimodule, regular_action
from derivations.derivation_solver import universal_seeds
from linalg.exact_linalg import KernelCertificate, SparseMatrix, rank_of_span, solve_kernel, span_closure

logger = logging.getLogger(__name__)


# ===== Representation =====

@dataclass
class TwoPointRep:
    """H = A = J ⊕ ... ⊕ J with ⟨h|v⟩ = (1/nν) Σ_b Tr[h_b ∘ v_b]"""
    n_points: int
    base: AlgebraSpec = field(repr=False)
    algebra: AlgebraSpec = field(repr=False)
    action: ModuleAction = field(repr=False)
    base_gram: list = field(repr=False)
    gram: LinearOperator = field(repr=False)

    @property
    def hilbert_dim(self) -> int:
        return self.action.module_dim

    def pi(self, x: int) -> LinearOperator:
        return self.action.operators[x]

    def check_symmetry(self) -> dict:
        """G π(e_x) = π(e_x)ᵀ G for every basis element"""
        bad = [x for x, op in enumerate(self.action.operators)
               if not (self.gram @ op - op.transpose() @ self.gram).is_zero()]
        return {'passed': not bad, 'checked': len(self.action.operators), 'witness': bad[0] if bad else None}


def build_n_point_rep(n: int = 2, base: AlgebraSpec | None = None) -> TwoPointRep:
    """Representation of the n-point algebra on itself"""
    if n < 1:
        raise IncompatibleOperandsError(f"need at least one point, got n = {n}")
    base = base or build_j3o()
    algebra = base if n == 1 else direct_sum([base] * n, name=f"{base.name}^{n}")
    base_gram = trace_gram_matrix(base)
    block = LinearOperator.from_rows(base_gram).scale(Fraction(1, n))
    gram = LinearOperator.block([[block if b == c else None for c in range(n)] for b in range(n)])
    action = regular_action(algebra)
    logger.info(f"📐 {n}-point representation on H of dimension {action.module_dim}")
    return TwoPointRep(n, base, algebra, action, base_gram, gram)


def build_two_point_rep(base: AlgebraSpec | None = None) -> TwoPointRep:
    return build_n_point_rep(2, base)


# ===== Dirac operator =====

def _gram_operators(base_gram: Sequence[Sequence[Fraction]]) -> tuple[LinearOperator, LinearOperator]:
    g = LinearOperator.from_rows(base_gram)
    inverse = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in base_gram]).inv()
    g_inv = LinearOperator.from_rows([[Fraction(int(x.p), int(x.q)) for x in inverse.row(r)]
                                      for r in range(inverse.rows)])
    return g, g_inv


def standard_block(base: AlgebraSpec) -> LinearOperator:
    """|e⁰⟩⟨φ0| with φ0 = Tr/ν"""
    tr = dict(base.trace_form)
    nu = base.degree
    return LinearOperator.from_entries((base.dim, base.dim),
                                       {(t, k): Fraction(v) * tr[k] / nu for t, v in base.identity for k in tr})


@dataclass
class DiracOperator:
    """
    D with off-diagonal blocks D_bc: H_c → H_b (1-based factor labels)

    kappas is set when every block is κ_bc |e⁰⟩⟨φ0|.
    """
    n_points: int
    base_dim: int
    blocks: dict
    kappas: dict | None = None

    @classmethod
    def from_kappas(cls, kappas: Mapping[tuple[int, int], Fraction], base: AlgebraSpec | None = None,
                    n: int = 2) -> DiracOperator:
        """
        Raises:
            IncompatibleOperandsError: diagonal κ or κ_bc ≠ κ_cb
        """
        base = base or build_j3o()
        kappas = {tuple(k): Fraction(v) for k, v in kappas.items()}
        for (b, c), value in kappas.items():
            if b == c and value:
                raise IncompatibleOperandsError(f"diagonal block ({b}, {c}) must vanish")
            if kappas.get((c, b), Fraction(0)) != value:
                raise IncompatibleOperandsError(f"κ_{b}{c} ≠ κ_{c}{b} breaks symmetry of D")
        unit = standard_block(base)
        blocks = {k: unit.scale(v) for k, v in kappas.items() if v}
        return cls(n, base.dim, blocks, {k: v for k, v in kappas.items() if k[0] != k[1]})

    @classmethod
    def from_kappa(cls, kappa, base: AlgebraSpec | None = None) -> DiracOperator:
        kappa = Fraction(kappa)
        return cls.from_kappas({(1, 2): kappa, (2, 1): kappa}, base)

    @classmethod
    def from_coefficients(cls, upper: LinearOperator, rep: TwoPointRep) -> DiracOperator:
        """D = [[0, M], [N, 0]] with N = g⁻¹Mᵀg, symmetric in the Gram inner product"""
        if rep.n_points != 2:
            raise IncompatibleOperandsError("coefficient form is defined for two points")
        g, g_inv = _gram_operators(rep.base_gram)
        lower = g_inv @ upper.transpose() @ g
        return cls(2, rep.base.dim, {(1, 2): upper, (2, 1): lower})

    @property
    def kappa(self) -> Fraction | None:
        return None if self.kappas is None else self.kappas.get((1, 2), Fraction(0))

    @property
    def dim(self) -> int:
        return self.n_points * self.base_dim

    def operator(self) -> LinearOperator:
        if all(b.is_zero() for b in self.blocks.values()):
            return LinearOperator.zero(self.dim)
        zero = LinearOperator.zero(self.base_dim)
        rows = [[self.blocks.get((b, c), zero) for c in range(1, self.n_points + 1)]
                for b in range(1, self.n_points + 1)]
        return LinearOperator.block(rows)

    def is_zero(self) -> bool:
        return self.operator().is_zero()


def grading(rep: TwoPointRep) -> LinearOperator:
    """γ = diag(+1, -1) on H = H_1 ⊕ H_2"""
    if rep.n_points != 2:
        raise IncompatibleOperandsError("the grading is defined for two points")
    d = rep.base.dim
    return LinearOperator(sp.diags(np.r_[np.ones(d), -np.ones(d)].astype(np.int64), format='csr'))


def grading_checks(D: DiracOperator, rep: TwoPointRep) -> dict:
    gamma = grading(rep)
    ident = LinearOperator.identity(rep.hilbert_dim)
    commuting = [x for x, op in enumerate(rep.action.operators) if not commutator(gamma, op).is_zero()]
    return {
        'gamma_squared_identity': gamma @ gamma == ident,
        'gamma_commutes_with_algebra': not commuting,
        'anticommutes_with_dirac': anticommutator(D.operator(), gamma).is_zero(),
    }


def dirac_is_symmetric(D: DiracOperator, rep: TwoPointRep) -> bool:
    op = D.operator()
    return (rep.gram @ op - op.transpose() @ rep.gram).is_zero()


# ===== Dirac constraints =====

def _defect_stack(base: AlgebraSpec) -> np.ndarray:
    """s²·(S_{e_i ∘ e_j} - S_i S_j) for every basis pair, shape (d, d, d, d)"""
    d = base.dim
    tensor = base.int_tensor
    S = np.stack([tensor[i].T for i in range(d)])
    first = np.asarray(sp.csr_matrix(tensor.reshape(d * d, d)) @ S.reshape(d, d * d)).reshape(d, d, d, d)
    return first - exact_matmul(S[:, None], S[None, :])


def _integer_matrix(rows: Sequence[Sequence[Fraction]]) -> np.ndarray:
    den = lcm_many(Fraction(x).denominator for row in rows for x in row)
    return np.array([[int(Fraction(x) * den) for x in row] for row in rows], dtype=np.int64)


def _left_rows(P: np.ndarray, d: int, offset: int):
    """Rows of P_s M = 0 over the unknowns M[t, k] (column t·d + k)"""
    s_, r_, t_ = np.nonzero(P)
    vals = P[s_, r_, t_]
    k = np.arange(d, dtype=np.int64)
    rows = ((s_[:, None] * d + r_[:, None]) * d + k[None, :]) + offset
    cols = t_[:, None] * d + k[None, :]
    return rows.ravel(), cols.ravel(), np.repeat(vals, d)


def _right_rows(Q: np.ndarray, d: int, offset: int):
    """Rows of M Q_s = 0"""
    s_, k_, c_ = np.nonzero(Q)
    vals = Q[s_, k_, c_]
    t = np.arange(d, dtype=np.int64)
    rows = ((s_[:, None] * d + t[None, :]) * d + c_[:, None]) + offset
    cols = t[None, :] * d + k_[:, None]
    return rows.ravel(), cols.ravel(), np.repeat(vals, d)


@dataclass
class DiracSolution:
    certificate: KernelCertificate
    dirac: DiracOperator | None
    matches_standard: bool
    leibniz: dict | None
    grading: dict | None
    derivation_compatibility: dict | None
    instantiations: int

    @property
    def kernel_dim(self) -> int:
        return self.certificate.kernel_dim

    def to_dict(self) -> dict:
        return {
            'kernel_dim': self.kernel_dim,
            'unknowns': self.certificate.ncols,
            'instantiations': self.instantiations,
            'kernel_is_standard_block': self.matches_standard,
            'leibniz': self.leibniz,
            'grading': self.grading,
            'derivation_compatibility': self.derivation_compatibility,
            'equation': 'derived from [D, π(ab)] = [D, π(a)π(b)] with N = g⁻¹Mᵀg',
            'certificate': self.certificate.to_dict(),
        }


def solve_dirac_constraints(rep: TwoPointRep, threads: int | None = None, checks: bool = True) -> DiracSolution:
    """
    Admissible upper blocks M of D = [[0, M], [g⁻¹Mᵀg, 0]]

    With K = π(ab) - π(a)π(b), only pairs inside one factor give K ≠ 0, and
    [D, K] = 0 splits into K M = 0, Kᵀ g M = 0 (K in factor 1) and
    M K = 0, M g⁻¹ Kᵀ = 0 (K in factor 2).
    """
    if rep.n_points != 2:
        raise IncompatibleOperandsError("Dirac constraints are assembled for two points")
    base = rep.base
    d = base.dim
    K = _defect_stack(base).reshape(d * d, d, d)
    Kt = K.transpose(0, 2, 1)
    g_int = _integer_matrix(rep.base_gram)
    g, g_inv = _gram_operators(rep.base_gram)
    g_inv_int = _integer_matrix(g_inv.to_rows())
    block = d * d * d * d
    pieces = [
        _left_rows(K, d, 0),
        _left_rows(exact_matmul(Kt, g_int), d, block),
        _right_rows(K, d, 2 * block),
        _right_rows(exact_matmul(g_inv_int, Kt), d, 3 * block),
    ]
    matrix = SparseMatrix.from_coo(4 * block, d * d,
                                   np.concatenate([p[0] for p in pieces]),
                                   np.concatenate([p[1] for p in pieces]),
                                   np.concatenate([p[2] for p in pieces]),
                                   sum_duplicates=True)
    logger.info(f"📐 Dirac system: {4 * block} instantiations, {matrix.nnz} entries, {d * d} unknowns")
    standard = standard_block(base).as_vector()
    certificate = solve_kernel(matrix, [standard], threads=threads)

    basis = certificate.kernel_basis
    matches = len(basis) == 1 and rank_of_span([basis[0], standard], d * d) == 1
    dirac = None
    leibniz = grading_report = compat = None
    if matches:
        dirac = DiracOperator.from_kappa(1, base)
        if checks:
            leibniz = check_leibniz_for_dirac(dirac, rep)
            grading_report = grading_checks(dirac, rep)
            compat = derivation_compatibility(dirac, rep)
    status = "✅" if matches else "⚠️ "
    logger.info(f"{status} Dirac kernel dimension {certificate.kernel_dim} (standard block: {matches})")
    return DiracSolution(certificate, dirac, matches, leibniz, grading_report, compat, 4 * block)


def check_leibniz_for_dirac(D: DiracOperator, rep: TwoPointRep) -> dict:
    """
    [D, π(ab)] = [D, π(a)]π(b) + π(a)[D, π(b)] on every basis pair

    Returns:
        dict with the first violating pair and the largest violating entry
    """
    op = D.operator()
    ops = rep.action.operators
    spec = rep.algebra
    violations = 0
    witness = None
    worst = Fraction(0)
    for a in range(spec.dim):
        for b in range(spec.dim):
            ab = rep.action.action(_basis_product(spec, a, b))
            lhs = commutator(op, ab)
            rhs = commutator(op, ops[a]) @ ops[b] + ops[a] @ commutator(op, ops[b])
            residual = lhs - rhs
            if not residual.is_zero():
                violations += 1
                size = residual.max_abs_entry()
                if witness is None or size > worst:
                    witness, worst = (a, b), size
    report = {
        'passed': violations == 0,
        'checked': spec.dim * spec.dim,
        'violations': violations,
        'witness': list(witness) if witness else None,
        'max_violation': str(worst),
    }
    status = "✅" if report['passed'] else "❌"
    logger.info(f"{status} Leibniz rule for D: {violations} violating pairs")
    return report


def _basis_product(spec: AlgebraSpec, a: int, b: int):
    return spec.element([Fraction(int(x), spec.scale) for x in spec.int_tensor[a, b]])


def derivation_compatibility(D: DiracOperator, rep: TwoPointRep) -> dict:
    """[D, δ] = 0 for δ = [π(e_i), π(e_j)], i < j"""
    op = D.operator()
    ops = rep.action.operators
    checked = 0
    bad = None
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            delta = commutator(ops[i], ops[j])
            if delta.is_zero():
                continue
            checked += 1
            if bad is None and not commutator(op, delta).is_zero():
                bad = (i, j)
    return {'passed': bad is None, 'checked': checked, 'witness': list(bad) if bad else None}


# ===== One-forms =====

def _flat(op: LinearOperator) -> dict[int, Fraction]:
    return op.as_vector()


def composition_generators(rep: TwoPointRep) -> tuple[list[LinearOperator], list[LinearOperator]]:
    """X ↦ π(e_x)X and X ↦ Xπ(e_x) on row-major flattened operators"""
    ident = LinearOperator.identity(rep.hilbert_dim)
    left = [op.kron(ident) for op in rep.action.operators]
    right = [ident.kron(op.transpose()) for op in rep.action.operators]
    return left, right


def _off_diagonal(index: int, hilbert_dim: int, base_dim: int) -> bool:
    r, c = divmod(index, hilbert_dim)
    return r // base_dim != c // base_dim


@dataclass
class ConnesForms:
    dim: int
    bound: int
    off_diagonal: bool
    closure: dict

    def to_dict(self) -> dict:
        return {
            'dim': self.dim,
            'off_diagonal_bound': self.bound,
            'off_diagonal': self.off_diagonal,
            # mod-p closure dimension bounds the rational one from below
            'exact_over_q': self.dim == self.bound or self.closure.get('field') == 'Q',
            'closure': self.closure,
        }


def generate_connes_oneforms(D: DiracOperator, rep: TwoPointRep, modulus: int | None = None) -> ConnesForms:
    """
    Close {[D, π(e_x)]} under left and right composition with π

    Runs mod the first configured prime (modulus = 0 for exact Q). Every
    generated operator lives in the off-diagonal blocks, so their number
    bounds the closure from above.
    """
    op = D.operator()
    N, d, n = rep.hilbert_dim, rep.base.dim, rep.n_points
    seeds = [_flat(commutator(op, p)) for p in rep.action.operators]
    seeds = [s for s in seeds if s]
    bound = N * N - n * d * d
    left, right = composition_generators(rep)
    if modulus is None:
        modulus = config.PRIMES[0]
    closure = span_closure(seeds, left + right, N * N, modulus=modulus or None, upper_bound=bound)
    off_diagonal = all(_off_diagonal(k, N, d) for row in closure.basis.rows() for k in row)
    logger.info(f"✅ Connes one-forms: dimension {closure.dim} (off-diagonal bound {bound})")
    return ConnesForms(closure.dim, bound, off_diagonal, closure.to_dict())


# ===== D as a bimodule map =====

def universal_to_connes(D: DiracOperator, rep: TwoPointRep, module) -> LinearOperator:
    """Φ(h ⊗^{bc} k) = -κ_bc E_bc ⊗ |h⟩⟨φ0(k ∘ ·)|, zero on diagonal sectors"""
    d, N = rep.base.dim, rep.hilbert_dim
    pairing = trace_gram_matrix(rep.base)
    entries = {}
    for v in range(module.multiplicity_dim):
        b, c = module.sector_of(v)
        kappa = D.kappas.get((b, c), Fraction(0))
        if b == c or not kappa:
            continue
        for h in range(d):
            for k in range(d):
                col = module.index(h, v, k)
                for l, value in enumerate(pairing[k]):
                    if value:
                        entries[(((b - 1) * d + h) * N + (c - 1) * d + l, col)] = -kappa * value
    return LinearOperator.from_entries((N * N, module.dim), entries)


@dataclass
class DiracHom:
    kernel_sectors: dict
    image_sectors: dict
    gamma: dict
    hermitian_kappas: bool
    verified: dict
    tracked: dict | None = None

    def to_dict(self) -> dict:
        return {
            'kernel_sectors': self.kernel_sectors,
            'image_sectors': self.image_sectors,
            'gamma': self.gamma,
            'hermitian_kappas': self.hermitian_kappas,
            'verified': self.verified,
            'tracked_closure': self.tracked,
        }


def dirac_as_hom(D: DiracOperator, rep: TwoPointRep, track_closure: bool = False) -> DiracHom:
    """
    The bimodule map Ω_d¹A → Ω_D¹A sending Δ[a] to [D, π(a)]

    The map is written down in closed form and verified exactly: it
    intertwines π_L with left composition and π_R with right composition,
    and it sends every seed Δ[e_x] to [D, π(e_x)]. Since the seeds generate
    the universal bimodule, no other bimodule map does this. Image and
    kernel sizes per sector are exact ranks of the sector's columns of Φ.
    With track_closure, the generator closure is replayed mod p with the
    images carried alongside, compared with the closed form, and the rank of
    the carried images is reported.

    Raises:
        IncompatibleOperandsError: D is not κ-parametrized
        HomIntertwiningError: closed form fails verification
    """
    if D.kappas is None:
        raise IncompatibleOperandsError("the hom needs a κ-parametrized Dirac operator")
    n, d = rep.n_points, rep.base.dim
    module = build_split_bimodule(n, {(b, c): 1 for b in range(1, n + 1) for c in range(1, n + 1)}, rep.base)
    phi = universal_to_connes(D, rep, module)
    left, right = composition_generators(rep)
    for side, (mod_ops, op_ops) in enumerate([(module.left.operators, left), (module.right.operators, right)]):
        for x, (m_op, o_op) in enumerate(zip(mod_ops, op_ops)):
            if not (phi @ m_op - o_op @ phi).is_zero():
                raise HomIntertwiningError(f"Φ fails to intertwine generator {x}", ('left', 'right')[side])
    op = D.operator()
    seeds = universal_seeds(module)
    for x, seed in enumerate(seeds):
        target = _flat(commutator(op, rep.action.operators[x]))
        image = phi.apply_sparse(seed)
        if image != target:
            raise HomIntertwiningError(f"Φ(Δ[e_{x}]) ≠ [D, π(e_{x})]", x)

    columns: dict[int, dict[int, Fraction]] = {}
    for (r, col), value in phi.entries().items():
        columns.setdefault(col, {})[r] = value
    kernel_sectors, image_sectors, gamma = {}, {}, {}
    for v in range(module.multiplicity_dim):
        b, c = module.sector_of(v)
        kappa = D.kappas.get((b, c), Fraction(0))
        sector_cols = (columns.get(module.index(h, v, k), {}) for h in range(d) for k in range(d))
        image = rank_of_span(sector_cols, phi.shape[0])
        label = f"{b}{c}"
        if image < d * d:
            kernel_sectors[label] = d * d - image
        if image:
            image_sectors[label] = image
        if b != c:
            gamma[label] = str(-kappa)
    hermitian = all(D.kappas.get((b, c), 0) == D.kappas.get((c, b), 0) for (b, c) in D.kappas)

    tracked = None
    if track_closure:
        tracked = _track_closure(phi, module, seeds, rep, op, left, right)
        tracked['image_rank_matches'] = tracked['image_rank'] == sum(image_sectors.values())
    logger.info(f"✅ Dirac hom: kernel sectors {sorted(kernel_sectors)}, image sectors {sorted(image_sectors)}")
    return DiracHom(kernel_sectors, image_sectors, gamma, hermitian,
                    {'intertwines': True, 'seeds_match': len(seeds)}, tracked)


def _track_closure(phi, module, seeds, rep, op, left, right) -> dict:
    prime = config.PRIMES[0]
    payloads = [_flat(commutator(op, p)) for p in rep.action.operators]
    closure = span_closure(seeds, list(module.left.operators) + list(module.right.operators), module.dim,
                           modulus=prime, seed_payloads=payloads, payload_generators=left + right)
    mismatched = 0
    carried = []
    for row, payload in closure.basis.pairs():
        if phi.apply_sparse(row, prime) != (payload or {}):
            mismatched += 1
        carried.append(payload or {})
    image_rank = rank_of_span(carried, phi.shape[0], modulus=prime)
    return {'closure': closure.to_dict(), 'rows_checked': closure.dim, 'mismatched': mismatched,
            'image_rank': image_rank}
