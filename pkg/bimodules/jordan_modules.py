#!/usr/bin/env python3
"""
Jordan Modules for jordan-spectral

Module actions π: A → End(M), the Jordan-module axiom sweeps, split
bimodules J ⊗ V ⊗ J over the n-point algebra, free bimodules J ⊗ R^k with
identified actions, and classification of bimodule homomorphisms.
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

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import config
from errors import DimensionMismatchError, EmptyModuleError, HomIntertwiningError, IncompatibleOperandsError
from algebra.algebra_core import AlgebraElement, AlgebraSpec, build_j3o, direct_sum
from algebra.operators import LinearOperator, commutator, exact_matmul, lcm_many
from linalg.exact_linalg import SparseMatrix, rank_of_span, solve_kernel

logger = logging.getLogger(__name__)

Sector = tuple[int, int]


@dataclass(frozen=True)
class ModuleAction:
    """Linear map π: A → End(M), stored as π(e_i) for every basis element"""
    algebra: AlgebraSpec = field(repr=False)
    module_dim: int
    operators: tuple[LinearOperator, ...] = field(repr=False)
    name: str = 'module'

    def __post_init__(self) -> None:
        if len(self.operators) != self.algebra.dim:
            raise DimensionMismatchError(
                f"{len(self.operators)} operators for a {self.algebra.dim}-dimensional algebra")
        for op in self.operators:
            if op.shape != (self.module_dim, self.module_dim):
                raise DimensionMismatchError(f"operator shape {op.shape} on a {self.module_dim}-dimensional module")

    def action(self, a: AlgebraElement) -> LinearOperator:
        """π(a) = Σ a_i π(e_i)"""
        if not a.algebra.same_as(self.algebra):
            raise IncompatibleOperandsError("element is not in the acting algebra")
        total = LinearOperator.zero(self.module_dim)
        for i, c in enumerate(a.coeffs):
            if c:
                total = total + self.operators[i].scale(c)
        return total

    def common_denominator(self) -> int:
        return lcm_many(op.den for op in self.operators)


def regular_action(spec: AlgebraSpec) -> ModuleAction:
    """a ↦ S_a on the algebra itself"""
    return ModuleAction(spec, spec.dim, spec.basis_left_operators, name=f"regular {spec.name}")


# ===== Axiom sweeps =====

@dataclass
class AxiomReport:
    """Outcome of the linearized Jordan-module axiom sweeps"""
    passed: bool
    method: str
    mult1_checked: int = 0
    mult1_violations: int = 0
    mult1_witness: tuple | None = None
    jordact_checked: int = 0
    jordact_violations: int = 0
    jordact_witness: tuple | None = None

    def to_dict(self) -> dict:
        return {
            'passed': self.passed,
            'method': self.method,
            'mult1': {'checked': self.mult1_checked, 'violations': self.mult1_violations,
                      'witness': list(self.mult1_witness) if self.mult1_witness else None},
            'jordact': {'checked': self.jordact_checked, 'violations': self.jordact_violations,
                        'witness': list(self.jordact_witness) if self.jordact_witness else None},
        }


def _dense_stack(action: ModuleAction) -> tuple[np.ndarray, int]:
    den = action.common_denominator()
    stack = np.stack([op.matrix.toarray() * (den // op.den) for op in action.operators])
    return stack.astype(np.int64), den


def _dense_axioms(action: ModuleAction, stop_at_first: bool) -> AxiomReport:
    spec = action.algebra
    tensor = spec.int_tensor
    s = spec.scale
    d, m = spec.dim, action.module_dim
    P, dp = _dense_stack(action)
    tensor_rows = sp.csr_matrix(tensor.reshape(d * d, d))
    # Q[x, y] = π(e_x ∘ e_y), scaled by dp·s
    Q = np.asarray(tensor_rows @ P.reshape(d, m * m)).reshape(d, d, m, m)
    report = AxiomReport(passed=True, method='dense')
    upper = np.triu(np.ones((d, d), dtype=bool))

    for x in range(d):
        px, qx = P[x], Q[x]
        total = exact_matmul(px, Q) - exact_matmul(Q, px)
        total += exact_matmul(P[:, None], qx[None, :]) - exact_matmul(qx[None, :], P[:, None])
        total += exact_matmul(P[None, :], qx[:, None]) - exact_matmul(qx[:, None], P[None, :])
        mask = np.any(total != 0, axis=(2, 3)) & upper
        mask[:x, :] = False
        report.mult1_checked += int(upper[x:, x:].sum())
        hits = np.argwhere(mask)
        if hits.size:
            report.mult1_violations += len(hits)
            if report.mult1_witness is None:
                report.mult1_witness = (x, int(hits[0][0]), int(hits[0][1]))
            if stop_at_first:
                break

    if not (stop_at_first and report.mult1_violations):
        PP = exact_matmul(P[:, None], P[None, :])
        QT = Q.transpose(1, 0, 2, 3)
        for a in range(d):
            t1 = exact_matmul(PP[a][:, None], P[None, :])
            t2 = exact_matmul(PP.transpose(1, 0, 2, 3), P[a])
            ac = sp.csr_matrix(tensor[a]) @ Q.reshape(d, d * m * m)
            t3 = np.asarray(ac).reshape(d, d, m, m).transpose(1, 0, 2, 3)
            t4 = exact_matmul(Q[a][:, None], P[None, :])
            t5 = exact_matmul(QT, P[a])
            t6 = exact_matmul(Q[a][None, :], P[:, None])
            # common scale dp³·s²
            residual = (t1 + t2) * (s * s) + t3 * (dp * dp) - (t4 + t5 + t6) * (dp * s)
            mask = np.any(residual != 0, axis=(2, 3))
            mask[:, :a] = False
            report.jordact_checked += d * (d - a)
            hits = np.argwhere(mask)
            if hits.size:
                report.jordact_violations += len(hits)
                if report.jordact_witness is None:
                    report.jordact_witness = (a, int(hits[0][0]), int(hits[0][1]))
                if stop_at_first:
                    break

    report.passed = report.mult1_violations == 0 and report.jordact_violations == 0
    return report


class _SparseProducts:
    """Scaled integer CSR matrices π(e_i), π(e_x∘e_y) and π(e_a)π(e_b), built on demand"""

    def __init__(self, action: ModuleAction) -> None:
        self.spec = action.algebra
        self.dp = action.common_denominator()
        self.P = [op.matrix * (self.dp // op.den) for op in action.operators]
        self.m = action.module_dim
        self._Q: dict = {}
        self._PP: dict = {}
        self._zero = sp.csr_matrix((self.m, self.m), dtype=np.int64)

    def Q(self, x: int, y: int) -> sp.csr_matrix:
        key = (x, y)
        if key not in self._Q:
            total = self._zero
            for k in np.flatnonzero(self.spec.int_tensor[x, y]):
                total = total + self.P[k] * int(self.spec.int_tensor[x, y, k])
            self._Q[key] = sp.csr_matrix(total)
        return self._Q[key]

    def PP(self, a: int, b: int) -> sp.csr_matrix:
        key = (a, b)
        if key not in self._PP:
            self._PP[key] = self.P[a] @ self.P[b]
        return self._PP[key]

    def QQ(self, a: int, c: int, b: int) -> sp.csr_matrix:
        """π((e_a ∘ e_c) ∘ e_b), scaled dp·s²"""
        total = self._zero
        row = self.spec.int_tensor[a, c]
        for q in np.flatnonzero(row):
            total = total + self.Q(q, b) * int(row[q])
        return total


def _is_zero(matrix: sp.spmatrix) -> bool:
    matrix = sp.csr_matrix(matrix)
    matrix.eliminate_zeros()
    return matrix.nnz == 0


def _sparse_axioms(action: ModuleAction, stop_at_first: bool) -> AxiomReport:
    spec = action.algebra
    d = spec.dim
    s = spec.scale
    cache = _SparseProducts(action)
    P = cache.P
    dp = cache.dp
    report = AxiomReport(passed=True, method='sparse')

    def comm(x, y):
        return x @ y - y @ x

    done = False
    for x in range(d):
        for y in range(x, d):
            for z in range(y, d):
                report.mult1_checked += 1
                total = comm(P[x], cache.Q(y, z)) + comm(P[y], cache.Q(x, z)) + comm(P[z], cache.Q(x, y))
                if not _is_zero(total):
                    report.mult1_violations += 1
                    report.mult1_witness = report.mult1_witness or (x, y, z)
                    if stop_at_first:
                        done = True
                        break
            if done:
                break
        if done:
            break

    if not done:
        for a in range(d):
            for c in range(a, d):
                for b in range(d):
                    report.jordact_checked += 1
                    lhs = (cache.PP(a, b) @ P[c] + cache.PP(c, b) @ P[a]) * (s * s) + cache.QQ(a, c, b) * (dp * dp)
                    rhs = (cache.Q(a, b) @ P[c] + cache.Q(c, b) @ P[a] + cache.Q(a, c) @ P[b]) * (dp * s)
                    if not _is_zero(lhs - rhs):
                        report.jordact_violations += 1
                        report.jordact_witness = report.jordact_witness or (a, b, c)
                        if stop_at_first:
                            done = True
                            break
                if done:
                    break
            if done:
                break

    report.passed = report.mult1_violations == 0 and report.jordact_violations == 0
    return report


def check_module_axioms(action: ModuleAction, stop_at_first: bool = False) -> AxiomReport:
    """
    Sweep the linearized Jordan-module axioms over basis triples

    mult1:   [π(x), π(y∘z)] + [π(y), π(x∘z)] + [π(z), π(x∘y)] = 0, x ≤ y ≤ z
    jordact: π(a)π(b)π(c) + π(c)π(b)π(a) + π((a∘c)∘b)
             = π(a∘b)π(c) + π(c∘b)π(a) + π(a∘c)π(b), a ≤ c, all b

    Args:
        action: Module action to check
        stop_at_first: Stop at the first violation

    Returns:
        AxiomReport with violation counts and first witnesses
    """
    d, m = action.algebra.dim, action.module_dim
    dense_limit = getattr(config, 'DENSE_AXIOM_MAX_DIM', 96)
    if m <= dense_limit and d * d * m * m <= 30_000_000:
        report = _dense_axioms(action, stop_at_first)
    else:
        report = _sparse_axioms(action, stop_at_first)
    status = "✅" if report.passed else "❌"
    logger.info(f"{status} Module axioms for {action.name}: mult1 {report.mult1_violations} violations, "
                f"jordact {report.jordact_violations} violations ({report.method})")
    return report


def check_associative_rep(action: ModuleAction) -> dict:
    """Check π(a∘b) = ½(π(a)π(b) + π(b)π(a)) on basis pairs"""
    cache = _SparseProducts(action)
    d = action.algebra.dim
    s = action.algebra.scale
    violations = []
    for a in range(d):
        for b in range(a, d):
            lhs = cache.Q(a, b) * (2 * cache.dp)
            rhs = (cache.PP(a, b) + cache.PP(b, a)) * s
            if not _is_zero(lhs - rhs):
                violations.append((a, b))
    return {
        'passed': not violations,
        'checked': d * (d + 1) // 2,
        'violations': len(violations),
        'witness': list(violations[0]) if violations else None,
    }


# ===== Split and free bimodules =====

def sector_list(sector_dims: Mapping[Sector, int]) -> list[Sector]:
    """One sector label per multiplicity basis vector, sectors in sorted order"""
    out = []
    for sector in sorted(sector_dims):
        out.extend([sector] * int(sector_dims[sector]))
    return out


def _diagonal(values: Sequence[int]) -> LinearOperator:
    return LinearOperator(sp.diags(np.asarray(values, dtype=np.int64), format='csr'))


@dataclass
class SplitBimodule:
    """
    J ⊗ V ⊗ J over A = J ⊕ ... ⊕ J (n copies) with V = ⊕ V^{bc}

    Basis h ⊗ v ⊗ k has index (h·dimV + v)·d + k. Factor a acts on the left
    leg of sectors (a, c) and on the right leg of sectors (b, a).
    """
    n_points: int
    base: AlgebraSpec
    algebra: AlgebraSpec
    sector_dims: dict
    sectors: list
    left: ModuleAction
    right: ModuleAction

    @property
    def dim(self) -> int:
        return self.left.module_dim

    @property
    def multiplicity_dim(self) -> int:
        return len(self.sectors)

    @property
    def base_dim(self) -> int:
        return self.base.dim

    def index(self, h: int, v: int, k: int) -> int:
        return (h * self.multiplicity_dim + v) * self.base.dim + k

    def sector_of(self, v: int) -> Sector:
        return self.sectors[v]

    def multiplicity_index(self, i: int) -> int:
        """Slot v of the basis vector with index i"""
        return (i // self.base.dim) % self.multiplicity_dim

    def actions(self) -> list[ModuleAction]:
        return [self.left, self.right]

    def embed_gamma(self, gamma: LinearOperator, source: SplitBimodule | None = None) -> LinearOperator:
        """id ⊗ Γ ⊗ id"""
        ident = LinearOperator.identity(self.base.dim)
        return ident.kron(gamma).kron(ident)

    def leg_embedding(self, left_leg: LinearOperator, gamma: LinearOperator,
                      right_leg: LinearOperator) -> LinearOperator:
        return left_leg.kron(gamma).kron(right_leg)


@dataclass
class FreeBimodule:
    """J ⊗ R^k with identified left and right actions a·(h ⊗ v) = (a∘h) ⊗ v"""
    base: AlgebraSpec
    multiplicity: int
    action: ModuleAction

    @property
    def algebra(self) -> AlgebraSpec:
        return self.base

    @property
    def dim(self) -> int:
        return self.action.module_dim

    @property
    def multiplicity_dim(self) -> int:
        return self.multiplicity

    @property
    def left(self) -> ModuleAction:
        return self.action

    @property
    def right(self) -> ModuleAction:
        return self.action

    def sector_of(self, v: int) -> Sector:
        return (1, 1)

    def multiplicity_index(self, i: int) -> int:
        return i % self.multiplicity

    def actions(self) -> list[ModuleAction]:
        return [self.action]

    def embed_gamma(self, gamma: LinearOperator, source=None) -> LinearOperator:
        return LinearOperator.identity(self.base.dim).kron(gamma)

    def leg_embedding(self, left_leg: LinearOperator, gamma: LinearOperator, right_leg=None) -> LinearOperator:
        return left_leg.kron(gamma)


def build_split_bimodule(n: int, sector_dims: Mapping[Sector, int],
                         base: AlgebraSpec | None = None) -> SplitBimodule:
    """
    Split bimodule J ⊗ V ⊗ J over the n-point algebra

    Args:
        n: Number of points (factors of the algebra)
        sector_dims: {(b, c): dim V^{bc}} with 1 ≤ b, c ≤ n
        base: Factor algebra J (default J3(O))

    Raises:
        EmptyModuleError: if every sector is empty
    """
    if n < 1:
        raise IncompatibleOperandsError(f"need at least one point, got n = {n}")
    dims = {tuple(k): int(v) for k, v in sector_dims.items() if int(v) > 0}
    for b, c in dims:
        if not (1 <= b <= n and 1 <= c <= n):
            raise IncompatibleOperandsError(f"sector ({b}, {c}) outside 1..{n}")
    if not dims:
        raise EmptyModuleError("every sector of V is empty")
    base = base or build_j3o()
    algebra = base if n == 1 else direct_sum([base] * n, name=f"{base.name}^{n}")
    sectors = sector_list(dims)
    d = base.dim
    ident = LinearOperator.identity(d)
    left_ops, right_ops = [], []
    for a in range(1, n + 1):
        left_proj = _diagonal([1 if b == a else 0 for b, _ in sectors])
        right_proj = _diagonal([1 if c == a else 0 for _, c in sectors])
        left_block = left_proj.kron(ident)
        right_block = ident.kron(right_proj)
        for i in range(d):
            left_ops.append(base.basis_left_operators[i].kron(left_block))
            right_ops.append(right_block.kron(base.basis_right_operators[i]))
    dim = d * len(sectors) * d
    label = ','.join(f"{b}{c}:{v}" for (b, c), v in sorted(dims.items()))
    left = ModuleAction(algebra, dim, tuple(left_ops), name=f"π_L on J⊗V⊗J [{label}]")
    right = ModuleAction(algebra, dim, tuple(right_ops), name=f"π_R on J⊗V⊗J [{label}]")
    logger.info(f"📐 Split bimodule n={n}, sectors [{label}], dimension {dim}")
    return SplitBimodule(n, base, algebra, dims, sectors, left, right)


def build_free_bimodule(k: int, base: AlgebraSpec | None = None) -> FreeBimodule:
    """J ⊗ R^k with a ↦ S_a ⊗ id"""
    if k < 1:
        raise EmptyModuleError("free bimodule needs k ≥ 1")
    base = base or build_j3o()
    ident = LinearOperator.identity(k)
    ops = tuple(op.kron(ident) for op in base.basis_left_operators)
    return FreeBimodule(base, k, ModuleAction(base, base.dim * k, ops, name=f"J⊗R^{k}"))


def symmetrized_action(module: SplitBimodule) -> ModuleAction:
    """π_S = ½(π_L + π_R)"""
    ops = tuple((l + r).scale(Fraction(1, 2)) for l, r in zip(module.left.operators, module.right.operators))
    return ModuleAction(module.algebra, module.dim, ops, name='π_S = ½(π_L + π_R)')


def check_split_compatibility(module: SplitBimodule) -> dict:
    """[π_L(a), π_R(b)] = 0 for all basis pairs"""
    d = module.algebra.dim
    violations = []
    for i in range(d):
        for j in range(d):
            if not commutator(module.left.operators[i], module.right.operators[j]).is_zero():
                violations.append((i, j))
    return {
        'passed': not violations,
        'checked': d * d,
        'violations': len(violations),
        'witness': list(violations[0]) if violations else None,
    }


# ===== Homomorphisms =====

@dataclass
class BimoduleHom:
    """Bimodule map φ: M → N; gamma is the multiplicity map when φ = id ⊗ Γ ⊗ id"""
    operator: LinearOperator
    gamma: LinearOperator | None


@dataclass
class HomClassification:
    """Basis of Hom_A(M, N)"""
    basis: list
    method: str
    sector_preserving: bool
    gamma_form: bool
    certificate: dict | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_dict(self) -> dict:
        gammas = []
        for hom in self.basis:
            if hom.gamma is not None:
                gammas.append({f"{w},{v}": str(x) for (w, v), x in sorted(hom.gamma.entries().items())})
        return {
            'dim': self.dim,
            'method': self.method,
            'sector_preserving': self.sector_preserving,
            'gamma_form': self.gamma_form,
            'gammas': gammas,
            'certificate': self.certificate,
        }


def _intertwiner_system(sources: Sequence[LinearOperator], targets: Sequence[LinearOperator],
                        m: int, n: int) -> SparseMatrix:
    """Rows of A_N φ - φ A_M = 0 for φ (n×m, row-major unknowns)"""
    blocks = []
    for a_m, a_n in zip(sources, targets):
        den = lcm_many((a_m.den, a_n.den))
        left = sp.kron(a_n.matrix * (den // a_n.den), sp.identity(m, dtype=np.int64, format='csr'))
        right = sp.kron(sp.identity(n, dtype=np.int64, format='csr'), (a_m.matrix * (den // a_m.den)).T)
        blocks.append(sp.csr_matrix(left - right))
    stacked = sp.vstack(blocks, format='coo')
    return SparseMatrix.from_coo(stacked.shape[0], stacked.shape[1], stacked.row, stacked.col, stacked.data,
                                 sum_duplicates=True)


def commutant(operators: Sequence[LinearOperator], threads: int | None = None) -> list[LinearOperator]:
    """Basis of {X : [X, A] = 0 for every A}"""
    dim = operators[0].shape[0]
    system = _intertwiner_system(operators, operators, dim, dim)
    certificate = solve_kernel(system, threads=threads)
    return [LinearOperator.from_vector(v, (dim, dim)) for v in certificate.kernel_basis]


def _intertwines(phi: LinearOperator, source, target) -> tuple | None:
    for side, (src, tgt) in enumerate(zip(source.actions(), target.actions())):
        for i, (a_m, a_n) in enumerate(zip(src.operators, tgt.operators)):
            if not (a_n @ phi - phi @ a_m).is_zero():
                return (side, i)
    return None


def _extract_gamma(phi: LinearOperator, source, target) -> LinearOperator | None:
    """Read Γ off φ and return it when φ = id ⊗ Γ ⊗ id"""
    d = source.base.dim
    w_dim, v_dim = target.multiplicity_dim, source.multiplicity_dim
    step_t = d if isinstance(target, SplitBimodule) else 1
    step_s = d if isinstance(source, SplitBimodule) else 1
    entries = {}
    for (r, c), value in phi.entries().items():
        if r < w_dim * step_t and c < v_dim * step_s and r % step_t == 0 and c % step_s == 0:
            entries[(r // step_t, c // step_s)] = value
    gamma = LinearOperator.from_entries((w_dim, v_dim), entries)
    return gamma if target.embed_gamma(gamma) == phi else None


def _sector_preserving(phi: LinearOperator, source, target) -> bool:
    """No entry of φ links basis vectors from different sectors"""
    return all(target.sector_of(target.multiplicity_index(r)) == source.sector_of(source.multiplicity_index(c))
               for (r, c) in phi.entries())


def classify_bimodule_homs(source, target, method: str = 'auto', threads: int | None = None) -> HomClassification:
    """
    Basis of bimodule maps φ: M → N with φ(x·m·y) = x·φ(m)·y

    Methods:
        brute      kernel of the full intertwiner system
        factorized sector-preserving candidates c_L ⊗ E_wv ⊗ c_R built from
                   the leg commutants, each verified exactly
        auto       brute up to BRUTE_FORCE_MAX_UNKNOWNS unknowns

    Raises:
        IncompatibleOperandsError: modules over different algebras or of different kinds
        HomIntertwiningError: a factorized candidate fails verification
    """
    if not source.algebra.same_as(target.algebra) or type(source) is not type(target):
        raise IncompatibleOperandsError("modules must share the acting algebra and kind")
    unknowns = source.dim * target.dim
    if method == 'auto':
        method = 'brute' if unknowns <= getattr(config, 'BRUTE_FORCE_MAX_UNKNOWNS', 20000) else 'factorized'
    logger.info(f"🧮 Classifying homs {source.dim} → {target.dim} ({unknowns} unknowns, {method})")

    basis: list[BimoduleHom] = []
    certificate = None
    if method == 'brute':
        src_ops, tgt_ops = [], []
        for src, tgt in zip(source.actions(), target.actions()):
            src_ops.extend(src.operators)
            tgt_ops.extend(tgt.operators)
        system = _intertwiner_system(src_ops, tgt_ops, source.dim, target.dim)
        cert = solve_kernel(system, threads=threads)
        certificate = cert.to_dict()
        for v in cert.kernel_basis:
            phi = LinearOperator.from_vector(v, (target.dim, source.dim))
            basis.append(BimoduleHom(phi, _extract_gamma(phi, source, target)))
    elif method == 'factorized':
        split = isinstance(source, SplitBimodule)
        left_comm = commutant(list(source.base.basis_left_operators), threads)
        right_comm = commutant(list(source.base.basis_right_operators), threads) if split else [None]
        ident = LinearOperator.identity(source.base.dim)
        matched, rejected = 0, 0
        for w in range(target.multiplicity_dim):
            for v in range(source.multiplicity_dim):
                unit = LinearOperator.from_entries((target.multiplicity_dim, source.multiplicity_dim), {(w, v): 1})
                if target.sector_of(w) != source.sector_of(v):
                    cross = target.leg_embedding(ident, unit, ident if split else None)
                    if _intertwines(cross, source, target) is None:
                        raise HomIntertwiningError(f"cross-sector E_{w}{v} intertwines")
                    rejected += 1
                    continue
                matched += 1
                for cl in left_comm:
                    for cr in right_comm:
                        phi = target.leg_embedding(cl, unit, cr)
                        witness = _intertwines(phi, source, target)
                        if witness is not None:
                            raise HomIntertwiningError(f"candidate E_{w}{v} fails to intertwine", witness)
                        basis.append(BimoduleHom(phi, _extract_gamma(phi, source, target)))
        # Hom over B_L ⊗ B_R is ⊕_bc C_L ⊗ Hom(V^bc, W^bc) ⊗ C_R
        upper_bound = len(left_comm) * len(right_comm) * matched
        candidate_rank = rank_of_span((h.operator.as_vector() for h in basis), target.dim * source.dim)
        conclusive = candidate_rank == upper_bound == len(basis)
        if not conclusive:
            logger.warning(f"⚠️ Factorized candidates have rank {candidate_rank}, bound is {upper_bound}")
        certificate = {
            'leg_commutant_dims': [len(left_comm), len(right_comm)],
            'sector_pairs': matched,
            'cross_sector_rejected': rejected,
            'verified_candidates': len(basis),
            'candidate_rank': candidate_rank,
            'upper_bound': upper_bound,
            'conclusive': conclusive,
        }
    else:
        raise IncompatibleOperandsError(f"unknown method '{method}'")

    gamma_form = all(h.gamma is not None for h in basis)
    preserving = all(_sector_preserving(h.operator, source, target) for h in basis)
    logger.info(f"✅ Hom space dimension {len(basis)} ({method})")
    return HomClassification(basis, method, preserving, gamma_form, certificate)
