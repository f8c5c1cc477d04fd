#!/usr/bin/env python3
"""
Associative oracles for the derivation machinery

For small associative algebras the universal first-order calculus is
known in closed form: the one-forms are ker(m: A⊗A → A), generated as a
left module by Δ[a] = a⊗1 - 1⊗a. These checks run the same solver and
closure code used for the exceptional algebra, where the derivation space
collapses to a single parameter.
"""

from __future__ import annotations

import logging
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from algebra.algebra_core import AlgebraSpec, build_matrix_algebra, build_real_diagonal, left_mult_operator, right_mult_operator
from bimodules.jordan_modules import build_split_bimodule
from derivations.derivation_solver import assemble_leibniz_system, solve_derivation_space, verify_derivation
from linalg.exact_linalg import EchelonBasis, SparseMatrix, exact_kernel, span_closure

logger = logging.getLogger(__name__)


@dataclass
class OracleCase:
    algebra: str
    dim: int
    ker_m_dim: int
    generated_dim: int
    generated_equals_ker_m: bool
    delta_in_ker_m: bool
    delta_is_derivation: bool
    phi_is_hom: bool
    delta_phi_is_derivation: bool
    derivation_kernel_dim: int

    @property
    def passed(self) -> bool:
        return (self.generated_equals_ker_m and self.delta_in_ker_m and self.delta_is_derivation
                and self.phi_is_hom and self.delta_phi_is_derivation and self.derivation_kernel_dim > 1)

    def to_dict(self) -> dict:
        out = asdict(self)
        out['passed'] = self.passed
        return out


def multiplication_map(spec: AlgebraSpec) -> SparseMatrix:
    """m(e_h ⊗ e_k) = e_h e_k as a d × d² matrix"""
    d = spec.dim
    return SparseMatrix.from_entries(d, d * d, ((k, h * d + j, v) for (h, j, k), v in spec.structure_constants.items()))


def run_oracle(spec: AlgebraSpec, invertible: Sequence) -> OracleCase:
    """
    Run the associative checks on one algebra

    Args:
        spec: Unital associative algebra
        invertible: Coefficients of the element used as u = v in φ(h⊗k) = hu ⊗ vk
    """
    d = spec.dim
    module = build_split_bimodule(1, {(1, 1): 1}, base=spec)
    m = multiplication_map(spec)
    kernel = EchelonBasis(d * d)
    for v in exact_kernel(m):
        kernel.insert(v)

    # Δ[e_i] = e_i ⊗ 1 - 1 ⊗ e_i
    delta = {}
    for i in range(d):
        vec: dict[int, Fraction] = {}
        for t, value in spec.identity:
            vec[i * d + t] = vec.get(i * d + t, 0) + value
            vec[t * d + i] = vec.get(t * d + i, 0) - value
        delta[i] = {k: Fraction(x) for k, x in vec.items() if x}

    closure = span_closure(list(delta.values()), module.left.operators, d * d)
    generated_inside = all(kernel.contains(row) for row in closure.basis.rows())
    delta_in_ker = all(not m.residual(v) for v in delta.values() if v)
    delta_check = verify_derivation(module.left, module.right, delta)

    u = spec.element(invertible)
    phi = right_mult_operator(u).kron(left_mult_operator(u))
    phi_hom = all(
        (op @ phi - phi @ op).is_zero()
        for op in list(module.left.operators) + list(module.right.operators)
    )
    delta_phi = {x: phi.apply_sparse(v) for x, v in delta.items()}
    delta_phi_check = verify_derivation(module.left, module.right, delta_phi)

    solution = solve_derivation_space(assemble_leibniz_system(module.algebra, module))
    case = OracleCase(
        algebra=spec.name,
        dim=d,
        ker_m_dim=len(kernel),
        generated_dim=closure.dim,
        generated_equals_ker_m=generated_inside and closure.dim == len(kernel),
        delta_in_ker_m=delta_in_ker,
        delta_is_derivation=delta_check['passed'],
        phi_is_hom=phi_hom,
        delta_phi_is_derivation=delta_phi_check['passed'],
        derivation_kernel_dim=solution.kernel_dim,
    )
    status = "✅" if case.passed else "❌"
    logger.info(f"{status} Associative oracle {spec.name}: ker m {case.ker_m_dim}, "
                f"derivations {case.derivation_kernel_dim}")
    return case


def associative_oracle_suite() -> dict:
    """R² and M2(R)"""
    cases = [
        run_oracle(build_real_diagonal(2), (1, 2)),
        run_oracle(build_matrix_algebra(2), (1, 1, 0, 1)),
    ]
    return {'passed': all(c.passed for c in cases), 'cases': [c.to_dict() for c in cases]}
