#!/usr/bin/env python3
"""
Algebra Core for jordan-spectral

Finite-dimensional algebras given by exact structure constants
e_i ∘ e_j = Σ_k f^{ij}_k e_k, their elements and multiplication operators,
identity checks, the algebra file format, and the concrete algebras used
throughout: J3(O) in the e-basis, its n-point direct sums, and small
associative and special Jordan test algebras.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import permutations
from typing import Mapping, Sequence

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from errors import (
    AlgebraFileError,
    DuplicateTripletError,
    FlagViolationError,
    IdentityAxiomError,
    IncompatibleOperandsError,
    NonIdempotentError,
)
from algebra.octonion import OCTONION_DIM, Octonion, conjugation_signs, octonion_tensor
from algebra.operators import LinearOperator, exact_matmul, lcm_many
from algebra.surds import INV_SQRT2, ONE, SQRT_THREE_HALVES, ZERO, QuadraticSurd

logger = logging.getLogger(__name__)

KNOWN_FLAGS = ('commutative', 'unital', 'jordan', 'associative', 'power_assoc_low')
IDENTITY_KINDS = ('jordan', 'associative', 'commutative', 'power_assoc_low')

J3O_NAME = 'J3(O)'
J3O_DIM = 27
# e-basis positions of the diagonal idempotents e1, e10, e19
J3O_DIAGONAL = (0, 9, 18)


@dataclass(frozen=True)
class AlgebraSpec:
    """
    Finite-dimensional algebra over Q

    Attributes:
        dim: Dimension d
        structure_constants: {(i, j, k): f^{ij}_k}, nonzero values only
        basis_names: One name per basis element
        identity: Sparse coefficients of the unit element as (index, value) pairs
        flags: Declared properties (subset of KNOWN_FLAGS)
        name: Human readable name
        trace_form: Sparse coefficients of the linear trace functional
        degree: ν = Tr(identity), when a trace form is known
    """
    dim: int
    structure_constants: Mapping[tuple[int, int, int], Fraction]
    basis_names: tuple[str, ...]
    identity: tuple[tuple[int, Fraction], ...]
    flags: frozenset = frozenset()
    name: str = 'algebra'
    trace_form: tuple[tuple[int, Fraction], ...] = ()
    degree: int | None = None

    @property
    def identity_index(self) -> int | None:
        """Basis index of the unit when the unit is a single basis element"""
        if len(self.identity) == 1 and self.identity[0][1] == 1:
            return self.identity[0][0]
        return None

    @cached_property
    def scale(self) -> int:
        """Common denominator D of all structure constants"""
        return lcm_many(v.denominator for v in self.structure_constants.values())

    @cached_property
    def int_tensor(self) -> np.ndarray:
        """Integer tensor D·f[i, j, k]"""
        tensor = np.zeros((self.dim,) * 3, dtype=np.int64)
        scale = self.scale
        for (i, j, k), v in self.structure_constants.items():
            tensor[i, j, k] = v.numerator * (scale // v.denominator)
        return tensor

    @cached_property
    def left_table(self) -> dict[int, list[tuple[int, int, Fraction]]]:
        table: dict[int, list] = {i: [] for i in range(self.dim)}
        for (i, j, k), v in sorted(self.structure_constants.items()):
            table[i].append((j, k, v))
        return table

    @cached_property
    def basis_left_operators(self) -> tuple[LinearOperator, ...]:
        """S_{e_i} for every basis element"""
        tensor = self.int_tensor
        return tuple(LinearOperator(tensor[i].T, self.scale) for i in range(self.dim))

    @cached_property
    def basis_right_operators(self) -> tuple[LinearOperator, ...]:
        """v ↦ v ∘ e_i for every basis element"""
        tensor = self.int_tensor
        return tuple(LinearOperator(tensor[:, i, :].T, self.scale) for i in range(self.dim))

    def element(self, coefficients: Sequence) -> AlgebraElement:
        return AlgebraElement(self, tuple(Fraction(c) for c in coefficients))

    def basis_element(self, i: int, scale=1) -> AlgebraElement:
        coefficients = [Fraction(0)] * self.dim
        coefficients[i] = Fraction(scale)
        return AlgebraElement(self, tuple(coefficients))

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, (Fraction(0),) * self.dim)

    def identity_element(self) -> AlgebraElement:
        coefficients = [Fraction(0)] * self.dim
        for i, v in self.identity:
            coefficients[i] = v
        return AlgebraElement(self, tuple(coefficients))

    def same_as(self, other: AlgebraSpec) -> bool:
        return self is other or self == other


@dataclass(frozen=True)
class AlgebraElement:
    """Element Σ a_i e_i of an AlgebraSpec"""
    algebra: AlgebraSpec = field(repr=False)
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.algebra.dim:
            raise IncompatibleOperandsError(
                f"element has {len(self.coeffs)} coefficients, algebra dimension is {self.algebra.dim}")

    def _check(self, other: AlgebraElement) -> None:
        if not isinstance(other, AlgebraElement) or not self.algebra.same_as(other.algebra):
            raise IncompatibleOperandsError("operands belong to different algebras")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(self.algebra, tuple(-a for a in self.coeffs))

    def __mul__(self, scalar) -> AlgebraElement:
        if isinstance(scalar, (int, Fraction)):
            return AlgebraElement(self.algebra, tuple(a * scalar for a in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def support(self) -> dict[int, Fraction]:
        return {i: a for i, a in enumerate(self.coeffs) if a}

    def __str__(self) -> str:
        names = self.algebra.basis_names
        terms = [f"{a}·{names[i]}" for i, a in enumerate(self.coeffs) if a]
        return ' + '.join(terms) if terms else '0'


# ===== Products and operators =====

def product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """
    a ∘ b by contraction with the structure constants

    Raises:
        IncompatibleOperandsError: if a and b live in different algebras
    """
    a._check(b)
    spec = a.algebra
    out = [Fraction(0)] * spec.dim
    b_coeffs = b.coeffs
    for i, ai in enumerate(a.coeffs):
        if not ai:
            continue
        for j, k, v in spec.left_table[i]:
            bj = b_coeffs[j]
            if bj:
                out[k] += ai * bj * v
    return AlgebraElement(spec, tuple(out))


def associator(a: AlgebraElement, b: AlgebraElement, c: AlgebraElement) -> AlgebraElement:
    """(a∘b)∘c - a∘(b∘c)"""
    return product(product(a, b), c) - product(a, product(b, c))


def _integer_coefficients(a: AlgebraElement) -> tuple[np.ndarray, int]:
    den = lcm_many(c.denominator for c in a.coeffs)
    return np.array([c.numerator * (den // c.denominator) for c in a.coeffs], dtype=np.int64), den


def left_mult_operator(a: AlgebraElement) -> LinearOperator:
    """S_a : v ↦ a ∘ v as a d×d matrix"""
    spec = a.algebra
    coefficients, den = _integer_coefficients(a)
    matrix = np.tensordot(coefficients, spec.int_tensor, axes=([0], [0])).T
    return LinearOperator(matrix, den * spec.scale)


def right_mult_operator(a: AlgebraElement) -> LinearOperator:
    """v ↦ v ∘ a as a d×d matrix"""
    spec = a.algebra
    coefficients, den = _integer_coefficients(a)
    matrix = np.tensordot(spec.int_tensor, coefficients, axes=([1], [0])).T
    return LinearOperator(matrix, den * spec.scale)


def is_idempotent(p: AlgebraElement) -> bool:
    return product(p, p) == p


def is_primitive_candidate(p: AlgebraElement) -> bool:
    """p∘p = p with Tr p = 1"""
    return is_idempotent(p) and jordan_trace(p) == 1


def structure_constant_values(spec: AlgebraSpec) -> list[Fraction]:
    return sorted(set(spec.structure_constants.values()))


# ===== Spec construction =====

def _spec_from_integer_tensor(tensor: np.ndarray, scale: int, **kwargs) -> AlgebraSpec:
    constants = {}
    for i, j, k in np.argwhere(tensor != 0):
        constants[(int(i), int(j), int(k))] = Fraction(int(tensor[i, j, k]), scale)
    spec = AlgebraSpec(dim=tensor.shape[0], structure_constants=constants, **kwargs)
    _check_unit(spec)
    return spec


def _j3o_basis_matrices() -> np.ndarray:
    """Integer (27, 3, 3, 8) array: the e-basis as octonionic Hermitian matrices"""
    conj = conjugation_signs()
    basis = np.zeros((J3O_DIM, 3, 3, OCTONION_DIM), dtype=np.int64)
    basis[0, 0, 0, 0] = 1
    basis[9, 1, 1, 0] = 1
    basis[18, 2, 2, 0] = 1
    for i in range(OCTONION_DIM):
        # θi at (2,3), θi* at (3,2)
        basis[1 + i, 1, 2, i] = 1
        basis[1 + i, 2, 1, i] = conj[i]
        # θi* at (1,3), θi at (3,1)
        basis[10 + i, 0, 2, i] = conj[i]
        basis[10 + i, 2, 0, i] = 1
        # θi at (1,2), θi* at (2,1)
        basis[19 + i, 0, 1, i] = 1
        basis[19 + i, 1, 0, i] = conj[i]
    return basis


def _j3o_coordinates(matrices: np.ndarray) -> np.ndarray:
    """Read e-basis coordinates off Hermitian octonionic matrices (last axes 3, 3, 8)"""
    coords = np.zeros(matrices.shape[:-3] + (J3O_DIM,), dtype=np.int64)
    coords[..., 0] = matrices[..., 0, 0, 0]
    coords[..., 9] = matrices[..., 1, 1, 0]
    coords[..., 18] = matrices[..., 2, 2, 0]
    coords[..., 1:9] = matrices[..., 1, 2, :]
    coords[..., 10:18] = matrices[..., 2, 0, :]
    coords[..., 19:27] = matrices[..., 0, 1, :]
    return coords


def j3o_basis_names() -> tuple[str, ...]:
    return tuple(f"e{i + 1}" for i in range(J3O_DIM))


@lru_cache(maxsize=None)
def build_j3o() -> AlgebraSpec:
    """
    J3(O) in the e-basis with product (XY + YX)/2

    Returns:
        AlgebraSpec: 27-dimensional, commutative, unit e1 + e10 + e19
    """
    logger.info("📐 Building J3(O) structure constants from the octonion table...")
    basis = _j3o_basis_matrices()
    octo = octonion_tensor()
    # all pairwise matrix products XY, octonion entries multiplied by the table
    products = np.einsum('nrsa,mscb,abk->nmrck', basis, basis, octo)
    doubled = products + products.transpose(1, 0, 2, 3, 4)
    coords = _j3o_coordinates(doubled)
    rebuilt = np.einsum('nmk,krcb->nmrcb', coords, basis)
    if not np.array_equal(rebuilt, doubled):
        raise ArithmeticError("J3(O) products left the Hermitian e-basis span")
    spec = _spec_from_integer_tensor(
        coords, 2,
        basis_names=j3o_basis_names(),
        identity=tuple((i, Fraction(1)) for i in J3O_DIAGONAL),
        flags=frozenset({'commutative', 'unital', 'jordan'}),
        name=J3O_NAME,
        trace_form=tuple((i, Fraction(1)) for i in J3O_DIAGONAL),
        degree=3,
    )
    logger.info(f"✅ J3(O) ready: {len(spec.structure_constants)} nonzero structure constants")
    return spec


def direct_sum(specs: Sequence[AlgebraSpec], name: str | None = None) -> AlgebraSpec:
    """
    Direct sum A = A1 ⊕ ... ⊕ An with factorwise product

    Basis element i of factor a (1-based) is named '<name>^(a)'.
    """
    constants = {}
    names = []
    identity = []
    trace = []
    offset = 0
    for a, spec in enumerate(specs, start=1):
        for (i, j, k), v in spec.structure_constants.items():
            constants[(i + offset, j + offset, k + offset)] = v
        names.extend(f"{n}^({a})" for n in spec.basis_names)
        identity.extend((i + offset, v) for i, v in spec.identity)
        trace.extend((i + offset, v) for i, v in spec.trace_form)
        offset += spec.dim
    has_trace = all(s.trace_form for s in specs)
    flags = frozenset.intersection(*(s.flags for s in specs)) if specs else frozenset()
    return AlgebraSpec(
        dim=offset,
        structure_constants=constants,
        basis_names=tuple(names),
        identity=tuple(identity),
        flags=flags,
        name=name or ' ⊕ '.join(s.name for s in specs),
        trace_form=tuple(trace) if has_trace else (),
        degree=sum(s.degree for s in specs) if has_trace and all(s.degree for s in specs) else None,
    )


def build_n_point_algebra(n: int) -> AlgebraSpec:
    """A = J3(O) ⊕ ... ⊕ J3(O), n copies"""
    if n < 1:
        raise IncompatibleOperandsError(f"need at least one point, got n = {n}")
    j3o = build_j3o()
    return j3o if n == 1 else direct_sum([j3o] * n, name=f"{J3O_NAME}^{n}")


def build_reals() -> AlgebraSpec:
    return build_real_diagonal(1)


def build_real_diagonal(n: int) -> AlgebraSpec:
    """R^n with componentwise product"""
    return AlgebraSpec(
        dim=n,
        structure_constants={(i, i, i): Fraction(1) for i in range(n)},
        basis_names=tuple(f"u{i + 1}" for i in range(n)),
        identity=tuple((i, Fraction(1)) for i in range(n)),
        flags=frozenset({'commutative', 'associative', 'unital', 'jordan'}),
        name='R' if n == 1 else f"R^{n}",
        trace_form=tuple((i, Fraction(1)) for i in range(n)),
        degree=n,
    )


def build_matrix_algebra(n: int) -> AlgebraSpec:
    """M_n(R) with the associative matrix product, E_ij at index i*n + j"""
    constants = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                constants[(i * n + j, j * n + l, i * n + l)] = Fraction(1)
    return AlgebraSpec(
        dim=n * n,
        structure_constants=constants,
        basis_names=tuple(f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)),
        identity=tuple((i * n + i, Fraction(1)) for i in range(n)),
        flags=frozenset({'associative', 'unital'}),
        name=f"M{n}(R)",
        trace_form=tuple((i * n + i, Fraction(1)) for i in range(n)),
        degree=n,
    )


def build_symmetric_matrices(n: int) -> AlgebraSpec:
    """
    J_n(R): real symmetric n×n matrices with (XY + YX)/2

    Basis: E_ii first, then F_ij = E_ij + E_ji for i < j.
    """
    pairs = [(i, i) for i in range(n)] + [(i, j) for i in range(n) for j in range(i + 1, n)]
    basis = np.zeros((len(pairs), n, n), dtype=np.int64)
    for idx, (i, j) in enumerate(pairs):
        basis[idx, i, j] = 1
        basis[idx, j, i] = 1
    products = np.einsum('aij,bjk->abik', basis, basis)
    doubled = products + products.transpose(1, 0, 2, 3)
    coords = np.stack([doubled[..., i, j] for i, j in pairs], axis=-1)
    names = tuple(f"E{i + 1}{i + 1}" if i == j else f"F{i + 1}{j + 1}" for i, j in pairs)
    return _spec_from_integer_tensor(
        coords, 2,
        basis_names=names,
        identity=tuple((i, Fraction(1)) for i in range(n)),
        flags=frozenset({'commutative', 'unital', 'jordan'}),
        name=f"J{n}(R)",
        trace_form=tuple((i, Fraction(1)) for i in range(n)),
        degree=n,
    )


BUILTIN_ALGEBRAS = {
    'j3o': build_j3o,
    'reals': build_reals,
    'r2': lambda: build_real_diagonal(2),
    'm2': lambda: build_matrix_algebra(2),
    'j2r': lambda: build_symmetric_matrices(2),
    'j3r': lambda: build_symmetric_matrices(3),
}


# ===== Identity checks =====

@dataclass
class IdentityReport:
    """Outcome of an exhaustive identity sweep over basis tuples"""
    identity: str
    passed: bool
    checked: int
    violations: int
    witness: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {
            'identity': self.identity,
            'passed': self.passed,
            'checked': self.checked,
            'violations': self.violations,
            'witness': list(self.witness) if self.witness is not None else None,
        }


def _check_unit(spec: AlgebraSpec) -> None:
    """Raise IdentityAxiomError unless the declared identity is a two-sided unit"""
    unit = np.zeros(spec.dim, dtype=object)
    for i, v in spec.identity:
        if not 0 <= i < spec.dim:
            raise IdentityAxiomError(f"identity index {i} outside 0..{spec.dim - 1}")
        unit[i] = v
    tensor = spec.int_tensor.astype(object)
    expected = np.identity(spec.dim, dtype=np.int64) * spec.scale
    left = np.tensordot(unit, tensor, axes=([0], [0]))
    right = np.tensordot(tensor, unit, axes=([1], [0]))
    for name, side in (('left', left), ('right', right)):
        bad = np.argwhere(side != expected)
        if bad.size:
            i = int(bad[0][0])
            raise IdentityAxiomError(
                f"identity fails as a {name} unit on basis element {spec.basis_names[i]}")


def _first_upper_triple(mask_ijk: np.ndarray) -> list[tuple[int, int, int]]:
    hits = np.argwhere(mask_ijk)
    return [tuple(int(x) for x in h) for h in hits if h[0] <= h[1] <= h[2]]


def _associator_tensor(tensor: np.ndarray) -> np.ndarray:
    """D²·((e_i e_j) e_k - e_i (e_j e_k)) indexed [i, j, k, n]"""
    left = np.tensordot(tensor, tensor, axes=([2], [0]))
    right = np.tensordot(tensor, tensor, axes=([2], [1])).transpose(2, 0, 1, 3)
    return left - right


def _jordan_violations(tensor: np.ndarray) -> tuple[int, list[tuple[int, int, int]]]:
    """
    Linearized Jordan identity over basis triples i ≤ j ≤ k:
    [L_i, P_jk] + [L_j, P_ik] + [L_k, P_ij] = 0 with P_xy = L_{x∘y} + L_{y∘x}
    """
    d = tensor.shape[0]
    left = np.ascontiguousarray(tensor.transpose(0, 2, 1))
    paired = np.tensordot(tensor, left, axes=([2], [0]))
    paired = paired + paired.transpose(1, 0, 2, 3)
    checked = 0
    hits: list[tuple[int, int, int]] = []
    upper = np.triu(np.ones((d, d), dtype=bool))
    for i in range(d):
        li = left[i]
        pi = paired[i]
        total = exact_matmul(li, paired) - exact_matmul(paired, li)
        total += exact_matmul(left[:, None], pi[None, :]) - exact_matmul(pi[None, :], left[:, None])
        total += exact_matmul(left[None, :], pi[:, None]) - exact_matmul(pi[:, None], left[None, :])
        mask = np.any(total != 0, axis=(2, 3)) & upper
        mask[:i, :] = False
        checked += int(upper[i:, i:].sum())
        hits.extend((i, int(j), int(k)) for j, k in np.argwhere(mask))
    return checked, hits


def check_identity(spec: AlgebraSpec, identity: str) -> IdentityReport:
    """
    Exhaustively check an identity on basis tuples

    Args:
        spec: Algebra to check
        identity: 'jordan', 'associative', 'commutative' or 'power_assoc_low'

    Returns:
        IdentityReport: pass/fail with the first violating basis tuple
    """
    if identity not in IDENTITY_KINDS:
        raise IncompatibleOperandsError(f"unknown identity '{identity}', expected one of {IDENTITY_KINDS}")
    tensor = spec.int_tensor
    d = spec.dim
    if identity == 'commutative':
        bad = np.argwhere(np.any(tensor != tensor.transpose(1, 0, 2), axis=2))
        hits = [tuple(int(x) for x in h) for h in bad]
        checked = d * d
    elif identity == 'associative':
        bad = np.any(_associator_tensor(tensor) != 0, axis=3)
        hits = [tuple(int(x) for x in h) for h in np.argwhere(bad)]
        checked = d ** 3
    elif identity == 'power_assoc_low':
        assoc = _associator_tensor(tensor)
        symmetric = sum(assoc.transpose(p + (3,)) for p in permutations(range(3)))
        hits = _first_upper_triple(np.any(symmetric != 0, axis=3))
        checked = d * (d + 1) * (d + 2) // 6
    else:
        commutative = check_identity(spec, 'commutative')
        if not commutative.passed:
            return IdentityReport('jordan', False, commutative.checked, commutative.violations,
                                  commutative.witness)
        checked, hits = _jordan_violations(tensor)
    report = IdentityReport(identity, not hits, checked, len(hits), hits[0] if hits else None)
    if report.passed:
        logger.info(f"✅ {spec.name}: {identity} holds on all {checked} basis tuples")
    else:
        logger.info(f"❌ {spec.name}: {identity} fails on {len(hits)} of {checked} tuples, first {report.witness}")
    return report


def first_nonassociative_triple(spec: AlgebraSpec) -> tuple[int, int, int] | None:
    return check_identity(spec, 'associative').witness


# ===== Algebra file format =====

def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise AlgebraFileError(message)


def _parse_rational(num, den, what: str) -> Fraction:
    _expect(isinstance(num, int) and isinstance(den, int) and not isinstance(num, bool),
            f"{what}: numerator and denominator must be integers")
    _expect(den != 0, f"{what}: zero denominator")
    return Fraction(num, den)


def parse_algebra_file(text: str) -> AlgebraSpec:
    """
    Parse and validate an algebra file (JSON)

    Required fields: dim, structure_constants ([i, j, k, num, den] entries) and
    identity_index; `identity` ([index, num, den] entries) may replace
    identity_index. Optional: basis_names, flags, name, trace_form, degree.

    Raises:
        AlgebraFileError: syntax or schema problems (with line/column for syntax)
        DuplicateTripletError: repeated (i, j, k)
        IdentityAxiomError: identity is not a two-sided unit
        FlagViolationError: a declared flag does not hold
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(exc.msg, exc.lineno, exc.colno) from exc
    _expect(isinstance(data, dict), "top level must be an object")
    dim = data.get('dim')
    _expect(isinstance(dim, int) and not isinstance(dim, bool) and dim > 0, "dim must be a positive integer")

    names = data.get('basis_names', [f"e{i + 1}" for i in range(dim)])
    _expect(isinstance(names, list) and len(names) == dim and all(isinstance(n, str) for n in names),
            f"basis_names must list {dim} strings")

    flags = data.get('flags', [])
    _expect(isinstance(flags, list) and all(f in KNOWN_FLAGS for f in flags),
            f"flags must be drawn from {list(KNOWN_FLAGS)}")

    entries = data.get('structure_constants')
    _expect(isinstance(entries, list), "structure_constants must be a list")
    constants: dict[tuple[int, int, int], Fraction] = {}
    for n, entry in enumerate(entries):
        _expect(isinstance(entry, list) and len(entry) == 5, f"structure constant #{n} must be [i, j, k, num, den]")
        i, j, k, num, den = entry
        _expect(all(isinstance(x, int) and 0 <= x < dim for x in (i, j, k)),
                f"structure constant #{n}: index out of range 0..{dim - 1}")
        if (i, j, k) in constants:
            raise DuplicateTripletError(f"structure constant ({i}, {j}, {k}) given twice")
        value = _parse_rational(num, den, f"structure constant #{n}")
        constants[(i, j, k)] = value
    constants = {key: v for key, v in constants.items() if v}

    if 'identity_index' in data:
        index = data['identity_index']
        _expect(isinstance(index, int) and 0 <= index < dim, f"identity_index must lie in 0..{dim - 1}")
        identity = ((index, Fraction(1)),)
    else:
        identity = _parse_sparse(data.get('identity'), dim, 'identity')
        _expect(bool(identity), "identity_index (or identity) is required")

    trace_form = _parse_sparse(data['trace_form'], dim, 'trace_form') if 'trace_form' in data else ()
    degree = data.get('degree')
    _expect(degree is None or (isinstance(degree, int) and degree > 0), "degree must be a positive integer")

    spec = AlgebraSpec(
        dim=dim,
        structure_constants=constants,
        basis_names=tuple(names),
        identity=identity,
        flags=frozenset(flags),
        name=data.get('name', 'algebra'),
        trace_form=trace_form,
        degree=degree,
    )
    _check_unit(spec)
    for flag in sorted(spec.flags):
        if flag in IDENTITY_KINDS:
            report = check_identity(spec, flag)
            if not report.passed:
                raise FlagViolationError(f"declared flag '{flag}' fails at basis tuple {report.witness}")
    return spec


def _parse_sparse(entries, dim: int, what: str) -> tuple[tuple[int, Fraction], ...]:
    _expect(isinstance(entries, list), f"{what} must be a list of [index, num, den]")
    out = {}
    for entry in entries:
        _expect(isinstance(entry, list) and len(entry) == 3, f"{what} entries must be [index, num, den]")
        index, num, den = entry
        _expect(isinstance(index, int) and 0 <= index < dim, f"{what} index out of range")
        value = _parse_rational(num, den, what)
        if value:
            out[index] = value
    return tuple(sorted(out.items()))


def serialize_algebra(spec: AlgebraSpec) -> str:
    """Canonical algebra file text (sorted keys, sorted structure constants)"""
    data = {
        'dim': spec.dim,
        'name': spec.name,
        'basis_names': list(spec.basis_names),
        'flags': sorted(spec.flags),
        'structure_constants': [[i, j, k, v.numerator, v.denominator]
                                for (i, j, k), v in sorted(spec.structure_constants.items())],
    }
    if spec.identity_index is not None:
        data['identity_index'] = spec.identity_index
    else:
        data['identity'] = [[i, v.numerator, v.denominator] for i, v in spec.identity]
    if spec.trace_form:
        data['trace_form'] = [[i, v.numerator, v.denominator] for i, v in spec.trace_form]
    if spec.degree is not None:
        data['degree'] = spec.degree
    return json.dumps(data, sort_keys=True, indent=1, ensure_ascii=False)


# ===== Trace form and Gram matrix =====

def jordan_trace(a: AlgebraElement) -> Fraction:
    """Tr[a]; for J3(O) the sum of the three diagonal coefficients"""
    spec = a.algebra
    if not spec.trace_form:
        raise IncompatibleOperandsError(f"{spec.name} has no trace form")
    return sum((v * a.coeffs[i] for i, v in spec.trace_form), Fraction(0))


def inner_product(a: AlgebraElement, b: AlgebraElement) -> Fraction:
    """⟨a|b⟩ = (1/ν) Tr[a∘b]"""
    spec = a.algebra
    if not spec.degree:
        raise IncompatibleOperandsError(f"{spec.name} has no degree for the trace normalization")
    return jordan_trace(product(a, b)) / spec.degree


def trace_gram_matrix(spec: AlgebraSpec) -> list[list[Fraction]]:
    """G[i][j] = (1/ν) Tr[e_i ∘ e_j]"""
    if not spec.trace_form or not spec.degree:
        raise IncompatibleOperandsError(f"{spec.name} has no trace form")
    trace = dict(spec.trace_form)
    gram = [[Fraction(0)] * spec.dim for _ in range(spec.dim)]
    for (i, j, k), v in spec.structure_constants.items():
        if k in trace:
            gram[i][j] += v * trace[k] / spec.degree
    return gram


def ldl_pivots(gram: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """
    Exact LDLᵀ pivots of a symmetric matrix (no pivoting)

    Stops after the first nonpositive pivot, which is included.
    """
    n = len(gram)
    work = [[Fraction(x) for x in row] for row in gram]
    pivots = []
    for k in range(n):
        pivot = work[k][k]
        pivots.append(pivot)
        if pivot <= 0:
            break
        for i in range(k + 1, n):
            factor = work[i][k] / pivot
            if factor:
                row_i, row_k = work[i], work[k]
                for j in range(k + 1, n):
                    if row_k[j]:
                        row_i[j] -= factor * row_k[j]
    return pivots


def is_positive_definite(gram: Sequence[Sequence[Fraction]]) -> bool:
    pivots = ldl_pivots(gram)
    return len(pivots) == len(gram) and all(p > 0 for p in pivots)


# ===== σ-basis =====

@dataclass
class SigmaBasis:
    """σ-basis of J3(O): rows are σ^i in e-basis coordinates over Q(√2, √3)"""
    rows: tuple[tuple[QuadraticSurd, ...], ...]
    orthonormal: bool
    traceless: bool
    sigma0_component_ok: bool
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.orthonormal and self.traceless and self.sigma0_component_ok

    def to_dict(self) -> dict:
        return {
            'orthonormal': self.orthonormal,
            'traceless': self.traceless,
            'sigma0_component': self.sigma0_component_ok,
            'failures': self.failures[:10],
            'matrix': [[c.to_json() for c in row] for row in self.rows],
        }


def _sigma_rows() -> list[dict[int, QuadraticSurd]]:
    rows: list[dict[int, QuadraticSurd]] = [
        {0: ONE, 9: ONE, 18: ONE},
        {0: SQRT_THREE_HALVES, 9: -SQRT_THREE_HALVES},
        {0: INV_SQRT2, 9: INV_SQRT2, 18: INV_SQRT2 * -2},
    ]
    for block in (range(1, 9), range(10, 18), range(19, 27)):
        rows.extend({i: SQRT_THREE_HALVES} for i in block)
    return rows


def sigma_basis(spec: AlgebraSpec | None = None) -> SigmaBasis:
    """
    Build the σ-basis and verify it

    Checks ⟨σ^i|σ^j⟩ = δ_ij, Tr[σ^i] = 0 for i ≥ 1, and that the σ⁰ component
    of σ^i ∘ σ^j equals δ_ij.
    """
    spec = spec or build_j3o()
    if spec.dim != J3O_DIM or not spec.degree:
        raise IncompatibleOperandsError("the σ-basis is defined for J3(O)")
    sparse_rows = _sigma_rows()
    gram = trace_gram_matrix(spec)
    trace = dict(spec.trace_form)
    failures = []

    orthonormal = True
    for i, row_i in enumerate(sparse_rows):
        for j in range(i, len(sparse_rows)):
            row_j = sparse_rows[j]
            value = ZERO
            for k, ck in row_i.items():
                for l, cl in row_j.items():
                    if gram[k][l]:
                        value = value + ck * cl * gram[k][l]
            if value != (1 if i == j else 0):
                orthonormal = False
                failures.append(('inner_product', i, j, str(value)))

    traceless = True
    for i, row in enumerate(sparse_rows[1:], start=1):
        value = sum((c * trace[k] for k, c in row.items() if k in trace), ZERO)
        if value:
            traceless = False
            failures.append(('trace', i, str(value)))

    sigma0_ok = True
    for i, row_i in enumerate(sparse_rows):
        for j in range(i, len(sparse_rows)):
            coords: dict[int, QuadraticSurd] = {}
            for k, ck in row_i.items():
                for l, cl in sparse_rows[j].items():
                    for (jj, m, v) in spec.left_table[k]:
                        if jj == l:
                            coords[m] = coords.get(m, ZERO) + ck * cl * v
            # ⟨σ⁰|x⟩ = (1/ν) Tr[x]
            component = sum((c * trace[m] for m, c in coords.items() if m in trace), ZERO) * Fraction(1, spec.degree)
            if component != (1 if i == j else 0):
                sigma0_ok = False
                failures.append(('sigma0_component', i, j, str(component)))

    rows = tuple(tuple(row.get(k, ZERO) for k in range(J3O_DIM)) for row in sparse_rows)
    return SigmaBasis(rows, orthonormal, traceless, sigma0_ok, failures)


# ===== Idempotents =====

def primitive_idempotents_standard(spec: AlgebraSpec | None = None) -> list[AlgebraElement]:
    """e1, e10, e19: the diagonal primitive idempotents of J3(O)"""
    spec = spec or build_j3o()
    if spec.dim != J3O_DIM:
        raise IncompatibleOperandsError("standard idempotents are defined for J3(O)")
    return [spec.basis_element(i) for i in J3O_DIAGONAL]


def idempotent_from_column(x: Octonion, y: Octonion, z: Octonion, spec: AlgebraSpec | None = None) -> AlgebraElement:
    """
    Rank-one element v v† of a unit octonionic column v = (x, y, z)

    Raises:
        NonIdempotentError: unless (xy)z = x(yz), |x|²+|y|²+|z|² = 1 and the
            resulting element squares to itself
    """
    spec = spec or build_j3o()
    if not ((x * y) * z - x * (y * z)).is_zero():
        raise NonIdempotentError("column entries do not associate: (xy)z ≠ x(yz)")
    if x.norm_squared() + y.norm_squared() + z.norm_squared() != 1:
        raise NonIdempotentError("column is not a unit vector")
    coords = [Fraction(0)] * J3O_DIM
    coords[0] = x.norm_squared()
    coords[9] = y.norm_squared()
    coords[18] = z.norm_squared()
    coords[1:9] = (y * z.conjugate()).coef
    coords[10:18] = (z * x.conjugate()).coef
    coords[19:27] = (x * y.conjugate()).coef
    p = spec.element(coords)
    if not is_idempotent(p):
        raise NonIdempotentError("v v† does not square to itself")
    return p
