#!/usr/bin/env python3
"""
Connes Distance for jordan-spectral

States on the two-point algebra, the Gram-normalized operator norm of
[D, π(a)], and the distance

    d(x, y) = sup { |ρ_x(a) - ρ_y(a)| : ||[D, π(a)]|| ≤ 1 }

The sup is scale invariant as a ratio (ρ_x - ρ_y)(a) / ||[D, π(a)]||, so
every path below produces a direction a and the ratio is evaluated with
the same norm routine. Paths:
    restricted  a = (α p, β q) over an angle grid
    analytic    a = (p - e⁰/ν, -(q - e⁰/ν))
    numerical   L-BFGS-B ascent on the ratio from seeded random starts
    sdp         max (ρ_x - ρ_y)(a) s.t. sigma_max(Y(a)) ≤ 1 with cvxpy
Floating point enters only in this module.
"""

from __future__ import annotations

import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import cvxpy as cp
import numpy as np
from scipy import linalg as sla
from scipy import optimize as sopt

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import config
from errors import ConvergenceError, DegenerateDiracError, IncompatibleOperandsError, NonIdempotentError
from algebra.algebra_core import AlgebraElement, AlgebraSpec, is_idempotent, jordan_trace, product
from algebra.operators import commutator
from algebra.surds import ONE, QuadraticSurd
from geometry.spectral_triple import DiracOperator, TwoPointRep, build_two_point_rep

logger = logging.getLogger(__name__)

_SURD_ROOTS = {1: ONE, 2: QuadraticSurd.sqrt2(), 3: QuadraticSurd.sqrt3(), 6: QuadraticSurd.sqrt6()}


# ===== States =====

@dataclass
class StateFunctional:
    """
    Linear functional ρ on the n-point algebra, stored by its values on the basis

    support lists (factor, idempotent, weight) for states built from idempotents.
    """
    algebra: AlgebraSpec = field(repr=False)
    weights: tuple
    label: str = 'state'
    support: tuple = field(default=(), repr=False)

    def __call__(self, a: AlgebraElement) -> Fraction:
        if not a.algebra.same_as(self.algebra):
            raise IncompatibleOperandsError("state and element live in different algebras")
        return sum((w * c for w, c in zip(self.weights, a.coeffs) if w and c), Fraction(0))

    def normalization(self) -> Fraction:
        return self(self.algebra.identity_element())

    def is_positive_on(self, samples: Sequence[AlgebraElement]) -> bool:
        """ρ(b∘b) ≥ 0 on every sample"""
        return all(self(product(b, b)) >= 0 for b in samples)

    def vector(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])


def _factor_offset(rep: TwoPointRep, factor: int) -> int:
    if not 1 <= factor <= rep.n_points:
        raise IncompatibleOperandsError(f"factor {factor} outside 1..{rep.n_points}")
    return (factor - 1) * rep.base.dim


def pure_state(factor: int, idempotent: AlgebraElement, rep: TwoPointRep | None = None) -> StateFunctional:
    """
    ρ(b) = Tr[p ∘ b_factor] for a primitive idempotent p of the base algebra

    Raises:
        NonIdempotentError: unless p∘p = p and Tr[p] = 1
    """
    rep = rep or build_two_point_rep()
    if not idempotent.algebra.same_as(rep.base):
        raise IncompatibleOperandsError("idempotent must live in the factor algebra")
    if not is_idempotent(idempotent):
        raise NonIdempotentError("p ∘ p ≠ p")
    if jordan_trace(idempotent) != 1:
        raise NonIdempotentError(f"Tr[p] = {jordan_trace(idempotent)}, expected 1 for a primitive idempotent")
    offset = _factor_offset(rep, factor)
    weights = [Fraction(0)] * rep.algebra.dim
    for k in range(rep.base.dim):
        weights[offset + k] = jordan_trace(product(idempotent, rep.base.basis_element(k)))
    return StateFunctional(rep.algebra, tuple(weights), f"pure({factor})", ((factor, idempotent, Fraction(1)),))


def mixed_state(states: Sequence[StateFunctional], weights: Sequence) -> StateFunctional:
    """
    Convex combination Σ t_i ρ_i

    Raises:
        IncompatibleOperandsError: negative weights, weights not summing to 1,
            or states over different algebras
    """
    weights = [Fraction(w) for w in weights]
    if len(weights) != len(states) or not states:
        raise IncompatibleOperandsError("one weight per state is required")
    if any(w < 0 for w in weights) or sum(weights) != 1:
        raise IncompatibleOperandsError("weights must be non-negative and sum to 1")
    algebra = states[0].algebra
    if any(not s.algebra.same_as(algebra) for s in states):
        raise IncompatibleOperandsError("states live in different algebras")
    combined = [sum((t * s.weights[k] for s, t in zip(states, weights)), Fraction(0)) for k in range(algebra.dim)]
    support = tuple((f, p, w * t) for s, t in zip(states, weights) for f, p, w in s.support)
    return StateFunctional(algebra, tuple(combined), 'mixed', support)


# ===== Norms =====

class _GramFrame:
    """Y = Lᵀ C L^{-T} with G = L Lᵀ, so ||C||_G = ||Y||_2"""

    def __init__(self, rep: TwoPointRep) -> None:
        self.L = np.linalg.cholesky(rep.gram.to_dense_float())

    def normalize(self, C: np.ndarray) -> np.ndarray:
        right = sla.solve_triangular(self.L, C.T, lower=True).T
        return self.L.T @ right


def _power_norm(Y: np.ndarray, tolerance: float, max_iter: int, seed: int) -> float:
    M = Y.T @ Y
    if not np.any(M):
        return 0.0
    v = np.random.default_rng(seed).standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    residual = math.inf
    lam = 0.0
    for _ in range(max_iter):
        w = M @ v
        lam = float(v @ w)
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= tolerance * max(lam, 1e-300):
            return math.sqrt(max(lam, 0.0))
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps", residual)


def commutator_norm(D: DiracOperator, a: AlgebraElement, rep: TwoPointRep | None = None,
                    tolerance: float | None = None) -> float:
    """
    ||[D, π(a)]|| in the Gram inner product

    Power iteration on YᵀY until the Rayleigh residual is below
    NORM_TOLERANCE relative; cross-checked against an SVD.

    Raises:
        ConvergenceError: iteration cap reached (carries the residual)
    """
    rep = rep or build_two_point_rep()
    tolerance = tolerance or getattr(config, 'NORM_TOLERANCE', 1e-9)
    C = commutator(D.operator(), rep.action.action(a)).to_dense_float()
    Y = _GramFrame(rep).normalize(C)
    value = _power_norm(Y, tolerance, getattr(config, 'POWER_ITERATION_MAX', 20000),
                        getattr(config, 'DISTANCE_SEED', 1729))
    svd = float(np.linalg.norm(Y, 2)) if Y.size else 0.0
    if abs(value - svd) > 1e-6 * max(1.0, svd):
        logger.warning(f"⚠️  Power iteration norm {value} differs from SVD norm {svd}")
    return value


def check_norm_formula(D: DiracOperator, rep: TwoPointRep | None = None,
                             samples: Sequence[tuple] | None = None, tolerance: float = 1e-6) -> dict:
    """
    Compare ||[D, π(αp, βp)]|| with max{κα, κβ, κ(α-β)} for the first diagonal idempotent p

    Returns:
        dict with whether the formula holds on the positive orthant and
        everywhere, and the largest deviation
    """
    rep = rep or build_two_point_rep()
    kappa = D.kappa
    if kappa is None:
        raise IncompatibleOperandsError("the formula is stated for a κ-parametrized Dirac operator")
    if samples is None:
        values = (-2, -1, Fraction(-1, 2), 0, Fraction(1, 2), 1, 2)
        samples = [(x, y) for x in values for y in values]
    frame = _GramFrame(rep)
    op = D.operator()
    p = min(rep.base.identity)[0]
    rows = []
    for alpha, beta in samples:
        coeffs = [Fraction(0)] * rep.algebra.dim
        coeffs[p] = Fraction(alpha)
        coeffs[rep.base.dim + p] = Fraction(beta)
        C = commutator(op, rep.action.action(rep.algebra.element(coeffs))).to_dense_float()
        measured = float(np.linalg.norm(frame.normalize(C), 2))
        claimed = float(max(kappa * alpha, kappa * beta, kappa * (Fraction(alpha) - Fraction(beta))))
        rows.append((Fraction(alpha), Fraction(beta), measured, claimed))
    ok = [abs(m - c) <= tolerance for _, _, m, c in rows]
    orthant = [k for k, (x, y, _, _) in enumerate(rows) if x >= 0 and y >= 0]
    worst = max(rows, key=lambda r: abs(r[2] - r[3]))
    return {
        'kappa': str(kappa),
        'samples': len(rows),
        'holds_everywhere': all(ok),
        'holds_positive_orthant': all(ok[k] for k in orthant),
        'max_deviation': abs(worst[2] - worst[3]),
        'worst_sample': {'alpha': str(worst[0]), 'beta': str(worst[1]),
                         'measured': worst[2], 'formula': worst[3]},
    }


# ===== Distance =====

@dataclass
class DistanceQuery:
    state_x: StateFunctional
    state_y: StateFunctional
    dirac: DiracOperator
    tolerance: float = field(default_factory=lambda: getattr(config, 'DISTANCE_TOLERANCE', 1e-6))
    restarts: int = field(default_factory=lambda: getattr(config, 'DISTANCE_RESTARTS', 32))
    seed: int = field(default_factory=lambda: getattr(config, 'DISTANCE_SEED', 1729))

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.restarts < 1:
            raise ValueError("at least one restart is required")


@dataclass
class DistanceResult:
    distance: float
    maximizer: list
    norm_at_max: float
    paths: dict
    inverse_kappa: float
    analytic_exact: QuadraticSurd | None
    agreement: dict
    findings: list
    seed: int
    restarts: int

    def to_dict(self) -> dict:
        return {
            'distance': self.distance,
            'maximizer': self.maximizer,
            'norm_at_max': self.norm_at_max,
            'paths': self.paths,
            'inverse_kappa': self.inverse_kappa,
            'analytic_exact': self.analytic_exact.to_json() if self.analytic_exact is not None else None,
            'paths_agreement': self.agreement,
            'findings': self.findings,
            'seed': self.seed,
            'restarts': self.restarts,
        }


class _RatioProblem:
    """(w·a) / ||Y(a)||_2 with Y(a) = Σ a_k Y_k"""

    def __init__(self, D: DiracOperator, rep: TwoPointRep, w: np.ndarray) -> None:
        frame = _GramFrame(rep)
        op = D.operator()
        self.Y = np.stack([frame.normalize(commutator(op, p).to_dense_float()) for p in rep.action.operators])
        self.w = w
        self.dim = w.size

    def sigma(self, a: np.ndarray) -> float:
        return float(np.linalg.norm(np.tensordot(a, self.Y, axes=1), 2))

    def ratio(self, a: np.ndarray) -> float:
        s = self.sigma(a)
        return abs(float(self.w @ a)) / s if s > 1e-12 else 0.0

    def objective(self, a: np.ndarray) -> tuple[float, np.ndarray]:
        Ya = np.tensordot(a, self.Y, axes=1)
        U, S, Vt = np.linalg.svd(Ya)
        s = S[0]
        if s < 1e-12:
            return 0.0, np.zeros_like(a)
        wa = float(self.w @ a)
        ds = np.einsum('i,kij,j->k', U[:, 0], self.Y, Vt[0])
        value = wa / s
        grad = (self.w * s - wa * ds) / (s * s)
        return -value, -grad

    def tight(self, a: np.ndarray) -> np.ndarray:
        """Rescale so ||Y(a)|| = 1 and w·a ≥ 0"""
        s = self.sigma(a)
        a = a / s
        return a if self.w @ a >= 0 else -a


def _restricted_path(problem: _RatioProblem, px: np.ndarray, py: np.ndarray) -> tuple[float, np.ndarray]:
    grid = getattr(config, 'RESTRICTED_FAMILY_GRID', 720)
    best, best_a = 0.0, px
    for theta in np.linspace(0.0, math.pi, grid, endpoint=False):
        a = math.cos(theta) * px + math.sin(theta) * py
        r = problem.ratio(a)
        if r > best:
            best, best_a = r, a
    return best, best_a


def _ascent(problem: _RatioProblem, seed: int) -> tuple[float, np.ndarray]:
    start = np.random.default_rng(seed).standard_normal(problem.dim)
    start /= np.linalg.norm(start)
    result = sopt.minimize(problem.objective, start, jac=True, method='L-BFGS-B',
                           options={'maxiter': 2000, 'ftol': 1e-15, 'gtol': 1e-12})
    return problem.ratio(result.x), result.x


def _sdp_path(problem: _RatioProblem) -> tuple[float, np.ndarray] | None:
    m, N = problem.dim, problem.Y.shape[1]
    a = cp.Variable(m)
    flat = problem.Y.reshape(m, N * N)
    constraint = cp.sigma_max(cp.reshape(flat.T @ a, (N, N), order='C')) <= 1
    prob = cp.Problem(cp.Maximize(problem.w @ a), [constraint])
    for solver in ('CLARABEL', 'SCS'):
        if solver not in cp.installed_solvers():
            continue
        try:
            prob.solve(solver=solver)
        except cp.error.SolverError as exc:
            logger.warning(f"⚠️  {solver} failed: {exc}")
            continue
        if prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) and a.value is not None:
            return problem.ratio(a.value), np.asarray(a.value)
    logger.warning("⚠️  No convex solver reached an optimal status; SDP path skipped")
    return None


def _embed(rep: TwoPointRep, factor: int, element: AlgebraElement, sign: int = 1) -> np.ndarray:
    out = np.zeros(rep.algebra.dim)
    offset = _factor_offset(rep, factor)
    out[offset:offset + rep.base.dim] = [sign * float(c) for c in element.coeffs]
    return out


def _single_support(state: StateFunctional):
    if len(state.support) == 1 and state.support[0][2] == 1:
        return state.support[0][0], state.support[0][1]
    return None


def connes_distance(query: DistanceQuery, rep: TwoPointRep | None = None, threads: int | None = None) -> DistanceResult:
    """
    Distance between two states for the Dirac operator of the query

    Returns:
        DistanceResult with the best value over every path, its maximizer
        rescaled so the norm constraint is tight, and per-path values

    Raises:
        DegenerateDiracError: D = 0 (points at infinite distance)
    """
    rep = rep or build_two_point_rep()
    D = query.dirac
    if D.is_zero():
        raise DegenerateDiracError("degenerate Dirac: points at infinite distance")
    w = query.state_x.vector() - query.state_y.vector()
    problem = _RatioProblem(D, rep, w)
    paths: dict[str, float | None] = {}
    candidates: dict[str, np.ndarray] = {}

    sx, sy = _single_support(query.state_x), _single_support(query.state_y)
    analytic_exact = None
    if sx and sy:
        (fx, p), (fy, q) = sx, sy
        px, py = _embed(rep, fx, p), _embed(rep, fy, q)
        paths['restricted'], candidates['restricted'] = _restricted_path(problem, px, py)
        nu = rep.base.degree
        e0 = rep.base.identity_element()
        a = _embed(rep, fx, p - e0 * Fraction(1, nu)) + _embed(rep, fy, q - e0 * Fraction(1, nu), -1)
        paths['analytic'], candidates['analytic'] = problem.ratio(a), a
        kappa = D.kappa
        if fx != fy and p == q and kappa and (nu - 1) in _SURD_ROOTS:
            analytic_exact = _SURD_ROOTS[nu - 1] * Fraction(2) * (1 / abs(kappa))

    workers = config.resolve_threads(threads)
    seeds = [query.seed + k for k in range(query.restarts)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda s: _ascent(problem, s), seeds))
    else:
        runs = [_ascent(problem, s) for s in seeds]
    best_run = max(range(len(runs)), key=lambda k: runs[k][0])
    paths['numerical'], candidates['numerical'] = runs[best_run]

    sdp = _sdp_path(problem)
    paths['sdp'] = None if sdp is None else sdp[0]
    if sdp is not None:
        candidates['sdp'] = sdp[1]

    winner = max(candidates, key=lambda k: paths[k])
    maximizer = problem.tight(candidates[winner])
    distance = float(w @ maximizer)
    norm = _power_norm(np.tensordot(maximizer, problem.Y, axes=1), getattr(config, 'NORM_TOLERANCE', 1e-9),
                       getattr(config, 'POWER_ITERATION_MAX', 20000), query.seed)

    tol = query.tolerance
    inv_kappa = float(1 / abs(D.kappa)) if D.kappa else math.inf
    agreement = {
        'winner': winner,
        'numerical_vs_best': abs(paths['numerical'] - distance) <= tol,
        'sdp_vs_best': None if paths['sdp'] is None else abs(paths['sdp'] - distance) <= tol,
        'analytic_vs_best': None if 'analytic' not in paths else abs(paths['analytic'] - distance) <= tol,
        'constraint_tight': abs(norm - 1.0) <= tol,
        'within_inverse_kappa': distance <= inv_kappa + tol,
    }
    findings = []
    if distance > inv_kappa + tol:
        findings.append(f"supremum {distance:.12g} exceeds 1/κ = {inv_kappa:.12g}")
    if 'restricted' in paths and paths['restricted'] > inv_kappa + tol:
        findings.append(f"the (αp, βq) family alone reaches {paths['restricted']:.12g}")
    if analytic_exact is not None and abs(float(analytic_exact) - distance) <= tol:
        findings.append(f"supremum matches the closed form {analytic_exact}")
    logger.info(f"✅ Connes distance {distance:.12g} ({winner} path), 1/κ = {inv_kappa:.12g}")
    return DistanceResult(distance, [float(x) for x in maximizer], norm, paths, inv_kappa, analytic_exact,
                          agreement, findings, query.seed, query.restarts)
