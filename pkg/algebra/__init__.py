#!/usr/bin/env python3
"""
Algebra Module for jordan-spectral

Exact octonions, the 27-dimensional exceptional Jordan algebra J3(O) and
the small algebras used as oracles. Every coefficient is a Fraction; the
σ-basis change uses QuadraticSurd entries in Q(√2, √3).

Components:
    - octonion.py: Cayley-Dickson octonions and the sign table
    - algebra_core.py: AlgebraSpec, products, identity checks, algebra files
    - operators.py: exact sparse LinearOperator
    - surds.py: QuadraticSurd

Usage:
    from algebra.algebra_core import build_j3o, check_identity

    j3o = build_j3o()
    report = check_identity(j3o, 'jordan')
    print(report.passed, report.checked)
"""

__version__ = "1.0.0"
__author__ = "jordan-spectral developers"

from .algebra_core import AlgebraElement, AlgebraSpec, build_j3o, check_identity, product
from .octonion import Octonion
from .operators import LinearOperator
from .surds import QuadraticSurd

__all__ = ['AlgebraElement', 'AlgebraSpec', 'LinearOperator', 'Octonion', 'QuadraticSurd',
           'build_j3o', 'check_identity', 'product']
