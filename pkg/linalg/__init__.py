#!/usr/bin/env python3
"""
Exact sparse linear algebra: modular elimination, rational lifting and kernel certificates
"""

__version__ = "1.0.0"
__author__ = "jordan-spectral developers"

from .exact_linalg import EchelonBasis, KernelCertificate, SparseMatrix, solve_kernel, span_closure

__all__ = ['EchelonBasis', 'KernelCertificate', 'SparseMatrix', 'solve_kernel', 'span_closure']
