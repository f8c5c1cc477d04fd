#!/usr/bin/env python3
"""
Derivations into Jordan bimodules, inner derivations and universal one-forms
"""

__version__ = "1.0.0"
__author__ = "jordan-spectral developers"

from .derivation_solver import inner_derivation_span, solve_n_point, universal_oneform_span

__all__ = ['inner_derivation_span', 'solve_n_point', 'universal_oneform_span']
