#!/usr/bin/env python3
"""
Jordan Module for jordan-spectral

Module actions, split and free bimodules over J3(O), axiom sweeps and
the classification of bimodule homomorphisms.

Usage:
    from bimodules.jordan_modules import build_split_bimodule, classify_bimodule_homs

    source = build_split_bimodule(2, {(1, 2): 1})
    target = build_split_bimodule(2, {(1, 2): 2})
    homs = classify_bimodule_homs(source, target)
"""

__version__ = "1.0.0"
__author__ = "jordan-spectral developers"

from .jordan_modules import ModuleAction, SplitBimodule, build_split_bimodule, classify_bimodule_homs

__all__ = ['ModuleAction', 'SplitBimodule', 'build_split_bimodule', 'classify_bimodule_homs']
