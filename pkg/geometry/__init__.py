#!/usr/bin/env python3
"""
Geometry Module for jordan-spectral

The two-point representation, Dirac operators and their checks, Connes
one-forms and the Connes distance between pure states.

Usage:
    from geometry.spectral_triple import DiracOperator, build_two_point_rep
    from geometry.connes_distance import DistanceQuery, connes_distance, pure_state

    rep = build_two_point_rep()
    D = DiracOperator.from_kappa(2)
"""

__version__ = "1.0.0"
__author__ = "jordan-spectral developers"

from .spectral_triple import DiracOperator, TwoPointRep, build_two_point_rep
from .connes_distance import DistanceQuery, connes_distance, pure_state

__all__ = ['DiracOperator', 'DistanceQuery', 'TwoPointRep', 'build_two_point_rep', 'connes_distance', 'pure_state']
