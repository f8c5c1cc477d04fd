"""Shared fixtures for the jordan-spectral test suite"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from algebra.algebra_core import build_j3o, build_matrix_algebra, build_real_diagonal, build_symmetric_matrices
from geometry.spectral_triple import build_two_point_rep


@pytest.fixture(scope='session')
def j3o():
    return build_j3o()


@pytest.fixture(scope='session')
def j2r():
    return build_symmetric_matrices(2)


@pytest.fixture(scope='session')
def r2():
    return build_real_diagonal(2)


@pytest.fixture(scope='session')
def m2():
    return build_matrix_algebra(2)


@pytest.fixture(scope='session')
def two_point_rep():
    return build_two_point_rep()
