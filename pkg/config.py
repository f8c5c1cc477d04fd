#!/usr/bin/env python3
"""
Configuration settings for jordan-spectral
Exact spectral geometry over the exceptional Jordan algebra J3(O)
"""

# ===== Tool Identity =====
TOOL_NAME = 'jordan-spectral'
TOOL_VERSION = '1.0.0'

# ===== Modular Arithmetic =====
# 2^30 - 35, 2^30 - 41, 2^30 - 83: products of two residues fit in int64
PRIMES = [1073741789, 1073741783, 1073741741]
MIN_CERTIFICATE_PRIMES = 2
MAX_CERTIFICATE_PRIMES = 3

# ===== Exact Elimination =====
EXACT_Q_MAX_COLUMNS = 5000
EXACT_Q_MAX_ENTRIES = 40000
DENSE_SWITCH_ROW_NNZ = 48

# ===== Threading =====
ENABLE_THREADING = True
MAX_THREAD_WORKERS = 2
THREADS_ENV_VAR = 'JORDAN_SPECTRAL_THREADS'

# ===== Bimodules =====
BRUTE_FORCE_MAX_UNKNOWNS = 20000
DENSE_AXIOM_MAX_DIM = 96

# ===== Connes Distance =====
NORM_TOLERANCE = 1e-9
DISTANCE_TOLERANCE = 1e-6
POWER_ITERATION_MAX = 20000
DISTANCE_RESTARTS = 32
DISTANCE_SEED = 1729
RESTRICTED_FAMILY_GRID = 720

# ===== Reports =====
REPORT_FLOAT_DIGITS = 12
REPORT_SCHEMA_PATH = 'docs/report.schema.json'

# ===== Logging =====
LOG_LEVEL = 'INFO'
LOG_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'


def resolve_threads(requested=None):
    """
    Resolve the worker count for component-parallel solves

    Args:
        requested: Explicit count (e.g. from --threads), or None

    Returns:
        int: Number of worker threads (at least 1)
    """
    import os

    if not ENABLE_THREADING:
        return 1
    if requested is None:
        env_value = os.environ.get(THREADS_ENV_VAR)
        if env_value:
            try:
                requested = int(env_value)
            except ValueError:
                requested = None
    if requested is None:
        requested = MAX_THREAD_WORKERS
    return max(1, int(requested))
