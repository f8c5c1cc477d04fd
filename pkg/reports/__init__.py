#!/usr/bin/env python3
"""
Canonical JSON certificate reports
"""

__version__ = "1.0.0"

from .report import Report, canonical_json, validate_report

__all__ = ['Report', 'canonical_json', 'validate_report']
