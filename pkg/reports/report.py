#!/usr/bin/env python3
"""
Certificate reports for jordan-spectral

A report is plain JSON: canonical key order, rationals as "p/q" strings and
floats rounded to REPORT_FLOAT_DIGITS significant digits, so two runs on the
same inputs produce the same bytes apart from the timings block.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import jsonschema
import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import config
from algebra.surds import QuadraticSurd

logger = logging.getLogger(__name__)

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


# ===== Canonical JSON =====

def _round_float(x: float) -> float | str:
    if math.isnan(x) or math.isinf(x):
        return str(x)
    digits = getattr(config, 'REPORT_FLOAT_DIGITS', 12)
    rounded = float(f"{x:.{digits}g}")
    return 0.0 if rounded == 0 else rounded


def to_jsonable(value: Any) -> Any:
    """Convert a result payload into JSON-ready builtins"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return _round_float(float(value))
    if isinstance(value, QuadraticSurd):
        return value.to_json()
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict())
    raise TypeError(f"cannot serialize {type(value).__name__} in a report")


def canonical_json(payload: Any, indent: int | None = 2) -> str:
    separators = (',', ': ') if indent else (',', ':')
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=indent,
                      separators=separators, ensure_ascii=False)


def input_digest(task: str, inputs: dict) -> str:
    """sha256 of the canonical JSON of {task, inputs}"""
    body = canonical_json({'task': task, 'inputs': inputs}, indent=None)
    return 'sha256:' + hashlib.sha256(body.encode('utf-8')).hexdigest()


# ===== Report =====

@dataclass
class Report:
    task: str
    inputs: dict
    result: dict
    passed: bool = True
    certificate: dict | None = None
    timings: dict = field(default_factory=dict)
    tool_version: str = field(default_factory=lambda: getattr(config, 'TOOL_VERSION', '1.0.0'))

    @property
    def input_digest(self) -> str:
        return input_digest(self.task, self.inputs)

    def to_dict(self) -> dict:
        return {
            'task': self.task,
            'inputs': self.inputs,
            'input_digest': self.input_digest,
            'passed': self.passed,
            'result': self.result,
            'certificate': self.certificate,
            'timings': self.timings,
            'tool_version': self.tool_version,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


class PhaseTimer:
    """Wall-clock seconds per named phase"""

    def __init__(self) -> None:
        self.timings: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start


# ===== Schema =====

def schema_path() -> str:
    return os.path.join(ROOT_DIR, getattr(config, 'REPORT_SCHEMA_PATH', 'docs/report.schema.json'))


def load_schema() -> dict:
    with open(schema_path(), 'r', encoding='utf-8') as f:
        return json.load(f)


def validate_report(report: Report | dict) -> dict:
    """
    Validate a report against the published schema

    Returns:
        The JSON-ready report dictionary

    Raises:
        jsonschema.ValidationError: the report does not match the schema
    """
    body = to_jsonable(report.to_dict() if isinstance(report, Report) else report)
    jsonschema.validate(instance=body, schema=load_schema())
    return body
