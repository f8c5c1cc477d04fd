"""Canonical report encoding and schema validation"""

import json
import math
from fractions import Fraction

import jsonschema
import numpy as np
import pytest

from algebra.surds import QuadraticSurd
from reports.report import PhaseTimer, Report, canonical_json, input_digest, to_jsonable, validate_report


def test_values_become_json_builtins():
    payload = {
        'ratio': Fraction(3, 4),
        'float': 0.1 + 0.2,
        'inf': math.inf,
        'array': np.array([1, 2]),
        'flag': np.bool_(True),
        'surd': QuadraticSurd(1, 2),
        'set': {3, 1},
        (1, 2): 'tuple key',
    }
    out = to_jsonable(payload)
    assert out['ratio'] == '3/4'
    assert out['float'] == 0.3
    assert out['inf'] == 'inf'
    assert out['array'] == [1, 2]
    assert out['flag'] is True
    assert out['surd'] == ['1', '2', '0', '0']
    assert out['set'] == [1, 3]
    assert out['(1, 2)'] == 'tuple key'


def test_unknown_types_are_rejected():
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_canonical_json_is_order_independent():
    assert canonical_json({'b': 1, 'a': 2}) == canonical_json({'a': 2, 'b': 1})
    assert canonical_json({'a': [1, 2]}, indent=None) == '{"a":[1,2]}'


def test_digest_depends_only_on_task_and_inputs():
    first = input_digest('distance', {'kappa': Fraction(1), 'seed': 1})
    assert first == input_digest('distance', {'seed': 1, 'kappa': Fraction(1)})
    assert first != input_digest('distance', {'kappa': Fraction(2), 'seed': 1})
    assert first.startswith('sha256:') and len(first) == len('sha256:') + 64


def test_report_validates_against_schema():
    timer = PhaseTimer()
    with timer.phase('solve'):
        pass
    certificate = {'kernel_dim': 1, 'conclusive': True, 'primes': [2147483647, 2147483629]}
    report = Report('solve-dirac', {'points': 2}, {'kernel_dim': 1}, True, certificate, timer.timings)
    body = validate_report(report)
    assert body['input_digest'] == report.input_digest
    assert json.loads(report.to_json())['timings']['solve'] >= 0


def test_schema_rejects_unknown_tasks_and_fields():
    report = Report('teleport', {}, {})
    with pytest.raises(jsonschema.ValidationError):
        validate_report(report)
    body = Report('distance', {}, {}).to_dict()
    body['extra'] = 1
    with pytest.raises(jsonschema.ValidationError):
        validate_report(body)


def test_schema_requires_certificate_fields():
    report = Report('solve-dirac', {}, {}, certificate={'kernel_dim': 1})
    with pytest.raises(jsonschema.ValidationError):
        validate_report(report)
