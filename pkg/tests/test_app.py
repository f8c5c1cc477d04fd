"""Command line surface: exit codes and report output"""

import io
import json

import pytest

import app


def _run(*argv):
    out = io.StringIO()
    code = app.run(list(argv), stdout=out)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None)


def test_help_exits_cleanly():
    code, _ = _run('--help')
    assert code == app.EXIT_OK


def test_schema_is_printed():
    code, schema = _run('--schema')
    assert code == app.EXIT_OK
    assert 'distance' in schema['properties']['task']['enum']


@pytest.mark.parametrize('argv', [
    ['--no-such-flag'],
    [],
    ['distance'],
    ['distance', '--kappa', 'x'],
    ['solve-dirac', '--points', '3'],
    ['classify-homs', '--free-source', '2'],
    ['verify-algebra', '--file', '/nonexistent/algebra.txt'],
    ['solve-derivations', '--points', '2', '--sectors', '13'],
])
def test_usage_errors(argv):
    code, report = _run(*argv)
    assert code == app.EXIT_USAGE
    assert report is None


def test_verify_algebra_passes():
    code, report = _run('verify-algebra', '--builtin', 'j2r')
    assert code == app.EXIT_OK
    assert report['task'] == 'verify-algebra'
    assert report['result']['pass'] is True
    assert report['input_digest'].startswith('sha256:')


def test_verify_algebra_reports_failing_identity():
    code, report = _run('verify-algebra', '--builtin', 'm2', '--identity', 'commutative')
    assert code == app.EXIT_VERIFICATION
    assert report['passed'] is False
    assert report['result']['witness'] is not None


def test_malformed_algebra_file(tmp_path):
    path = tmp_path / 'broken.alg'
    path.write_text('this is not an algebra\n', encoding='utf-8')
    code, _ = _run('verify-algebra', '--file', str(path))
    assert code == app.EXIT_USAGE


def test_degenerate_dirac_is_an_input_error():
    code, _ = _run('distance', '--kappa', '0', '--restarts', '1')
    assert code == app.EXIT_USAGE


def test_classify_free_homs():
    code, report = _run('classify-homs', '--base', 'j2r', '--free-source', '2', '--free-target', '3')
    assert code == app.EXIT_OK
    assert report['result']['dim'] == 6
    assert report['result']['matches_expected']


def test_classify_split_homs():
    code, report = _run('classify-homs', '--base', 'j2r', '--points', '2', '--source', '12', '--target', '12:2,21')
    assert code == app.EXIT_OK
    assert report['result']['expected_dim'] == 2


def test_derivations_report_certificate():
    code, report = _run('solve-derivations', '--base', 'j2r', '--points', '2', '--sectors', '12,21')
    assert code == app.EXIT_OK
    assert report['certificate']['conclusive']
    assert report['result']['agreement'] is True


def test_oracle_suite_without_controls():
    code, report = _run('oracle-suite', '--skip-controls')
    assert code == app.EXIT_OK
    assert len(report['result']['cases']) == 2


def test_inner_derivations():
    code, report = _run('inner-derivations')
    assert code == app.EXIT_OK
    assert report['result']['dim'] == 52


def test_same_inputs_give_same_digest():
    _, first = _run('oneform-span', '--seeds-only')
    _, second = _run('oneform-span', '--seeds-only')
    assert first['input_digest'] == second['input_digest']
    assert first['result'] == second['result']
    assert first['result']['seed_rank'] == 26


@pytest.mark.parametrize('argv', [
    ['inner-derivations', '--points', '2'],
    ['oneform-span', '--seeds-only'],
    ['solve-derivations', '--base', 'j2r', '--points', '2', '--sectors', 'all'],
])
def test_result_does_not_depend_on_thread_count(argv):
    code_one, single = _run('--threads', '1', *argv)
    code_many, many = _run('--threads', '8', *argv)
    assert code_one == code_many == app.EXIT_OK
    assert single['input_digest'] == many['input_digest']
    assert single['result'] == many['result']


@pytest.mark.slow
def test_distance_report():
    code, report = _run('distance', '--kappa', '1', '--restarts', '4', '--check-formula')
    assert code in (app.EXIT_OK, app.EXIT_VERIFICATION)
    assert report['result']['distance'] == pytest.approx(2 * 2 ** 0.5, rel=1e-6)
    assert report['result']['findings']
    assert report['result']['norm_formula']['holds_everywhere'] is False
