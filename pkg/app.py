#!/usr/bin/env python3
"""
jordan-spectral - Command Line Entry Point
Runs one computation per invocation and prints its certificate report as JSON

Reports go to standard output, logs to standard error.
Exit codes: 0 success, 1 usage or input error, 2 failed verification.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction

import jsonschema

import config
from errors import (AlgebraFileError, DegenerateDiracError, DimensionMismatchError, EmptyModuleError,
                    IncompatibleOperandsError, JordanSpectralError, NonIdempotentError, UsageError)
from algebra.algebra_core import (BUILTIN_ALGEBRAS, IDENTITY_KINDS, build_j3o, check_identity,
                                  parse_algebra_file, primitive_idempotents_standard)
from bimodules.jordan_modules import (build_free_bimodule, build_split_bimodule, check_associative_rep,
                                      check_module_axioms, check_split_compatibility, classify_bimodule_homs,
                                      regular_action, symmetrized_action)
from derivations.associative_oracle import associative_oracle_suite
from derivations.derivation_solver import (inner_derivation_span, parse_sector_pattern, solve_n_point,
                                           universal_oneform_span)
from geometry.connes_distance import DistanceQuery, check_norm_formula, connes_distance, pure_state
from geometry.spectral_triple import (DiracOperator, build_two_point_rep, check_leibniz_for_dirac,
                                      derivation_compatibility, dirac_as_hom, dirac_is_symmetric,
                                      generate_connes_oneforms, grading_checks, solve_dirac_constraints)
from reports.report import PhaseTimer, Report, load_schema, validate_report

logger = logging.getLogger('jordan_spectral')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2

# Input problems; every other library error means a failed verification
INPUT_ERRORS = (UsageError, AlgebraFileError, IncompatibleOperandsError, DimensionMismatchError,
                EmptyModuleError, NonIdempotentError, DegenerateDiracError, ValueError, OSError)


class ReportParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting with status 2"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ===== Argument helpers =====

def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"'{text}' is not a rational number")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _load_algebra(args):
    if args.file:
        with open(args.file, 'r', encoding='utf-8') as f:
            return parse_algebra_file(f.read())
    return BUILTIN_ALGEBRAS[args.builtin]()


def _base_algebra(name):
    return BUILTIN_ALGEBRAS[name]()


def _certificate_summary(certificate):
    return None if certificate is None else certificate.to_dict()


# ===== Commands =====
# Each command returns (inputs, result, passed, certificate)

def cmd_verify_algebra(args, timer):
    with timer.phase('load'):
        spec = _load_algebra(args)
    with timer.phase('identity'):
        report = check_identity(spec, args.identity)
    result = {'algebra': spec.name, 'dim': spec.dim, 'pass': report.passed, **report.to_dict()}
    if args.associative_rep:
        with timer.phase('associative_rep'):
            result['associative_rep'] = check_associative_rep(regular_action(spec))
    inputs = {'algebra': args.file or args.builtin, 'identity': args.identity,
              'associative_rep': args.associative_rep}
    return inputs, result, report.passed, None


def cmd_solve_derivations(args, timer):
    with timer.phase('solve'):
        sectors = parse_sector_pattern(args.sectors, args.points)
        outcome = solve_n_point(args.points, sectors, cross_check=None if args.cross_check else False,
                                base=_base_algebra(args.base), threads=args.threads)
    result = outcome.to_dict()
    passed = (result['verified'] and result['cross_sector_vanishing'] and outcome.agreement is not False
              and all(s.certificate.conclusive for s in outcome.sectors))
    if outcome.monolithic is not None:
        certificate = outcome.monolithic.certificate
    elif len(outcome.sectors) == 1:
        certificate = outcome.sectors[0].certificate
    else:
        certificate = None
    inputs = {'points': args.points, 'sectors': args.sectors, 'cross_check': args.cross_check, 'base': args.base}
    return inputs, result, passed, _certificate_summary(certificate)


def cmd_inner_derivations(args, timer):
    with timer.phase('span'):
        if args.points == 1:
            span = inner_derivation_span(build_j3o(), threads=args.threads)
        else:
            rep = build_two_point_rep()
            span = inner_derivation_span(rep.algebra, rep.action, threads=args.threads)
    result = {'points': args.points, **span.to_dict()}
    return {'points': args.points}, result, True, None


def cmd_oneform_span(args, timer):
    with timer.phase('closure'):
        span = universal_oneform_span(args.points, seeds_only=args.seeds_only,
                                      modulus=0 if args.exact else None, threads=args.threads)
    inputs = {'points': args.points, 'seeds_only': args.seeds_only, 'exact': args.exact}
    return inputs, span.to_dict(), True, None


def cmd_solve_dirac(args, timer):
    if args.points != 2:
        raise UsageError("solve-dirac supports --points 2")
    with timer.phase('representation'):
        rep = build_two_point_rep()
    with timer.phase('solve'):
        solution = solve_dirac_constraints(rep, threads=args.threads)
    result = solution.to_dict()
    passed = solution.matches_standard and all(
        check is None or check.get('passed', all(check.values()))
        for check in (solution.leibniz, solution.grading, solution.derivation_compatibility))
    return {'points': args.points}, result, passed, _certificate_summary(solution.certificate)


def cmd_check_triple(args, timer):
    with timer.phase('representation'):
        rep = build_two_point_rep()
        D = DiracOperator.from_kappa(args.kappa, rep.base)
    with timer.phase('checks'):
        result = {
            'kappa': args.kappa,
            'symmetric': dirac_is_symmetric(D, rep),
            'representation_symmetric': rep.check_symmetry(),
            'leibniz': check_leibniz_for_dirac(D, rep),
            'grading': grading_checks(D, rep),
            'derivation_compatibility': derivation_compatibility(D, rep),
        }
    if not args.skip_forms:
        with timer.phase('oneforms'):
            result['connes_oneforms'] = generate_connes_oneforms(D, rep).to_dict()
    if args.hom:
        with timer.phase('hom'):
            result['dirac_as_hom'] = dirac_as_hom(D, rep, track_closure=args.track_closure).to_dict()
    passed = (result['symmetric'] and result['representation_symmetric']['passed']
              and result['leibniz']['passed'] and all(result['grading'].values())
              and result['derivation_compatibility']['passed'])
    inputs = {'kappa': args.kappa, 'skip_forms': args.skip_forms, 'hom': args.hom,
              'track_closure': args.track_closure}
    return inputs, result, passed, None


def cmd_classify_homs(args, timer):
    base = _base_algebra(args.base)
    with timer.phase('modules'):
        if args.free_source is not None or args.free_target is not None:
            if args.free_source is None or args.free_target is None:
                raise UsageError("--free-source and --free-target go together")
            source = build_free_bimodule(args.free_source, base)
            target = build_free_bimodule(args.free_target, base)
            expected = args.free_source * args.free_target
            inputs = {'free_source': args.free_source, 'free_target': args.free_target}
        else:
            if args.source is None or args.target is None:
                raise UsageError("give --free-source/--free-target or --source/--target")
            src_dims = parse_sector_pattern(args.source, args.points)
            tgt_dims = parse_sector_pattern(args.target, args.points)
            source = build_split_bimodule(args.points, src_dims, base)
            target = build_split_bimodule(args.points, tgt_dims, base)
            expected = sum(dim * tgt_dims.get(sector, 0) for sector, dim in src_dims.items())
            inputs = {'points': args.points, 'source': args.source, 'target': args.target}
    with timer.phase('classify'):
        homs = classify_bimodule_homs(source, target, method=args.method, threads=args.threads)
    result = {**homs.to_dict(), 'expected_dim': expected, 'matches_expected': homs.dim == expected}
    inputs.update({'method': args.method, 'base': args.base})
    conclusive = (homs.certificate or {}).get('conclusive', True)
    return inputs, result, homs.dim == expected and homs.sector_preserving and conclusive, None


def cmd_distance(args, timer):
    with timer.phase('setup'):
        rep = build_two_point_rep()
        D = DiracOperator.from_kappa(args.kappa, rep.base)
        p = primitive_idempotents_standard(rep.base)[0]
        query = DistanceQuery(pure_state(1, p, rep), pure_state(2, p, rep), D, tolerance=args.tolerance,
                              restarts=args.restarts, seed=args.seed)
    with timer.phase('optimize'):
        outcome = connes_distance(query, rep, threads=args.threads)
    result = {'kappa': args.kappa, **outcome.to_dict()}
    if args.check_formula:
        with timer.phase('norm_formula'):
            result['norm_formula'] = check_norm_formula(D, rep)
    passed = outcome.agreement['constraint_tight'] and outcome.agreement['numerical_vs_best']
    inputs = {'kappa': args.kappa, 'tolerance': args.tolerance, 'restarts': args.restarts,
              'seed': args.seed, 'check_formula': args.check_formula}
    return inputs, result, passed, None


def cmd_oracle_suite(args, timer):
    with timer.phase('oracles'):
        result = associative_oracle_suite()
    passed = result['passed']
    if not args.skip_controls:
        with timer.phase('controls'):
            j3o = build_j3o()
            module = build_split_bimodule(1, {(1, 1): 1}, j3o)
            controls = {
                'regular_associative_rep': check_associative_rep(regular_action(j3o)),
                'split_compatibility': check_split_compatibility(module),
                'left_axioms': check_module_axioms(module.left, stop_at_first=True).to_dict(),
                'right_axioms': check_module_axioms(module.right, stop_at_first=True).to_dict(),
                'symmetrized_axioms': check_module_axioms(symmetrized_action(module), stop_at_first=True).to_dict(),
            }
        controls['exceptional'] = not controls['regular_associative_rep']['passed']
        controls['symmetrized_fails'] = not controls['symmetrized_axioms']['passed']
        result['controls'] = controls
        passed = (passed and controls['exceptional'] and controls['symmetrized_fails']
                  and controls['split_compatibility']['passed']
                  and controls['left_axioms']['passed'] and controls['right_axioms']['passed'])
    return {'skip_controls': args.skip_controls}, result, passed, None


COMMANDS = {
    'verify-algebra': cmd_verify_algebra,
    'solve-derivations': cmd_solve_derivations,
    'inner-derivations': cmd_inner_derivations,
    'oneform-span': cmd_oneform_span,
    'solve-dirac': cmd_solve_dirac,
    'check-triple': cmd_check_triple,
    'classify-homs': cmd_classify_homs,
    'distance': cmd_distance,
    'oracle-suite': cmd_oracle_suite,
}


# ===== Parser =====

def build_parser():
    parser = ReportParser(prog=config.TOOL_NAME,
                          description='Exact spectral geometry over the exceptional Jordan algebra J3(O)')
    parser.add_argument('--threads', type=_positive_int, default=None,
                        help=f'worker threads (default: ${config.THREADS_ENV_VAR} or {config.MAX_THREAD_WORKERS})')
    parser.add_argument('--schema', action='store_true', help='print the report JSON schema and exit')
    parser.add_argument('--log-level', default=getattr(config, 'LOG_LEVEL', 'INFO'),
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    bases = sorted(BUILTIN_ALGEBRAS)

    p = sub.add_parser('verify-algebra', help='check an identity on all basis tuples')
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--builtin', choices=bases)
    source.add_argument('--file', metavar='PATH')
    p.add_argument('--identity', choices=IDENTITY_KINDS, default='jordan')
    p.add_argument('--associative-rep', action='store_true',
                   help='also test whether the regular action is an associative representation')

    p = sub.add_parser('solve-derivations', help='certified derivation kernel into J ⊗ V ⊗ J')
    p.add_argument('--points', type=_positive_int, default=1)
    p.add_argument('--sectors', default='all', help='all, diag, offdiag or a list such as "11,12:2"')
    p.add_argument('--no-cross-check', dest='cross_check', action='store_false')
    p.add_argument('--base', choices=bases, default='j3o')

    p = sub.add_parser('inner-derivations', help='span of [S_a, S_b]')
    p.add_argument('--points', type=int, choices=[1, 2], default=1)

    p = sub.add_parser('oneform-span', help='bimodule generated by the universal seeds')
    p.add_argument('--points', type=_positive_int, default=1)
    p.add_argument('--seeds-only', action='store_true')
    p.add_argument('--exact', action='store_true', help='close over Q instead of mod p')

    p = sub.add_parser('solve-dirac', help='admissible Dirac operators for two points')
    p.add_argument('--points', type=_positive_int, default=2)

    p = sub.add_parser('check-triple', help='spectral triple checks for a given κ')
    p.add_argument('--kappa', type=_rational, required=True)
    p.add_argument('--skip-forms', action='store_true', help='skip the Connes one-form closure')
    p.add_argument('--hom', action='store_true', help='build D as a bimodule map out of the universal forms')
    p.add_argument('--track-closure', action='store_true', help='replay the generator closure for --hom')

    p = sub.add_parser('classify-homs', help='bimodule homomorphisms between two modules')
    p.add_argument('--free-source', type=_positive_int)
    p.add_argument('--free-target', type=_positive_int)
    p.add_argument('--points', type=_positive_int, default=2)
    p.add_argument('--source')
    p.add_argument('--target')
    p.add_argument('--method', choices=['auto', 'brute', 'factorized'], default='auto')
    p.add_argument('--base', choices=bases, default='j3o')

    p = sub.add_parser('distance', help='Connes distance between the two points')
    p.add_argument('--kappa', type=_rational, required=True)
    p.add_argument('--tolerance', type=float, default=getattr(config, 'DISTANCE_TOLERANCE', 1e-6))
    p.add_argument('--restarts', type=_positive_int, default=getattr(config, 'DISTANCE_RESTARTS', 32))
    p.add_argument('--seed', type=int, default=getattr(config, 'DISTANCE_SEED', 1729))
    p.add_argument('--check-formula', action='store_true', help='compare the norm with max{κα, κβ, κ(α-β)}')

    p = sub.add_parser('oracle-suite', help='associative oracles and module controls')
    p.add_argument('--skip-controls', action='store_true')
    return parser


def configure_logging(level):
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format=getattr(config, 'LOG_FORMAT', '%(levelname)s %(name)s: %(message)s'),
                        stream=sys.stderr, force=True)


# ===== Entry point =====

def run(argv=None, stdout=None):
    """
    Run one command

    Args:
        argv: Argument list (default: sys.argv[1:])
        stdout: Stream for the report (default: sys.stdout)

    Returns:
        int: exit code
    """
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level)
    if args.schema:
        stdout.write(json.dumps(load_schema(), indent=2, sort_keys=True) + '\n')
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    timer = PhaseTimer()
    try:
        inputs, result, passed, certificate = COMMANDS[args.command](args, timer)
        report = Report(args.command, inputs, result, bool(passed), certificate, timer.timings)
        validate_report(report)
    except INPUT_ERRORS as e:
        logger.error(f"❌ {args.command}: {e}")
        return EXIT_USAGE
    except JordanSpectralError as e:
        logger.error(f"❌ {args.command}: verification failed: {e}")
        return EXIT_VERIFICATION
    except jsonschema.ValidationError as e:
        logger.error(f"❌ {args.command}: report does not match the schema: {e.message}")
        return EXIT_VERIFICATION

    stdout.write(report.to_json() + '\n')
    if passed:
        logger.info(f"✅ {args.command} finished")
        return EXIT_OK
    logger.warning(f"⚠️  {args.command}: verification failed, see the report for witnesses")
    return EXIT_VERIFICATION


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
