"""
momentlab command line.

    momentlab verify --rep su2:spin=1
    momentlab checks --rep "sum(su2:spin=0.5,su2:spin=1)" --seed 7
    momentlab moment-eval --rep su2:spin=0.5 --state basis:0
    momentlab flow --rep su2:spin=1 --generator "[0, 0, 1]" --time 1.0
    momentlab sphere-sample --rep su2:spin=0.5 --samples 100000 --format csv

Exit codes: 0 all checks pass, 1 a check failed, 2 bad input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from hilbert_symplectic import StateVector, grad
from moment import (
    check_flow,
    check_sphere_support,
    hamiltonian_flow,
    moment,
    random_state,
    run_check_suite,
    sample_directions,
    sigma_observable,
    sphere_image_sample,
)
from performance_config import DEFAULT_SEED, SAMPLING_CONFIG, get_log_level, parse_tolerance_overrides
from reports import ReportWriter
from unirep import direct_sum, load_rep, su2_spin, tensor, torus, verify_rep
from utils import ConfigError, DomainError, NumericError, validate_samples

logger = logging.getLogger(__name__)

COMMANDS = ('verify', 'moment-eval', 'checks', 'flow', 'sphere-sample')
FORMATS = ('json', 'csv')

EXIT_OK = 0
EXIT_FAILED_CHECKS = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERIC = 3


@dataclass
class RunConfig:
    command: str
    rep_source: str
    seed: int = DEFAULT_SEED
    samples: Optional[int] = None
    overrides: dict = field(default_factory=dict)
    output: Optional[str] = None
    format: str = 'json'
    direction: Optional[str] = None
    state: Optional[str] = None
    generator: Optional[str] = None
    time: float = 1.0
    threads: Optional[int] = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}'. Use one of: {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"Unknown format '{self.format}'. Use json or csv")
        if self.samples is not None:
            ok, message = validate_samples(self.samples)
            if not ok:
                raise ConfigError(message)
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"Seed must be an integer in [0, 2**64), got {self.seed}")
        if not math.isfinite(self.time):
            raise ConfigError(f"Flow time must be finite, got {self.time}")


# -- Representation sources --------------------------------------------------

def _split_top_level(text):
    """Split on commas that are not inside brackets or parentheses"""
    parts, depth, start = [], 0, 0
    for index, char in enumerate(text):
        if char in '([':
            depth += 1
        elif char in ')]':
            depth -= 1
            if depth < 0:
                raise ConfigError(f"Unbalanced brackets in '{text}'")
        elif char == ',' and depth == 0:
            parts.append(text[start:index].strip())
            start = index + 1
    if depth != 0:
        raise ConfigError(f"Unbalanced brackets in '{text}'")
    parts.append(text[start:].strip())
    return parts


def _parse_fields(body):
    """'dim=2,weights=[[1,0]]' -> {'dim': '2', 'weights': '[[1,0]]'}"""
    fields = {}
    for part in _split_top_level(body):
        key, sep, value = part.partition('=')
        if not sep or not key.strip():
            raise ConfigError(f"Expected key=value, got '{part}'")
        fields[key.strip()] = value.strip()
    return fields


def _parse_torus(body, source):
    fields = _parse_fields(body)
    if 'weights' not in fields:
        raise ConfigError(f"Torus source needs weights=[[...]]: '{source}'")
    try:
        weights = json.loads(fields['weights'])
    except json.JSONDecodeError as e:
        raise ConfigError(f"Torus weights are not valid JSON in '{source}': {e}")
    rep = torus(weights)
    if 'dim' in fields and int(fields['dim']) != rep.algebra.dim:
        raise ConfigError(f"Torus dim={fields['dim']} does not match {rep.algebra.dim} weight columns")
    return rep


def parse_rep_source(source):
    """Builtin representation name, a sum/tensor of them, or a JSON file path"""
    source = source.strip()
    try:
        if source.startswith('su2:'):
            fields = _parse_fields(source[len('su2:'):])
            if set(fields) != {'spin'}:
                raise ConfigError(f"su2 source takes exactly spin=<half-integer>: '{source}'")
            return su2_spin(fields['spin'])
        if source.startswith('torus:'):
            return _parse_torus(source[len('torus:'):], source)
        for name, combine in (('sum', direct_sum), ('tensor', tensor)):
            if source.startswith(name + '(') and source.endswith(')'):
                parts = _split_top_level(source[len(name) + 1:-1])
                if len(parts) != 2:
                    raise ConfigError(f"{name}(...) takes two representations, got {len(parts)}")
                return combine(parse_rep_source(parts[0]), parse_rep_source(parts[1]))
    except (DomainError, TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Invalid representation '{source}': {e}")
    if os.path.isfile(source):
        return load_rep(source)
    raise ConfigError(f"'{source}' is neither a builtin representation nor a JSON file")


# -- Argument values -----------------------------------------------------------

def _load_json_argument(text, what):
    if os.path.isfile(text):
        try:
            with open(text, 'r') as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to read {what} from {text}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{what} is neither a file nor valid JSON: {e}")


def _basis_index(text, size, what):
    try:
        index = int(text.partition(':')[2])
    except ValueError:
        raise ConfigError(f"{what} '{text}' needs an integer index")
    if not 0 <= index < size:
        raise ConfigError(f"{what} index {index} out of range 0..{size - 1}")
    return index


def parse_state(text, rep):
    """'zero', 'basis:<k>', a {"re", "im"} JSON document or a path to one"""
    if text == 'zero':
        return rep.space.zero()
    if text.startswith('basis:'):
        return rep.space.basis(_basis_index(text, rep.dim, 'State'))
    state = StateVector.from_dict(_load_json_argument(text, 'State'))
    if state.space.dim != rep.dim:
        raise ConfigError(f"State has {state.space.dim} components, representation has dimension {rep.dim}")
    return StateVector(rep.space, state.components)


def parse_element(text, algebra, what='Generator'):
    """'basis:<k>' or a JSON list of algebra coordinates"""
    if text.startswith('basis:'):
        return algebra.basis(_basis_index(text, algebra.dim, what))
    coords = _load_json_argument(text, what)
    try:
        coords = np.array(coords, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a list of numbers")
    if coords.shape != (algebra.dim,):
        raise ConfigError(f"{what} needs {algebra.dim} coordinates, got shape {coords.shape}")
    return algebra.element(coords)


# -- Commands ------------------------------------------------------------------

def _header(config, rep):
    return {'command': config.command, 'rep': rep.label, 'dim': rep.dim,
            'algebra_dim': rep.algebra.dim, 'seed': config.seed}


def _add_checks(writer, reports):
    for report in reports:
        writer.append_check(report)
    return all(report.passed for report in reports)


def run_verify(config, rep, writer):
    writer.document.update(_header(config, rep))
    return _add_checks(writer, verify_rep(rep, config.overrides))


def run_checks(config, rep, writer):
    writer.document.update(_header(config, rep))
    reports = verify_rep(rep, config.overrides)
    reports += run_check_suite(rep, config.seed, trials=config.samples, overrides=config.overrides)
    return _add_checks(writer, reports)


def run_moment_eval(config, rep, writer):
    """mu at --state, or at --samples seeded random states.

    With --generator X each row also carries sigma(X)(x) and its omega-gradient rho'(X)x.
    """
    labels = list(rep.algebra.basis_labels)
    if config.state is not None:
        states = [parse_state(config.state, rep)]
    else:
        rng = np.random.default_rng(config.seed)
        states = [random_state(rep.space, rng) for _ in range(config.samples or 1)]
    observable = None
    if config.generator is not None:
        X = parse_element(config.generator, rep.algebra)
        observable = sigma_observable(rep, X)

    columns = ([f"re{k}" for k in range(rep.dim)] + [f"im{k}" for k in range(rep.dim)]
               + [f"mu_{label}" for label in labels])
    if observable is not None:
        columns += ['sigma'] + [f"grad_re{k}" for k in range(rep.dim)] + [f"grad_im{k}" for k in range(rep.dim)]
    writer.headers = columns
    evaluations = []
    for x in states:
        mu = moment(rep, x)
        values = list(x.components.real) + list(x.components.imag) + list(mu.coords)
        evaluation = {'x': x.to_dict(), 'moment': mu.coords.tolist()}
        if observable is not None:
            gradient = grad(observable, x)
            values += [observable(x)] + list(gradient.components.real) + list(gradient.components.imag)
            evaluation.update({'sigma': observable(x), 'grad': gradient.to_dict()})
        writer.append_row(dict(zip(columns, values)))
        evaluations.append(evaluation)

    writer.document.update(_header(config, rep))
    writer.document['labels'] = labels
    if observable is not None:
        writer.document['generator'] = X.coords.tolist()
    writer.document['evaluations'] = evaluations
    return True


def run_flow(config, rep, writer):
    X = parse_element(config.generator or 'basis:0', rep.algebra)
    x0 = parse_state(config.state or 'basis:0', rep)
    report = check_flow(rep, X, x0, config.time, config.overrides)
    final = hamiltonian_flow(rep, X, x0, config.time)
    writer.document.update(_header(config, rep))
    writer.document.update({'generator': X.coords.tolist(), 'time': float(config.time),
                            'x0': x0.to_dict(), 'x_t': final.to_dict()})
    return _add_checks(writer, [report])


def run_sphere_sample(config, rep, writer):
    """Sampled image of the unit sphere and its support function against the eigenvalue bound.

    CSV output is the sample table; JSON output is the support-function report.
    """
    n_samples = config.samples or SAMPLING_CONFIG['sphere_samples']
    image = sphere_image_sample(rep, n_samples, config.seed, config.threads)
    if config.direction is not None:
        directions = [parse_element(config.direction, rep.algebra, 'Direction')]
    else:
        directions = sample_directions(rep.algebra, SAMPLING_CONFIG['sphere_directions'], config.seed)
    reports = check_sphere_support(rep, image, directions, config.overrides)

    writer.set_frame(image.to_frame())
    writer.document.update(_header(config, rep))
    writer.document['samples'] = len(image)
    return _add_checks(writer, reports)


HANDLERS = {
    'verify': run_verify,
    'checks': run_checks,
    'moment-eval': run_moment_eval,
    'flow': run_flow,
    'sphere-sample': run_sphere_sample,
}


def run(config):
    """Run one command and write its report; returns the exit code"""
    try:
        config.validate()
        rep = parse_rep_source(config.rep_source)
    except (ConfigError, DomainError) as e:
        logger.error("%s", e)
        return EXIT_BAD_INPUT

    writer = ReportWriter()
    try:
        passed = HANDLERS[config.command](config, rep, writer)
    except (ConfigError, DomainError) as e:
        logger.error("%s", e)
        return EXIT_BAD_INPUT
    except NumericError as e:
        logger.error("%s %s", e, json.dumps(e.diagnostics, sort_keys=True))
        return EXIT_NUMERIC
    except (np.linalg.LinAlgError, FloatingPointError) as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_NUMERIC

    try:
        writer.write(config.output, config.format)
    except OSError as e:
        logger.error("Could not write report: %s", e)
        return EXIT_BAD_INPUT

    if not passed:
        failed = [c['check'] for c in writer.document.get('checks', []) if not c['pass']]
        logger.warning("Failed checks: %s", ', '.join(failed))
        return EXIT_FAILED_CHECKS
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog='momentlab',
        description='Moment maps of unitary Lie group representations, with property checks.',
    )
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--rep', required=True,
                        help='su2:spin=<j>, torus:dim=<n>,weights=[[...]], sum(a,b), tensor(a,b) or a JSON path')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED)
    parser.add_argument('--samples', type=int, default=None,
                        help='trials per check (checks), states (moment-eval) or sphere samples')
    parser.add_argument('--out', default=None, help='output path, stdout when omitted or -')
    parser.add_argument('--format', choices=FORMATS, default='json')
    parser.add_argument('--tol', action='append', default=[], metavar='CHECK=VALUE',
                        help='override a named tolerance, repeatable')
    parser.add_argument('--direction', default=None, help='algebra direction for sphere-sample support reporting')
    parser.add_argument('--state', default=None, help="'zero', 'basis:<k>' or a {\"re\", \"im\"} JSON vector")
    parser.add_argument('--generator', default=None,
                        help="'basis:<k>' or JSON algebra coordinates, for flow and moment-eval")
    parser.add_argument('--time', type=float, default=1.0, help='flow time')
    parser.add_argument('--verbose', '-v', action='store_true')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else get_log_level(),
        format='%(levelname)s %(name)s: %(message)s',
    )
    try:
        overrides = parse_tolerance_overrides(args.tol)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_BAD_INPUT

    config = RunConfig(
        command=args.command,
        rep_source=args.rep,
        seed=args.seed,
        samples=args.samples,
        overrides=overrides,
        output=args.out,
        format=args.format,
        direction=args.direction,
        state=args.state,
        generator=args.generator,
        time=args.time,
    )
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
