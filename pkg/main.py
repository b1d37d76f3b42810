# This is the driver code for the command line surface: operator evaluation, exact moment
# tables, identity verification and convergence experiments.
# Arguments, for options including logging and the ini file location, are taken care of
# here as well.
#
# To launch: python3 main.py -l [on|off] [--config ini] {eval|moments|verify|converge} ...
#
# Exit codes: 0 success, 1 failed identity, 2 invalid arguments or parameters,
# 3 truncation, quadrature or experiment failure.

import os
import json
import sys
import logging
import argparse

import pandas as pd

from basis import JainParams
from identity_lab import (FLOAT_FORMAT, bound_experiment, frame_records,
                          korovkin_convergence_table, run_differential_suite,
                          run_recurrence_suite, voronovskaja_experiment)
from logging_config import configure_logging
from moment_engine import moment_object
from numerics import (DomainError, ExperimentError, QuadratureError, RangeError,
                      TruncationError)
from operators import apply_jain, apply_phillips, builtin_function
from project_argparser import call_args, call_ini, experiment_settings, series_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _points(parsed):
    return [x for group in (parsed.x or []) for x in group]


def cmd_eval(parsed, config, out):
    cfg = series_config(config, parsed.tol)
    p = JainParams(parsed.n, parsed.beta)
    f = builtin_function(parsed.fn)
    operator = apply_jain if parsed.op == 'jain' else apply_phillips
    rows = []
    for x in _points(parsed):
        if x < 0:
            raise DomainError("Invalid x {}".format(x))
        rows.append({'x': x, 'value': operator(p, f, x, cfg)})
        logger.info("{}({}, {}), {}".format(parsed.op, parsed.fn, x, rows[-1]['value']),
                    extra={'case': p.case})
    out.write(pd.DataFrame(rows, columns=['x', 'value'])
              .to_csv(index=False, float_format=FLOAT_FORMAT))
    return EXIT_OK


def _orders(kind, r_max):
    start = 1 if kind == 'mu' else 0
    if r_max < start:
        raise RangeError("r-max {} below the {} table, which starts at r={}"
                         .format(r_max, kind, start))
    return range(start, r_max + 1)


def cmd_moments(parsed, out):
    objects = [(r, moment_object(parsed.kind, r)) for r in _orders(parsed.kind, parsed.r_max)]
    if parsed.out_dir is not None:
        os.makedirs(parsed.out_dir, exist_ok=True)
        for r, value in objects:
            path = os.path.join(parsed.out_dir, "{}_{}.txt".format(parsed.kind, r))
            with open(path, 'w') as golden:
                golden.write(value.serialize())
        return EXIT_OK
    if parsed.format == 'symbolic':
        for r, value in objects:
            out.write("# {}_{}\n{}".format(parsed.kind, r, value.serialize()))
        return EXIT_OK
    points = _points(parsed)
    if not points:
        raise DomainError("numeric moment tables need at least one --x")
    p = JainParams(parsed.n, parsed.beta)
    rows = [{'kind': parsed.kind, 'r': r, 'x': x, 'value': float(value.evaluate(x, p.beta, p.n))}
            for r, value in objects for x in points]
    frame = pd.DataFrame(rows, columns=['kind', 'r', 'x', 'value'])
    if parsed.format == 'csv':
        out.write(frame.to_csv(index=False, float_format=FLOAT_FORMAT))
    else:
        out.write(json.dumps(frame_records(frame)) + "\n")
    return EXIT_OK


def cmd_verify(parsed, out):
    results = []
    if parsed.suite in ('recurrences', 'all'):
        results += run_recurrence_suite()
    if parsed.suite in ('differential', 'all'):
        results += run_differential_suite(parsed.grid)
    frame = pd.DataFrame(results, columns=['identity', 'where', 'passed', 'max_residual'])
    out.write(frame.to_csv(index=False, float_format=FLOAT_FORMAT))
    failed = frame[~frame['passed']]
    if len(failed):
        for _, row in failed.iterrows():
            out.write("FAIL: {} at {}\n".format(row['identity'], row['where']))
        return EXIT_FAILED
    out.write("PASS: {} identities\n".format(len(frame)))
    return EXIT_OK


def validate_converge(parsed):
    """Argument checks for converge; failures here are usage errors."""
    if not parsed.n_list:
        raise DomainError("--n-list is empty")
    if any(b <= a for a, b in zip(parsed.n_list, parsed.n_list[1:])):
        raise DomainError("Invalid n list {}, must be strictly increasing".format(parsed.n_list))
    for n in parsed.n_list:
        JainParams(n, parsed.beta)
    f = builtin_function(parsed.fn)
    if parsed.experiment == 'korovkin':
        a, b = parsed.interval
        if not 0 <= a < b:
            raise DomainError("Invalid interval {}".format(parsed.interval))
        if parsed.grid_size is not None and parsed.grid_size < 2:
            raise DomainError("Invalid grid size {}".format(parsed.grid_size))
        return f
    if not parsed.x >= 0:
        raise DomainError("Invalid x {}".format(parsed.x))
    if parsed.experiment == 'voronovskaja' and (f.fp is None or f.fpp is None):
        raise DomainError("{} has no derivatives".format(f.label))
    if parsed.experiment == 'bound' and not (parsed.beta > 0 and parsed.constant > 0):
        raise DomainError("bound needs beta > 0 and C > 0, got beta {} and C {}"
                          .format(parsed.beta, parsed.constant))
    return f


def cmd_converge(parsed, config, out):
    cfg = series_config(config)
    workers, grid_size = experiment_settings(config)
    f = validate_converge(parsed)
    try:
        if parsed.experiment == 'voronovskaja':
            report = voronovskaja_experiment(parsed.beta, f, parsed.x, parsed.n_list, cfg,
                                             workers=workers)
        elif parsed.experiment == 'korovkin':
            report = korovkin_convergence_table(parsed.beta, f, parsed.interval, parsed.n_list,
                                                parsed.grid_size or grid_size, cfg,
                                                workers=workers)
        else:
            report = bound_experiment(parsed.beta, f, parsed.x, parsed.n_list, parsed.constant,
                                      cfg, workers=workers)
    except DomainError as err:
        raise ExperimentError("{} experiment failed: {}".format(parsed.experiment, err)) from err
    text = report.to_csv() if parsed.format == 'csv' else report.to_json() + "\n"
    if parsed.out is None:
        out.write(text)
    else:
        with open(parsed.out, 'w') as output:
            output.write(text)
    return EXIT_OK


def main(argv=None, out=None):
    out = out or sys.stdout
    args = call_args(argv)
    parsed = args["parsed_args"]
    try:
        if args["logging_arg"].arg_check(parsed.logging):
            configure_logging(logging.INFO, parsed.log_file)
        config = call_ini(parsed.config)
        if parsed.command == 'eval':
            return cmd_eval(parsed, config, out)
        elif parsed.command == 'moments':
            return cmd_moments(parsed, out)
        elif parsed.command == 'verify':
            return cmd_verify(parsed, out)
        return cmd_converge(parsed, config, out)
    except (DomainError, RangeError, ValueError, argparse.ArgumentTypeError) as err:
        sys.stderr.write("error: {}\n".format(err))
        return EXIT_USAGE
    except (TruncationError, QuadratureError, ExperimentError) as err:
        sys.stderr.write("numeric failure: {}\n".format(err))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
