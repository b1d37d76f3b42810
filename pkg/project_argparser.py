import argparse
import configparser
import os
import ast

import numpy

from numerics import SeriesQuadConfig

DEFAULT_INI = "config/jpk_init.ini"
CONFIG_ENV = "JPK_CONFIG"

FUNCTION_NAMES = ['const', 'linear', 'square', 'cube', 'exp-neg', 'sin', 'abs-sin']


class SingleArg:

    def __init__(self, parser, key, lng_key, help_msg, on_msg, off_msg):
        # Adds an argument with the key (ex: -l), name (ex: --logging), and help message to be
        # displayed when entering -h
        parser.add_argument(key, lng_key, type=str, help=help_msg, default=off_msg)
        # This sets the strings for which input will be checked against in arg_check()
        self.on_msg = on_msg
        self.off_msg = off_msg

    # argument checking for on/off or other binary arguments
    def arg_check(self, input):
        if (input == self.on_msg):
            return True
        elif (input == self.off_msg):
            return False
        else:
            raise argparse.ArgumentTypeError(
                "Invalid input, use -h for more information on arguments.")


def x_values(text):
    """A single point, or a:b:steps for numpy.linspace(a, b, steps)."""
    try:
        if ':' in text:
            start, stop, steps = text.split(':')
            return [float(v) for v in numpy.linspace(float(start), float(stop), int(steps))]
        return [float(text)]
    except ValueError:
        raise argparse.ArgumentTypeError('Invalid x {}, use a number or a:b:steps'.format(text))


def float_list(text):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "Invalid list {}, use comma separated numbers".format(text))


def interval(text):
    try:
        low, high = (float(v) for v in text.split(':'))
    except ValueError:
        raise argparse.ArgumentTypeError('Invalid interval {}, use a:b'.format(text))
    return low, high


def _add_point_args(parser, x_required):
    parser.add_argument('--n', type=float, default=10.0, help='operator index n > 0')
    parser.add_argument('--beta', type=float, default=0.0, help='shape parameter 0 <= beta < 1')
    parser.add_argument('--x', type=x_values, action='append', required=x_required,
                        help='evaluation point, repeatable, or a range a:b:steps')


# call_args() instantiates each SingleArg object and adds them to a dictionary, as well as the
# data structure filled with parsed args
def call_args(argv=None):
    parser = argparse.ArgumentParser(
        description="Jain and Phillips-type operators: evaluation, exact moments, identities")

    arg_dict = dict()
    arg_dict["logging_arg"] = \
        SingleArg(parser=parser, key='-l', lng_key='--logging',
                  help_msg='''Turn logging on or off, enter either "on" or "off".
                           This defaults to off with no argument.''',
                  on_msg='on', off_msg='off')
    parser.add_argument('--config', default=None,
                        help='ini file with [SERIES] and [EXPERIMENT] sections, defaults to $'
                             + CONFIG_ENV + ' then ' + DEFAULT_INI)
    parser.add_argument('--log-file', default=None, help='also write log records to this file')

    commands = parser.add_subparsers(dest='command', required=True)

    eval_parser = commands.add_parser('eval', help='apply an operator to a built-in function')
    eval_parser.add_argument('--op', choices=['jain', 'phillips'], required=True)
    eval_parser.add_argument('--fn', choices=FUNCTION_NAMES, default='const')
    eval_parser.add_argument('--tol', type=float, default=None, help='override tail_tol')
    _add_point_args(eval_parser, x_required=True)

    moments_parser = commands.add_parser('moments', help='print moment tables')
    moments_parser.add_argument('--kind', choices=['B', 'T', 'mu', 'P', 'f'], required=True)
    moments_parser.add_argument('--r-max', type=int, default=3)
    moments_parser.add_argument('--format', choices=['csv', 'json', 'symbolic'], default='symbolic')
    moments_parser.add_argument('--out-dir', default=None,
                                help='write one <kind>_<r>.txt file per order instead of printing')
    _add_point_args(moments_parser, x_required=False)

    verify_parser = commands.add_parser('verify', help='check recurrences and identities')
    verify_parser.add_argument('--suite', choices=['recurrences', 'differential', 'all'],
                               default='all')
    verify_parser.add_argument('--grid', choices=['small', 'full'], default='small')

    converge_parser = commands.add_parser('converge', help='run a convergence experiment')
    converge_parser.add_argument('--experiment', choices=['voronovskaja', 'korovkin', 'bound'],
                                 required=True)
    converge_parser.add_argument('--fn', choices=FUNCTION_NAMES, default='square')
    converge_parser.add_argument('--beta', type=float, default=0.0)
    converge_parser.add_argument('--x', type=float, default=1.0)
    converge_parser.add_argument('--interval', type=interval, default=(0.0, 2.0))
    converge_parser.add_argument('--n-list', type=float_list, default=[8.0, 16.0, 32.0, 64.0])
    converge_parser.add_argument('--grid-size', type=int, default=None)
    converge_parser.add_argument('--C', type=float, default=10.0, dest='constant',
                                 help='constant of the direct estimate')
    converge_parser.add_argument('--format', choices=['csv', 'json'], default='csv')
    converge_parser.add_argument('--out', default=None, help='output file, stdout by default')

    arg_dict["parsed_args"] = parser.parse_args(argv)

    return arg_dict


# for flexible type conversion of ini values
def eval_type(input):
    try:
        input = ast.literal_eval(input)
    except (ValueError, SyntaxError):
        pass
    return input


def call_ini(path=None):
    """Reads the ini file; a missing file leaves an empty config and the defaults apply."""
    if path is None:
        path = os.environ.get(CONFIG_ENV, DEFAULT_INI)

    config = configparser.ConfigParser()
    config.read(path)

    return config


def series_config(config, tail_tol=None):
    """SeriesQuadConfig from the [SERIES] section, unknown keys ignored."""
    values = {}
    if config.has_section('SERIES'):
        for key in ('k_max', 'tail_tol', 'quad_rel_tol', 'quad_max_subdiv'):
            if config.has_option('SERIES', key):
                values[key] = eval_type(config.get('SERIES', key))
    if tail_tol is not None:
        values['tail_tol'] = tail_tol
    return SeriesQuadConfig(**values)


def experiment_settings(config):
    """(workers, grid_size) from the [EXPERIMENT] section."""
    workers = config.getint('EXPERIMENT', 'workers', fallback=1)
    grid_size = config.getint('EXPERIMENT', 'grid_size', fallback=41)
    return workers, grid_size
