import sys
import math
import logging
import argparse
import contextlib

from ..errors import Error, PlanError
from ..spaces import LpSpace


EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

TRUE_WORDS = ('1', 'true', 'yes', 'on')
FALSE_WORDS = ('0', 'false', 'no', 'off')


class UsageError(Exception):
    pass


def base_parser(prog, description):
    parser = argparse.ArgumentParser(prog=prog, description=description)
    parser.add_argument('--config', metavar='FILE', help='key=value defaults, overridden by flags')
    parser.add_argument('--output', '-o', default='-', help='output path, - for stdout')
    parser.add_argument('--format', choices=('text', 'csv'), default='text')
    parser.add_argument('--verbose', '-v', action='count', default=0)
    return parser


def read_config(path):
    """UTF-8 key=value lines, # comments; keys are long flags without dashes"""
    values = {}
    with open(path, 'r', encoding='utf-8') as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition('=')
            if not eq:
                raise UsageError("%s:%d: expected key=value" % (path, lineno))
            values[key.strip().replace('-', '_')] = value.strip()
    return values


def _apply_config(parser, path):
    actions = {action.dest: action for action in parser._actions}
    defaults = {}
    for key, value in read_config(path).items():
        action = actions.get(key)
        if action is None or key in ('config', 'help'):
            raise UsageError("%s: unknown key %r" % (path, key))
        if action.nargs == 0:
            word = value.lower()
            if word not in TRUE_WORDS + FALSE_WORDS:
                raise UsageError("%s: %s expects true or false" % (path, key))
            value = word in TRUE_WORDS
        elif action.type is not None:
            try:
                value = action.type(value)
            except (TypeError, ValueError) as ex:
                raise UsageError("%s: bad value for %s: %s" % (path, key, ex))
        defaults[key] = value
        # a required flag given in the file may be left off the command line
        action.required = False
    parser.set_defaults(**defaults)


def parse_args(parser, argv):
    """
    Parse argv, first folding in defaults from --config; returns (args, None)
    or (None, exit_code) when argparse or the config file rejected the input
    """
    argv = list(argv)
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument('--config')
        known, _ = pre.parse_known_args(argv)
        if known.config:
            _apply_config(parser, known.config)
        return parser.parse_args(argv), None
    except SystemExit as ex:
        return None, ex.code if isinstance(ex.code, int) else EXIT_USAGE
    except (UsageError, OSError) as ex:
        sys.stderr.write('%s: error: %s\n' % (parser.prog, ex))
        return None, EXIT_USAGE


def setup_logging(verbose):
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format='%(levelname)s %(name)s: %(message)s')


@contextlib.contextmanager
def open_output(path):
    if path in (None, '-'):
        yield sys.stdout
    else:
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            yield handle


def run(parser, command, argv):
    """
    Parse, set up logging, and run command(args) -> exit code, mapping
    library errors to the exit contract
    """
    args, code = parse_args(parser, argv)
    if args is None:
        return code
    setup_logging(args.verbose)
    try:
        return command(parser, args)
    except PlanError as ex:
        sys.stderr.write('%s: plan check failed: %s\n' % (parser.prog, ex))
        return EXIT_VIOLATION
    except (Error, UsageError, ValueError) as ex:
        sys.stderr.write('%s: error: %s\n' % (parser.prog, ex))
        return EXIT_USAGE


def positive(name, value):
    if value is None:
        raise UsageError("--%s is required" % (name,))
    if not (value > 0 and math.isfinite(value)):
        raise UsageError("--%s must be positive, got %r" % (name, value))
    return value


def parse_space(text):
    """l<p>:<dim>, e.g. l2:8, l1:2, linf:3"""
    name, colon, dim = text.partition(':')
    if not name.startswith('l') or not colon:
        raise UsageError("Space must look like l2:8 or linf:3, got %r" % (text,))
    p = name[1:]
    try:
        p_norm = math.inf if p in ('inf', 'oo') else float(p)
        return LpSpace(int(dim), p_norm)
    except ValueError:
        raise UsageError("Bad space %r" % (text,))


def parse_point(text):
    try:
        return [float(_) for _ in text.split(',')]
    except ValueError:
        raise UsageError("Bad point %r, expected comma separated numbers" % (text,))
