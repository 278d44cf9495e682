import sys

from . import pisier, rate, simulate, verify


COMMANDS = {
    'pisier': pisier.main,
    'rate': rate.main,
    'verify': verify.main,
    'simulate': simulate.main,
}


def main(*argv):
    if not argv or argv[0] not in COMMANDS:
        print("Usage: python -m cesaro.cli {%s} [options]" % ('|'.join(sorted(COMMANDS)),))
        return 2
    return COMMANDS[argv[0]](*argv[1:])


def console():
    return main(*sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
