import sys

from . import __version__
from .cli import main


def run() -> None:
    sys.exit(main(sys.argv, __version__))


if __name__ == '__main__':
    run()
