"""Command-line interface."""

import sys

from .main import build_parser
from .main import main as _main


def main(argv=None) -> int:
    """Run the command and return its exit code."""
    return _main(argv)


def entry() -> None:
    sys.exit(_main())


__all__ = ["build_parser", "entry", "main"]
