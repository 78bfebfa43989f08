# Command-line package

from .commands import build_parser, configure_logging, emit, run
