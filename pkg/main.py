import logging
import os
import sys
from pathlib import Path

from src.cli import run
from src.config import load_settings


def setup_directories():
    base_dir = Path(__file__).resolve().parent
    log_dir = load_settings().log_dir
    if not log_dir.is_absolute():
        log_dir = base_dir / log_dir

    for directory in (log_dir, base_dir / 'reports' / 'plots'):
        os.makedirs(directory, exist_ok=True)

    return log_dir


def add_file_logging(log_dir):
    handler = logging.FileHandler(log_dir / 'seu_corner.log')
    handler.setLevel(logging.INFO)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    logging.getLogger().addHandler(handler)


def main():
    log_dir = setup_directories()
    add_file_logging(log_dir)
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
