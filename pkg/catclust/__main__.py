from __future__ import annotations

import sys

from .cli import cli_run

if __name__ == "__main__":
    sys.exit(cli_run())
