"""Allow `python -m ecdsim` as an alias for the console entry point."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
