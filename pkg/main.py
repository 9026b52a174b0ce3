"""
Entry point for topophase.

    python main.py check scenarios/wire_hmw.json
"""

import sys

from cli.app import main


if __name__ == "__main__":
    sys.exit(main())
