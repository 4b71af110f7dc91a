"""
MSQKD Simulator

Command-line entry script.
Usage: python msqkd.py <run|attack|sweep|verify|list> [options]
"""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
