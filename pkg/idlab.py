"""Run the identification lab from the repository root: python idlab.py <command> --config PATH"""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
