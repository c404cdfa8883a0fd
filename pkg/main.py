"""
condlab - Main Entry Point
Structured-matrix conditioning laboratory

Runs one experiment from the command line:

    python main.py table-norms --ensemble toeplitz --sizes 32,64 --trials 20
    python main.py bound-check --bound kappa_general --sizes 8 --grid 1:1000:20
"""

import sys

from src.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
