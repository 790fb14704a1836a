"""
Module entry point.

This allows running the CLI with: python -m flightplay
"""

from flightplay.cli import main

if __name__ == "__main__":
    main()
