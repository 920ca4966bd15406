#!/usr/bin/env python3
"""
Launcher for the lab CLI.

Usage: uv run -m scripts.run_lab critical-alpha --mu 0 --out results/critical.json
"""

import sys
from pathlib import Path

# Add the src directory to the path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from src.cli import run


def main() -> int:
    """Forwards the command line to the lab and returns its exit code."""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
