#!/usr/bin/env python3
"""
Entry point for the germforge command line.

Usage:
    python run_germforge.py theorem_b --format text

Or with uv:
    uv run python run_germforge.py resolve --tilde --format dot
"""

import sys
from pathlib import Path

# Needed when the package is not installed in editable mode
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from germforge.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
