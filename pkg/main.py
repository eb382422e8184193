#!/usr/bin/env python3
"""
Calculus Engine - Main Entry Point
"""
import sys

from cycalc.cli import main

if __name__ == "__main__":
    sys.exit(main())
