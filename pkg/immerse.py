#!/usr/bin/env python3
"""
Command line entry point.

    python immerse.py coset-graph baaB abAB baBa
    python immerse.py --json deck tests/data/fig3.graph
"""
import sys

from fimgraph.cli import main

if __name__ == '__main__':
    sys.exit(main())
