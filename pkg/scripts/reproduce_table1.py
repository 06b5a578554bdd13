#!/usr/bin/env python3
"""Print the critical-diversification table for the standard parameter box
(N in {10,20,30,40}, chi in {1.6, 5.1, 8.9}, both leverage scenarios) next
to the built-in reference values, plus a loose-threshold variant showing
how the boundary moves with epsilon."""

import sys

from levdiv.cli import main

if __name__ == "__main__":
    code = main(["table1"])
    print()
    print("same box with epsilon_safe = 0.01 (looser safety threshold):")
    code |= main(["table1", "--eps-safe", "0.01"])
    sys.exit(code)
