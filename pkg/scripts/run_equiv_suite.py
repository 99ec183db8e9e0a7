#!/usr/bin/env python3
"""Reproduce the full propagation-vs-unrolling table.

Runs 50 randomized instances per scheme at tolerance 1e-9 and drops
equiv_report.json + manifest.json under artifacts/equiv. Any extra
flags are passed straight to `gsdnn equiv`, so e.g.

    python scripts/run_equiv_suite.py --trials 200 --seed 3
"""

import sys

from gsdnn.cli import main

if __name__ == "__main__":
    args = ["equiv", "--model", "all", "--trials", "50", "--tol", "1e-9",
            "--out", "artifacts/equiv", *sys.argv[1:]]
    sys.exit(main(args))
