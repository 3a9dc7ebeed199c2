#!/usr/bin/env python3
"""Equilibrium sweep over (phi, theta) for both payoff settings.

Writes analyze.csv per matrix under results/equilibrium/. Extra CLI flags
are passed through to `staghunt analyze`.
"""

import sys

from staghunt.cli import main

MATRICES = {
    "q1_40_30_20_0": ["--h", "40", "--c", "30", "--m", "20", "--g", "0"],
    "q2_5_4_2_1": ["--h", "5", "--c", "4", "--m", "2", "--g", "1"],
}

if __name__ == "__main__":
    for name, flags in MATRICES.items():
        rc = main(
            ["--out", f"results/equilibrium/{name}", "analyze", *flags, *sys.argv[1:]]
        )
        if rc != 0:
            raise SystemExit(rc)
