#!/usr/bin/env python3
"""Grid-world comparison at full scale: both scenarios, all four agent
variants, 10 seeds, 1500 iterations each. Writes gridworld.csv and
gridworld_summary.csv under results/gridworld/. Extra global flags pass
through, e.g. `python scripts/run_gridworld.py --jobs 4`.
"""

import sys

from staghunt.cli import main

if __name__ == "__main__":
    raise SystemExit(
        main(
            [
                "--out", "results/gridworld",
                "--seed", "2026",
                *sys.argv[1:],
                "gridworld",
            ]
        )
    )
