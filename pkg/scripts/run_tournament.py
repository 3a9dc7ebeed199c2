#!/usr/bin/env python3
"""Group tournament at full scale: sizes {2,4,8}, 5000 rounds, 10 seeds,
homogeneous ToMAGA / homogeneous Pavlov / one-ToMAGA heterogeneous groups
on the 5/4/2/1 payoffs. Writes tournament.csv and tournament_means.csv
under results/tournament/. Extra global flags pass through.
"""

import sys

from staghunt.cli import main

if __name__ == "__main__":
    raise SystemExit(
        main(
            [
                "--out", "results/tournament",
                "--seed", "2026",
                *sys.argv[1:],
                "tournament",
            ]
        )
    )
