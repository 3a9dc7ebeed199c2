#!/usr/bin/env python3
"""Self-play sweep over the 11x11 initial-cooperation grid (full scale).

ToMAGA vs the no-ToM guilt ablation, theta=200, 500 iterations, 20 seeds
per cell. Writes sweep.csv / sweep_cells.csv under results/matrix_selfplay/
plus a per-iteration trace of one mid-grid match. Extra global flags pass
through, e.g. `python scripts/run_matrix_selfplay.py --jobs 4`.
"""

import sys

from staghunt.cli import main

if __name__ == "__main__":
    extra = sys.argv[1:]
    raise SystemExit(
        main(
            [
                "--out", "results/matrix_selfplay",
                "--seed", "2026",
                *extra,
                "matrix-selfplay",
                "--trace-cell", "0.3", "0.3",
            ]
        )
    )
