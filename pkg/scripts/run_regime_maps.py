#!/usr/bin/env python3
"""Produce the regime-map data files for both leverage scenarios over the
standard box (N in {10,20,30,40}, n in [1, N], 100 log-spaced chi in
[0.001, 9]) and print per-N risky fractions.

Writes results/regime_map_{scenario}.csv in long format
(N, n, chi, delta_phi2, regime); any plotting tool can render the maps
from these files.
"""

import pathlib
import time

from levdiv import LeverageScenario, default_chi_grid, regime_sweep

SCENARIOS = {
    "fn0.10_fa0.25": LeverageScenario(0.10, 0.25),
    "fn0.25_fa0.50": LeverageScenario(0.25, 0.50),
}


def main() -> None:
    out_dir = pathlib.Path(__file__).resolve().parent.parent / "results"
    out_dir.mkdir(exist_ok=True)
    for tag, scenario in SCENARIOS.items():
        t0 = time.time()
        sweep = regime_sweep(scenario, [10, 20, 30, 40], default_chi_grid())
        path = out_dir / f"regime_map_{tag}.csv"
        path.write_text(sweep.to_csv())
        print(f"{tag}: wrote {path} ({len(sweep.cells)} cells, {time.time() - t0:.1f}s)")
        for size in sweep.market_sizes():
            print(f"  N={size}: risky fraction {sweep.risky_fraction(size):.4f}")


if __name__ == "__main__":
    main()
