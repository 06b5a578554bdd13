#!/usr/bin/env python3
"""Run the Monte Carlo simulator against the analytic default probabilities
and print a comparison table: individual defaults vs Phi1(z), joint
defaults vs Phi2(z, z, k/n), and the realized asset correlation.

Pass --quick for a reduced path count.
"""

import argparse
import time

from levdiv import (
    BankStrategy,
    FixedOverlap,
    MarketParams,
    SimConfig,
    binorm_cdf_oracle,
    estimate_default_probs,
    individual_pd,
    z_score,
)

# (f, n, N, k, chi, steps): the joint target uses the overlap-implied
# correlation k/n, so any (k, n) pairing is checkable
CONFIGS = [
    (0.10, 1, 2, 1, 1.6, 250),
    (0.25, 4, 8, 2, 1.6, 250),
    (0.50, 4, 8, 2, 1.6, 250),
    (0.25, 4, 16, 1, 5.1, 1000),
    (0.25, 16, 32, 8, 1.6, 250),
]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--paths", type=int, default=100_000)
    parser.add_argument("--quick", action="store_true", help="use 10k paths")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    paths = 10_000 if args.quick else args.paths

    header = (
        f"{'f':>5} {'n':>3} {'N':>3} {'k':>3} {'chi':>4} | "
        f"{'pd_hat':>8} {'Phi1(z)':>8} {'dev/se':>7} | "
        f"{'joint':>8} {'Phi2':>8} {'dev':>8} | {'corr':>7} {'k/n':>5}"
    )
    print(header)
    print("-" * len(header))
    for f, n, N, k, chi, steps in CONFIGS:
        market = MarketParams.from_chi(N, chi)
        strategy = BankStrategy(f, n)
        config = SimConfig(
            market=market,
            strategies=(strategy, strategy),
            overlap=FixedOverlap(k),
            paths=paths,
            steps_per_horizon=steps,
            seed=args.seed,
        )
        t0 = time.time()
        res = estimate_default_probs(config)
        z = z_score(strategy, market)
        pd_target = individual_pd(strategy, market)
        joint_target = binorm_cdf_oracle(z, z, k / n)
        se_mult = abs(res.pd1_hat - pd_target) / res.se_pd1 if res.se_pd1 else float("inf")
        print(
            f"{f:>5} {n:>3} {N:>3} {k:>3} {chi:>4} | "
            f"{res.pd1_hat:>8.5f} {pd_target:>8.5f} {se_mult:>7.2f} | "
            f"{res.joint_pd_hat:>8.5f} {joint_target:>8.5f} "
            f"{abs(res.joint_pd_hat - joint_target):>8.5f} | "
            f"{res.realized_correlation:>7.4f} {k / n:>5.2f}"
            f"   [{time.time() - t0:.0f}s]"
        )


if __name__ == "__main__":
    main()
