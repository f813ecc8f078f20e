"""Replicated DES runs against the analytic queue predictions across the
baseline load range.

    python3 scripts/des_validation.py --seeds 5 --arrivals 200000
"""
import argparse

from capplan.des import analytic_predictions, sim_config_for_load, simulate_queue, validate_against_analytic
from capplan.model import NetworkConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--arrivals", type=int, default=200_000)
    ap.add_argument("--users", type=int, nargs="*", default=[2, 5, 10, 15, 18, 22, 30, 40, 50])
    ap.add_argument("--service", choices=["exponential", "deterministic"], default="exponential")
    args = ap.parse_args()

    cfg = NetworkConfig(queue_limit_packets=100_000)
    saturated_cfg = NetworkConfig()
    print(f"{'n':>4} {'wait_pred':>12} {'wait_sim':>12} {'drop_pred':>10} {'drop_sim':>10}  pass")
    for n in args.users:
        # large buffer below saturation so the infinite-queue wait applies
        c = cfg if n * 417 * 12000 < 1e8 else saturated_cfg
        wait, drop = analytic_predictions(c, n)
        for seed in range(args.seeds):
            stats = simulate_queue(sim_config_for_load(c, n, seed=seed, measured_arrivals=args.arrivals,
                                                       service_distribution=args.service))
            rep = validate_against_analytic(stats, wait, drop, 0.05)
            print(f"{n:>4} {wait:>12.4e} {stats.mean_wait_s:>12.4e} {drop:>10.2f} {stats.drop_rate_pps:>10.2f}  "
                  f"{'yes' if rep.passed else 'no'}")


if __name__ == "__main__":
    main()
