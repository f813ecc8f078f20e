"""Baseline vs upgraded sweeps over 1..50 users, one CSV per scenario and
one SVG per metric, plus the threshold reports.

    python3 scripts/reproduce_results.py --out results/
"""
import argparse
from pathlib import Path

from capplan import ModelModes, NetworkConfig, ThresholdCriteria, UpgradePlan, apply_upgrade, compare, find_threshold, sweep
from capplan.report import METRIC_COLUMNS, render_plot, write_csv, write_delta_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--to", type=int, default=50)
    ap.add_argument("--processing", choices=["literal", "disabled"], default="disabled")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    modes = ModelModes(processing_mode=args.processing)
    base_cfg = NetworkConfig()
    up_cfg = apply_upgrade(base_cfg, UpgradePlan.paper())

    base = sweep(base_cfg, modes, 1, args.to)
    upg = sweep(up_cfg, modes, 1, args.to)
    (out / "baseline.csv").write_text(write_csv(base))
    (out / "upgraded.csv").write_text(write_csv(upg))
    (out / "delta.csv").write_text(write_delta_csv(compare(base, upg)))
    for metric in METRIC_COLUMNS:
        (out / f"{metric}.svg").write_text(render_plot(base, upg, metric))

    for label, s in (("baseline", base), ("upgraded", upg)):
        rep = find_threshold(s, ThresholdCriteria())
        print(f"{label}: {rep.first_violation} -> upgrade_required_at={rep.upgrade_required_at}")

    saturated = [p.n_users for p in base.points if p.saturated]
    peak = max(base.points, key=lambda p: p.throughput_bps)
    print(f"baseline saturates from n={saturated[0] if saturated else None}")
    print(f"baseline throughput peak {peak.throughput_bps / 1e6:.3f} Mbps at n={peak.n_users}")
    print(f"upgraded carried load at n={args.to}: {upg.points[-1].throughput_bps / 1e6:.1f} Mbps")
    print(f"wrote {len(METRIC_COLUMNS)} plots and 3 CSVs to {out}/")


if __name__ == "__main__":
    main()
