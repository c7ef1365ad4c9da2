#!/usr/bin/env python3
"""Reception-model calibration sweep for the shipped default scenario.

Runs the five-variant comparison under a grid of reception models and prints
every gate the shipped calibration must satisfy, so a calibration change can
be justified (or rejected) from one table:

    * coarse MAE within 15% of the analytical 0.32 L prediction
    * coarse within-10m fraction <= 0.05
    * fine-improved / fine within-10m near 0.59 / 0.47 (+-0.10), improved > plain
    * self-localizing accurate within-10m >= 0.99, inaccurate 0.89 +- 0.07
    * improved-vs-plain fine-localization overhead in [0.03, 0.15]
    * MAE ordering EFG-A <= EFG-I <= FG-I <= FG <= CG in every replicate

Usage: python tools/calibrate.py [--replicates N] [--samples N] [--efg-limit K]
"""

from __future__ import annotations

import argparse
from dataclasses import replace

from gridloc.engine import run_replicates
from gridloc.metrics import WITHIN_10M_INDEX, compute_metrics, fgl_overhead, merge_reports
from gridloc.radio import BernoulliDisk, DistanceDecay, IdealDisk
from gridloc.scenario import paper_default_scenario

LABELS = ("CG", "FG-Improved", "FG", "EFG-Accurate", "EFG-Inaccurate")
THEORY_MAE = 23.99186938124421  # 0.3199 * 75 at range 75*sqrt(5)/2
ORDER = ("EFG-Accurate", "EFG-Inaccurate", "FG-Improved", "FG", "CG")


def evaluate(scenario, replicates: int) -> dict:
    traces = run_replicates(scenario, replicates)
    per_rep = [{lbl: compute_metrics(t, lbl) for lbl in LABELS} for t in traces]
    pooled = {lbl: merge_reports([rep[lbl] for rep in per_rep]) for lbl in LABELS}
    order_ok = all(
        all(rep[a].mae <= rep[b].mae for a, b in zip(ORDER, ORDER[1:])) for rep in per_rep
    )
    return {
        "cg_mae": pooled["CG"].mae,
        "cg_delta": pooled["CG"].mae / THEORY_MAE - 1.0,
        "cg_w10": pooled["CG"].within_bound[WITHIN_10M_INDEX],
        "fgi_w10": pooled["FG-Improved"].within_bound[WITHIN_10M_INDEX],
        "fg_w10": pooled["FG"].within_bound[WITHIN_10M_INDEX],
        "efga_w10": pooled["EFG-Accurate"].within_bound[WITHIN_10M_INDEX],
        "efgi_w10": pooled["EFG-Inaccurate"].within_bound[WITHIN_10M_INDEX],
        "overhead": fgl_overhead(pooled["FG-Improved"], pooled["FG"]),
        "order_ok": order_ok,
        "fgl_fg": pooled["FG"].fgl_count,
    }


def gates(row: dict) -> str:
    checks = [
        ("mae", abs(row["cg_delta"]) <= 0.15),
        ("cgw", row["cg_w10"] <= 0.05),
        ("fgi", abs(row["fgi_w10"] - 0.59) <= 0.10),
        ("fg", abs(row["fg_w10"] - 0.47) <= 0.10),
        ("gt", row["fgi_w10"] > row["fg_w10"]),
        ("efa", row["efga_w10"] >= 0.99),
        ("efi", abs(row["efgi_w10"] - 0.89) <= 0.07),
        ("ovh", 0.03 <= row["overhead"] <= 0.15),
        ("ord", row["order_ok"]),
    ]
    return " ".join(name if ok else name.upper() + "!" for name, ok in checks)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--replicates", type=int, default=3)
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--efg-limit", type=int, default=None, help="override EFG fine count limit")
    parser.add_argument(
        "--ratios", type=float, nargs="*", default=[0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.0]
    )
    parser.add_argument("--losses", type=float, nargs="*", default=[0.02, 0.05, 0.08, 0.12])
    args = parser.parse_args()

    base = paper_default_scenario(target_samples=args.samples)
    if args.efg_limit is not None:
        profiles = []
        for sp in base.profiles:
            if sp.profile.self_localize:
                sp = replace(sp, profile=replace(sp.profile, fine_cnt_limit=args.efg_limit))
            profiles.append(sp)
        base = replace(base, profiles=tuple(profiles))

    range_R = base.reception.range_R
    configs = [("ideal", IdealDisk(range_R=range_R))]
    configs += [(f"decay {r:.2f}", DistanceDecay(reliable_radius=r * range_R, range_R=range_R)) for r in args.ratios]
    configs += [(f"bern {l:.2f}", BernoulliDisk(range_R=range_R, loss_prob=l)) for l in args.losses]

    print(
        f"{'model':12s} {'cg_mae':>7} {'delta':>7} {'cg_w10':>6} {'fgi':>6} {'fg':>6} "
        f"{'efga':>6} {'efgi':>6} {'ovh':>7} {'fglFG':>6}  gates"
    )
    for name, model in configs:
        scenario = replace(base, reception=model)
        row = evaluate(scenario, args.replicates)
        print(
            f"{name:12s} {row['cg_mae']:7.2f} {row['cg_delta']:+7.2%} {row['cg_w10']:6.3f} "
            f"{row['fgi_w10']:6.3f} {row['fg_w10']:6.3f} {row['efga_w10']:6.3f} "
            f"{row['efgi_w10']:6.3f} {row['overhead']:+7.3f} {row['fgl_fg']:6d}  {gates(row)}"
        )


if __name__ == "__main__":
    main()
