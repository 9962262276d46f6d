"""Multi-seed base / CSA / PSO comparison on the 33-bus feeder.

    python scripts/reproduce_table1.py --seeds 10 --out results/table1

Writes per-run reports and CSVs under ``--out/seed_<k>/``, a ``seeds.csv``
summary and a ``comparison.csv`` built from the median-cost run of each
optimizer plus the cited reference rows.
"""

import argparse
import csv
import statistics
from pathlib import Path

from capcsa.report import (
    compare_runs,
    format_table,
    read_cited_rows,
    run_base,
    run_optimized,
    write_comparison,
    write_report,
)
from capcsa.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="ieee33_11kv")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--out", default="results/table1")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    scen = load_scenario(args.scenario).with_overrides(workers=args.workers)
    base = run_base(scen)
    write_report(base, out)

    runs = {"csa": [], "pso": []}
    for seed in range(args.seeds):
        for opt in runs:
            rep = run_optimized(scen.with_overrides(seed=seed), opt, base=base)
            write_report(rep, out / f"seed_{seed}")
            runs[opt].append(rep)
            print(f"seed {seed} {opt}: cost {rep.best_cost:.5f}, plan {rep.plan}, "
                  f"P -{rep.p_loss_reduction_pct:.2f}%, Q -{rep.q_loss_reduction_pct:.2f}%")

    with open(out / "seeds.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["seed", "optimizer", "best_cost", "p_loss_kw", "q_loss_kvar", "min_v_pu",
                    "p_reduction_pct", "q_reduction_pct", "plan"])
        for opt, reps in runs.items():
            for seed, r in enumerate(reps):
                w.writerow([seed, opt, r.best_cost, r.result.total_p_loss_kw, r.result.total_q_loss_kvar,
                            r.result.min_voltage, r.p_loss_reduction_pct, r.q_loss_reduction_pct,
                            " ".join(f"{b}:{m:.4f}" for b, m in r.plan)])

    medians = []
    for opt, reps in runs.items():
        med = statistics.median_low([r.best_cost for r in reps])
        medians.append(next(r for r in reps if r.best_cost == med))
    rows = compare_runs([base] + medians, read_cited_rows())
    write_comparison(rows, out)
    print(format_table(rows))


if __name__ == "__main__":
    main()
