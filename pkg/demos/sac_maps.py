"""Why the second crossbar exists.

A strict avalanche criterion asks that any small change to the read address
flips the output half the time. A single crossbar fails this badly: change
one of five columns and the other four keep most of the differential, so the
flip rate sits far below 50%. Routing the first stage's output into a second,
hidden read address repairs it.

Prints the seed-averaged transition-rate maps for both pipelines from a
10-seed experiment, then saves the grids as CSV.
"""

import csv

import numpy as np

from nrpuf import ExperimentConfig, run_sac_experiment

cfg = ExperimentConfig.standard("sac", master_seed=2024, instances=10)
report = run_sac_experiment(cfg, workers=1)
r = report.results


def show(name, grid):
    print(f"{name}: output flip % by (columns changed, rows changed)")
    print("      " + "".join(f"  k={k}   " for k in range(len(grid[0]))))
    for j, row in enumerate(grid):
        cells = "".join(
            f"{v:>7.1f} " if v is not None else "    -  " for v in row
        )
        print(f"  j={j} {cells}")


show("dual ", r["mean_map_dual"])
show("single", r["mean_map_single"])

agg = r["aggregate"]
print(f"max |rate-50| : dual {agg['mean_max_dev_dual']:.2f}  "
      f"single {agg['mean_max_dev_single']:.2f}")
print(f"worst-case UF |UF-50| per HD<=5 set: dual {agg['worst_uf_mad_dual']:.2f}  "
      f"single {agg['worst_uf_mad_single']:.2f}")
print("challenge-level flip rates (production expansion):")
for row in r["challenge_transition_rates"]:
    print(f"  HD={row['hd']}: dual {row['rate_dual']:.1f}%  "
          f"single {row['rate_single']:.1f}%")

for name in ("mean_map_dual", "mean_map_single"):
    with open(f"{name}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j"] + [f"k{k}" for k in range(len(r[name][0]))])
        for j, row in enumerate(r[name]):
            w.writerow([j] + [("" if v is None else v) for v in row])
print("wrote mean_map_dual.csv, mean_map_single.csv")
