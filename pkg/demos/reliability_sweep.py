"""Bit error rate versus column-select width and sense margin.

Reading more columns at once averages device noise down (the differential
current spread grows like sqrt(CS) while the jitter-driven flip band does
not keep up), so BER falls as CS rises. A wider sense margin trades raw
errors for metastable reads. Emits the full sweep table as CSV.
"""

import csv

from nrpuf import ExperimentConfig, run_reliability_sweep

cfg = ExperimentConfig.standard(
    "reliability",
    master_seed=2024,
    instances=6,
    challenges=300,
    trials=30,
    margin_sweep=(1e-8, 2e-8, 4e-8),
)
report = run_reliability_sweep(cfg, workers=1)
rows = report.results["rows"]

margins = sorted({r["sense_margin"] for r in rows})
print("mean BER % (rows: CS, columns: sense margin)")
print("      " + "".join(f"{m*1e9:>8.0f}nA" for m in margins))
for cs in cfg.cs_sweep:
    line = [r["mean_ber_percent"] for r in rows if r["cs"] == cs]
    print(f"CS={cs}  " + "".join(f"{b:>10.3f}" for b in line))

with open("reliability_sweep.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["cs", "sense_margin", "mean_ber_percent", "reliability_percent"])
    for r in rows:
        w.writerow([r["cs"], r["sense_margin"], r["mean_ber_percent"],
                    r["reliability_percent"]])
print("wrote reliability_sweep.csv")
