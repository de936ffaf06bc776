"""Population quality metrics on a small fleet.

Runs the metrics suite on 20 simulated chips and prints the standard PUF
figures of merit. Uniqueness and diffuseness near 50% mean different chips
(and different challenges) disagree half the time, which is what an
identifier wants. Writes the uniformity histogram as CSV.
"""

import csv

from nrpuf import ExperimentConfig, run_metrics_suite

cfg = ExperimentConfig.standard(
    "metrics", master_seed=2024, instances=20, challenges=640
)
report = run_metrics_suite(cfg, workers=1)
r = report.results

print(f"instances x vectors x bits: "
      f"{r['population']} x {r['challenge_vectors']} x {r['bits_per_vector']}")
for name in ("uniformity", "uniqueness", "diffuseness", "bit_aliasing"):
    m = r[name]
    print(f"{name:<22}: {m['mean']:6.2f}%  (std {m['std']:.2f})")
wc = r["worst_case_uniformity"]
print(f"{'worst-case uniformity':<22}: {wc['mean']:6.2f}%  "
      f"({wc['sets']} sets, HD <= {wc['max_hd']})")

hist = r["uniformity_histogram"]
with open("uniformity_histogram.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["bin_low", "bin_high", "count"])
    for lo, hi, n in zip(hist["bin_edges"], hist["bin_edges"][1:], hist["counts"]):
        w.writerow([lo, hi, n])
print("wrote uniformity_histogram.csv")
