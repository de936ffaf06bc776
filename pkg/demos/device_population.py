"""Sample a fabricated cell population and look at its read currents.

Functional cells sit in a lognormal HRS band (about 95% inside
100 kOhm..1 MOhm); a stuck-at-ON minority lands in a uniform LRS band and
carries one to two orders of magnitude more current. The script prints the
population summary and writes a per-cell CSV you can histogram.
"""

import csv

import numpy as np

from nrpuf import DeviceParams, build_array, current_law

N_CELLS = 20_000
READ_V = 0.1
TEMP = 300.0

dev = DeviceParams(stuck_on_prob=0.10)
rng = np.random.default_rng(7)
arr = build_array(N_CELLS, 1, dev, rng)

r = arr.resistances[:, 0]
stuck = arr.stuck[:, 0]
i = current_law(r, READ_V, TEMP, dev)

print(f"cells sampled        : {N_CELLS}")
print(f"stuck-at-ON fraction : {stuck.mean():.3f} (target {dev.stuck_on_prob})")
print(f"HRS median           : {np.median(r[~stuck])/1e3:.1f} kOhm")
hrs_in_decade = np.mean((r[~stuck] >= 1e5) & (r[~stuck] <= 1e6))
print(f"HRS inside 100k..1M  : {hrs_in_decade*100:.1f}%")
print(f"HRS current sigma    : {np.std(i[~stuck])*1e9:.1f} nA")
print(f"LRS median current   : {np.median(i[stuck])*1e6:.2f} uA")

# the nonlinearity: doubling the read voltage more than doubles the current
i_2v = current_law(np.median(r[~stuck]), 2 * READ_V, TEMP, dev)
i_1v = current_law(np.median(r[~stuck]), READ_V, TEMP, dev)
print(f"I(0.2 V)/I(0.1 V)    : {i_2v/i_1v:.2f} (alpha = {dev.nonlin_alpha})")

with open("device_population.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["resistance_ohm", "stuck", "current_a"])
    for k in range(N_CELLS):
        w.writerow([repr(float(r[k])), int(stuck[k]), repr(float(i[k]))])
print("wrote device_population.csv")
