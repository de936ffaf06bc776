"""How big is the challenge space?

Counts distinct challenges for a few array geometries under both counting
conventions: the closed-form product (eq5 route) and the coarser
powers-of-two estimate (table1 route).
"""

from nrpuf import crp_count

print(f"{'N':>4} {'M':>4} {'CS':>3}  {'exact (eq5)':>20}  {'table1':>20}")
for n, m, cs in [(32, 32, 1), (64, 64, 3), (128, 128, 5), (256, 256, 5)]:
    exact = crp_count(n, m, cs)
    approx = crp_count(n, m, cs, formula="table1")
    print(f"{n:>4} {m:>4} {cs:>3}  {exact:>20,}  {approx:>20,}")

print()
c = crp_count(128, 128, 5)
print(f"128x128, CS=5: {c:,} challenges (~2^{c.bit_length()-1})")
print(f"with 13-bit responses per read: {crp_count(128, 128, 5, l=13):,}")
