"""One challenge, end to end.

Builds a PUF instance from a seed, walks a single challenge through both
pipeline stages, prints the intermediate addresses, currents and power, and
round-trips the instance through a JSON file to show the persisted copy
answers identically.
"""

import tempfile
from pathlib import Path

from nrpuf import (
    evaluate_bit,
    expand_challenge,
    load_instance,
    make_instance,
    save_instance,
    standard_conditions,
)

SEED = 0xC0FFEE
CHALLENGE = 0x0123456789ABCDEF

dev, env = standard_conditions()
puf = make_instance(dev, SEED, rows=128, cols=128, cs=5)

sel_a = expand_challenge(CHALLENGE, None, False, puf.cs, puf.rows, puf.cols)
print(f"challenge          : 0x{CHALLENGE:016x}")
print(f"array A columns    : {sel_a.columns}")
print(f"array A row pair   : {sel_a.row_pair}")

out = evaluate_bit(puf, CHALLENGE, env)
print(f"hidden bit (A)     : {out.hidden_bit}")
sel_b = expand_challenge(CHALLENGE, out.hidden_bit, True, puf.cs, puf.rows, puf.cols)
print(f"array B columns    : {sel_b.columns}")
print(f"array B row pair   : {sel_b.row_pair}")
print(f"I_P, I_Q (stage B) : {out.i_p*1e6:.3f} uA, {out.i_q*1e6:.3f} uA")
print(f"response bit       : {out.bit}")
print(f"read power         : {out.power*1e6:.3f} uW")

with tempfile.TemporaryDirectory() as d:
    path = Path(d) / "instance.json"
    save_instance(puf, path)
    clone = load_instance(path)
    again = evaluate_bit(clone, CHALLENGE, env)
    print(f"persisted copy     : bit {again.bit} "
          f"({'same' if again.bit == out.bit else 'DIFFERENT'}), "
          f"file {path.stat().st_size/1e6:.2f} MB")
