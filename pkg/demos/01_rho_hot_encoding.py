"""Rho-hot encoding: one-hot with a learnable scale and duplication.

A one-hot vector concatenated next to dense word embeddings has two
problems: its entries (exactly 1) are much larger than typical embedding
values, and it is short, so it gets drowned out.  Rho-hot encoding fixes
both by scaling the active entry to a trainable rho and repeating it n
times.
"""

import numpy as np

from lexsent.encoding import RhoHotFamily, one_hot, rho_hot

family = RhoHotFamily("demo", ["positive", "neutral", "negative"], n=4,
                      rho_init=0.5)

print("one-hot for category 0 of 3:   ", one_hot(0, 3).data)
print("rho-hot (rho=0.5, n=4), cat 0: ", rho_hot(family, 0).data)
print("rho-hot (rho=0.5, n=4), cat 2: ", rho_hot(family, 2).data)

# with rho=1 and n=1 the encoding collapses back to one-hot
unit = RhoHotFamily("unit", ["a", "b", "c"], n=1, rho_init=1.0)
assert np.array_equal(rho_hot(unit, 1).data, one_hot(1, 3).data)
print("\nrho=1, n=1 reproduces one-hot exactly")

# rho is an ordinary parameter: gradients flow through the encoding
value = rho_hot(family, 1).sum()
value.backward()
print(f"d sum(encoding) / d rho = {float(family.rho.grad)}  (equals n)")
