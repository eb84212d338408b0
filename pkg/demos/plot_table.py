"""
The five tripartite monotones
=============================

Evaluate the three grouped mutual informations, S3 and T3 on the five
canonical distributions, then split a random distribution into those five
building blocks.
"""

import numpy as np

from secmono import canonical, monotones
from secmono.probdist import random_distribution

header = "S2(A:BC) S2(B:AC) S2(C:AB)   S3   T3"
print(f"{'':6} {header}")
for name, dist in canonical.five().items():
    row = monotones.five_vector(dist)
    print(f"{name:6} " + "  ".join(f"{v:7.3f}" for v in row))

# The Venn quantities of a random distribution decide which of P3 or Px is
# needed to match its five values.
rng = np.random.default_rng(1)
d = random_distribution(rng, "ABC", (2, 2, 3))
v = monotones.venn(d)
print("\nr, s, t, u =", np.round(v.as_tuple(), 4))

y = monotones.canonical_decomposition(d)
for name, amount in zip(monotones.YIELD_NAMES, y.as_tuple()):
    print(f"  {name:6} {amount:.4f}")

# The mixture reproduces the monotones of d.
print("match:", np.allclose(y.five_vector(), monotones.five_vector(d).as_tuple()))
