"""
Accounting for an eavesdropper
==============================

Two ways of making a monotone aware of Eve: average it over Eve's value, or
also let Eve process her value first and take the smallest average.
"""

import numpy as np

from secmono import monotones
from secmono.probdist import JointDistribution, forget

# A and B hold independent bits and Eve learns their parity.
entries = {(a, b, a ^ b): 0.25 for a in (0, 1) for b in (0, 1)}
d = JointDistribution.from_entries(["A", "B", "E"], (2, 2, 2), entries)

m1 = monotones.eve_average(d, "E", monotones.s_n)
print("averaged over Eve:", m1)

# Eve throwing her parity away lowers the average, so M1 can drop when
# Eve acts alone.
print("after Eve forgets:", monotones.eve_average(forget(d, "E"), "E", monotones.s_n))

# The minimized version already sees this.
r = monotones.eve_min(d, "E", monotones.s_n, search_budget=50, seed=3)
print("minimized over Eve's maps:", r.value, "(upper bound:", r.is_upper_bound, ")")
print("best map:\n", np.round(r.channel.kernel, 3))
