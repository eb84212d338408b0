"""
Monotones of a GHZ state
========================

The quantum S3 and T3 of a GHZ state, the distributions obtained by
measuring it, and the bound on what any measurement can extract.
"""

import numpy as np

from secmono import canonical, monotones, quantum
from secmono.probdist import tensor

psi = quantum.ghz(3)
rho = psi.density_matrix()
print("S3, T3 on GHZ:", quantum.q_s_n(rho), quantum.q_t_n(rho))
print("local entropies:", quantum.local_entropies(psi))

for basis in ("z", "x"):
    d = quantum.measure_all(psi, [basis] * 3)
    print(f"{basis}-basis: S3={monotones.s_n(d):.3f} T3={monotones.t_n(d):.3f}")

# S3 + T3 of anything extracted is at most the local entropy sum.
for name, target in (("P3", canonical.p3()), ("P3 x P3", tensor(canonical.p3(), canonical.p3()))):
    v = quantum.sum_halving_bound(psi, target)
    print(f"{name}: S3+T3={v.target_sum:.1f}, bound {v.bound:.1f}, allowed={v.satisfied}")

# A random local basis never beats the bound either.
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    d = quantum.measure_all(psi, [quantum.random_unitary(rng, 2) for _ in range(3)])
    worst = max(worst, monotones.s_n(d) + monotones.t_n(d))
print(f"largest S3+T3 over 200 random bases: {worst:.4f}")
