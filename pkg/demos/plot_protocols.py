"""
Converting between canonical distributions
==========================================

Run the four built-in protocols and follow S3 and T3 through each one.
"""

from secmono import canonical, locc, monotones
from secmono.probdist import tensor

p3, px = canonical.p3(), canonical.px()
runs = [
    ("px_to_p2", px, canonical.p2("AB")),
    ("p3_to_p2", p3, canonical.p2("AB")),
    ("p3sq_to_px", tensor(p3, p3), px),
    ("pxsq_to_p3", tensor(px, px), p3),
]

for name, source, target in runs:
    ens = locc.run_protocol(source, locc.builtin(name))
    s = (monotones.s_n(source), locc.ensemble_monotone(ens, monotones.s_n))
    t = (monotones.t_n(source), locc.ensemble_monotone(ens, monotones.t_n))
    tv = locc.distance_to_target(ens, target)
    print(f"{name:11} branches={len(ens)}  S3 {s[0]:.0f}->{s[1]:.0f}  T3 {t[0]:.0f}->{t[1]:.0f}  TV={tv:.1e}")

# One copy of Px cannot become one copy of P3 and vice versa.
for a, b, label in ((px, p3, "Px -> P3"), (p3, px, "P3 -> Px")):
    yb = monotones.yield_bound(a, b)
    print(f"{label}: at most {yb.bound} copies per copy, limited by {yb.limiting}")

# Outside [0, 1] the mixture of S3 and T3 can grow under these protocols.
for lam, src, proto in ((-0.1, px, "px_to_p2"), (1.1, p3, "p3_to_p2")):
    ens = locc.run_protocol(src, locc.builtin(proto))
    before = monotones.m_lambda(src, lam)
    after = locc.ensemble_monotone(ens, lambda d: monotones.m_lambda(d, lam))
    print(f"lambda={lam}: {before:.2f} -> {after:.2f} under {proto}")
