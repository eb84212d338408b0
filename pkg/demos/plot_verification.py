"""
Randomized property checks
==========================

Run the three property suites with a small number of trials and replay a
failure from its recorded seed.
"""

from secmono import verify
from secmono.entropy import shannon_entropy

for suite in ("classical", "eve", "quantum"):
    for r in verify.run_suite(suite, seed=42, trials=25):
        tag = "" if r.check_name not in verify.OPTIONAL_CHECKS else " (search)"
        print(f"{r.verdict:4} {r.check_name}{tag}: {len(r.failures)} failures")


# A monotone that is not one: the joint entropy.  Local channels can raise it.
def joint_entropy(d):
    return shannon_entropy(d, d.labels)


reports = verify.check_classical_properties(seed=0, trials=20, monotones={"H": joint_entropy})
bad = next(r for r in reports if r.check_name == "local_channel_monotonicity")
first = bad.failures[0]
print(f"\n{bad.check_name}: {len(bad.failures)} failures, first at seed {first.seed}")
print("replayed:", verify.rerun(bad.check_name, first.seed, monotones={"H": joint_entropy})[0])
