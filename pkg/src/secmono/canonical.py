"""The five extremal tripartite distributions over parties A, B, C.

All five use binary alphabets so that protocol outputs can be compared to them
entry by entry.  The bystander of a pair distribution holds an independent
uniform bit unless ``bystander="trivial"`` asks for a constant
(cardinality-1) variable instead; the two choices have identical monotones.
"""

from __future__ import annotations

from .probdist import JointDistribution, PartySet, independent, point_mass, uniform

LABELS = ("A", "B", "C")


def p2(pair: str = "AB", bystander: str = "uniform") -> JointDistribution:
    """One shared random bit between the two parties named in ``pair``."""
    pair_labels = tuple(pair)
    if len(pair_labels) != 2 or not set(pair_labels) < set(LABELS):
        raise ValueError(f"pair must name two of {LABELS}, got {pair!r}")
    (third,) = [lab for lab in LABELS if lab not in pair_labels]
    shared = JointDistribution.from_entries(pair_labels, (2, 2), {(0, 0): 0.5, (1, 1): 0.5})
    if bystander == "uniform":
        other = uniform((third,), (2,))
    elif bystander == "trivial":
        other = point_mass((third,), (1,), (0,))
    else:
        raise ValueError(f"unknown bystander kind {bystander!r}")
    joint = independent(shared, other)
    order = joint.parties.indices(LABELS)
    table = joint.table.transpose(order)
    return JointDistribution(PartySet(LABELS, table.shape), table)


def p3() -> JointDistribution:
    """One random bit shared by all three parties."""
    return JointDistribution.from_entries(LABELS, (2, 2, 2), {(0, 0, 0): 0.5, (1, 1, 1): 0.5})


def px() -> JointDistribution:
    """Two independent bits; the third party holds their xor."""
    entries = {(0, 0, 0): 0.25, (1, 1, 0): 0.25, (1, 0, 1): 0.25, (0, 1, 1): 0.25}
    return JointDistribution.from_entries(LABELS, (2, 2, 2), entries)


def five() -> dict[str, JointDistribution]:
    """The five distributions in table order."""
    return {"P2_AB": p2("AB"), "P2_AC": p2("AC"), "P2_BC": p2("BC"), "P3": p3(), "Px": px()}
