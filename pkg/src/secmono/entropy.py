"""Shannon entropies, in bits, of the marginals of a joint distribution.

Every logarithm in this package is base 2, including the relative entropy.
``0 log 0`` is taken as 0; a divergence whose first argument puts mass where
the second has none is ``math.inf``.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .probdist import DistributionError, JointDistribution, _as_labels

INFINITE_DIVERGENCE = math.inf


def entropy_of(probs) -> float:
    """-sum p log2 p of a flat probability vector, skipping zeros."""
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def _joint_entropy(dist: JointDistribution, labels: tuple[str, ...]) -> float:
    if not labels:
        return 0.0
    axes = set(dist.parties.indices(labels))
    if len(axes) == dist.n:
        return entropy_of(dist.table)
    drop = tuple(i for i in range(dist.n) if i not in axes)
    return entropy_of(dist.table.sum(axis=drop))


def _disjoint(*subsets: tuple[str, ...]) -> None:
    seen: set[str] = set()
    for s in subsets:
        if seen & set(s):
            raise DistributionError(f"subsets overlap on {sorted(seen & set(s))}")
        seen |= set(s)


def shannon_entropy(dist: JointDistribution, subset: str | Iterable[str]) -> float:
    labels = _as_labels(subset)
    if not labels:
        raise DistributionError("entropy of an empty set of parties")
    return _joint_entropy(dist, labels)


def conditional_entropy(dist: JointDistribution, x, given=()) -> float:
    """H(X | given) = H(X given) - H(given)."""
    x, given = _as_labels(x), _as_labels(given)
    _disjoint(x, given)
    return _joint_entropy(dist, x + given) - _joint_entropy(dist, given)


def mutual_information(dist: JointDistribution, x, y) -> float:
    return conditional_mutual_information(dist, x, y, ())


def conditional_mutual_information(dist: JointDistribution, x, y, z=()) -> float:
    """I(X:Y|Z) = H(XZ) + H(YZ) - H(Z) - H(XYZ)."""
    x, y, z = _as_labels(x), _as_labels(y), _as_labels(z)
    if not x or not y:
        raise DistributionError("mutual information needs two nonempty sets")
    _disjoint(x, y, z)
    return (
        _joint_entropy(dist, x + z)
        + _joint_entropy(dist, y + z)
        - _joint_entropy(dist, z)
        - _joint_entropy(dist, x + y + z)
    )


def relative_entropy(p: JointDistribution, q: JointDistribution) -> float:
    """D(p || q) in bits, or ``INFINITE_DIVERGENCE`` if p is not dominated by q."""
    if p.parties != q.parties:
        raise DistributionError("relative entropy needs identical party sets")
    pt, qt = p.table.ravel(), q.table.ravel()
    mask = pt > 0
    if np.any(qt[mask] <= 0):
        return INFINITE_DIVERGENCE
    return float(np.sum(pt[mask] * (np.log2(pt[mask]) - np.log2(qt[mask]))))
