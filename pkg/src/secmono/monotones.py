"""Classical secrecy monotones.

``s_n`` counts the bits of randomness shared between the parties (total
randomness minus what is purely local to each party); ``t_n`` is the
relative entropy to the product of the marginals.  Both reduce to the mutual
information for two parties.  The module also holds the tripartite toolkit
(five-monotone vector, Venn quantities, canonical decomposition), the yield
bound, and the two ways of extending a monotone to a distribution that
involves an eavesdropper.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .entropy import (
    _joint_entropy,
    conditional_mutual_information,
    mutual_information,
    relative_entropy,
)
from .probdist import (
    DistributionError,
    JointDistribution,
    StochasticChannel,
    _as_labels,
    apply_channel,
    group,
    marginalize,
    product_of_marginals,
    random_channel,
)

Monotone = Callable[[JointDistribution], float]

ZERO_TOL = 1e-9


class ArityError(DistributionError):
    pass


class NoSecrecyError(DistributionError):
    """Every monotone in the set vanishes on the target."""


def _need(dist: JointDistribution, n_min: int = 2, exactly: int | None = None) -> tuple[str, ...]:
    labels = dist.labels
    if exactly is not None and len(labels) != exactly:
        raise ArityError(f"needs exactly {exactly} parties, got {len(labels)}")
    if len(labels) < n_min:
        raise ArityError(f"needs at least {n_min} parties, got {len(labels)}")
    return labels


def _rest(labels: tuple[str, ...], i: int) -> tuple[str, ...]:
    return labels[:i] + labels[i + 1:]


# ---------------------------------------------------------------------------
# S_n


def s_n_def(dist: JointDistribution) -> float:
    """H(all) - sum_i H(A_i | everyone else)."""
    labels = _need(dist)
    h_all = _joint_entropy(dist, labels)
    local = sum(h_all - _joint_entropy(dist, _rest(labels, i)) for i in range(len(labels)))
    return h_all - local


def s_n_alt(dist: JointDistribution) -> float:
    """sum_i H(everyone but A_i) - (n-1) H(all)."""
    labels = _need(dist)
    n = len(labels)
    return sum(_joint_entropy(dist, _rest(labels, i)) for i in range(n)) - (n - 1) * _joint_entropy(dist, labels)


def s_n_chain(dist: JointDistribution) -> float:
    """I(A_1 : A_2..A_n) + sum_{i=2}^{n-1} I(A_i : A_{i+1}..A_n | A_1..A_{i-1})."""
    labels = _need(dist)
    total = mutual_information(dist, labels[:1], labels[1:])
    for i in range(1, len(labels) - 1):
        total += conditional_mutual_information(dist, labels[i:i + 1], labels[i + 1:], labels[:i])
    return total


def s_n_recursive(dist: JointDistribution) -> float:
    """S_{n-1} with the last two parties merged, plus I(A_{n-1} : A_n | A_1..A_{n-2})."""
    labels = _need(dist)
    if len(labels) == 2:
        return mutual_information(dist, labels[:1], labels[1:])
    head = labels[:-2]
    increment = conditional_mutual_information(dist, labels[-2:-1], labels[-1:], head)
    merged = group(dist, [[lab] for lab in head] + [labels[-2:]], names=list(head) + ["\x00tail"])
    return s_n_recursive(merged) + increment


s_n = s_n_def


# ---------------------------------------------------------------------------
# T_n


def t_n_def(dist: JointDistribution) -> float:
    """sum_i H(A_i) - H(all)."""
    labels = _need(dist)
    return sum(_joint_entropy(dist, (lab,)) for lab in labels) - _joint_entropy(dist, labels)


def t_n_chain(dist: JointDistribution) -> float:
    """I(A_1 : A_2) + sum_{i=2}^{n-1} I(A_1..A_i : A_{i+1})."""
    labels = _need(dist)
    return sum(
        mutual_information(dist, labels[:i], labels[i:i + 1]) for i in range(1, len(labels))
    )


def t_n_recursive(dist: JointDistribution) -> float:
    labels = _need(dist)
    last = mutual_information(dist, labels[-1:], labels[:-1])
    if len(labels) == 2:
        return last
    return t_n_recursive(marginalize(dist, labels[:-1])) + last


def t_n_relative(dist: JointDistribution) -> float:
    """D(P || product of its marginals)."""
    _need(dist)
    return relative_entropy(dist, product_of_marginals(dist))


t_n = t_n_def


def m_lambda(dist: JointDistribution, lam: float) -> float:
    """lam * S_n + (1 - lam) * T_n; a monotone only for 0 <= lam <= 1."""
    return lam * s_n(dist) + (1.0 - lam) * t_n(dist)


def mutual_information_sum(dist: JointDistribution) -> float:
    """sum_i I(A_i : everyone else), which equals S_n + T_n."""
    labels = _need(dist)
    return sum(mutual_information(dist, labels[i:i + 1], _rest(labels, i)) for i in range(len(labels)))


# ---------------------------------------------------------------------------
# grouped bipartite monotones


def _bipartition(dist: JointDistribution, bipartition) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if isinstance(bipartition, str):
        bipartition = bipartition.split("|")
    blocks = [_as_labels(b) if isinstance(b, str) and b in dist.labels else tuple(b) for b in bipartition]
    if len(blocks) != 2 or not blocks[0] or not blocks[1]:
        raise DistributionError("a bipartition has exactly two nonempty blocks")
    flat = blocks[0] + blocks[1]
    if sorted(flat) != sorted(dist.labels):
        raise DistributionError(f"{bipartition!r} is not a bipartition of {dist.labels}")
    return blocks[0], blocks[1]


def grouped_s2(dist: JointDistribution, bipartition) -> float:
    """S_2 across a grouping of the parties into two blocks.

    ``bipartition`` is a pair of label collections, or a string such as
    ``"A|BC"`` when labels are single characters.
    """
    x, y = _bipartition(dist, bipartition)
    return mutual_information(dist, x, y)


def bipartitions(labels: Sequence[str]) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """All splits into two nonempty blocks, each listed once."""
    labels = tuple(labels)
    out = []
    rest = labels[1:]
    for r in range(len(rest) + 1):
        for combo in itertools.combinations(rest, r):
            x = (labels[0],) + combo
            y = tuple(lab for lab in labels if lab not in x)
            if not y:
                continue
            if len(y) < len(x):
                x, y = y, x
            out.append((x, y))
    return out


def s2_name(x: Sequence[str], y: Sequence[str]) -> str:
    return f"S2({''.join(x)}:{''.join(y)})"


# ---------------------------------------------------------------------------
# tripartite toolkit


@dataclass(frozen=True)
class FiveVector:
    s2_a_bc: float
    s2_b_ac: float
    s2_c_ab: float
    s3: float
    t3: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.s2_a_bc, self.s2_b_ac, self.s2_c_ab, self.s3, self.t3)

    def __iter__(self):
        return iter(self.as_tuple())


def five_vector(dist: JointDistribution) -> FiveVector:
    """S2(A:BC), S2(B:AC), S2(C:AB), S3, T3 with A, B, C the parties in order."""
    a, b, c = _need(dist, exactly=3)
    return FiveVector(
        mutual_information(dist, (a,), (b, c)),
        mutual_information(dist, (b,), (a, c)),
        mutual_information(dist, (c,), (a, b)),
        s_n(dist),
        t_n(dist),
    )


@dataclass(frozen=True)
class VennQuantities:
    r: float
    s: float
    t: float
    u: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.r, self.s, self.t, self.u)

    def positivity_violations(self, tol: float = ZERO_TOL) -> list[str]:
        checks = {
            "r": self.r, "s": self.s, "t": self.t,
            "r+u": self.r + self.u, "s+u": self.s + self.u, "t+u": self.t + self.u,
        }
        return [name for name, value in checks.items() if value < -tol]


def venn(dist: JointDistribution) -> VennQuantities:
    """r = I(A:B|C), s = I(B:C|A), t = I(C:A|B), u = I(A:B) - I(A:B|C)."""
    a, b, c = _need(dist, exactly=3)
    r = conditional_mutual_information(dist, (a,), (b,), (c,))
    s = conditional_mutual_information(dist, (b,), (c,), (a,))
    t = conditional_mutual_information(dist, (c,), (a,), (b,))
    u = mutual_information(dist, (a,), (b,)) - r
    v = VennQuantities(r, s, t, u)
    s3, t3 = s_n(dist), t_n(dist)
    if abs(s3 - (r + s + t + u)) > ZERO_TOL or abs(t3 - (r + s + t + 2 * u)) > ZERO_TOL:
        raise RuntimeError(f"Venn identities broken: S3={s3}, T3={t3}, {v}")
    return v


# Columns: five-vector of P2_AB, P2_BC, P2_AC, Px, P3 (the yield order).
YIELD_NAMES = ("P2_AB", "P2_BC", "P2_AC", "Px", "P3")
YIELD_MATRIX = np.array(
    [
        [1, 0, 1, 1, 1],  # S2(A:BC)
        [1, 1, 0, 1, 1],  # S2(B:AC)
        [0, 1, 1, 1, 1],  # S2(C:AB)
        [1, 1, 1, 2, 1],  # S3
        [1, 1, 1, 1, 2],  # T3
    ],
    dtype=float,
)
YIELD_MATRIX.setflags(write=False)


@dataclass(frozen=True)
class CanonicalYields:
    y1: float  # P2_AB
    y2: float  # P2_BC
    y3: float  # P2_AC
    y4: float  # Px
    y5: float  # P3
    feasible: bool

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.y1, self.y2, self.y3, self.y4, self.y5)

    def five_vector(self) -> np.ndarray:
        """Monotone values of the decomposed mixture, through the table matrix."""
        return YIELD_MATRIX @ np.array(self.as_tuple())


def canonical_decomposition(dist: JointDistribution) -> CanonicalYields:
    """Yields of the five extremal distributions matching all five monotones.

    The monotone-matching system is rank deficient; the sign of ``u`` picks
    the solution: ``u >= 0`` uses P3 and no Px, ``u < 0`` uses Px and no P3.
    """
    v = venn(dist)
    if v.u >= 0:
        ys = (v.r, v.s, v.t, 0.0, v.u)
    else:
        ys = (v.r + v.u, v.s + v.u, v.t + v.u, -v.u, 0.0)
    feasible = all(y >= -ZERO_TOL for y in ys)
    return CanonicalYields(*ys, feasible=feasible)


# ---------------------------------------------------------------------------
# yield bound


@dataclass(frozen=True)
class YieldBound:
    bound: float
    limiting: str
    ratios: Mapping[str, float]


def default_monotones(labels: Sequence[str]) -> dict[str, Monotone]:
    """S_n, T_n and S_2 across every bipartition of ``labels``."""
    ms: dict[str, Monotone] = {"S_n": s_n, "T_n": t_n}
    if len(labels) > 2:
        for x, y in bipartitions(labels):
            ms[s2_name(x, y)] = lambda d, x=x, y=y: mutual_information(d, x, y)
    return ms


def yield_bound(
    source: JointDistribution,
    target: JointDistribution,
    monotone_set: Mapping[str, Monotone] | Iterable[Monotone] | None = None,
) -> YieldBound:
    """Upper bound on target copies per source copy: min of M(source)/M(target).

    Monotones vanishing (within ``1e-9``) on the target are skipped.
    """
    if source.labels != target.labels:
        raise DistributionError("source and target must have the same parties")
    if monotone_set is None:
        monotone_set = default_monotones(source.labels)
    elif not isinstance(monotone_set, Mapping):
        monotone_set = {getattr(m, "__name__", f"M{i}"): m for i, m in enumerate(monotone_set)}
    ratios = {}
    for name, m in monotone_set.items():
        denom = m(target)
        if denom <= ZERO_TOL:
            continue
        ratios[name] = max(m(source), 0.0) / denom
    if not ratios:
        raise NoSecrecyError("target carries no secrecy: every monotone vanishes on it")
    limiting = min(ratios, key=ratios.__getitem__)
    return YieldBound(ratios[limiting], limiting, ratios)


# ---------------------------------------------------------------------------
# eavesdropper extensions


def eve_conditionals(dist: JointDistribution, eve: str) -> list[tuple[float, JointDistribution]]:
    """(P(e), P(others | E=e)) for every e of positive probability."""
    axis = dist.parties.index(eve)
    others = tuple(lab for lab in dist.labels if lab != eve)
    if not others:
        raise ArityError("no parties besides Eve")
    sub = dist.parties.sub(others)
    slabs = np.moveaxis(dist.table, axis, 0)
    out = []
    for slab in slabs:
        p = float(slab.sum())
        if p > 0:
            out.append((p, JointDistribution._derived(sub, slab / p)))
    return out


def eve_average(dist: JointDistribution, eve: str, base_monotone: Monotone) -> float:
    """M_1: the base monotone of the Eve-conditional distributions, averaged."""
    if dist.n - 1 < 2:
        raise ArityError("needs at least two parties besides Eve")
    return sum(p * base_monotone(cond) for p, cond in eve_conditionals(dist, eve))


@dataclass(frozen=True)
class EveMinResult:
    """Best Eve pre-processing found.

    ``value`` is an upper bound on the true minimum: only deterministic maps
    (when ``exhaustive``) and ``samples`` random channels were tried.
    """

    value: float
    channel: StochasticChannel
    exhaustive: bool
    samples: int
    is_upper_bound: bool = True


EXHAUSTIVE_MAX = 6


def set_partitions(n: int) -> Iterator[list[int]]:
    """Restricted growth strings: each set partition of range(n) exactly once."""
    if n == 0:
        yield []
        return
    a = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield list(a)
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def eve_min(
    dist: JointDistribution,
    eve: str,
    base_monotone: Monotone,
    search_budget: int = 0,
    seed: int = 0,
    exhaustive: bool = True,
) -> EveMinResult:
    """M_down: minimize ``eve_average`` over Eve's processing of her variable.

    Deterministic maps are enumerated up to relabeling (set partitions of
    Eve's alphabet) when ``exhaustive`` and the alphabet has at most 6
    symbols; ``search_budget`` random stochastic channels are tried in
    addition, each drawn from its own generator spawned from ``seed``.
    """
    card = dist.parties.cardinality(eve)
    if dist.n - 1 < 2:
        raise ArityError("needs at least two parties besides Eve")
    do_exhaustive = exhaustive and card <= EXHAUSTIVE_MAX
    if not do_exhaustive and search_budget <= 0:
        raise ValueError("nothing to search: exhaustive search disabled and budget is 0")

    ident = StochasticChannel.identity(card)
    best_value = eve_average(dist, eve, base_monotone)
    best_channel = ident

    def consider(ch: StochasticChannel):
        nonlocal best_value, best_channel
        value = eve_average(apply_channel(dist, eve, ch), eve, base_monotone)
        if value < best_value:
            best_value, best_channel = value, ch

    if do_exhaustive:
        for blocks in set_partitions(card):
            consider(StochasticChannel.deterministic(blocks))
    if search_budget > 0:
        for child in np.random.SeedSequence(seed).spawn(search_budget):
            consider(random_channel(np.random.default_rng(child), card, card))
    return EveMinResult(best_value, best_channel, do_exhaustive, max(search_budget, 0))
