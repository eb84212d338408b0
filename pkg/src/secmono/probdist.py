"""Dense multipartite probability distributions and the local moves on them.

A :class:`JointDistribution` is a probability table with one axis per party,
in declared party order.  Everything here is immutable: operations return new
objects and never touch their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

MAX_ENTRIES = 2**24
INPUT_TOL = 1e-12
INTERNAL_TOL = 1e-9


class DistributionError(ValueError):
    """Invalid party labels, tables, channels or partitions."""


class InstanceTooLargeError(DistributionError):
    pass


def _as_labels(subset: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(subset, str):
        return (subset,)
    return tuple(subset)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PartySet:
    labels: tuple[str, ...]
    cardinalities: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        cards = tuple(int(c) for c in self.cardinalities)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "cardinalities", cards)
        if len(labels) != len(cards):
            raise DistributionError("labels and cardinalities differ in length")
        if not labels:
            raise DistributionError("a party set needs at least one party")
        if any(not isinstance(lab, str) or not lab for lab in labels):
            raise DistributionError("party labels must be nonempty strings")
        if len(set(labels)) != len(labels):
            raise DistributionError(f"duplicate party labels in {labels}")
        if any(c < 1 for c in cards):
            raise DistributionError("every cardinality must be at least 1")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        return int(np.prod(self.cardinalities, dtype=np.int64))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DistributionError(f"unknown party {label!r}") from None

    def indices(self, subset: str | Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(lab) for lab in _as_labels(subset))

    def cardinality(self, label: str) -> int:
        return self.cardinalities[self.index(label)]

    def replace(self, label: str, cardinality: int) -> PartySet:
        cards = list(self.cardinalities)
        cards[self.index(label)] = cardinality
        return PartySet(self.labels, tuple(cards))

    def sub(self, subset: Iterable[str]) -> PartySet:
        """Party set restricted to ``subset``, kept in declared order."""
        keep = set(self.indices(subset))
        idx = [i for i in range(len(self)) if i in keep]
        return PartySet(
            tuple(self.labels[i] for i in idx),
            tuple(self.cardinalities[i] for i in idx),
        )


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over labelled parties.

    ``table`` has shape ``parties.cardinalities``; ``table[a1, ..., an]`` is
    the probability of the outcome tuple.  Inputs whose entries are negative
    or whose total deviates from 1 by more than ``1e-12`` are rejected; they
    are never renormalized.
    """

    parties: PartySet
    table: np.ndarray = field(repr=False)

    def __init__(self, parties: PartySet, table, *, tol: float = INPUT_TOL):
        if parties.size > MAX_ENTRIES:
            raise InstanceTooLargeError(
                f"instance too large: {parties.size} outcomes exceeds {MAX_ENTRIES}"
            )
        table = np.asarray(table, dtype=float)
        if table.size != parties.size:
            raise DistributionError(
                f"table has {table.size} entries, parties need {parties.size}"
            )
        table = table.reshape(parties.cardinalities)
        if not np.all(np.isfinite(table)) or np.any(table < 0):
            raise DistributionError("probabilities must be finite and nonnegative")
        total = float(table.sum())
        if abs(total - 1.0) > tol:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "parties", parties)
        object.__setattr__(self, "table", _frozen(table))

    @classmethod
    def _derived(cls, parties: PartySet, table) -> JointDistribution:
        # Results of internal arithmetic get the looser float-drift tolerance.
        return cls(parties, table, tol=INTERNAL_TOL)

    @classmethod
    def from_entries(
        cls,
        labels: Sequence[str],
        cardinalities: Sequence[int],
        entries: dict[tuple[int, ...], float] | Iterable[tuple[Sequence[int], float]],
    ) -> JointDistribution:
        """Build a distribution from ``{outcome: p}``; omitted outcomes are 0."""
        parties = PartySet(tuple(labels), tuple(cardinalities))
        if parties.size > MAX_ENTRIES:
            raise InstanceTooLargeError(
                f"instance too large: {parties.size} outcomes exceeds {MAX_ENTRIES}"
            )
        table = np.zeros(parties.cardinalities)
        items = entries.items() if isinstance(entries, dict) else entries
        for outcome, p in items:
            outcome = tuple(int(x) for x in outcome)
            if len(outcome) != len(parties):
                raise DistributionError(f"outcome {outcome} has the wrong length")
            if any(not 0 <= x < c for x, c in zip(outcome, parties.cardinalities)):
                raise DistributionError(f"outcome {outcome} out of range")
            table[outcome] += p
        return cls(parties, table)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.parties.labels

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return self.parties.cardinalities

    @property
    def n(self) -> int:
        return len(self.parties)

    def prob(self, outcome: Sequence[int]) -> float:
        return float(self.table[tuple(outcome)])

    def support(self) -> list[tuple[tuple[int, ...], float]]:
        """Nonzero outcomes with their probabilities, in row-major order."""
        idx = np.argwhere(self.table > 0)
        return [(tuple(int(i) for i in row), float(self.table[tuple(row)])) for row in idx]

    def allclose(self, other: JointDistribution, atol: float = 1e-12) -> bool:
        return (
            self.parties == other.parties
            and np.allclose(self.table, other.table, rtol=0.0, atol=atol)
        )

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.parties == other.parties and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.parties, self.table.tobytes()))


@dataclass(frozen=True)
class StochasticChannel:
    """Conditional table ``kernel[a, b] = P(out=b | in=a)``."""

    kernel: np.ndarray = field(repr=False)

    def __init__(self, kernel, *, tol: float = INPUT_TOL):
        kernel = np.atleast_2d(np.asarray(kernel, dtype=float))
        if kernel.ndim != 2:
            raise DistributionError("a channel kernel is a 2-d array")
        if not np.all(np.isfinite(kernel)) or np.any(kernel < 0):
            raise DistributionError("channel entries must be finite and nonnegative")
        rows = kernel.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > tol):
            raise DistributionError("every channel row must sum to 1")
        object.__setattr__(self, "kernel", _frozen(kernel))

    @property
    def in_cardinality(self) -> int:
        return self.kernel.shape[0]

    @property
    def out_cardinality(self) -> int:
        return self.kernel.shape[1]

    @classmethod
    def identity(cls, cardinality: int) -> StochasticChannel:
        return cls(np.eye(cardinality))

    @classmethod
    def deterministic(cls, mapping: Sequence[int], out_cardinality: int | None = None) -> StochasticChannel:
        """Channel sending input ``a`` to ``mapping[a]`` with certainty."""
        mapping = [int(m) for m in mapping]
        out = max(mapping) + 1 if out_cardinality is None else out_cardinality
        kernel = np.zeros((len(mapping), out))
        kernel[np.arange(len(mapping)), mapping] = 1.0
        return cls(kernel)

    @classmethod
    def constant(cls, in_cardinality: int, out_cardinality: int = 1, value: int = 0) -> StochasticChannel:
        return cls.deterministic([value] * in_cardinality, out_cardinality)

    @classmethod
    def randomizing(cls, cardinality: int) -> StochasticChannel:
        """Rank-one channel: every input goes to the uniform output."""
        return cls(np.full((cardinality, cardinality), 1.0 / cardinality))

    @classmethod
    def binary_symmetric(cls, flip: float) -> StochasticChannel:
        return cls([[1 - flip, flip], [flip, 1 - flip]])

    def __eq__(self, other):
        if not isinstance(other, StochasticChannel):
            return NotImplemented
        return np.array_equal(self.kernel, other.kernel)

    def __hash__(self):
        return hash((self.kernel.shape, self.kernel.tobytes()))


class Branch(NamedTuple):
    weight: float
    dist: JointDistribution
    transcript: tuple[int, ...] = ()


@dataclass(frozen=True)
class ClassicalEnsemble:
    """Weighted family of distributions left after public announcements.

    ``transcript`` on each branch holds the announced values that led to it.
    """

    members: tuple[Branch, ...]

    def __init__(self, members: Iterable[Branch | tuple], *, tol: float = INPUT_TOL):
        kept = []
        for m in members:
            b = m if isinstance(m, Branch) else Branch(*m)
            if b.weight < 0:
                raise DistributionError("ensemble weights must be nonnegative")
            if b.weight > 0:
                kept.append(Branch(float(b.weight), b.dist, tuple(b.transcript)))
        if not kept:
            raise DistributionError("an ensemble needs at least one member")
        if len({b.dist.parties.labels for b in kept}) != 1:
            raise DistributionError("ensemble members must share one party set")
        total = sum(b.weight for b in kept)
        if abs(total - 1.0) > tol:
            raise DistributionError(f"ensemble weights sum to {total!r}, not 1")
        object.__setattr__(self, "members", tuple(kept))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(b.weight for b in self.members)

    @classmethod
    def single(cls, dist: JointDistribution) -> ClassicalEnsemble:
        return cls([Branch(1.0, dist)])


# ---------------------------------------------------------------------------
# operations


def marginalize(dist: JointDistribution, keep: str | Iterable[str]) -> JointDistribution:
    keep = _as_labels(keep)
    if not keep:
        raise DistributionError("cannot marginalize onto an empty party set")
    axes = set(dist.parties.indices(keep))
    drop = tuple(i for i in range(dist.n) if i not in axes)
    return JointDistribution._derived(dist.parties.sub(keep), dist.table.sum(axis=drop))


def _check_arity(dist: JointDistribution, party: str, ch: StochasticChannel) -> int:
    axis = dist.parties.index(party)
    if ch.in_cardinality != dist.cardinalities[axis]:
        raise DistributionError(
            f"channel expects {ch.in_cardinality} inputs but party {party!r} "
            f"has cardinality {dist.cardinalities[axis]}"
        )
    return axis


def apply_channel(dist: JointDistribution, party: str, ch: StochasticChannel) -> JointDistribution:
    """Replace ``party``'s variable by the channel output."""
    axis = _check_arity(dist, party, ch)
    moved = np.tensordot(dist.table, ch.kernel, axes=([axis], [0]))
    table = np.moveaxis(moved, -1, axis)
    return JointDistribution._derived(dist.parties.replace(party, ch.out_cardinality), table)


def forget(dist: JointDistribution, party: str) -> JointDistribution:
    """Randomize ``party``'s variable in place (alphabet size unchanged)."""
    return apply_channel(dist, party, StochasticChannel.randomizing(dist.parties.cardinality(party)))


def announce(dist: JointDistribution, party: str, ch: StochasticChannel) -> ClassicalEnsemble:
    """Publicly reveal the channel output of ``party``'s variable.

    Members are conditioned on each announced value; the announcer keeps
    its own variable.  Zero-probability announcements are dropped.
    """
    axis = _check_arity(dist, party, ch)
    # joint[..., b] = P(outcome, announced = b)
    joint = np.moveaxis(dist.table, axis, -1)[..., :, None] * ch.kernel
    joint = np.moveaxis(joint, -2, axis)
    weights = joint.reshape(-1, ch.out_cardinality).sum(axis=0)
    members = []
    for b, w in enumerate(weights):
        if w > 0:
            members.append(Branch(float(w), JointDistribution._derived(dist.parties, joint[..., b] / w), (b,)))
    return ClassicalEnsemble(members, tol=INTERNAL_TOL)


def condition(dist: JointDistribution, party: str, value: int) -> JointDistribution:
    """Distribution of all parties given ``party == value``."""
    axis = dist.parties.index(party)
    if not 0 <= value < dist.cardinalities[axis]:
        raise DistributionError(f"value {value} out of range for party {party!r}")
    slab = np.take(dist.table, [value], axis=axis)
    p = slab.sum()
    if p <= 0:
        raise DistributionError(f"{party}={value} has probability zero")
    return JointDistribution._derived(dist.parties.replace(party, 1), slab / p)


def group(
    dist: JointDistribution,
    partition: Sequence[str | Iterable[str]],
    names: Sequence[str] | None = None,
) -> JointDistribution:
    """Merge each block of ``partition`` into one party.

    A merged party's symbol enumerates the block's outcome tuples in row-major
    order over the block's labels in declared order.  Default names are the
    concatenated labels (``"AB"``).
    """
    blocks = []
    for block in partition:
        labs = _as_labels(block)
        if not labs:
            raise DistributionError("partition blocks must be nonempty")
        blocks.append(sorted(dist.parties.indices(labs)))
    flat = [i for b in blocks for i in b]
    if sorted(flat) != list(range(dist.n)):
        raise DistributionError("partition must cover every party exactly once")
    if names is None:
        names = ["".join(dist.labels[i] for i in b) for b in blocks]
    if len(names) != len(blocks):
        raise DistributionError("one name per block is required")
    cards = [int(np.prod([dist.cardinalities[i] for i in b])) for b in blocks]
    table = np.transpose(dist.table, flat).reshape(cards)
    return JointDistribution._derived(PartySet(tuple(names), tuple(cards)), table)


def tensor(d1: JointDistribution, d2: JointDistribution) -> JointDistribution:
    """Independent draws held by the same parties.

    Party ``i``'s new symbol is ``s1 * card2_i + s2``, the pair of its
    symbols from ``d1`` and ``d2``.
    """
    if d1.labels != d2.labels:
        raise DistributionError(f"label mismatch: {d1.labels} vs {d2.labels}")
    n = d1.n
    outer = np.multiply.outer(d1.table, d2.table)
    order = [ax for i in range(n) for ax in (i, n + i)]
    cards = tuple(a * b for a, b in zip(d1.cardinalities, d2.cardinalities))
    table = np.transpose(outer, order).reshape(cards)
    return JointDistribution._derived(PartySet(d1.labels, cards), table)


def independent(*dists: JointDistribution) -> JointDistribution:
    """Product distribution over the disjoint union of the parties."""
    labels: tuple[str, ...] = ()
    cards: tuple[int, ...] = ()
    table = np.ones(())
    for d in dists:
        labels += d.labels
        cards += d.cardinalities
        table = np.multiply.outer(table, d.table)
    return JointDistribution._derived(PartySet(labels, cards), table)


def product_of_marginals(dist: JointDistribution) -> JointDistribution:
    table = np.ones(())
    for lab in dist.labels:
        table = np.multiply.outer(table, marginalize(dist, lab).table)
    return JointDistribution._derived(dist.parties, table)


def permute(dist: JointDistribution, order: Sequence[str]) -> JointDistribution:
    """Reorder the parties (a pure re-indexing)."""
    order = tuple(order)
    if sorted(order) != sorted(dist.labels):
        raise DistributionError("order must list every party exactly once")
    axes = dist.parties.indices(order)
    parties = PartySet(order, tuple(dist.cardinalities[i] for i in axes))
    return JointDistribution._derived(parties, np.transpose(dist.table, axes))


def uniform(labels: Sequence[str], cardinalities: Sequence[int]) -> JointDistribution:
    parties = PartySet(tuple(labels), tuple(cardinalities))
    return JointDistribution(parties, np.full(parties.cardinalities, 1.0 / parties.size))


def point_mass(labels: Sequence[str], cardinalities: Sequence[int], outcome: Sequence[int]) -> JointDistribution:
    return JointDistribution.from_entries(labels, cardinalities, {tuple(outcome): 1.0})


def random_distribution(
    rng: np.random.Generator,
    labels: Sequence[str],
    cardinalities: Sequence[int],
) -> JointDistribution:
    """Uniform draw from the probability simplex (normalized exponentials)."""
    parties = PartySet(tuple(labels), tuple(cardinalities))
    x = rng.exponential(size=parties.cardinalities)
    return JointDistribution._derived(parties, x / x.sum())


def random_channel(rng: np.random.Generator, in_cardinality: int, out_cardinality: int) -> StochasticChannel:
    x = rng.exponential(size=(in_cardinality, out_cardinality))
    return StochasticChannel(x / x.sum(axis=1, keepdims=True), tol=INTERNAL_TOL)


def total_variation(p: JointDistribution, q: JointDistribution) -> float:
    if p.parties != q.parties:
        raise DistributionError("total variation needs identical party sets")
    return 0.5 * float(np.abs(p.table - q.table).sum())
