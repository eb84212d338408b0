"""Executable LOCC protocols on classical distributions.

A protocol is a list of steps, each acting on one party: a local channel,
a public announcement of a channel output, or forgetting (randomizing in
place).  Announcements split the state into branches; every branch carries
the transcript of announced values so far, and local channels may depend on
that transcript (a party may read the public record before acting).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .probdist import (
    Branch,
    ClassicalEnsemble,
    DistributionError,
    JointDistribution,
    StochasticChannel,
    announce,
    apply_channel,
    forget,
    total_variation,
)

STEP_KINDS = ("local_channel", "announce", "forget")


class ProtocolError(DistributionError):
    """A step could not be applied on some branch."""

    def __init__(self, message: str, step: int | None = None, transcript: tuple[int, ...] | None = None):
        super().__init__(message)
        self.step = step
        self.transcript = transcript


@dataclass(frozen=True)
class ProtocolStep:
    kind: str
    party: str
    channel: StochasticChannel | None = None
    when: Mapping[tuple[int, ...], StochasticChannel] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise ProtocolError(f"unknown step kind {self.kind!r}")
        if self.kind == "forget" and (self.channel is not None or self.when):
            raise ProtocolError("a forget step takes no channel")
        if self.kind == "announce" and self.channel is None:
            raise ProtocolError("an announce step needs a channel")
        if self.kind == "local_channel" and self.channel is None and not self.when:
            raise ProtocolError("a local_channel step needs a channel")
        object.__setattr__(self, "when", {tuple(k): v for k, v in dict(self.when).items()})

    def channel_for(self, transcript: tuple[int, ...]) -> StochasticChannel | None:
        return self.when.get(transcript, self.channel)

    def __hash__(self):
        return hash((self.kind, self.party, self.channel, tuple(sorted(self.when.items()))))


@dataclass(frozen=True)
class Protocol:
    name: str
    steps: tuple[ProtocolStep, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ProtocolError(f"protocol {self.name!r} has no steps")
        object.__setattr__(self, "steps", steps)


def _apply_step(step: ProtocolStep, branch: Branch, k: int) -> list[Branch]:
    ch = step.channel_for(branch.transcript)
    if step.kind == "local_channel" and ch is None:
        raise ProtocolError(
            f"step {k}: no channel for transcript {branch.transcript}", k, branch.transcript
        )
    try:
        if step.kind == "forget":
            return [Branch(branch.weight, forget(branch.dist, step.party), branch.transcript)]
        if step.kind == "local_channel":
            return [Branch(branch.weight, apply_channel(branch.dist, step.party, ch), branch.transcript)]
        split = announce(branch.dist, step.party, ch)
    except DistributionError as exc:
        raise ProtocolError(
            f"step {k} ({step.kind} by {step.party}) on branch {branch.transcript}: {exc}",
            k,
            branch.transcript,
        ) from exc
    return [
        Branch(branch.weight * sub.weight, sub.dist, branch.transcript + sub.transcript)
        for sub in split
    ]


def run_protocol(initial: JointDistribution, protocol: Protocol) -> ClassicalEnsemble:
    """Apply the steps in order; branches come out sorted by transcript."""
    branches = [Branch(1.0, initial, ())]
    for k, step in enumerate(protocol.steps):
        branches = [out for b in branches for out in _apply_step(step, b, k)]
        branches = [b for b in branches if b.weight > 0]
    branches.sort(key=lambda b: b.transcript)
    return ClassicalEnsemble(branches, tol=1e-12)


def ensemble_monotone(ensemble: ClassicalEnsemble, monotone: Callable[[JointDistribution], float]) -> float:
    """Weighted average of the monotone over the branches."""
    return sum(b.weight * monotone(b.dist) for b in ensemble)


def distance_to_target(ensemble: ClassicalEnsemble, target: JointDistribution) -> float:
    """Largest total-variation distance between a branch and ``target``."""
    worst = 0.0
    for b in ensemble:
        if b.dist.parties != target.parties:
            return 1.0
        worst = max(worst, total_variation(b.dist, target))
    return worst


# ---------------------------------------------------------------------------
# the four named conversions


def _det(mapping: Sequence[int], out: int) -> StochasticChannel:
    return StochasticChannel.deterministic(mapping, out)


def _bits(symbol: int) -> tuple[int, int]:
    # symbol of a party holding two bits after ``tensor``: 2 * first + second
    return symbol // 2, symbol % 2


def px_to_p2() -> Protocol:
    """Px -> P2_AB: C announces its bit, B undoes the xor, C forgets."""
    flip = _det([1, 0], 2)
    return Protocol(
        "px_to_p2",
        (
            ProtocolStep("announce", "C", StochasticChannel.identity(2)),
            ProtocolStep("local_channel", "B", StochasticChannel.identity(2), when={(1,): flip}),
            ProtocolStep("forget", "C"),
        ),
    )


def p3_to_p2() -> Protocol:
    """P3 -> P2_AB: C forgets its bit."""
    return Protocol("p3_to_p2", (ProtocolStep("forget", "C"),))


def p3sq_to_px() -> Protocol:
    """P3 (x) P3 -> Px: A keeps only the second bit, B only the first, C their sum."""
    second = _det([_bits(s)[1] for s in range(4)], 2)
    first = _det([_bits(s)[0] for s in range(4)], 2)
    parity = _det([_bits(s)[0] ^ _bits(s)[1] for s in range(4)], 2)
    return Protocol(
        "p3sq_to_px",
        (
            ProtocolStep("local_channel", "A", second),
            ProtocolStep("local_channel", "B", first),
            ProtocolStep("local_channel", "C", parity),
        ),
    )


def pxsq_to_p3() -> Protocol:
    """Px (x) Px -> P3.

    A holds (x, x'), B holds (y, y'), C holds (x+y, x'+y').  A announces x,
    B announces y'.  C announces (x+y)+(x'+y'), which given the public x and
    y' is the same information as y+x'.  Finally every party computes y from
    its own bits and the transcript (x, y', m).
    """
    announce_first = _det([_bits(s)[0] for s in range(4)], 2)
    announce_second = _det([_bits(s)[1] for s in range(4)], 2)
    announce_parity = _det([_bits(s)[0] ^ _bits(s)[1] for s in range(4)], 2)

    a_final = {}
    c_final = {}
    for x, y_prime, m in np.ndindex(2, 2, 2):
        t = (int(x), int(y_prime), int(m))
        # y = m + x + x' + y' (mod 2), from A's own (x, x')
        a_final[t] = _det([m ^ _bits(s)[0] ^ _bits(s)[1] ^ y_prime for s in range(4)], 2)
        # y = (x + y) + x, from C's first bit
        c_final[t] = _det([_bits(s)[0] ^ x for s in range(4)], 2)
    b_final = _det([_bits(s)[0] for s in range(4)], 2)
    return Protocol(
        "pxsq_to_p3",
        (
            ProtocolStep("announce", "A", announce_first),
            ProtocolStep("announce", "B", announce_second),
            ProtocolStep("announce", "C", announce_parity),
            ProtocolStep("local_channel", "A", when=a_final),
            ProtocolStep("local_channel", "B", b_final),
            ProtocolStep("local_channel", "C", when=c_final),
        ),
    )


def builtin_protocols() -> list[Protocol]:
    return [px_to_p2(), p3_to_p2(), p3sq_to_px(), pxsq_to_p3()]


def builtin(name: str) -> Protocol:
    for p in builtin_protocols():
        if p.name == name:
            return p
    raise KeyError(f"no built-in protocol named {name!r}")
