"""Quantum versions of S_n and T_n on finite-dimensional density matrices.

The matrix of a :class:`DensityMatrix` is indexed in row-major tensor order
matching the party order, so a state over parties with dimensions
``(d1, ..., dn)`` is a ``prod(d) x prod(d)`` complex array.  Entropies are
in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import monotones as _classical
from .entropy import entropy_of
from .probdist import JointDistribution, PartySet, _as_labels

MAX_DIM = 2**12
STATE_TOL = 1e-9
PURE_TOL = 1e-12


class StateError(ValueError):
    """Invalid quantum state, channel or measurement."""


def _parties(labels: Sequence[str], dims: Sequence[int]) -> PartySet:
    parties = PartySet(tuple(labels), tuple(dims))
    if parties.size > MAX_DIM:
        raise StateError(f"instance too large: total dimension {parties.size} exceeds {MAX_DIM}")
    return parties


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix:
    parties: PartySet
    matrix: np.ndarray = field(repr=False)

    def __init__(self, parties: PartySet, matrix, *, tol: float = STATE_TOL):
        if parties.size > MAX_DIM:
            raise StateError(f"instance too large: total dimension {parties.size} exceeds {MAX_DIM}")
        m = np.asarray(matrix, dtype=complex)
        d = parties.size
        if m.shape != (d, d):
            raise StateError(f"matrix shape {m.shape} does not match total dimension {d}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > tol:
            raise StateError(f"trace is {np.trace(m).real!r}, not 1")
        m = 0.5 * (m + m.conj().T)
        if np.linalg.eigvalsh(m).min() < -tol:
            raise StateError("density matrix is not positive semidefinite")
        object.__setattr__(self, "parties", parties)
        object.__setattr__(self, "matrix", _readonly(m))

    @classmethod
    def from_arrays(cls, labels: Sequence[str], dims: Sequence[int], matrix) -> DensityMatrix:
        return cls(_parties(labels, dims), matrix)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.parties.labels

    @property
    def dims(self) -> tuple[int, ...]:
        return self.parties.cardinalities

    @property
    def n(self) -> int:
        return len(self.parties)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum with drift in [-1e-9, 0) clamped to 0, summing to 1."""
        return _spectrum(self.matrix)


@dataclass(frozen=True)
class PureState:
    parties: PartySet
    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, parties: PartySet, amplitudes, *, tol: float = PURE_TOL):
        if parties.size > MAX_DIM:
            raise StateError(f"instance too large: total dimension {parties.size} exceeds {MAX_DIM}")
        v = np.asarray(amplitudes, dtype=complex).ravel()
        if v.size != parties.size:
            raise StateError(f"{v.size} amplitudes for total dimension {parties.size}")
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise StateError(f"state norm is {np.linalg.norm(v)!r}, not 1")
        object.__setattr__(self, "parties", parties)
        object.__setattr__(self, "amplitudes", _readonly(v))

    @classmethod
    def from_arrays(cls, labels: Sequence[str], dims: Sequence[int], amplitudes) -> PureState:
        return cls(_parties(labels, dims), amplitudes)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.parties.labels

    @property
    def dims(self) -> tuple[int, ...]:
        return self.parties.cardinalities

    def density_matrix(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(self.parties, np.outer(v, v.conj()))


def _check_completeness(ops: Sequence[np.ndarray], in_dim: int, what: str) -> None:
    total = sum(op.conj().T @ op for op in ops)
    if np.max(np.abs(total - np.eye(in_dim))) > STATE_TOL:
        raise StateError(f"{what} operators do not satisfy sum K^dag K = 1")


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]

    def __init__(self, operators: Iterable):
        ops = tuple(_readonly(np.atleast_2d(op)) for op in operators)
        if not ops:
            raise StateError("a channel needs at least one Kraus operator")
        if len({op.shape for op in ops}) != 1:
            raise StateError("Kraus operators must share one shape")
        _check_completeness(ops, ops[0].shape[1], "Kraus")
        object.__setattr__(self, "operators", ops)

    @property
    def in_dim(self) -> int:
        return self.operators[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.operators[0].shape[0]

    @classmethod
    def identity(cls, dim: int) -> KrausChannel:
        return cls([np.eye(dim)])

    @classmethod
    def from_isometry(cls, isometry, out_dim: int) -> KrausChannel:
        """Kraus form of ``rho -> Tr_env(V rho V^dag)``.

        ``isometry`` maps the input space into ``out_dim x env`` (output
        index major).  This realizes the ancilla + unitary + partial-trace
        picture of a local CP map: take ``V = U (1 (x) |0>)``.
        """
        v = np.asarray(isometry, dtype=complex)
        total, in_dim = v.shape
        if total % out_dim:
            raise StateError("isometry rows are not a multiple of the output dimension")
        env = total // out_dim
        blocks = v.reshape(out_dim, env, in_dim)
        return cls([blocks[:, k, :] for k in range(env)])

    @classmethod
    def dephasing(cls, dim: int) -> KrausChannel:
        """Complete dephasing in the computational basis."""
        return cls([np.outer(e, e) for e in np.eye(dim)])


@dataclass(frozen=True)
class Instrument:
    """Measurement with labelled outcomes, one Kraus operator per outcome."""

    outcomes: tuple[tuple[str, np.ndarray], ...]

    def __init__(self, outcomes: Iterable[tuple[str, object]]):
        items = tuple((str(label), _readonly(np.atleast_2d(op))) for label, op in outcomes)
        if not items:
            raise StateError("an instrument needs at least one outcome")
        if len({op.shape[1] for _, op in items}) != 1:
            raise StateError("instrument operators must share an input dimension")
        _check_completeness([op for _, op in items], items[0][1].shape[1], "instrument")
        object.__setattr__(self, "outcomes", items)

    @property
    def in_dim(self) -> int:
        return self.outcomes[0][1].shape[1]

    @classmethod
    def projective(cls, basis, labels: Sequence[str] | None = None) -> Instrument:
        """Measurement in the orthonormal basis given by the columns of ``basis``."""
        u = _orthonormal(basis)
        labels = labels or [str(k) for k in range(u.shape[1])]
        return cls((lab, np.outer(u[:, k], u[:, k].conj())) for k, lab in enumerate(labels))

    @classmethod
    def trivial(cls, dim: int) -> Instrument:
        return cls([("1", np.eye(dim))])


class QuantumBranch(NamedTuple):
    weight: float
    state: DensityMatrix
    outcome: str = ""


@dataclass(frozen=True)
class QuantumEnsemble:
    members: tuple[QuantumBranch, ...]

    def __init__(self, members: Iterable):
        kept = tuple(QuantumBranch(*m) for m in members if m[0] > 0)
        if not kept:
            raise StateError("an ensemble needs at least one member")
        if any(m.weight < 0 for m in kept):
            raise StateError("ensemble weights must be nonnegative")
        total = sum(m.weight for m in kept)
        if abs(total - 1.0) > 1e-12:
            raise StateError(f"ensemble weights sum to {total!r}, not 1")
        object.__setattr__(self, "members", kept)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def average(self, f) -> float:
        return sum(m.weight * f(m.state) for m in self.members)


# ---------------------------------------------------------------------------
# partial trace and entropies


def _as_tensor(rho: DensityMatrix) -> np.ndarray:
    return rho.matrix.reshape(rho.dims + rho.dims)


def _reduced_matrix(rho: DensityMatrix, keep: tuple[int, ...]) -> np.ndarray:
    n = rho.n
    if len(keep) == n:
        return rho.matrix
    t = _as_tensor(rho)
    # einsum subscripts: traced axes share a letter between ket and bra
    ket = list(range(n))
    bra = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, ket + bra, out)
    d = int(np.prod([rho.dims[i] for i in keep]))
    return reduced.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: str | Iterable[str]) -> DensityMatrix:
    """Reduced state on ``keep`` (kept in declared party order)."""
    keep = _as_labels(keep)
    if not keep:
        raise StateError("cannot keep an empty set of parties")
    axes = tuple(sorted(set(rho.parties.indices(keep))))
    return DensityMatrix(rho.parties.sub(keep), _reduced_matrix(rho, axes))


def _spectrum(m: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if w.min() < -STATE_TOL:
        raise StateError("density matrix is not positive semidefinite")
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def _entropy_of_matrix(m: np.ndarray) -> float:
    return entropy_of(_spectrum(m))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return entropy_of(rho.eigenvalues())


def _entropies(rho: DensityMatrix):
    cache: dict[tuple[int, ...], float] = {}

    def h(subset: Iterable[int]) -> float:
        key = tuple(sorted(set(subset)))
        if not key:
            return 0.0
        if key not in cache:
            cache[key] = _entropy_of_matrix(_reduced_matrix(rho, key))
        return cache[key]

    return h


def _need(rho: DensityMatrix) -> int:
    if rho.n < 2:
        raise _classical.ArityError(f"needs at least 2 parties, got {rho.n}")
    return rho.n


def q_s_n(rho: DensityMatrix) -> float:
    """sum_i S(rho without party i) - (n-1) S(rho)."""
    n = _need(rho)
    h = _entropies(rho)
    everyone = range(n)
    return sum(h([j for j in everyone if j != i]) for i in everyone) - (n - 1) * h(everyone)


def q_t_n(rho: DensityMatrix) -> float:
    """sum_i S(rho_i) - S(rho)."""
    n = _need(rho)
    h = _entropies(rho)
    return sum(h([i]) for i in range(n)) - h(range(n))


def _cmi(h, x, y, z=()) -> float:
    x, y, z = list(x), list(y), list(z)
    return h(x + z) + h(y + z) - h(z) - h(x + y + z)


def q_s_n_chain(rho: DensityMatrix) -> float:
    """Quantum I(A_1 : A_2..A_n) + sum_i I(A_i : A_{i+1}..A_n | A_1..A_{i-1})."""
    n = _need(rho)
    h = _entropies(rho)
    total = _cmi(h, [0], range(1, n))
    for i in range(1, n - 1):
        total += _cmi(h, [i], range(i + 1, n), range(i))
    return total


def q_t_n_chain(rho: DensityMatrix) -> float:
    n = _need(rho)
    h = _entropies(rho)
    return sum(_cmi(h, range(i), [i]) for i in range(1, n))


def q_mutual_information(rho: DensityMatrix, x, y, z=()) -> float:
    """Quantum (conditional) mutual information between label sets."""
    h = _entropies(rho)
    idx = rho.parties.indices
    return _cmi(h, idx(_as_labels(x)), idx(_as_labels(y)), idx(_as_labels(z)))


def q_mutual_information_sum(rho: DensityMatrix) -> float:
    """sum_i I(A_i : everyone else)."""
    n = _need(rho)
    h = _entropies(rho)
    return sum(_cmi(h, [i], [j for j in range(n) if j != i]) for i in range(n))


def local_entropies(state: PureState | DensityMatrix) -> list[float]:
    rho = state.density_matrix() if isinstance(state, PureState) else state
    h = _entropies(rho)
    return [h([i]) for i in range(rho.n)]


def pure_state_monotone(psi: PureState) -> float:
    """Sum of the local entropies, which is both S_n and T_n of a pure state."""
    if len(psi.parties) < 2:
        raise _classical.ArityError("needs at least 2 parties")
    value = sum(local_entropies(psi))
    rho = psi.density_matrix()
    s, t = q_s_n(rho), q_t_n(rho)
    if abs(s - value) > STATE_TOL or abs(t - value) > STATE_TOL:
        raise RuntimeError(f"pure-state identity broken: sum={value}, S={s}, T={t}")
    return value


# ---------------------------------------------------------------------------
# local operations and measurements


def _apply_local(rho: DensityMatrix, axis: int, op: np.ndarray) -> np.ndarray:
    """(K (x) 1) rho (K^dag (x) 1), unnormalized, as a matrix."""
    n = rho.n
    t = _as_tensor(rho)
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)
    t = np.moveaxis(np.tensordot(op.conj(), t, axes=([1], [n + axis])), 0, n + axis)
    dims = list(rho.dims)
    dims[axis] = op.shape[0]
    d = int(np.prod(dims))
    return t.reshape(d, d), tuple(dims)


def apply_local_channel(rho: DensityMatrix, party: str, ch: KrausChannel) -> DensityMatrix:
    axis = rho.parties.index(party)
    if ch.in_dim != rho.dims[axis]:
        raise StateError(f"channel input dimension {ch.in_dim} != dimension {rho.dims[axis]} of {party!r}")
    total = None
    for op in ch.operators:
        m, dims = _apply_local(rho, axis, op)
        total = m if total is None else total + m
    return DensityMatrix(_parties(rho.labels, dims), total)


def measure_and_announce(rho: DensityMatrix, party: str, inst: Instrument) -> QuantumEnsemble:
    """Outcome k with probability p_k and post-measurement state M_k rho M_k^dag / p_k."""
    axis = rho.parties.index(party)
    if inst.in_dim != rho.dims[axis]:
        raise StateError(f"instrument dimension {inst.in_dim} != dimension {rho.dims[axis]} of {party!r}")
    members = []
    raw = []
    for label, op in inst.outcomes:
        m, dims = _apply_local(rho, axis, op)
        p = float(np.trace(m).real)
        raw.append((p, m, dims, label))
    total = sum(max(p, 0.0) for p, *_ in raw)
    for p, m, dims, label in raw:
        if p > 1e-15:
            members.append(QuantumBranch(p / total, DensityMatrix(_parties(rho.labels, dims), m / p), label))
    return QuantumEnsemble(members)


NAMED_BASES = {
    "z": np.eye(2, dtype=complex),
    "x": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "y": np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2),
}


def _orthonormal(basis) -> np.ndarray:
    if isinstance(basis, str):
        try:
            return NAMED_BASES[basis.lower()]
        except KeyError:
            raise StateError(f"unknown basis name {basis!r}") from None
    u = np.asarray(basis, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise StateError("a basis is a square matrix whose columns are the basis vectors")
    if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > STATE_TOL:
        raise StateError("basis is not orthonormal")
    return u


def measure_all(rho: DensityMatrix | PureState, bases: Sequence) -> JointDistribution:
    """Born-rule distribution of a local projective measurement on every party.

    ``bases[i]`` is a unitary whose columns are party i's basis vectors, or
    one of the names ``"z"``, ``"x"``, ``"y"`` for qubits.
    """
    if isinstance(rho, PureState):
        rho = rho.density_matrix()
    if len(bases) != rho.n:
        raise StateError(f"{len(bases)} bases for {rho.n} parties")
    us = [_orthonormal(b) for b in bases]
    for u, d, lab in zip(us, rho.dims, rho.labels):
        if u.shape[0] != d:
            raise StateError(f"basis of dimension {u.shape[0]} for party {lab!r} of dimension {d}")
    t = _as_tensor(rho)
    n = rho.n
    for i, u in enumerate(us):
        t = np.moveaxis(np.tensordot(u.conj().T, t, axes=([1], [i])), 0, i)
        t = np.moveaxis(np.tensordot(u.T, t, axes=([1], [n + i])), 0, n + i)
    d = rho.parties.size
    probs = np.clip(np.real(np.diagonal(t.reshape(d, d))), 0.0, None)
    probs = probs / probs.sum()
    return JointDistribution._derived(rho.parties, probs.reshape(rho.dims))


def diagonal_state(dist: JointDistribution) -> DensityMatrix:
    """Classical distribution embedded as a state diagonal in the product basis."""
    parties = _parties(dist.labels, dist.cardinalities)
    return DensityMatrix(parties, np.diag(dist.table.ravel().astype(complex)))


# ---------------------------------------------------------------------------
# GHZ and the sum-halving bound


def ghz(n: int = 3, labels: Sequence[str] | None = None) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    if n < 2:
        raise ValueError("a GHZ state needs at least 2 parties")
    labels = tuple(labels) if labels is not None else tuple(chr(ord("A") + i) for i in range(n))
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(_parties(labels, (2,) * n), amps)


class HalvingVerdict(NamedTuple):
    bound: float
    target_sum: float
    satisfied: bool


def sum_halving_bound(psi: PureState, target: JointDistribution, tol: float = STATE_TOL) -> HalvingVerdict:
    """Check S_n + T_n of ``target`` against the local-entropy sum of ``psi``.

    Any distribution that LOCC with measurements can extract from ``psi``
    satisfies ``S_n + T_n <= sum_i S(rho_i)``, half the initial S_n + T_n.
    """
    if psi.labels != target.labels:
        raise StateError(f"label mismatch: {psi.labels} vs {target.labels}")
    bound = sum(local_entropies(psi))
    value = _classical.s_n(target) + _classical.t_n(target)
    return HalvingVerdict(bound, value, value <= bound + tol)


def ghz_demo(n: int = 3) -> dict:
    """S_n, T_n on GHZ and on its z- and x-basis measurement outcomes."""
    psi = ghz(n)
    rho = psi.density_matrix()
    pz = measure_all(psi, ["z"] * n)
    px = measure_all(psi, ["x"] * n)
    out = {
        "ghz": (q_s_n(rho), q_t_n(rho)),
        "z": (_classical.s_n(pz), _classical.t_n(pz)),
        "x": (_classical.s_n(px), _classical.t_n(px)),
    }
    out["halving_z"] = sum_halving_bound(psi, pz)
    out["halving_x"] = sum_halving_bound(psi, px)
    return out


# ---------------------------------------------------------------------------
# random objects for property tests


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    z = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    q, _ = np.linalg.qr(z)
    return q


def random_pure_state(rng: np.random.Generator, labels: Sequence[str], dims: Sequence[int]) -> PureState:
    d = int(np.prod(dims))
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(_parties(labels, dims), v / np.linalg.norm(v))


def random_density_matrix(rng: np.random.Generator, labels: Sequence[str], dims: Sequence[int]) -> DensityMatrix:
    """Trace out an ancilla of equal dimension from a random pure state."""
    d = int(np.prod(dims))
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return DensityMatrix(_parties(labels, dims), m / np.trace(m).real)


def random_kraus_channel(rng: np.random.Generator, in_dim: int, out_dim: int, n_ops: int = 2) -> KrausChannel:
    return KrausChannel.from_isometry(random_isometry(rng, out_dim * n_ops, in_dim), out_dim)


def random_instrument(rng: np.random.Generator, dim: int, n_outcomes: int = 2, out_dim: int | None = None) -> Instrument:
    out_dim = dim if out_dim is None else out_dim
    v = random_isometry(rng, out_dim * n_outcomes, dim).reshape(n_outcomes, out_dim, dim)
    return Instrument((str(k), v[k]) for k in range(n_outcomes))
