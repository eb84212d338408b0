"""Seeded randomized checks of the monotone properties.

Each check runs a number of independent trials.  Trial ``k`` of check
``name`` under master seed ``s`` draws everything from
``numpy.random.default_rng(trial_seed(s, name, k))``; a failure records that
trial seed, so :func:`rerun` reproduces it exactly.  Reports serialize to
JSON with the fields of :class:`CheckReport`.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import monotones as mono
from . import quantum as q
from .entropy import mutual_information
from .locc import ensemble_monotone
from .probdist import (
    JointDistribution,
    StochasticChannel,
    announce,
    apply_channel,
    permute,
    product_of_marginals,
    random_channel,
    random_distribution,
    tensor,
)

TOL = 1e-9
PERTURBATION = 1e-6
PERTURBATION_SHIFT = 1e-3
LETTERS = "ABCDEFGH"

Violation = tuple[str, float, float]  # description, observed, bound


@dataclass(frozen=True)
class Failure:
    seed: int
    description: str
    observed: float
    bound: float


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    trials: int
    failures: tuple[Failure, ...]
    tolerance: float
    verdict: str

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "trials": self.trials,
            "failures": [asdict(f) for f in self.failures],
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[np.random.Generator, dict], list[Violation]]
    tolerance: float = TOL
    required: bool = True
    fixed: bool = False  # deterministic: a single trial


def trial_seed(master: int, check_name: str, trial: int) -> int:
    ss = np.random.SeedSequence([int(master), zlib.crc32(check_name.encode()), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_check(check: Check, seed: int, trials: int, opts: dict) -> CheckReport:
    n = 1 if check.fixed else trials
    failures = []
    for k in range(n):
        ts = trial_seed(seed, check.name, k)
        for desc, observed, bound in check.run(np.random.default_rng(ts), opts):
            failures.append(Failure(ts, desc, float(observed), float(bound)))
    failures.sort(key=lambda f: (f.seed, f.description))
    return CheckReport(check.name, n, tuple(failures), check.tolerance, "fail" if failures else "pass")


def _at_most(desc: str, observed: float, bound: float, tol: float = TOL) -> list[Violation]:
    return [] if observed <= bound + tol else [(desc, observed, bound)]


def _close(desc: str, observed: float, expected: float, tol: float = TOL) -> list[Violation]:
    return [] if abs(observed - expected) <= tol else [(desc, observed, expected)]


# ---------------------------------------------------------------------------
# classical


def _random_dist(rng, opts, n: int | None = None) -> JointDistribution:
    if n is None:
        n = int(rng.integers(2, opts["max_parties"] + 1))
    lo = min(2, opts["max_alphabet"])
    cards = [int(c) for c in rng.integers(lo, opts["max_alphabet"] + 1, size=n)]
    return random_distribution(rng, LETTERS[:n], cards)


def _random_local_channel(rng, in_card: int, max_out: int) -> StochasticChannel:
    out = int(rng.integers(1, max_out + 1))
    if rng.random() < 0.3:
        return StochasticChannel.deterministic(rng.integers(0, out, size=in_card), out)
    return random_channel(rng, in_card, out)


def _c_positivity(rng, opts):
    d = _random_dist(rng, opts)
    out = []
    for name, m in opts["monotones"].items():
        v = m(d)
        if v < -TOL:
            out.append((f"{name} negative on {d.cardinalities}", v, 0.0))
    return out


def _c_product_vanishing(rng, opts):
    d = product_of_marginals(_random_dist(rng, opts))
    out = []
    for name, m in opts["monotones"].items():
        out += _close(f"{name} on a product distribution", m(d), 0.0)
    return out


def _c_local_monotonicity(rng, opts):
    d = _random_dist(rng, opts)
    party = d.labels[int(rng.integers(d.n))]
    ch = _random_local_channel(rng, d.parties.cardinality(party), opts["max_alphabet"])
    after = apply_channel(d, party, ch)
    out = []
    for name, m in opts["monotones"].items():
        out += _at_most(f"{name} increased under a local channel on {party}", m(after), m(d))
    return out


def _c_announcement_monotonicity(rng, opts):
    d = _random_dist(rng, opts)
    party = d.labels[int(rng.integers(d.n))]
    card = d.parties.cardinality(party)
    n_out = int(rng.integers(2, 4))
    if rng.random() < 0.3:
        ch = StochasticChannel.deterministic(rng.integers(0, n_out, size=card), n_out)
    else:
        ch = random_channel(rng, card, n_out)
    ens = announce(d, party, ch)
    out = []
    for name, m in opts["monotones"].items():
        out += _at_most(f"{name} increased on average after {party} announced", ensemble_monotone(ens, m), m(d))
    return out


def _c_additivity(rng, opts):
    d1 = _random_dist(rng, opts)
    d2 = _random_dist(rng, opts, n=d1.n)
    both = tensor(d1, d2)
    out = []
    for name, m in opts["monotones"].items():
        out += _close(f"{name} not additive", m(both), m(d1) + m(d2))
    return out


def _c_permutation_symmetry(rng, opts):
    d = _random_dist(rng, opts)
    order = [d.labels[i] for i in rng.permutation(d.n)]
    shuffled = permute(d, order)
    out = []
    for name, m in opts["monotones"].items():
        out += _close(f"{name} changed under party order {order}", m(shuffled), m(d))
    return out


def _c_perturbation(rng, opts):
    d = _random_dist(rng, opts)
    eps = float(rng.uniform(0, PERTURBATION))
    noise = random_distribution(rng, d.labels, d.cardinalities)
    moved = JointDistribution._derived(d.parties, (1 - eps) * d.table + eps * noise.table)
    out = []
    for name, m in opts["monotones"].items():
        shift = abs(m(moved) - m(d))
        if shift > PERTURBATION_SHIFT:
            out.append((f"{name} moved by {shift} under a {eps:.2e} perturbation", shift, PERTURBATION_SHIFT))
    return out


def _spread(desc: str, values: Mapping[str, float]) -> list[Violation]:
    vs = list(values.values())
    spread = max(vs) - min(vs)
    if spread > TOL:
        return [(f"{desc}: {values}", spread, 0.0)]
    return []


def _c_s_formulas(rng, opts):
    d = _random_dist(rng, opts)
    return _spread(
        "S_n forms disagree",
        {"def": mono.s_n_def(d), "alt": mono.s_n_alt(d), "chain": mono.s_n_chain(d), "rec": mono.s_n_recursive(d)},
    )


def _c_t_formulas(rng, opts):
    d = _random_dist(rng, opts)
    return _spread(
        "T_n forms disagree",
        {"def": mono.t_n_def(d), "chain": mono.t_n_chain(d), "rec": mono.t_n_recursive(d), "rel": mono.t_n_relative(d)},
    )


def _c_sum_identity(rng, opts):
    d = _random_dist(rng, opts)
    return _close("S_n + T_n != sum of I(A_i : rest)", mono.s_n(d) + mono.t_n(d), mono.mutual_information_sum(d))


def _c_two_party(rng, opts):
    d = _random_dist(rng, opts, n=2)
    i = mutual_information(d, d.labels[0], d.labels[1])
    return _close("S_2 != I(A:B)", mono.s_n(d), i) + _close("T_2 != I(A:B)", mono.t_n(d), i)


def _c_venn(rng, opts):
    d = _random_dist(rng, opts, n=3)
    try:
        v = mono.venn(d)
    except RuntimeError as exc:
        return [(str(exc), float("nan"), 0.0)]
    values = {"r": v.r, "s": v.s, "t": v.t, "r+u": v.r + v.u, "s+u": v.s + v.u, "t+u": v.t + v.u}
    return [(f"Venn {name} negative", values[name], 0.0) for name in v.positivity_violations(TOL)]


def _c_decomposition(rng, opts):
    d = _random_dist(rng, opts, n=3)
    y = mono.canonical_decomposition(d)
    out = []
    if not y.feasible:
        out.append((f"negative yield {y.as_tuple()}", min(y.as_tuple()), 0.0))
    target = np.array(mono.five_vector(d).as_tuple())
    err = float(np.max(np.abs(y.five_vector() - target)))
    out += _close("decomposition does not reproduce the five monotones", err, 0.0)
    return out


CLASSICAL_CHECKS = (
    Check("positivity", _c_positivity),
    Check("product_vanishing", _c_product_vanishing),
    Check("local_channel_monotonicity", _c_local_monotonicity),
    Check("announcement_monotonicity", _c_announcement_monotonicity),
    Check("additivity", _c_additivity),
    Check("permutation_symmetry", _c_permutation_symmetry),
    Check("perturbation_stability", _c_perturbation, tolerance=PERTURBATION_SHIFT),
    Check("s_n_formula_equivalence", _c_s_formulas),
    Check("t_n_formula_equivalence", _c_t_formulas),
    Check("sum_identity", _c_sum_identity),
    Check("two_party_collapse", _c_two_party),
    Check("venn_positivity", _c_venn),
    Check("canonical_decomposition", _c_decomposition),
)


def check_classical_properties(
    seed: int = 0,
    trials: int = 1000,
    max_parties: int = 4,
    max_alphabet: int = 4,
    monotones: Mapping[str, mono.Monotone] | None = None,
) -> list[CheckReport]:
    """Run every classical check.

    ``monotones`` replaces the monotones under test (default S_n and T_n) in
    the generic checks; the formula checks always use the library forms.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if max_parties < 2 or max_alphabet < 1:
        raise ValueError("need max_parties >= 2 and max_alphabet >= 1")
    opts = {
        "max_parties": max_parties,
        "max_alphabet": max_alphabet,
        "monotones": dict(monotones) if monotones is not None else {"S_n": mono.s_n, "T_n": mono.t_n},
    }
    return [_run_check(c, seed, trials, opts) for c in CLASSICAL_CHECKS]


# ---------------------------------------------------------------------------
# eavesdropper


def _random_eve_dist(rng, opts) -> JointDistribution:
    n = int(rng.integers(2, 4))
    cards = [int(c) for c in rng.integers(2, 4, size=n)] + [int(rng.integers(2, opts["max_eve"] + 1))]
    return random_distribution(rng, LETTERS[:n] + "E", cards)


def _m1(d: JointDistribution) -> float:
    return mono.eve_average(d, "E", mono.s_n)


def _mdown(d: JointDistribution) -> float:
    return mono.eve_min(d, "E", mono.s_n).value


def _random_map(rng, card: int) -> StochasticChannel:
    out = int(rng.integers(1, card + 1))
    return StochasticChannel.deterministic(rng.integers(0, out, size=card), out)


def _e_m1_announcement(rng, opts):
    d = _random_eve_dist(rng, opts)
    ch = random_channel(rng, d.parties.cardinality("E"), int(rng.integers(2, 4)))
    after = ensemble_monotone(announce(d, "E", ch), _m1)
    return _at_most("M1 decreased after Eve announced", _m1(d), after)


def _e_m1_local_search(rng, opts):
    d = _random_eve_dist(rng, opts)
    ch = random_channel(rng, d.parties.cardinality("E"), int(rng.integers(1, 4)))
    return _at_most("M1 decreased under Eve's local channel", _m1(d), _m1(apply_channel(d, "E", ch)))


def _e_mdown_le_m1(rng, opts):
    d = _random_eve_dist(rng, opts)
    return _at_most("M_down above M1", _mdown(d), _m1(d))


def _e_mdown_local(rng, opts):
    d = _random_eve_dist(rng, opts)
    after = apply_channel(d, "E", _random_map(rng, d.parties.cardinality("E")))
    return _at_most("M_down decreased under Eve's deterministic map", _mdown(d), _mdown(after))


def _e_mdown_announcement(rng, opts):
    d = _random_eve_dist(rng, opts)
    ens = announce(d, "E", _random_map(rng, d.parties.cardinality("E")))
    return _at_most("M_down decreased after Eve announced", _mdown(d), ensemble_monotone(ens, _mdown))


EVE_CHECKS = (
    Check("m1_eve_announcement_monotonicity", _e_m1_announcement),
    Check("m1_eve_local_counterexample_search", _e_m1_local_search, required=False),
    Check("mdown_at_most_m1", _e_mdown_le_m1),
    Check("mdown_eve_local_monotonicity", _e_mdown_local),
    Check("mdown_eve_announcement_monotonicity", _e_mdown_announcement),
)


def check_eve_properties(seed: int = 0, trials: int = 500, max_eve: int = 4) -> list[CheckReport]:
    """Eve-side checks for M1 and M_down with S_n as the base monotone.

    The M1 local-operation check is a counterexample search: M1 is not
    expected to satisfy it, and its failures are findings.  M_down is
    evaluated with exhaustive deterministic search and Eve's operations are
    deterministic, so its checks are exact despite the search caveat.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    opts = {"max_eve": max(2, min(max_eve, mono.EXHAUSTIVE_MAX))}
    return [_run_check(c, seed, trials, opts) for c in EVE_CHECKS]


# ---------------------------------------------------------------------------
# quantum


def _random_dims(rng, opts, n: int | None = None) -> tuple[str, tuple[int, ...]]:
    while True:
        k = int(rng.integers(2, 5)) if n is None else n
        dims = tuple(int(x) for x in rng.integers(2, 4, size=k))
        if int(np.prod(dims)) <= opts["max_dim"]:
            return LETTERS[:k], dims


def _q_positivity(rng, opts):
    rho = q.random_density_matrix(rng, *_random_dims(rng, opts))
    out = []
    for name, f in (("S_n", q.q_s_n), ("T_n", q.q_t_n)):
        v = f(rho)
        if v < -TOL:
            out.append((f"quantum {name} negative", v, 0.0))
    return out


def _product_state(rng, labels, dims) -> q.DensityMatrix:
    m = np.ones((1, 1), dtype=complex)
    for lab, d in zip(labels, dims):
        m = np.kron(m, q.random_density_matrix(rng, (lab,), (d,)).matrix)
    return q.DensityMatrix.from_arrays(labels, dims, m)


def _q_product(rng, opts):
    rho = _product_state(rng, *_random_dims(rng, opts))
    return _close("quantum S_n on a product state", q.q_s_n(rho), 0.0) + _close(
        "quantum T_n on a product state", q.q_t_n(rho), 0.0
    )


def _q_pure(rng, opts):
    psi = q.random_pure_state(rng, *_random_dims(rng, opts))
    rho = psi.density_matrix()
    total = sum(q.local_entropies(psi))
    return _close("pure-state S_n != sum of local entropies", q.q_s_n(rho), total) + _close(
        "pure-state T_n != sum of local entropies", q.q_t_n(rho), total
    )


def _q_formulas(rng, opts):
    rho = q.random_density_matrix(rng, *_random_dims(rng, opts))
    return _close("quantum S_n chain form", q.q_s_n_chain(rho), q.q_s_n(rho)) + _close(
        "quantum T_n chain form", q.q_t_n_chain(rho), q.q_t_n(rho)
    )


def _q_ssa(rng, opts):
    labels, dims = _random_dims(rng, opts, n=3)
    rho = q.random_density_matrix(rng, labels, dims)
    cmi = q.q_mutual_information(rho, "A", "B", "C")
    return [] if cmi >= -TOL else [("quantum I(A:B|C) negative", cmi, 0.0)]


def _q_sum_identity(rng, opts):
    rho = q.random_density_matrix(rng, *_random_dims(rng, opts))
    return _close("quantum S_n + T_n != sum of I(A_i : rest)", q.q_s_n(rho) + q.q_t_n(rho), q.q_mutual_information_sum(rho))


def _q_cp_monotonicity(rng, opts):
    labels, dims = _random_dims(rng, opts)
    rho = q.random_density_matrix(rng, labels, dims)
    i = int(rng.integers(len(labels)))
    out_dim = int(rng.integers(1, 4))
    n_ops = int(rng.integers(1, 4))
    n_ops = max(n_ops, -(-dims[i] // out_dim))
    ch = q.random_kraus_channel(rng, dims[i], out_dim, n_ops)
    after = q.apply_local_channel(rho, labels[i], ch)
    return _at_most("quantum S_n increased under a local CP map", q.q_s_n(after), q.q_s_n(rho)) + _at_most(
        "quantum T_n increased under a local CP map", q.q_t_n(after), q.q_t_n(rho)
    )


def _q_povm(rng, opts):
    labels, dims = _random_dims(rng, opts)
    rho = q.random_density_matrix(rng, labels, dims)
    i = int(rng.integers(len(labels)))
    inst = q.random_instrument(rng, dims[i], int(rng.integers(2, 4)))
    ens = q.measure_and_announce(rho, labels[i], inst)
    return _at_most("quantum S_n increased on average after a POVM", ens.average(q.q_s_n), q.q_s_n(rho)) + _at_most(
        "quantum T_n increased on average after a POVM", ens.average(q.q_t_n), q.q_t_n(rho)
    )


def _q_classical_embedding(rng, opts):
    labels, dims = _random_dims(rng, opts)
    d = random_distribution(rng, labels, dims)
    rho = q.diagonal_state(d)
    return _close("diagonal-state S_n != classical S_n", q.q_s_n(rho), mono.s_n(d)) + _close(
        "diagonal-state T_n != classical T_n", q.q_t_n(rho), mono.t_n(d)
    )


def _schmidt_bases(psi: q.PureState) -> tuple[np.ndarray, np.ndarray]:
    da, db = psi.dims
    u, _, vh = np.linalg.svd(psi.amplitudes.reshape(da, db))
    return u, vh.T


def _q_holevo(rng, opts):
    labels, dims = _random_dims(rng, opts, n=2)
    psi = q.random_pure_state(rng, labels, dims)
    s_a = q.local_entropies(psi)[0]
    bases = [q.random_unitary(rng, d) for d in dims]
    measured = q.measure_all(psi, bases)
    out = _at_most("I(A:B) of local measurements above S(rho_A)", mutual_information(measured, "A", "B"), s_a)
    schmidt = q.measure_all(psi, _schmidt_bases(psi))
    out += _close("Schmidt-basis measurement misses S(rho_A)", mutual_information(schmidt, "A", "B"), s_a)
    return out


def _q_sum_halving(rng, opts):
    labels, dims = _random_dims(rng, opts, n=int(rng.integers(2, 4)))
    psi = q.random_pure_state(rng, labels, dims)
    bound = sum(q.local_entropies(psi))
    if rng.random() < 0.5:
        i = int(rng.integers(len(labels)))
        ens = q.measure_and_announce(psi.density_matrix(), labels[i], q.random_instrument(rng, dims[i], 2))
        branches = [(m.weight, m.state) for m in ens]
    else:
        branches = [(1.0, psi.density_matrix())]
    value = 0.0
    for w, rho in branches:
        dist = q.measure_all(rho, [q.random_unitary(rng, d) for d in rho.dims])
        value += w * (mono.s_n(dist) + mono.t_n(dist))
    return _at_most("S_n + T_n of the measured distribution above the local-entropy sum", value, bound)


def _q_ghz(rng, opts):
    demo = q.ghz_demo(3)
    expected = {"ghz": (3.0, 3.0), "z": (1.0, 2.0), "x": (2.0, 1.0)}
    out = []
    for key, (s, t) in expected.items():
        out += _close(f"S_3 of {key}", demo[key][0], s) + _close(f"T_3 of {key}", demo[key][1], t)
    for key in ("halving_z", "halving_x"):
        v = demo[key]
        out += _close(f"{key}: S_3 + T_3 not half the initial sum", v.target_sum, v.bound)
    return out


QUANTUM_CHECKS = (
    Check("q_positivity", _q_positivity),
    Check("q_product_vanishing", _q_product),
    Check("q_pure_state_equality", _q_pure),
    Check("q_formula_equivalence", _q_formulas),
    Check("q_strong_subadditivity", _q_ssa),
    Check("q_sum_identity", _q_sum_identity),
    Check("q_cp_map_monotonicity", _q_cp_monotonicity),
    Check("q_povm_announcement_monotonicity", _q_povm),
    Check("q_classical_embedding", _q_classical_embedding),
    Check("q_holevo_bound", _q_holevo),
    Check("q_sum_halving", _q_sum_halving),
    Check("q_ghz_special_values", _q_ghz, fixed=True),
)


def check_quantum_properties(seed: int = 0, trials: int = 300, max_dim: int = 64) -> list[CheckReport]:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 8 <= max_dim <= q.MAX_DIM:
        raise ValueError(f"max_dim must lie in [8, {q.MAX_DIM}]")
    opts = {"max_dim": max_dim}
    return [_run_check(c, seed, trials, opts) for c in QUANTUM_CHECKS]


# ---------------------------------------------------------------------------
# suites, reruns, serialization

SUITES = {
    "classical": (CLASSICAL_CHECKS, check_classical_properties),
    "eve": (EVE_CHECKS, check_eve_properties),
    "quantum": (QUANTUM_CHECKS, check_quantum_properties),
}
OPTIONAL_CHECKS = frozenset(c.name for checks, _ in SUITES.values() for c in checks if not c.required)


def run_suite(name: str, seed: int = 0, trials: int | None = None) -> list[CheckReport]:
    """Run ``classical``, ``eve``, ``quantum`` or ``all`` with default options."""
    names = list(SUITES) if name == "all" else [name]
    reports = []
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        runner = SUITES[n][1]
        reports += runner(seed) if trials is None else runner(seed, trials)
    return reports


def required_failures(reports: Sequence[CheckReport]) -> list[CheckReport]:
    return [r for r in reports if not r.passed and r.check_name not in OPTIONAL_CHECKS]


def reports_to_json(reports: Sequence[CheckReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def rerun(check_name: str, seed: int, **opts) -> list[Violation]:
    """Replay one trial from the seed recorded in a :class:`Failure`."""
    defaults = {"max_parties": 4, "max_alphabet": 4, "max_eve": 4, "max_dim": 64}
    defaults.update(opts)
    defaults.setdefault("monotones", {"S_n": mono.s_n, "T_n": mono.t_n})
    if defaults["monotones"] is None:
        defaults["monotones"] = {"S_n": mono.s_n, "T_n": mono.t_n}
    for checks, _ in SUITES.values():
        for c in checks:
            if c.name == check_name:
                return c.run(np.random.default_rng(seed), defaults)
    raise KeyError(f"unknown check {check_name!r}")
