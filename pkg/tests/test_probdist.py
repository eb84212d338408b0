import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from secmono import canonical
from secmono.probdist import (
    DistributionError,
    InstanceTooLargeError,
    JointDistribution,
    PartySet,
    StochasticChannel,
    announce,
    apply_channel,
    forget,
    group,
    independent,
    marginalize,
    permute,
    product_of_marginals,
    random_channel,
    random_distribution,
    tensor,
    uniform,
)

import oracles


@st.composite
def distributions(draw, max_parties=3, max_card=3):
    n = draw(st.integers(2, max_parties))
    cards = draw(st.lists(st.integers(1, max_card), min_size=n, max_size=n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_distribution(np.random.default_rng(seed), "ABCD"[:n], cards)


def test_party_set_validation():
    with pytest.raises(DistributionError):
        PartySet(("A", "A"), (2, 2))
    with pytest.raises(DistributionError):
        PartySet(("A", ""), (2, 2))
    with pytest.raises(DistributionError):
        PartySet(("A",), (0,))
    with pytest.raises(DistributionError):
        PartySet(("A", "B"), (2,))


def test_construction_rejects_bad_tables():
    parties = PartySet(("A", "B"), (2, 2))
    with pytest.raises(DistributionError):
        JointDistribution(parties, [0.5, 0.5, 0.5, -0.5])
    with pytest.raises(DistributionError):
        JointDistribution(parties, [0.25, 0.25, 0.25, 0.25 + 1e-10])
    with pytest.raises(DistributionError):
        JointDistribution(parties, [0.5, 0.5])
    # within 1e-12 is accepted as is, not renormalized
    d = JointDistribution(parties, [0.25, 0.25, 0.25, 0.25 + 1e-13])
    assert d.table[1, 1] == 0.25 + 1e-13


def test_instance_cap():
    with pytest.raises(InstanceTooLargeError):
        uniform(("A", "B"), (2**12, 2**12 + 1))


def test_tables_are_immutable():
    d = canonical.p3()
    with pytest.raises(ValueError):
        d.table[0, 0, 0] = 1.0


def test_marginalize_p3_and_px():
    assert np.allclose(marginalize(canonical.p3(), "A").table, [0.5, 0.5])
    ab = marginalize(canonical.px(), ["A", "B"])
    assert ab.labels == ("A", "B")
    assert np.allclose(ab.table, 0.25)


def test_marginalize_keeps_declared_order():
    d = random_distribution(np.random.default_rng(1), "ABC", (2, 3, 4))
    m = marginalize(d, ["C", "A"])
    assert m.labels == ("A", "C")
    assert np.allclose(m.table, d.table.sum(axis=1))


def test_marginalize_trivial_bystander():
    d = canonical.p2("AB", bystander="trivial")
    assert marginalize(d, ["A", "B"]).allclose(
        JointDistribution.from_entries("AB", (2, 2), {(0, 0): 0.5, (1, 1): 0.5})
    )


def test_marginalize_errors():
    with pytest.raises(DistributionError):
        marginalize(canonical.p3(), "Z")
    with pytest.raises(DistributionError):
        marginalize(canonical.p3(), [])


def test_apply_identity_channel():
    d = canonical.p2("AB")
    assert apply_channel(d, "B", StochasticChannel.identity(2)).allclose(d)


def test_forget_p3_gives_p2_with_uniform_c():
    out = forget(canonical.p3(), "C")
    assert out.allclose(canonical.p2("AB"))
    same = apply_channel(canonical.p3(), "C", StochasticChannel.randomizing(2))
    assert same.allclose(out)


def test_binary_symmetric_channel_against_oracle():
    d = JointDistribution.from_entries("AB", (2, 2), {(0, 0): 0.5, (1, 1): 0.5})
    out = apply_channel(d, "B", StochasticChannel.binary_symmetric(0.25))
    expected = oracles.push_through({(0, 0): 0.5, (1, 1): 0.5}, 1, [[0.75, 0.25], [0.25, 0.75]])
    assert oracles.pmf_of(out.table) == pytest.approx(expected)
    # 1 - h(1/4), frozen from the brute-force oracle
    from secmono.entropy import mutual_information

    assert mutual_information(out, "A", "B") == pytest.approx(0.18872187554086706, abs=1e-12)


def test_apply_channel_changes_cardinality_and_checks_arity():
    d = canonical.p3()
    out = apply_channel(d, "C", StochasticChannel.constant(2, 1))
    assert out.cardinalities == (2, 2, 1)
    with pytest.raises(DistributionError):
        apply_channel(d, "C", StochasticChannel.identity(3))
    with pytest.raises(DistributionError):
        apply_channel(d, "Q", StochasticChannel.identity(2))


def test_forget_on_independent_uniform_is_noop():
    d = uniform("AB", (2, 2))
    assert forget(d, "A").allclose(d)


def test_forget_px_c_gives_three_uniform_bits():
    assert forget(canonical.px(), "C").allclose(uniform("ABC", (2, 2, 2)))


def test_announce_px_c_identity():
    ens = announce(canonical.px(), "C", StochasticChannel.identity(2))
    assert ens.weights == (0.5, 0.5)
    for b in ens:
        c = b.transcript[0]
        # C is pinned to the announced value; A xor B = c
        expected = {(a, a ^ c, c): 0.5 for a in (0, 1)}
        assert oracles.pmf_of(b.dist.table) == pytest.approx(expected)


def test_announce_constant_channel_is_trivial():
    d = random_distribution(np.random.default_rng(3), "ABC", (2, 3, 2))
    ens = announce(d, "B", StochasticChannel.constant(3, 1))
    assert len(ens) == 1
    assert ens.members[0].dist.allclose(d)


def test_announce_p3_identity_gives_deterministic_members():
    ens = announce(canonical.p3(), "A", StochasticChannel.identity(2))
    assert [b.transcript for b in ens] == [(0,), (1,)]
    for b in ens:
        a = b.transcript[0]
        assert b.dist.prob((a, a, a)) == 1.0


def test_announce_drops_zero_probability_values():
    d = JointDistribution.from_entries("AB", (3, 2), {(0, 0): 0.5, (1, 1): 0.5})
    ens = announce(d, "A", StochasticChannel.identity(3))
    assert [b.transcript for b in ens] == [(0,), (1,)]


def test_group_identity_partition_and_product_alphabet():
    d = random_distribution(np.random.default_rng(4), "AB", (2, 3))
    assert group(d, [["A"], ["B"]]).allclose(d)
    g = group(random_distribution(np.random.default_rng(5), "ABC", (2, 3, 2)), [["A", "B"], ["C"]])
    assert g.labels == ("AB", "C") and g.cardinalities == (6, 2)


def test_group_errors():
    d = canonical.p3()
    with pytest.raises(DistributionError):
        group(d, [["A"], ["B"]])
    with pytest.raises(DistributionError):
        group(d, [["A", "B"], ["B", "C"]])


def test_tensor_relabels_pairs():
    t = tensor(canonical.p3(), canonical.p3())
    assert t.cardinalities == (4, 4, 4)
    assert len(t.support()) == 4
    for outcome, p in t.support():
        assert p == pytest.approx(0.25)
        assert len(set(outcome)) == 1
    with pytest.raises(DistributionError):
        tensor(canonical.p3(), uniform("AB", (2, 2)))


def test_independent_and_permute():
    d = independent(uniform("A", (2,)), uniform("B", (3,)))
    assert d.labels == ("A", "B")
    p = permute(d, ["B", "A"])
    assert p.labels == ("B", "A") and p.cardinalities == (3, 2)


def test_channel_validation():
    with pytest.raises(DistributionError):
        StochasticChannel([[0.5, 0.4]])
    with pytest.raises(DistributionError):
        StochasticChannel([[1.5, -0.5]])


# properties


@settings(max_examples=60, deadline=None)
@given(distributions(), st.integers(0, 2**32 - 1))
def test_marginalize_commutes_with_disjoint_channel(d, seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, d.cardinalities[-1], 3)
    keep = d.labels[:-1]
    lhs = marginalize(apply_channel(d, d.labels[-1], ch), keep)
    rhs = marginalize(d, keep)
    assert lhs.allclose(rhs, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(distributions(), st.integers(0, 2**32 - 1))
def test_announce_weights_are_the_announcement_marginal(d, seed):
    rng = np.random.default_rng(seed)
    party = d.labels[0]
    ch = random_channel(rng, d.cardinalities[0], 3)
    ens = announce(d, party, ch)
    announced = marginalize(apply_channel(d, party, ch), party).table
    assert sum(ens.weights) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.array(ens.weights), announced[announced > 0], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(distributions(), distributions())
def test_tensor_then_marginalize_recovers_factor(d1, d2):
    d2 = random_distribution(np.random.default_rng(0), d1.labels, d2.cardinalities[:1] * d1.n)
    t = tensor(d1, d2)
    shape = [c for pair in zip(d1.cardinalities, d2.cardinalities) for c in pair]
    recovered = t.table.reshape(shape).sum(axis=tuple(range(1, 2 * d1.n, 2)))
    assert np.array_equal(recovered.shape, d1.cardinalities)
    assert np.allclose(recovered, d1.table, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(distributions())
def test_outputs_stay_normalized(d):
    for out in (product_of_marginals(d), forget(d, d.labels[0]), group(d, [d.labels])):
        assert abs(out.table.sum() - 1.0) < 1e-9
        assert np.all(out.table >= 0)
