import numpy as np
import pytest

from secmono import canonical
from secmono import monotones as mono
from secmono.locc import (
    Protocol,
    ProtocolError,
    ProtocolStep,
    builtin,
    builtin_protocols,
    distance_to_target,
    ensemble_monotone,
    run_protocol,
)
from secmono.probdist import (
    ClassicalEnsemble,
    StochasticChannel,
    announce,
    random_distribution,
    tensor,
    uniform,
)

TOL = 1e-9
ID2 = StochasticChannel.identity(2)


def test_builtin_names():
    assert [p.name for p in builtin_protocols()] == ["px_to_p2", "p3_to_p2", "p3sq_to_px", "pxsq_to_p3"]
    with pytest.raises(KeyError):
        builtin("nope")


@pytest.mark.parametrize(
    "name, source, target, monotone, before, after",
    [
        ("px_to_p2", lambda: canonical.px(), lambda: canonical.p2("AB"), mono.s_n, 2, 1),
        ("p3_to_p2", lambda: canonical.p3(), lambda: canonical.p2("AB"), mono.t_n, 2, 1),
        ("p3sq_to_px", lambda: tensor(canonical.p3(), canonical.p3()), lambda: canonical.px(), mono.t_n, 4, 1),
        ("pxsq_to_p3", lambda: tensor(canonical.px(), canonical.px()), lambda: canonical.p3(), mono.s_n, 4, 1),
    ],
)
def test_builtin_golden_runs(name, source, target, monotone, before, after):
    src = source()
    ens = run_protocol(src, builtin(name))
    assert monotone(src) == pytest.approx(before, abs=TOL)
    assert ensemble_monotone(ens, monotone) == pytest.approx(after, abs=TOL)
    assert distance_to_target(ens, target()) < 1e-12


def test_pxsq_to_p3_branches():
    ens = run_protocol(tensor(canonical.px(), canonical.px()), builtin("pxsq_to_p3"))
    assert len(ens) == 8
    assert all(len(b.transcript) == 3 for b in ens)
    assert ens.weights == pytest.approx([1 / 8] * 8)
    assert [b.transcript for b in ens] == sorted(b.transcript for b in ens)


def test_announce_then_monotone_examples():
    ens = announce(canonical.px(), "C", ID2)
    assert ensemble_monotone(ens, mono.s_n) == pytest.approx(1.0, abs=TOL)
    ens = announce(canonical.p3(), "A", ID2)
    assert ensemble_monotone(ens, mono.s_n) == pytest.approx(0.0, abs=TOL)


def test_single_announcement_of_px():
    ens = run_protocol(canonical.px(), Protocol("ann", (ProtocolStep("announce", "C", ID2),)))
    for b in ens:
        assert mono.grouped_s2(b.dist, "A|BC") == pytest.approx(1.0)
        assert mono.s_n(b.dist) == pytest.approx(1.0)


def test_identity_protocol_and_single_member_ensemble():
    d = random_distribution(np.random.default_rng(2), "ABC", (2, 3, 2))
    ens = run_protocol(d, Protocol("id", (ProtocolStep("local_channel", "B", StochasticChannel.identity(3)),)))
    assert len(ens) == 1 and ens.members[0].dist.allclose(d)
    assert ensemble_monotone(ClassicalEnsemble.single(d), mono.t_n) == mono.t_n(d)


def test_step_validation():
    with pytest.raises(ProtocolError):
        Protocol("empty", ())
    with pytest.raises(ProtocolError):
        ProtocolStep("teleport", "A")
    with pytest.raises(ProtocolError):
        ProtocolStep("announce", "A")
    with pytest.raises(ProtocolError):
        ProtocolStep("forget", "A", ID2)
    with pytest.raises(ProtocolError):
        ProtocolStep("local_channel", "A")


def test_incompatible_channel_reports_step_and_branch():
    p = Protocol(
        "bad",
        (
            ProtocolStep("announce", "A", ID2),
            ProtocolStep("local_channel", "B", StochasticChannel.identity(3)),
        ),
    )
    with pytest.raises(ProtocolError) as info:
        run_protocol(canonical.p3(), p)
    assert info.value.step == 1
    assert info.value.transcript == (0,)


def test_missing_conditional_channel_is_an_error():
    p = Protocol(
        "partial",
        (
            ProtocolStep("announce", "A", ID2),
            ProtocolStep("local_channel", "B", when={(0,): ID2}),
        ),
    )
    with pytest.raises(ProtocolError):
        run_protocol(canonical.p3(), p)


def test_px_to_p2_on_p3_runs_but_misses_target():
    ens = run_protocol(canonical.p3(), builtin("px_to_p2"))
    assert distance_to_target(ens, canonical.p2("AB")) > 0.1


def test_distance_to_target_shape_mismatch():
    ens = ClassicalEnsemble.single(canonical.p3())
    assert distance_to_target(ens, uniform("ABC", (2, 2, 3))) == 1.0


@pytest.mark.parametrize("name", ["px_to_p2", "p3_to_p2", "p3sq_to_px", "pxsq_to_p3"])
def test_builtins_never_increase_monotones_on_random_inputs(name):
    proto = builtin(name)
    rng = np.random.default_rng(11)
    cards = (4, 4, 4) if name.endswith("sq_to_px") or name.endswith("sq_to_p3") else (2, 2, 2)
    for _ in range(20):
        d = random_distribution(rng, "ABC", cards)
        ens = run_protocol(d, proto)
        for f in (mono.s_n, mono.t_n):
            assert ensemble_monotone(ens, f) <= f(d) + TOL
