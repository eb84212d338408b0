import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from secmono import canonical, io, locc, quantum
from secmono.cli import main, parse_partition
from secmono.fixtures import fixture_objects, write_fixtures
from secmono.locc import ProtocolError
from secmono.probdist import DistributionError, random_distribution

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def fx(name):
    return FIXTURES / name


# JSON formats


def test_distribution_round_trip(tmp_path):
    d = random_distribution(np.random.default_rng(0), "ABC", (2, 3, 2))
    path = tmp_path / "d.json"
    io.dump_distribution(d, path)
    assert io.load_distribution(path).allclose(d, atol=0)


def test_protocol_round_trip_keeps_conditional_channels():
    for p in locc.builtin_protocols():
        back = io.protocol_from_dict(json.loads(io.dump_protocol(p)))
        assert back.name == p.name
        assert len(back.steps) == len(p.steps)
        for s, t in zip(back.steps, p.steps):
            assert (s.kind, s.party, set(s.when)) == (t.kind, t.party, set(t.when))


def test_state_round_trip():
    rng = np.random.default_rng(1)
    rho = quantum.random_density_matrix(rng, "AB", (2, 2))
    back = io.state_from_dict(json.loads(io.dump_state(rho)))
    assert np.allclose(back.matrix, rho.matrix)
    psi = quantum.ghz(3)
    assert np.allclose(io.load_state(io.dump_state(psi)).amplitudes, psi.amplitudes)


def test_format_errors():
    with pytest.raises(io.FormatError):
        io.load_distribution("{not json")
    with pytest.raises(io.FormatError):
        io.distribution_from_dict({"parties": ["A"]})
    with pytest.raises(io.FormatError):
        io.channel_from_dict({"in": 2, "out": 2, "kernel": [[1, 0]]})
    with pytest.raises(DistributionError):
        io.distribution_from_dict({"parties": ["A"], "cardinalities": [2], "entries": [{"outcome": [0], "p": 0.7}]})


def test_checked_in_fixtures_are_current(tmp_path):
    write_fixtures(tmp_path)
    for name in fixture_objects():
        assert (tmp_path / name).read_text() == fx(name).read_text(), name
    for p in locc.builtin_protocols():
        rel = Path("protocols") / f"{p.name}.json"
        assert (tmp_path / rel).read_text() == fx(rel).read_text()


# CLI


@pytest.mark.parametrize(
    "name, row",
    [("p3.json", "1 1 1 1 2"), ("px.json", "1 1 1 2 1"), ("p2ab.json", "1 1 0 1 1"), ("p2ac.json", "1 0 1 1 1"), ("p2bc.json", "0 1 1 1 1")],
)
def test_all_five(capsys, name, row):
    assert run(capsys, "monotone", fx(name), "--all-five")[:2] == (0, row)


def test_monotone_single_values(capsys):
    assert run(capsys, "monotone", fx("product.json"), "--monotone", "s")[:2] == (0, "0.000000")
    assert run(capsys, "monotone", fx("px.json"), "--monotone", "t")[:2] == (0, "1.000000")
    assert run(capsys, "monotone", fx("px.json"), "--monotone", "mlambda", "--lambda", "0.25")[:2] == (0, "1.250000")
    code, out, _ = run(capsys, "monotone", fx("p3.json"), "--group", "A|B,C", "--monotone", "s")
    assert (code, out) == (0, "1.000000")


def test_monotone_json(capsys):
    code, out, _ = run(capsys, "monotone", fx("p3.json"), "--json")
    assert code == 0
    assert json.loads(out) == pytest.approx({"S_n": 1.0, "T_n": 2.0})


def test_monotone_usage_errors(capsys):
    assert run(capsys, "monotone", fx("p3.json"), "--monotone", "mlambda")[0] == 2
    assert run(capsys, "monotone", "missing.json")[0] == 2
    assert run(capsys, "monotone", fx("p3.json"), "--group", "A|B")[0] == 2


def test_parse_partition():
    assert parse_partition("A|BC", ("A", "B", "C")) == [("A",), ("B", "C")]
    assert parse_partition("A|B,C", ("A", "B", "C")) == [("A",), ("B", "C")]
    assert parse_partition("Alice|Bob,Carol", ("Alice", "Bob", "Carol")) == [("Alice",), ("Bob", "Carol")]


def test_run_builtin_with_expect(capsys):
    code, out, _ = run(capsys, "run", fx("pxpx.json"), "--builtin", "pxsq_to_p3", "--expect", fx("p3.json"), "--json")
    doc = json.loads(out)
    assert code == 0 and doc["matches"] and doc["tv_distance"] < 1e-12
    assert doc["before"]["S_n"] == pytest.approx(4.0) and doc["after"]["S_n"] == pytest.approx(1.0)
    code, out, _ = run(capsys, "run", fx("p3p3.json"), "--builtin", "p3sq_to_px", "--expect", fx("px.json"))
    assert code == 0 and "T_n: 4 -> 1" in out and "(match)" in out


def test_run_protocol_file(capsys):
    code, out, _ = run(capsys, "run", fx("px.json"), fx("protocols/px_to_p2.json"), "--expect", fx("p2ab.json"))
    assert code == 0 and "S_n: 2 -> 1" in out and "(match)" in out


def test_run_mismatched_target_still_exits_zero(capsys):
    code, out, _ = run(capsys, "run", fx("p3.json"), "--builtin", "px_to_p2", "--expect", fx("p2ab.json"))
    assert code == 0 and "no match" in out


def test_run_incompatible_protocol_exits_3(capsys):
    code, _, err = run(capsys, "run", fx("p3.json"), "--builtin", "p3sq_to_px")
    assert code == 3 and "step 0" in err


def test_run_usage_errors(capsys):
    assert run(capsys, "run", fx("p3.json"))[0] == 2
    assert run(capsys, "run", fx("p3.json"), "--builtin", "nope")[0] == 2


def test_quantum_commands(capsys):
    code, out, _ = run(capsys, "quantum", "--ghz-demo", "3")
    assert code == 0
    assert out.splitlines()[:3] == ["GHZ: S=3 T=3", "z-measured: S=1 T=2", "x-measured: S=2 T=1"]
    code, out, _ = run(capsys, "quantum", fx("ghz.json"), "--measure", "z,z,z", "--json")
    assert io.distribution_from_dict(json.loads(out)).allclose(canonical.p3(), atol=1e-12)
    code, out, _ = run(capsys, "quantum", fx("product_state.json"), "--monotone")
    assert code == 0 and out.splitlines()[0] == "S_n\t0.000000"
    assert run(capsys, "quantum")[0] == 2


def test_decompose_and_bound(capsys):
    code, out, _ = run(capsys, "decompose", fx("p3.json"), "--json")
    doc = json.loads(out)
    assert code == 0 and doc["y5"] == pytest.approx(1.0) and doc["feasible"]
    assert all(doc[k] == 0 for k in ("y1", "y2", "y3", "y4"))
    assert run(capsys, "bound", fx("px.json"), fx("p3.json"))[1] == "0.500000\t(limited by T_n)"
    assert run(capsys, "bound", fx("p3.json"), fx("p3.json"))[1].startswith("1.000000")
    assert run(capsys, "bound", fx("p3.json"), fx("product.json"))[0] == 2


def test_verify_command(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--suite", "classical", "--seed", "42", "--trials", "5", "--report", report)
    assert code == 0 and "PASS positivity" in out
    assert json.loads(report.read_text())[0]["check_name"] == "positivity"
    assert run(capsys, "verify", "--suite", "classical", "--trials", "0")[0] == 2


def test_verify_exit_4_on_required_failure(capsys, monkeypatch):
    from secmono import verify

    bad = verify.CheckReport("positivity", 1, (verify.Failure(1, "x", -1.0, 0.0),), 1e-9, "fail")
    monkeypatch.setattr(verify, "run_suite", lambda *a, **k: [bad])
    assert run(capsys, "verify", "--suite", "classical")[0] == 4


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "secmono", "monotone", str(fx("px.json")), "--all-five"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout.strip() == "1 1 1 2 1"


def test_protocol_error_is_distribution_error():
    assert issubclass(ProtocolError, DistributionError)
