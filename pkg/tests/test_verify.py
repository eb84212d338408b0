import json

import pytest

from secmono import monotones as mono
from secmono import verify


def _by_name(reports):
    return {r.check_name: r for r in reports}


def test_small_classical_run_passes():
    reports = verify.check_classical_properties(seed=1, trials=40)
    assert [r.check_name for r in reports] == [c.name for c in verify.CLASSICAL_CHECKS]
    assert all(r.passed for r in reports), [r.check_name for r in reports if not r.passed]
    assert all(r.trials == 40 for r in reports)


def test_trials_must_be_positive():
    for runner in (verify.check_classical_properties, verify.check_eve_properties, verify.check_quantum_properties):
        with pytest.raises(ValueError):
            runner(trials=0)


def _broken_s(d):
    # S_n with the sign of the joint-entropy term flipped
    from secmono.entropy import conditional_entropy, shannon_entropy

    labels = d.labels
    rest = lambda i: labels[:i] + labels[i + 1 :]
    return -shannon_entropy(d, labels) - sum(conditional_entropy(d, (a,), rest(i)) for i, a in enumerate(labels))


def test_mutation_control_breaks_monotonicity_report():
    reports = _by_name(verify.check_classical_properties(seed=0, trials=60, monotones={"S_n": _broken_s}))
    assert not reports["local_channel_monotonicity"].passed
    assert reports["local_channel_monotonicity"].failures
    # the formula checks use the library forms and are unaffected
    assert reports["s_n_formula_equivalence"].passed


def test_failures_rerun_from_recorded_seed():
    hook = {"S_n": _broken_s}
    report = _by_name(verify.check_classical_properties(seed=0, trials=30, monotones=hook))["local_channel_monotonicity"]
    first = report.failures[0]
    replay = verify.rerun("local_channel_monotonicity", first.seed, monotones=hook)
    descs = [(d, o, b) for d, o, b in replay]
    assert (first.description, first.observed, first.bound) in descs


def test_rerun_unknown_check():
    with pytest.raises(KeyError):
        verify.rerun("no_such_check", 1)


def test_trial_seeds_are_stable_and_distinct():
    a = verify.trial_seed(0, "positivity", 0)
    assert a == verify.trial_seed(0, "positivity", 0)
    assert len({verify.trial_seed(0, "positivity", k) for k in range(100)}) == 100
    assert a != verify.trial_seed(1, "positivity", 0)
    assert a != verify.trial_seed(0, "sum_identity", 0)


def test_report_json_shape():
    reports = verify.check_quantum_properties(seed=3, trials=5)
    doc = json.loads(verify.reports_to_json(reports))
    assert {tuple(sorted(r)) for r in doc} == {("check_name", "failures", "tolerance", "trials", "verdict")}
    ghz = next(r for r in doc if r["check_name"] == "q_ghz_special_values")
    assert ghz["trials"] == 1


def test_json_is_byte_identical_across_reruns():
    for suite in ("classical", "eve", "quantum"):
        a = verify.reports_to_json(verify.run_suite(suite, seed=7, trials=8))
        b = verify.reports_to_json(verify.run_suite(suite, seed=7, trials=8))
        assert a == b


def test_eve_suite_required_checks_pass_and_m1_search_finds_counterexamples():
    reports = verify.check_eve_properties(seed=0, trials=60)
    assert verify.required_failures(reports) == []
    search = _by_name(reports)["m1_eve_local_counterexample_search"]
    assert "m1_eve_local_counterexample_search" in verify.OPTIONAL_CHECKS
    assert search.failures  # expected: M1 can drop when Eve processes her data
    f = search.failures[0]
    assert f.observed > f.bound


def test_quantum_small_run_passes():
    reports = verify.check_quantum_properties(seed=2, trials=15)
    assert all(r.passed for r in reports), [r.check_name for r in reports if not r.passed]


def test_run_suite_all_and_unknown():
    reports = verify.run_suite("all", seed=0, trials=2)
    names = [r.check_name for r in reports]
    assert len(names) == len(verify.CLASSICAL_CHECKS) + len(verify.EVE_CHECKS) + len(verify.QUANTUM_CHECKS)
    with pytest.raises(KeyError):
        verify.run_suite("nope")


def test_required_failures_ignores_optional_checks():
    bad = verify.CheckReport("m1_eve_local_counterexample_search", 1, (verify.Failure(1, "x", 1.0, 0.0),), 1e-9, "fail")
    worse = verify.CheckReport("positivity", 1, (verify.Failure(1, "x", -1.0, 0.0),), 1e-9, "fail")
    assert verify.required_failures([bad]) == []
    assert verify.required_failures([bad, worse]) == [worse]


def test_default_monotones_match_library():
    # sanity for the mutation hook default
    assert verify.rerun("positivity", 123) == []
    assert mono.s_n is mono.s_n_def
