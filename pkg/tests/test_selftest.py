import pytest

from gcdeform_tools.commands import ACCEPTANCE_SAMPLES, SELFTEST, run_selftest, selftest_samples


def test_selftest_summary(monkeypatch):
    monkeypatch.setenv("GCDEFORM_SAMPLES", "5")
    code, payload = run_selftest(quick=True)
    assert code == 0
    assert payload["samples"] == 1
    assert set(payload["checks"]) == {name for name, _ in SELFTEST}
    assert set(payload["counts"].values()) == {1}


def test_full_run_never_goes_below_acceptance_counts(monkeypatch):
    monkeypatch.setenv("GCDEFORM_SAMPLES", "5")
    assert selftest_samples("courant identities") == 200
    assert selftest_samples("holomorphy equivalence") == 200
    assert selftest_samples("exponential splitting") == 100
    assert selftest_samples("descent") == 5
    monkeypatch.setenv("GCDEFORM_SAMPLES", "300")
    assert selftest_samples("courant identities") == 300


@pytest.mark.parametrize("name", sorted(ACCEPTANCE_SAMPLES))
def test_acceptance_counts_name_real_checks(name):
    assert name in dict(SELFTEST)
