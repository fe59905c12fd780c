import pytest

from psqm.selftest import CHECKS, run_selftest


@pytest.fixture(scope="module")
def results():
    return run_selftest()


def test_all_checks_pass(results):
    bad = {r.name: r.residual for r in results if not r.ok}
    assert not bad


def test_named_invariants_present(results):
    names = {r.name for r in results}
    assert {"parseval", "intertwine_erwin4", "commutator_formuco2", "ho_eigen", "marginal_convolution"} <= names
    assert names == set(CHECKS)
    for r in results:
        d = r.as_dict()
        assert set(d) == {"residual", "threshold", "ok", "seconds"}


def test_override_forces_failure():
    out = run_selftest(overrides={"parseval": 0.0})
    assert [r.name for r in out if not r.ok] == ["parseval"]
    with pytest.raises(KeyError):
        run_selftest(overrides={"nonexistent": 1.0})
