import pytest

from squatcalc import selftest
from squatcalc.selftest import (
    CheckResult,
    format_table,
    list_checks,
    register_check,
    run_check,
    run_selftest,
)


def test_checks_registered():
    assert list_checks() == [
        'cauchy-oracle', 'resolvent-equation', 'frac-power-routes',
        'laws-of-exponents', 'spectral-mapping', 'nabla-symbol',
        'nabla-routes', 'div-vec', 'heat-forms', 'varcoef',
        'spectrum-consistency']


@pytest.mark.parametrize("name", list_checks())
def test_check_passes(name):
    res = run_check(name, seed=0)
    assert isinstance(res, CheckResult)
    assert res.passed, res
    assert res.seconds >= 0.0


def test_failures_are_reported(monkeypatch):
    monkeypatch.setattr(selftest, '_CHECKS', dict(selftest._CHECKS))

    @register_check('always-bad', 1e-3)
    def bad(seed):
        return 1.0

    @register_check('raises', 1e-3)
    def raises(seed):
        raise ArithmeticError("boom")

    results = run_selftest(['always-bad', 'raises'])
    assert [r.passed for r in results] == [False, False]
    assert results[0].value == 1.0
    assert results[1].detail == "ArithmeticError: boom"

    table = format_table(results).splitlines()
    assert 'FAIL' in table[1]
    assert table[2].endswith("ArithmeticError: boom")
    assert table[-1] == "0/2 checks passed"


def test_warnings_are_reported(monkeypatch):
    import warnings

    monkeypatch.setattr(selftest, '_CHECKS', dict(selftest._CHECKS))

    @register_check('noisy', 1.0)
    def noisy(seed):
        warnings.warn("careful")
        return 0.5

    res = run_check('noisy')
    assert res.passed
    assert res.detail == "1 warning(s): careful"


def test_unknown_check():
    with pytest.raises(ValueError, match="Unknown checks"):
        run_selftest(['no-such-check'])
