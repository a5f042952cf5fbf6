import pytest
import numpy as np

import squatcalc as sq
from squatcalc import fracpower
from squatcalc.fracpower import (
    CrossCheck,
    FracPowerResult,
    cross_check,
    frac_power,
    frac_power_balakrishnan_m,
    frac_power_log_derivative,
    frac_power_spectral,
    list_frac_power_methods,
    register_frac_power_method,
    sectorial_report,
)
from squatcalc.qmatrix import QMatrixOperator
from squatcalc.quadrature import QuadSpec
from squatcalc.quaternion import Quaternion, qpow
from squatcalc.utils import rand_sectorial_qmatrix


def sectorial(n=3, seed=0, angle=np.pi / 3):
    return QMatrixOperator(rand_sectorial_qmatrix(n, angle=angle, seed=seed))


def test_methods_registered():
    assert list_frac_power_methods() == [
        'balakrishnan', 'balakrishnan_m', 'komatsu', 'komatsu2', 'negative',
        'spectral']


@pytest.mark.parametrize("method", ['spectral', 'balakrishnan',
                                    'balakrishnan_m', 'komatsu', 'komatsu2'])
@pytest.mark.parametrize("alpha", [0.5, 0.25])
def test_positive_diagonal(method, alpha):
    T = QMatrixOperator.diag([4.0, 9.0, 0.25])
    res = frac_power(T, alpha, method=method)
    assert isinstance(res, FracPowerResult)
    assert res.method == method
    assert res.alpha == alpha
    expected = QMatrixOperator.diag([4.0**alpha, 9.0**alpha, 0.25**alpha])
    assert res.operator.allclose(expected, rtol=1e-8, atol=1e-9)


@pytest.mark.parametrize("method", ['spectral', 'balakrishnan', 'negative',
                                    'komatsu', 'komatsu2'])
def test_negative_powers_of_diagonal(method):
    T = QMatrixOperator.diag([4.0, 0.5])
    res = frac_power(T, -0.5, method=method)
    expected = QMatrixOperator.diag([0.5, 0.5**-0.5])
    assert res.operator.allclose(expected, rtol=1e-8, atol=1e-9)


@pytest.mark.parametrize("method", ['spectral', 'balakrishnan', 'komatsu'])
def test_quaternionic_diagonal(method):
    a, b = Quaternion(1.0, 1.0, 0.0, 0.0), Quaternion(2.0, 0.0, 0.5, 1.0)
    T = QMatrixOperator.diag([a, b])
    res = frac_power(T, 0.5, method=method).operator
    expected = QMatrixOperator.diag([qpow(a, 0.5), qpow(b, 0.5)])
    assert res.allclose(expected, rtol=1e-8, atol=1e-9)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75, -0.5, 1.5, -1.5])
@pytest.mark.parametrize("seed", [0, 1])
def test_cross_check(alpha, seed):
    T = sectorial(3, seed)
    check = cross_check(T, alpha)
    assert isinstance(check, CrossCheck)
    assert 'spectral' in check.results
    assert 'spectral' not in check.deltas
    assert len(check.deltas) >= 1
    assert check.max_delta < 1e-7


def test_cross_check_applicable_methods():
    T = sectorial(2, 3)
    assert set(cross_check(T, 0.5).deltas) == {
        'balakrishnan', 'balakrishnan_m', 'komatsu', 'komatsu2'}
    assert set(cross_check(T, -0.5).deltas) == {
        'balakrishnan', 'komatsu', 'komatsu2', 'negative'}
    assert set(cross_check(T, 2.5).deltas) == {
        'balakrishnan', 'balakrishnan_m'}
    assert set(cross_check(T, 0.5, methods=['komatsu']).deltas) == {
        'komatsu'}


@pytest.mark.parametrize("seed", [0, 1])
def test_square_root_squares_back(seed):
    T = sectorial(4, seed)
    R = sq.sqrt_operator(T).operator
    assert (R @ R).allclose(T, rtol=1e-8, atol=1e-8)
    Rb = sq.sqrt_operator(T, method='balakrishnan').operator
    assert Rb.allclose(R, rtol=1e-8, atol=1e-8)


def test_semigroup():
    T = sectorial(3, 5)
    a = frac_power_spectral(T, 0.3)
    b = frac_power_spectral(T, 0.45)
    ab = frac_power_spectral(T, 0.75)
    assert (a @ b).allclose(ab, rtol=1e-8, atol=1e-8)
    assert (a @ b).allclose(b @ a, rtol=1e-8, atol=1e-8)


def test_higher_order_kernel_with_explicit_order():
    T = sectorial(3, 2)
    ref = frac_power_spectral(T, 0.5)
    for m in (1, 2, 3):
        assert frac_power_balakrishnan_m(T, 0.5, m=m).allclose(
            ref, rtol=1e-7, atol=1e-8)
    with pytest.raises(ValueError):
        frac_power_balakrishnan_m(T, 2.5, m=2)


def test_integer_powers_are_exact():
    T = QMatrixOperator.diag([0.0, -2.0, Quaternion(1.0, 1.0)])
    for method in list_frac_power_methods():
        res = frac_power(T, 2, method=method)
        assert res.diagnostics == {'exact': True}
        assert res.operator.allclose(T @ T)
    assert frac_power(T, 0).operator.allclose(QMatrixOperator.identity(3))


@pytest.mark.parametrize("method", ['spectral', 'balakrishnan', 'komatsu',
                                    'komatsu2', 'balakrishnan_m'])
@pytest.mark.parametrize("values", [[-1.0, 2.0], [0.0, 1.0]])
def test_spectrum_on_negative_axis(method, values):
    T = QMatrixOperator.diag(values)
    with pytest.raises(sq.SectorError):
        frac_power(T, 0.5, method=method)


def test_bad_methods_and_ranges():
    T = sectorial(2, 0)
    with pytest.raises(ValueError, match="Unknown method"):
        frac_power(T, 0.5, method='nope')
    with pytest.raises(ValueError):
        frac_power(T, 1.5, method='komatsu')
    with pytest.raises(ValueError):
        frac_power(T, 0.5, method='negative')
    with pytest.raises(ValueError):
        fracpower.frac_power_balakrishnan(T, 1.5)


def test_register_method(monkeypatch):
    monkeypatch.setitem(fracpower._FRAC_POWER_METHODS, 'halve', None)

    def halve(T, alpha, quad=None, parallel=False, info=None):
        info['called'] = True
        return T / 2

    register_frac_power_method('halve', halve)
    assert 'halve' in list_frac_power_methods()
    T = sectorial(2, 0)
    res = frac_power(T, 0.5, method='halve')
    assert res.diagnostics == {'called': True}
    assert res.operator.allclose(T / 2)


def test_diagnostics():
    T = sectorial(2, 1)
    res = frac_power(T, 0.5, method='balakrishnan',
                     quad=QuadSpec(panels=32, order=8))
    assert res.diagnostics['nodes'] == 256
    assert 0.0 <= res.diagnostics['tail_estimate'] < 1e-8
    res = frac_power(T, 0.5, method='spectral')
    assert res.diagnostics['est_quadrature_error'] < 1e-8


def test_coarse_truncation_warns():
    T = sectorial(2, 1)
    quad = QuadSpec(eps=1e-2, Lam=1e2, tol=1e-12)
    with pytest.warns(sq.QuadratureWarning):
        frac_power(T, 0.5, method='balakrishnan', quad=quad)


def test_parallel_matches_serial():
    T = sectorial(3, 4)
    quad = QuadSpec(panels=64, order=16)
    serial = frac_power(T, 0.5, 'komatsu', quad=quad).operator
    par = frac_power(T, 0.5, 'komatsu', quad=quad, parallel=2).operator
    assert par.allclose(serial, rtol=1e-12, atol=1e-13)


# ------------------------------- analyticity ------------------------------- #

@pytest.mark.parametrize("alpha", [0.3, 0.6])
def test_log_derivative(alpha):
    T = sectorial(3, 6)
    h = 1e-4
    fd = (frac_power_spectral(T, alpha + h) -
          frac_power_spectral(T, alpha - h)) / (2 * h)
    d_spec = frac_power_log_derivative(T, alpha)
    d_bal = frac_power_log_derivative(T, alpha, method='balakrishnan')
    assert d_spec.allclose(fd, rtol=1e-5, atol=1e-5)
    assert d_bal.allclose(d_spec, rtol=1e-7, atol=1e-7)
    with pytest.raises(ValueError):
        frac_power_log_derivative(T, alpha, method='komatsu')


# ------------------------------ sectoriality ------------------------------- #

def test_sectorial_report():
    T = sectorial(3, 0, angle=np.pi / 4)
    report = sectorial_report(T)
    assert report.sectorial
    assert report.invertible and report.injective
    assert 0.0 <= report.omega_est < np.pi / 4
    angles = [report.omega_est / 2, (report.omega_est + np.pi) / 2]
    report = sectorial_report(T, angles=angles, n_radii=11, n_rays=2)
    assert report.C_phi[angles[0]] == np.inf
    assert 0.0 < report.C_phi[angles[1]] < np.inf


def test_sectorial_report_of_bad_matrices():
    report = sectorial_report(QMatrixOperator.diag([-1.0, 1.0]))
    assert report.omega_est == pytest.approx(np.pi)
    assert not report.sectorial
    report = sectorial_report(QMatrixOperator.diag([0.0, 1.0]))
    assert not report.invertible
    assert not report.injective
