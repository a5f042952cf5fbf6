import pytest
import numpy as np
from numpy.testing import assert_allclose

import squatcalc as sq
from squatcalc.field import SpectralField, rel_l2_error
from squatcalc.nabla import (
    Splitting,
    div_vec,
    div_vec_identity,
    divergence,
    frac_laplacian,
    frac_nabla,
    frac_nabla_closed,
    frac_nabla_measurable,
    frac_nabla_quadrature,
    gradient,
    laplacian,
    nabla_apply,
    nabla_kernels,
    s_spectrum_probe_nabla,
    self_adjointness_residual,
    symbol,
    symbol_table,
)
from squatcalc.quadrature import QuadSpec, log_rule
from squatcalc.quaternion import E1, E2, E3, Quaternion


DIMS = (8, 8, 8)


def smooth_field(dims=DIMS, seed=0, real=False):
    """Random field with a decaying spectrum, so that spectral derivatives
    are well resolved.
    """
    v = SpectralField.random(dims, real=real, seed=seed)
    _, nu = v.wavevectors()
    return SpectralField.from_hat(v.hat() * np.exp(-nu**2 / 4)[..., None],
                                  v.box)


# -------------------------------- symbols ---------------------------------- #

@pytest.mark.parametrize("splitting", [None, (E2, E3), (E3, E1)])
def test_symbol_table(splitting):
    tab = symbol_table(DIMS, splitting=splitting)
    assert np.max(np.abs(tab.trace())) < 1e-14
    assert_allclose(tab.det(), -tab.nu**2, atol=1e-12)
    assert tab.square_residual() < 1e-12
    lam = tab.eigvalsh()
    assert_allclose(lam[..., 0], -tab.nu, atol=1e-12)
    assert_allclose(lam[..., 1], tab.nu, atol=1e-12)


def test_symbol_is_hermitian():
    G = symbol(0.3, -1.2, 2.0)
    assert_allclose(G, G.conj().T)
    assert_allclose(G @ G, (0.09 + 1.44 + 4.0) * np.eye(2), atol=1e-14)


def test_projectors():
    tab = symbol_table((4, 4, 4))
    Pp, Pm = tab.projectors()
    assert_allclose(Pp @ Pp, Pp, atol=1e-14)
    assert_allclose(Pm @ Pm, Pm, atol=1e-14)
    assert_allclose(Pp[0, 0, 0], 0.0)
    assert_allclose(Pm[0, 0, 0], np.eye(2))
    assert_allclose(tab.G @ Pp, tab.nu[..., None, None] * Pp, atol=1e-13)


def test_bad_splittings():
    with pytest.raises(sq.DomainError):
        Splitting.checked(E1, E1)
    with pytest.raises(sq.DomainError):
        Splitting.checked(Quaternion(1.0), E2)
    with pytest.raises(sq.DomainError):
        symbol_table(DIMS, splitting=(E1, Quaternion(0.0, 0.0, 2.0)))
    assert Splitting.checked(E2, E3).K == E1


def test_splitting_parts_roundtrip():
    sp = Splitting.checked(E3, Quaternion(0.0, 0.6, 0.8, 0.0))
    v = np.random.default_rng(0).standard_normal((5, 4))
    a, b = sp.to_parts(v)
    assert_allclose(sp.from_parts(a, b), v, atol=1e-14)


# ------------------------------ derivatives -------------------------------- #

def test_nabla_of_single_mode():
    v = SpectralField.single_mode((1, 0, 0), DIMS)
    x1, _, _ = v.grid()
    w = nabla_apply(v)
    assert_allclose(w.values[..., 1], -np.sin(x1) * np.ones(DIMS), atol=1e-13)
    assert_allclose(w.values[..., [0, 2, 3]], 0.0, atol=1e-13)


def test_nabla_of_vector_mode():
    # nabla (e2 cos x3) = e3 e2 (-sin x3) = e1 sin x3
    v = SpectralField.single_mode((0, 0, 1), DIMS, amplitude=E2)
    _, _, x3 = v.grid()
    w = nabla_apply(v)
    assert_allclose(w.values[..., 1], np.sin(x3) * np.ones(DIMS), atol=1e-13)
    assert_allclose(w.values[..., [0, 2, 3]], 0.0, atol=1e-13)


@pytest.mark.parametrize("seed", [0, 1])
def test_nabla_squared_is_minus_laplacian(seed):
    v = SpectralField.random(DIMS, box=(1.0, 2.0, 3.0), seed=seed)
    w = nabla_apply(nabla_apply(v))
    assert rel_l2_error(w, -laplacian(v)) < 1e-12


@pytest.mark.parametrize("splitting", [(E2, E3), (E3, E1),
                                       (Quaternion(0.0, 0.6, 0.8, 0.0), E3)])
def test_nabla_does_not_depend_on_splitting(splitting):
    v = smooth_field(seed=3)
    assert rel_l2_error(nabla_apply(v, splitting), nabla_apply(v)) < 1e-12


def test_gradient_divergence():
    u = smooth_field(seed=4, real=True).scalar
    box = (2 * np.pi,) * 3
    assert_allclose(divergence(gradient(u, box), box),
                    laplacian(SpectralField(u)).scalar, atol=1e-12)


def test_frac_laplacian():
    v = SpectralField.single_mode((1, 2, 0), DIMS)
    w = frac_laplacian(v, 0.75)
    assert_allclose(w.values, 5**0.75 * v.values, atol=1e-12)
    assert_allclose(frac_laplacian(v, 0.0).values, v.values, atol=1e-14)
    c = SpectralField.constant(2.0, DIMS)
    assert_allclose(frac_laplacian(c, 0.5).values, 0.0, atol=1e-14)


# -------------------------- fractional nabla ------------------------------- #

@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.9])
def test_fractional_routes_agree(alpha):
    v = smooth_field(seed=5)
    closed = frac_nabla_closed(v, alpha)
    assert rel_l2_error(frac_nabla_measurable(v, alpha), closed) < 1e-12
    quad = frac_nabla_quadrature(v, alpha, quad=QuadSpec(eps=1e-10, Lam=1e10,
                                                         tol=1e-6))
    assert rel_l2_error(quad, closed) < 1e-7


def test_fractional_routes_in_other_splitting():
    v = smooth_field(seed=6)
    sp = (E3, E1)
    a = frac_nabla_closed(v, 0.5, splitting=sp)
    assert rel_l2_error(a, frac_nabla_closed(v, 0.5)) < 1e-12
    b = frac_nabla(v, 0.5, method='measurable', splitting=sp)
    assert rel_l2_error(b, a) < 1e-12


def test_power_one_is_half_sum():
    v = smooth_field(seed=7)
    expected = 0.5 * (frac_laplacian(v, 0.5) + nabla_apply(v))
    assert rel_l2_error(frac_nabla_closed(v, 1.0), expected) < 1e-12


def test_fractional_powers_compose():
    v = smooth_field(seed=8)
    ab = frac_nabla_closed(frac_nabla_closed(v, 0.25), 0.5)
    assert rel_l2_error(ab, frac_nabla_closed(v, 0.75)) < 1e-12


@pytest.mark.parametrize("method", ['closed', 'measurable', 'quadrature'])
def test_self_adjoint(method):
    u, v = smooth_field(seed=9), smooth_field(seed=10)
    assert self_adjointness_residual(u, v, 0.5, method) < 1e-7


def test_alpha_range():
    v = smooth_field()
    for alpha in (0.0, -0.5, 1.5):
        with pytest.raises(sq.DomainError):
            frac_nabla_closed(v, alpha)
    with pytest.raises(sq.DomainError):
        frac_nabla_quadrature(v, 1.0)
    with pytest.raises(ValueError):
        frac_nabla(v, 0.5, method='fourier')


def test_quadrature_warns_when_truncated():
    v = smooth_field()
    with pytest.warns(sq.QuadratureWarning):
        frac_nabla_quadrature(v, 0.5, quad=QuadSpec(eps=1e-1, Lam=1e2,
                                                    tol=1e-12))


def test_constant_field_is_annihilated():
    c = SpectralField.constant(Quaternion(1.0, 2.0, 0.0, 0.0), DIMS)
    assert frac_nabla_closed(c, 0.5).l2_norm() < 1e-12
    assert frac_nabla_quadrature(c, 0.5).l2_norm() == 0.0


def test_nabla_kernels_integrate_to_symbol():
    xi = (1.0, 2.0, -0.5)
    alpha = 0.5
    t, w = log_rule(1e-20, 1e20, 256, 16)
    Km, Kp = nabla_kernels(t, xi, alpha)
    F = np.einsum('k,kab->ab', w, Km + Kp) / (2 * np.pi)
    G = symbol(*xi)
    nu = np.sqrt(np.sum(np.square(xi)))
    expected = 0.5 * nu**alpha * (np.eye(2) + G / nu)
    assert_allclose(F, expected, atol=1e-8)


# ---------------------------- identities ----------------------------------- #

@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0])
def test_div_vec_identity(alpha):
    v = smooth_field(seed=11, real=True)
    assert div_vec_identity(v, alpha) < 1e-10
    d = div_vec(v, alpha)
    assert d.shape == DIMS


def test_div_vec_identity_needs_real_field():
    with pytest.raises(sq.DomainError):
        div_vec_identity(smooth_field(seed=12), 0.5)


# ------------------------------ s-spectrum --------------------------------- #

@pytest.mark.parametrize(("s", "invertible"), [
    (1.0, False),
    (-1.0, False),
    (np.sqrt(2.0), False),
    (0.5, True),
    (E1, True),
    (Quaternion(1.0, 0.0, 0.0, 1e-3), True),
])
def test_s_spectrum_probe(s, invertible):
    probe = s_spectrum_probe_nabla(DIMS, None, s)
    assert probe.invertible is invertible
    if not invertible:
        assert probe.nearest_nu == pytest.approx(abs(np.asarray(s).flat[0]))
