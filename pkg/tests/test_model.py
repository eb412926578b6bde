import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from a2rabi import fockspace as fs
from a2rabi import model
from a2rabi.model import ModelParams, RScheme

W = 6.2832
C_FIG = 0.3770

params_st = st.builds(
    ModelParams,
    omega_a=st.floats(0.0, 10.0),
    omega_c=st.floats(0.1, 10.0),
    g=st.floats(0.0, 10.0),
    C=st.floats(0.0, 2.0),
)


def eigs(op):
    return np.linalg.eigvalsh(np.asarray(op))


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, 1.0, -0.1)


def test_decoupled_fixture_eigenvalues():
    h = model.build_hamiltonian(ModelParams(1, 1, 0, 0), 1)
    np.testing.assert_allclose(eigs(h), [0, 1, 1, 2], atol=1e-14)
    assert h.hermitian_defect == 0.0


def test_hamiltonian_terms_match_definition():
    p = ModelParams(0.7, 1.3, 0.45, 0.2)
    n = 10
    I = np.eye(n + 1)
    x = fs.quadrature(n)
    ref = (
        0.35 * np.kron(fs.pauli("z"), I)
        + 1.3 * np.kron(np.eye(2), np.diag(np.arange(n + 1) + 0.5))
        + 0.45 * np.kron(fs.pauli("x"), x)
        + 0.2 * 0.45**2 * np.kron(np.eye(2), fs.quadrature_squared(n))
    )
    np.testing.assert_allclose(np.asarray(model.build_hamiltonian(p, n)), ref, atol=1e-14)


def test_hb_map_fixtures():
    assert model.hb_map(ModelParams(1, 2.0, 3.0, 0.0)) == model.HbImage(2.0, 3.0, 0.0)
    hb0 = model.hb_map(ModelParams(1, 2.0, 0.0, 0.7))
    assert (hb0.omega_g, hb0.g_tilde, hb0.zeta) == (2.0, 0.0, 0.0)
    hb = model.hb_map(ModelParams(W, W, W, C_FIG))
    assert hb.omega_g == pytest.approx(20.335, rel=1e-4)
    assert hb.g_tilde == pytest.approx(3.492, rel=1e-3)
    assert hb.omega_g == pytest.approx(math.sqrt(W**2 + 4 * C_FIG * W**3), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(params_st)
def test_hb_map_closed_forms(p):
    hb = model.hb_map(p)
    scale = p.omega_c**2 + 4 * p.C * p.omega_c * p.g**2
    assert abs(hb.omega_g**2 - p.omega_c**2 - 4 * p.C * p.omega_c * p.g**2) <= 1e-14 * scale
    assert abs(hb.g_tilde**2 * hb.omega_g - p.g**2 * p.omega_c) <= 1e-13 * max(1.0, p.g**2 * p.omega_c)
    assert hb.omega_g >= p.omega_c and hb.g_tilde <= p.g * (1 + 1e-15)
    assert hb.zeta >= 0


@settings(max_examples=40, deadline=None)
@given(params_st, st.integers(1, 25))
def test_every_hamiltonian_commutes_with_parity(p, n):
    h = np.asarray(model.build_hamiltonian(p, n))
    pi = np.asarray(fs.parity(n))
    assert np.max(np.abs(h @ pi - pi @ h)) < 1e-12
    hs = np.asarray(model.shifted_hamiltonian(p, n))
    assert np.max(np.abs(hs @ pi - pi @ hs)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(params_st)
def test_spectrum_bounded_below(p):
    # (a + a^dag)^2 >= 0 and the oscillator part dominates the linear coupling
    # after completing the square, so E >= -wa/2 - g^2/wc
    e = eigs(model.build_hamiltonian(p, 30))
    assert e[0] >= -0.5 * p.omega_a - p.g**2 / p.omega_c - 1e-9


def test_shifts():
    p = ModelParams(1.0, 1.0, 2.0, 0.0)
    assert model.paper_shift(p) == 4.0
    p0 = ModelParams(1.0, 1.0, 0.0, 0.0)
    np.testing.assert_array_equal(
        np.asarray(model.shifted_hamiltonian(p0, 6)), np.asarray(model.build_hamiltonian(p0, 6))
    )
    # g~^2/w(g) -> 1/(4C) as g grows
    assert 1 / (4 * C_FIG) == pytest.approx(0.663130, abs=1e-6)
    big = ModelParams(W, W, 1e5, C_FIG)
    assert model.paper_shift(big) == pytest.approx(1 / (4 * C_FIG), rel=1e-8)
    # both forms agree at C = 0
    p = ModelParams(W, W, 3.0, 0.0)
    hb = model.hb_map(p)
    assert model.paper_shift(p) == pytest.approx(hb.g_tilde**2 / hb.omega_g)


def test_rscheme_endpoints_and_derived():
    rs = RScheme(W, W, C_FIG)
    assert rs.omega_a(0.0) == W and rs.omega_a(1.0) == 0.0
    assert rs.params(0.0) == ModelParams(W, W, 0.0, C_FIG)
    assert rs.params(1.0) == ModelParams(0.0, W, W, C_FIG)
    assert rs.omega_tilde(1.0) == pytest.approx(20.335, rel=1e-4)
    assert rs.g_tilde(1.0) == pytest.approx(model.hb_map(rs.params(1.0)).g_tilde)
    for name in model.SCHEDULES:
        r2 = RScheme(W, W, 0.0, name)
        assert r2.omega_a(0.0) == pytest.approx(W) and abs(r2.omega_a(1.0)) < 1e-12


def test_rscheme_rejects_bad_schedule():
    with pytest.raises(ValueError):
        RScheme(W, W, 0.0, lambda r, w: w)  # never reaches zero
    with pytest.raises(ValueError):
        RScheme(W, W, 0.0, "sigmoid")
    with pytest.raises(ValueError):
        RScheme(W, W, 0.0).params(1.5)


def test_polaron_unitary():
    u0 = model.build_polaron_unitary(0.0, 5)
    assert u0.unitarity_defect < 1e-12
    # D(0) = I: U is a pure spin rotation
    spin = np.asarray(u0)[:: 6, :: 6]
    np.testing.assert_allclose(spin, np.array([[1, -1], [1, 1]]) / math.sqrt(2), atol=1e-15)
    u = model.build_polaron_unitary(1.2, 80)
    assert u.unitarity_defect < 1e-12


def test_eq3_rhs_at_zero_coupling():
    p = ModelParams(0.8, 1.5, 0.0, 0.0)
    n = 12
    e = eigs(model.build_eq3_rhs(p, n))
    k = np.arange(n + 1)
    ref = np.sort(np.concatenate([1.5 * (k + 0.5) - 0.4, 1.5 * (k + 0.5) + 0.4]))
    np.testing.assert_allclose(e, ref, atol=1e-13)
    with pytest.raises(ValueError):
        model.build_eq3_rhs(ModelParams(1, 1, 1, 0.1), 5)


def test_eq3_rhs_spectrum_matches_shifted_hamiltonian():
    p = ModelParams(1.0, 1.0, 0.6, 0.0)
    rhs = model.build_eq3_rhs(p, 150)
    assert rhs.hermitian_defect < 1e-12
    e_rhs = eigs(rhs)[:8]
    e_h = eigs(model.shifted_hamiltonian(p, 150))[:8]
    np.testing.assert_allclose(e_rhs, e_h, atol=1e-10)


def test_limit_hamiltonians():
    e1 = eigs(model.build_limit_hamiltonian("strong_coupling_C0", 5, omega=W))[:4]
    np.testing.assert_allclose(e1, [W / 2, W / 2, 1.5 * W, 1.5 * W], atol=1e-12)
    assert e1[0] == pytest.approx(3.1416, abs=1e-4)
    e2 = eigs(model.build_limit_hamiltonian("eq5", 5, omega=1.0, omega_g=10.0))[:4]
    np.testing.assert_allclose(e2, [4.5, 5.5, 14.5, 15.5], atol=1e-12)
    wt = RScheme(W, W, C_FIG).omega_tilde(1.0)
    e3 = eigs(model.build_limit_hamiltonian("r_scheme", 5, omega_tilde=wt))[:4]
    np.testing.assert_allclose(e3, [wt / 2, wt / 2, 1.5 * wt, 1.5 * wt], atol=1e-12)
    assert e3[0] == pytest.approx(10.168, abs=1e-3)
    assert e3[2] - e3[0] == pytest.approx(20.335, rel=1e-4)
    with pytest.raises(ValueError):
        model.build_limit_hamiltonian("eq5", 5, omega=1.0)
    with pytest.raises(ValueError):
        model.build_limit_hamiltonian("weak", 5, omega=1.0)


@pytest.mark.parametrize(
    "kind,ctx",
    [
        ("eq4", dict(omega=2.0)),
        ("eq5", dict(omega=1.0, omega_g=3.7)),
        ("eq6", dict(omega_tilde=5.0)),
    ],
)
def test_limit_levels_match_matrix(kind, ctx):
    ref = eigs(model.build_limit_hamiltonian(kind, 20, **ctx))[:10]
    np.testing.assert_allclose(model.limit_levels(kind, 10, **ctx), ref, atol=1e-12)
