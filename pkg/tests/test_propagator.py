import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimirkick import analytic, propagator
from casimirkick.exceptions import IntegrationError, ValidationError
from casimirkick.params import DimensionlessGroups
from casimirkick.propagator import (
    AD,
    CANONICAL,
    A,
    Frame,
    GaussianMoments,
    ModelFlags,
    P,
    TransferMatrix,
    X,
    build_generator,
    commutator_residual,
    kinetic_moments,
    propagate,
)

ALL_FLAGS = [ModelFlags(rwa=rwa, backaction=ba, frame=fr) for rwa in (True, False) for ba in (False, True) for fr in Frame]


def natural(r=0.05, theta=2 * math.pi, n_th=0.0, **kw):
    return DimensionlessGroups.natural(r, theta, n_th, **kw)


def decoupled(r, theta, n_th=0.0):
    return DimensionlessGroups(r=r, theta=theta, n_th=n_th, eps_kick=1.0, k0=1.0, g_over=0.0)


def test_generator_decouples_without_coupling():
    m = build_generator(0.7, ModelFlags(rwa=False, backaction=True, frame="lab"), decoupled(0.1, 1.0))
    assert np.all(m[:2, 2:] == 0) and np.all(m[2:, :2] == 0)


def test_generator_field_rows_vanish_without_squeeze():
    m = build_generator(1.3, CANONICAL, natural(r=0.0))
    assert np.all(m[2:] == 0)


def test_generator_rows_are_conjugate_pairs():
    for flags in ALL_FLAGS:
        m = build_generator(0.9, flags, natural(r=0.1))
        swap = [0, 1, 3, 2]
        assert np.allclose(m[P, swap].conj(), m[P])
        assert np.allclose(m[AD, swap].conj(), m[A])


def test_zero_time_is_identity():
    tm = propagate(CANONICAL, natural(), t_final=0.0)
    assert np.array_equal(tm.phi, np.eye(4))
    assert commutator_residual(TransferMatrix.identity()) == 0.0


def test_exact_bogoliubov_block_has_zero_residual():
    phi = np.eye(4, dtype=complex)
    c, s = math.cosh(1.7), math.sinh(1.7)
    phi[2:, 2:] = [[c, s], [s, c]]
    assert commutator_residual(phi, blockwise=False) < 1e-13


def test_field_block_matches_bogoliubov():
    g = natural(r=0.2, theta=3.0)
    tm = propagate(CANONICAL, g)
    c, s = math.cosh(0.6), math.sinh(0.6)
    assert np.allclose(tm.phi[2:, 2:], [[c, s], [s, c]], rtol=0, atol=1e-8)


@pytest.mark.parametrize("flags", ALL_FLAGS, ids=lambda f: f"rwa{int(f.rwa)}-ba{int(f.backaction)}-{f.frame.value}")
def test_integrated_residual_below_bound(flags):
    tm = propagate(flags, natural(r=0.2, theta=4 * math.pi), tol=1e-9)
    assert commutator_residual(tm) < 1e-7


@pytest.mark.parametrize("flags", ALL_FLAGS, ids=lambda f: f"rwa{int(f.rwa)}-ba{int(f.backaction)}-{f.frame.value}")
def test_electron_rows_hermitian_structure(flags):
    phi = propagate(flags, natural(r=0.15, theta=5.0)).phi
    for row in (X, P):
        assert abs(phi[row, X].imag) < 1e-14 and abs(phi[row, P].imag) < 1e-14
        assert abs(phi[row, A] - phi[row, AD].conjugate()) < 1e-14


def test_identity_moments():
    g = natural(p_mean=50.0, recoil=0.3)
    init = GaussianMoments.thermal(g)
    rep = kinetic_moments(TransferMatrix.identity(), init, g)
    assert rep.mean_k == pytest.approx(g.k0 + 0.3 * 0.25 / 2, rel=1e-15)
    var_p = 0.25
    assert rep.var_k == pytest.approx((0.3 / 2) ** 2 * (4 * 50.0**2 * var_p + 2 * var_p**2), rel=1e-15)
    assert rep.delta_k == 0.0 and rep.delta_var_k == 0.0


def test_closed_form_match_example():
    g = natural(r=0.05, theta=4 * math.pi)
    rep = kinetic_moments(propagate(CANONICAL, g, tol=1e-9), GaussianMoments.thermal(g), g)
    expect = analytic.mean_kinetic_shift(0.05, 4 * math.pi, 0.0, g.eps_kick).delta_k
    assert rep.delta_k == pytest.approx(expect, rel=1e-8)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.0, max_value=0.2), st.floats(min_value=0.0, max_value=4 * math.pi), st.floats(min_value=0.0, max_value=5.0))
def test_oracle_agreement_property(r, theta, n_th):
    g = natural(r=r, theta=theta, n_th=n_th)
    rep = kinetic_moments(propagate(CANONICAL, g, tol=1e-9), GaussianMoments.thermal(g), g)
    expect = analytic.mean_kinetic_shift(r, theta, n_th, g.eps_kick).delta_k
    assert abs(rep.delta_k - expect) <= 10 * 1e-9 * g.eps_kick * (1 + 2 * n_th)


@pytest.mark.parametrize("n_th", [0.0, 1.0, 3.0])
def test_decoupled_photon_number(n_th):
    g = decoupled(0.15, 4.0, n_th)
    rep = kinetic_moments(propagate(CANONICAL, g, tol=1e-9), GaussianMoments.thermal(g), g)
    assert rep.mean_n == pytest.approx((n_th + 0.5) * math.cosh(2 * 0.6) - 0.5, abs=10 * 1e-9 * (1 + n_th))


def test_propagate_many_matches_single_runs():
    g = natural(r=0.1)
    times = [0.0, 1.0, 2.5, 6.0]
    many = propagator.propagate_many(CANONICAL, g, times)
    for tm, t in zip(many, times):
        assert tm.t == t
    single = propagate(CANONICAL, g, t_final=1.0)
    assert np.allclose(many[1].delta, single.delta, rtol=0, atol=1e-12)


def test_bitwise_determinism():
    g = natural(r=0.13, theta=7.0, n_th=1.0)
    a = kinetic_moments(propagate(ModelFlags(rwa=False), g), GaussianMoments.thermal(g), g)
    b = kinetic_moments(propagate(ModelFlags(rwa=False), g), GaussianMoments.thermal(g), g)
    assert a == b


def test_tolerance_range_enforced():
    with pytest.raises(ValidationError):
        propagate(CANONICAL, natural(), tol=1e-3)
    with pytest.raises(ValidationError):
        propagate(CANONICAL, natural(), tol=1e-14)


def test_negative_time_rejected():
    with pytest.raises(ValidationError):
        propagate(CANONICAL, natural(), t_final=-1.0)


def test_step_failure_raises_integration_error(monkeypatch):
    class Failed:
        status = -1
        message = "step size too small"
        t = np.array([0.0, 1.25])
        y = np.zeros((16, 2), dtype=complex)
        nfev = 10

    monkeypatch.setattr(propagator, "solve_ivp", lambda *a, **k: Failed())
    with pytest.raises(IntegrationError) as info:
        propagate(CANONICAL, natural())
    assert info.value.time == 1.25


def test_residual_breach_raises(monkeypatch):
    monkeypatch.setattr(propagator, "commutator_residual", lambda tm: 1.0)
    with pytest.raises(IntegrationError, match="residual"):
        propagate(CANONICAL, natural(), tol=1e-9)


def test_moments_reject_uncertainty_violation():
    cov = np.diag([0.1, 0.1, 0.5, 0.5]).astype(complex)
    with pytest.raises(ValidationError):
        GaussianMoments(mean=np.zeros(4), cov=cov)


def test_narrow_preset():
    g = natural()
    init = GaussianMoments.thermal(g, "narrow", narrowing=10.0)
    assert init.cov[P, P].real == pytest.approx(0.25 / 100)
    assert init.cov[X, X].real == pytest.approx(100.0)
    with pytest.raises(ValidationError):
        GaussianMoments.thermal(g, "wide")


def test_audit_decoupling_limit():
    devs = [propagator.approximation_audit(natural(g_over=g)).dev_k["backaction_on"] for g in (1e-3, 1e-4)]
    assert devs[1] < devs[0] / 50


def test_audit_no_squeeze_keeps_thermal_occupancy():
    audit = propagator.approximation_audit(natural(r=0.0, theta=3.0, n_th=1.5))
    for name in ("canonical", "rwa_off", "frame_lab"):
        assert audit.reports[name].mean_n == pytest.approx(1.5, abs=1e-8)


def test_audit_backaction_slope():
    g_values = (1e-3, 2e-3, 4e-3)
    devs = [propagator.approximation_audit(natural(g_over=g)).dev_k["backaction_on"] for g in g_values]
    slope = np.polyfit(np.log(g_values), np.log(devs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.05)


def test_variance_adjudication_ratio_is_four_thirds():
    out = propagator.variance_adjudication(natural(r=0.1, theta=2.0))
    # measured Wick/leading-order constant; frozen
    assert out.dvar_oracle_ratio == pytest.approx(4.0 / 3.0, rel=1e-4)
