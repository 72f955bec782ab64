import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qotto.oracle import FockSpace, TruncationWarning, evolve_lindblad, expectations, thermal_state
from qotto.protocols import BangBang, constant_mu, frictionless_constmu, linear_ramp
from qotto.state import OscillatorState, casimir_companion, equilibrium_energy, equilibrium_state, vn_entropy
from qotto.strokes import (
    AffineMap4,
    BathSpec,
    NoiseSpec,
    adiabat_constmu_propagator,
    adiabat_generator_eigenvalues,
    adiabat_numeric_propagator,
    constmu_theta_generator,
    delta_f,
    heat_flux,
    isochore_propagator,
    magnus_reference,
    noisy_adiabat_generator,
    noisy_adiabat_propagator,
    q_star,
    squeezed_isochore_propagator,
    squeezed_stationary_state,
    squeezed_targets,
    sudden_propagator,
)

MU_STAR_1 = 2 * math.log(4) / math.sqrt(4 * math.pi**2 + math.log(4) ** 2)


def test_affine_map_last_row_enforced():
    with pytest.raises(ValueError):
        AffineMap4(np.ones((4, 4)), 1.0, 1.0)
    a = isochore_propagator(BathSpec(1.0, 1.0), 1.0, 0.3)
    b = isochore_propagator(BathSpec(2.0, 0.5), 1.0, 0.7)
    c = isochore_propagator(BathSpec(0.0, 2.0), 1.0, 0.1)
    assert np.allclose(((a @ b) @ c).matrix, (a @ (b @ c)).matrix, atol=1e-14)
    assert np.array_equal((a @ b).matrix[3], [0, 0, 0, 1])
    assert np.array_equal((AffineMap4.identity(1.0) @ a).matrix, a.matrix)


def test_affine_map_frequency_mismatch():
    with pytest.raises(ValueError):
        sudden_propagator(1.0, 2.0) @ sudden_propagator(1.0, 3.0)


def test_bath_detailed_balance():
    bath = BathSpec(0.8, 1.3)
    w = 1.1
    assert bath.k_down(w) - bath.k_up(w) == pytest.approx(1.3, rel=1e-14)
    assert bath.k_up(w) / bath.k_down(w) == pytest.approx(math.exp(-w / 0.8), rel=1e-14)


def test_isochore_zero_time_identity():
    m = isochore_propagator(BathSpec(1.0, 1.0), 1.3, 0.0)
    assert np.array_equal(m.matrix, np.eye(4))


def test_isochore_long_time_equilibrates():
    bath = BathSpec(0.7, 1.0)
    s = OscillatorState(3.0, 1.0, -0.5, 1.2)
    out = isochore_propagator(bath, 1.2, 60.0).apply(s)
    assert out.energy == pytest.approx(equilibrium_energy(1.2, 0.7), rel=1e-14)
    assert abs(out.lagrangian) < 1e-20 and abs(out.correlation) < 1e-20


def test_isochore_cold_example_and_oracle():
    bath = BathSpec(0.0, 1.0)
    s = OscillatorState(2.0, 0.0, 0.0, 1.0)
    out = isochore_propagator(bath, 1.0, 1.0).apply(s)
    assert out.energy == pytest.approx(2 * math.exp(-1) + 0.5 * (1 - math.exp(-1)), rel=1e-14)
    assert out.energy == pytest.approx(1.0518, abs=1e-4)
    # oracle: a thermal state with E = 2 at w = 1 relaxed for unit time
    space = FockSpace(64, 1.0)
    T0 = 1.0 / math.log(1 + 1 / 1.5)
    rho = evolve_lindblad(space, thermal_state(space, 1.0, T0), 1.0, bath, 1.0)
    assert expectations(space, rho, 1.0).energy == pytest.approx(out.energy, abs=1e-6)


@pytest.mark.parametrize("gamma, tau", [(1.0, 0.5), (0.3, 2.0), (2.0, 0.01)])
def test_isochore_contraction(gamma, tau):
    m = isochore_propagator(BathSpec(1.0, gamma), 0.9, tau)
    rho = np.max(np.abs(np.linalg.eigvals(m.homogeneous)))
    assert rho == pytest.approx(math.exp(-gamma * tau), rel=1e-12)


def test_squeezed_zero_matches_thermal():
    a = squeezed_isochore_propagator(BathSpec(0.6, 0.8, 0.0), 1.1, 1.7)
    b = isochore_propagator(BathSpec(0.6, 0.8), 1.1, 1.7)
    assert np.allclose(a.matrix, b.matrix, atol=1e-13)


@pytest.mark.parametrize("r", [0.0, 0.1, 0.5, 1.2])
def test_squeezed_energy_exceeds_thermal(r):
    Hsq, _ = squeezed_targets(BathSpec(0.9, 1.0, r), 1.0)
    assert Hsq >= equilibrium_energy(1.0, 0.9)


def test_squeezed_stationary_state_formula():
    bath = BathSpec(0.5, 0.7, 0.3)
    w = 1.3
    _, Csq = squeezed_targets(bath, w)
    s = squeezed_stationary_state(bath, w)
    G = bath.conductance
    C_ss = Csq * G**2 / (G**2 + 4 * w**2)
    assert s.correlation == pytest.approx(C_ss, rel=1e-12)
    assert s.lagrangian == pytest.approx(-2 * w * C_ss / G, rel=1e-12)


def test_squeezed_stationary_state_matches_oracle():
    bath = BathSpec(0.5, 0.7, 0.3)
    w = 1.0
    space = FockSpace(64, 1.0)
    rho = evolve_lindblad(space, thermal_state(space, w, 0.5), w, bath, 60.0)
    o = expectations(space, rho, w)
    s = squeezed_stationary_state(bath, w)
    assert np.allclose(o.as_vector(), s.as_vector(), atol=1e-6)


def test_constmu_equal_frequencies_identity():
    assert np.array_equal(adiabat_constmu_propagator(1.5, 1.5, 0.3).matrix, np.eye(4))


def test_constmu_frictionless_point_is_diagonal():
    m = adiabat_constmu_propagator(2.0, 0.5, -MU_STAR_1)
    assert np.allclose(m.homogeneous, 0.25 * np.eye(3), atol=1e-14)
    assert abs(delta_f(m)) < 1e-13


def test_constmu_large_mu_tends_to_sudden():
    m = adiabat_constmu_propagator(2.0, 1.0, -1e6)
    assert np.allclose(m.matrix, sudden_propagator(2.0, 1.0).matrix, atol=1e-4)


def test_constmu_rejects_wrong_sign():
    with pytest.raises(ValueError):
        adiabat_constmu_propagator(1.0, 2.0, -0.5)
    with pytest.raises(ValueError):
        adiabat_constmu_propagator(1.0, 2.0, 0.0)


def test_sudden_examples():
    m = sudden_propagator(2.0, 1.0)
    E = equilibrium_energy(2.0, 0.7)
    out = m.apply(OscillatorState(E, 0.0, 0.0, 2.0))
    assert out.energy == pytest.approx(0.625 * E, rel=1e-14)
    assert delta_f(m) == pytest.approx(0.25, abs=1e-15)
    assert np.array_equal(sudden_propagator(1.3, 1.3).matrix, np.eye(4))


@pytest.mark.parametrize("mu", [0.1, 0.8, 1.99, 2.0, 2.01, 3.0])
def test_constmu_analytic_vs_numeric(mu):
    for wi, wf in ((1.0, 2.5), (2.0, 0.5)):
        m_mu = math.copysign(mu, wf - wi)
        a = adiabat_constmu_propagator(wi, wf, m_mu)
        n = adiabat_numeric_propagator(constant_mu(wi, wf, m_mu), tol=1e-11)
        assert np.allclose(a.matrix, n.matrix, rtol=0, atol=1e-8)


def test_numeric_jump_chain_matches_sudden_products():
    p = BangBang(1.0, 2.0, 0.0, holds=((0.5, 0.0), (3.0, 0.0)))
    expected = sudden_propagator(3.0, 2.0) @ sudden_propagator(0.5, 3.0) @ sudden_propagator(1.0, 0.5)
    assert np.allclose(adiabat_numeric_propagator(p).matrix, expected.matrix, atol=1e-12)


@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.2, 4.0))
@settings(max_examples=25, deadline=None)
def test_numeric_adiabat_invariants(wi, wf, tau):
    p = linear_ramp(wi, wf, tau)
    m = adiabat_numeric_propagator(p, tol=1e-11)
    assert np.linalg.det(m.homogeneous) == pytest.approx((wf / wi) ** 3, rel=1e-8)
    s = OscillatorState(1.7 * wi, 0.4 * wi, -0.3 * wi, wi)
    out = m.apply(s)
    assert casimir_companion(out) == pytest.approx(casimir_companion(s), abs=1e-9)
    assert vn_entropy(out) == pytest.approx(vn_entropy(s), abs=1e-8)
    assert delta_f(m) >= -1e-12


def test_noise_free_generator_reduces_exactly():
    p = linear_ramp(1.0, 1.8, 1.2)
    g0 = noisy_adiabat_generator(p, NoiseSpec())
    a = noisy_adiabat_propagator(p, NoiseSpec(), tol=1e-10)
    b = adiabat_numeric_propagator(p, tol=1e-10)
    assert np.array_equal(a.matrix, b.matrix)
    assert np.all(g0(0.4)[3] == 0)


@pytest.mark.parametrize("noise", [NoiseSpec(1e-3, 0.0), NoiseSpec(0.0, 1e-3), NoiseSpec(0.01, 0.02)])
def test_noise_yields_positive_delta_f(noise):
    p = frictionless_constmu(2.0, 0.5, 1)
    assert delta_f(noisy_adiabat_propagator(p, noise, tol=1e-11)) > 0


def test_magnus_reference_structure():
    assert np.array_equal(magnus_reference("amplitude", gamma=0.0, omega0=1.0, mu=0.01).matrix, np.eye(4))
    m = magnus_reference("phase", gamma=0.05, omega0=1.0, mu=0.01).matrix
    assert m[0, 0] == m[1, 1] and m[0, 1] == m[1, 0] < 0
    assert m[0, 0] ** 2 - m[0, 1] ** 2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        magnus_reference("other", gamma=0.1, omega0=1.0, mu=0.1)


def test_delta_f_ideal_is_zero():
    m = AffineMap4(np.diag([0.5, 0.5, 0.5, 1.0]), 2.0, 1.0)
    assert delta_f(m) == 0.0


def test_q_star_examples():
    assert q_star(linear_ramp(1.3, 1.3, 2.0)) == pytest.approx(1.0, abs=1e-12)
    assert q_star(BangBang(2.0, 1.0, 0.0)) == pytest.approx(1.25, abs=1e-14)
    slow = constant_mu(1.0, 1.5, 1e-3)
    assert abs(q_star(slow) - 1) < 1e-5


@pytest.mark.parametrize(
    "p",
    [linear_ramp(1.0, 2.0, 0.7), constant_mu(2.0, 0.5, -0.9), BangBang(1.0, 1.5, 0.9, holds=((0.6, 0.5), (1.8, 0.4)))],
)
def test_q_star_equals_one_plus_delta_f(p):
    assert q_star(p) == pytest.approx(1 + delta_f(adiabat_numeric_propagator(p, tol=1e-11)), abs=1e-7)


def test_heat_flux():
    bath = BathSpec(1.5, 0.8)
    assert heat_flux(bath, equilibrium_state(1.0, 1.5)) == pytest.approx(0.0, abs=1e-15)
    assert heat_flux(bath, equilibrium_state(1.0, 3.0)) < 0
    hot = BathSpec(1000.0, 0.8)
    s = equilibrium_state(1.0, 990.0)
    assert heat_flux(hot, s) == pytest.approx(0.8 * 10.0, rel=1e-3)


def test_generator_eigenvalues_and_exceptional_point():
    for mu in (0.5, 1.9):
        ev = np.linalg.eigvals(constmu_theta_generator(mu)) - mu
        ev = ev[np.argsort(ev.imag)]
        ref = adiabat_generator_eigenvalues(mu)
        assert np.allclose(ev, ref[np.argsort(ref.imag)], atol=1e-12)
        assert np.all(np.abs(ev.real) < 1e-12)
    ev = adiabat_generator_eigenvalues(2.5)
    assert np.allclose(ev.imag, 0) and ev.real.max() > 0
    at_ep = np.linalg.eigvals(constmu_theta_generator(2.0))
    assert np.allclose(at_ep, 2.0, atol=1e-4)


@pytest.mark.parametrize("wi, wf", [(1.0, 3.0), (3.0, 1.0)])
def test_constmu_continuous_across_ep(wi, wf):
    s = 1.0 if wf > wi else -1.0
    ref = adiabat_constmu_propagator(wi, wf, 2.0 * s).matrix
    for d in (-1e-6, 1e-6, -2e-6, 2e-6):
        m = adiabat_constmu_propagator(wi, wf, (2.0 + d) * s).matrix
        assert np.max(np.abs(m - ref)) < 1e-4


def test_analytic_propagators_agree_with_oracle():
    space = FockSpace(64, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        rho = thermal_state(space, 1.2, 0.4)
    s = equilibrium_state(1.2, 0.4)
    bath = BathSpec(0.3, 0.9)
    rho1 = evolve_lindblad(space, rho, 1.2, bath, 0.8)
    s1 = isochore_propagator(bath, 1.2, 0.8).apply(s)
    assert np.allclose(expectations(space, rho1, 1.2).as_vector(), s1.as_vector(), atol=1e-5)
