import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import solve_ivp

from qotto.analysis import entropy_rate_per_power
from qotto.cycle import (
    CycleSpec,
    NoLimitCycleError,
    classify_mode,
    compose,
    convergence_rate,
    engine_spec,
    extra_energy_constmu,
    limit_cycle,
    report,
    stroke_maps,
    superadiabatic_efficiency,
    work_variance,
)
from qotto.oracle import FockSpace, expectations, oracle_limit_cycle, thermal_state
from qotto.protocols import constant_mu, frictionless_constmu, sudden
from qotto.state import OscillatorState, equilibrium_number
from qotto.strokes import AffineMap4, BathSpec, adiabat_generator

FIG3 = dict(omega_c=0.5, omega_h=2.0, T_c=5.0, T_h=200.0, tau_c=2.1, tau_h=2.1)
FIG4 = dict(omega_c=0.5, omega_h=3.0, T_c=1.5, T_h=3.0, tau_c=2.1, tau_h=2.1, order="refrigerator")


def test_frictionless_zero_time_cycle_is_identity():
    spec = engine_spec(0.5, 2.0, 1.0, 4.0, 0.0, 0.0)
    assert np.allclose(compose(spec).matrix, np.eye(4), atol=1e-13)
    assert convergence_rate(compose(spec)) == pytest.approx(1.0)
    with pytest.raises(NoLimitCycleError):
        limit_cycle(spec)


def test_segments_do_not_commute():
    Uh, Uhc, _, _ = stroke_maps(engine_spec(**FIG3, mu=0.8))
    # bring the expansion back to w_h for a same-space commutator
    Uhc_back = AffineMap4(Uhc.matrix, 2.0, 2.0)
    assert np.linalg.norm((Uh @ Uhc_back).matrix - (Uhc_back @ Uh).matrix) > 1e-3


def test_fig3_cycle_contracts():
    spec = engine_spec(**FIG3, mu=0.8)
    assert convergence_rate(compose(spec)) < 1
    assert report(spec).mode == "engine"


def test_full_thermalization_corners():
    spec = engine_spec(0.5, 2.0, 1.0, 4.0, 60.0, 60.0)
    lc = limit_cycle(spec)
    assert lc.corners["A"].number == pytest.approx(equilibrium_number(2.0, 4.0), rel=1e-12)
    assert lc.corners["C"].number == pytest.approx(equilibrium_number(0.5, 1.0), rel=1e-12)


def test_power_iteration_matches_fixed_point():
    spec = engine_spec(**FIG3, mu=0.8)
    lc = limit_cycle(spec)
    U = lc.monodromy.matrix
    fixed = lc.stroke_starts[0].as_vector()
    rng = np.random.default_rng(3)
    for _ in range(5):
        v = np.array([rng.uniform(1.0, 400.0), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 1.0])
        d0 = np.linalg.norm(v - fixed)
        for n in range(1, 60):
            v = U @ v
            floor = 1e-13 * np.linalg.norm(fixed)
            assert np.linalg.norm(v - fixed) <= 10 * d0 * lc.convergence_rate**n + floor
        assert np.linalg.norm(v - fixed) <= 1e-9 * np.linalg.norm(fixed)


def test_fig4_refrigerator():
    spec = engine_spec(**FIG4, mu=0.5)
    rep = report(spec)
    assert rep.mode == "refrigerator"
    assert rep.corner_convention == "refrigerator"
    fr = report(engine_spec(**FIG4))
    assert fr.cop == pytest.approx(0.2, rel=1e-9)
    assert fr.cop <= 1.5 / (3.0 - 1.5)


@pytest.mark.parametrize("tau", [0.3, 2.1, 30.0])
def test_frictionless_efficiency(tau):
    rep = report(engine_spec(0.5, 2.0, 5.0, 200.0, tau, tau))
    assert rep.efficiency == pytest.approx(0.75, abs=1e-9)


def test_full_thermalization_work():
    rep = report(engine_spec(0.5, 2.0, 1.0, 4.0, 60.0, 60.0))
    expected = (0.5 - 2.0) * (equilibrium_number(2.0, 4.0) - equilibrium_number(0.5, 1.0))
    assert rep.work == pytest.approx(expected, rel=1e-12)


def test_work_variance_example():
    lc = limit_cycle(engine_spec(0.5, 1.0, 1.0, 4.0, 80.0, 80.0))
    assert work_variance(lc) == pytest.approx(25.0, rel=1e-12)
    T = 1.7
    lc = limit_cycle(engine_spec(1.0, 1.0001, T, T, 80.0, 80.0))
    assert work_variance(lc) == pytest.approx(4 * T * T, rel=1e-3)


def test_work_variance_minimizer():
    Th, Tc = 9.0, 1.0
    Cs = np.linspace(1.2, 8.0, 341)
    v = [work_variance(limit_cycle(engine_spec(0.1, 0.1 * C, Tc, Th, 80.0, 80.0))) for C in Cs]
    assert Cs[int(np.argmin(v))] == pytest.approx(math.sqrt(Th / Tc), abs=0.02)


def test_work_variance_refuses_coherent_corners():
    lc = limit_cycle(engine_spec(0.5, 2.0, 1.0, 4.0, 2.0, 2.0, mu=1.0))
    with pytest.raises(ValueError):
        work_variance(lc)


def test_convergence_rate_examples():
    assert convergence_rate(AffineMap4.identity(1.0)) == 1.0
    spec = CycleSpec(
        BathSpec(3.0, 0.7), BathSpec(1.0, 1.3), 2.0, 1.0, 0.9, 0.4,
        frictionless_constmu(2.0, 1.0, 1), frictionless_constmu(1.0, 2.0, 1),
    )
    # frictionless adiabats are pure scalings, so the rate is that of the isochores
    assert convergence_rate(compose(spec)) == pytest.approx(math.exp(-0.7 * 0.9 - 1.3 * 0.4), rel=1e-10)


def test_superadiabatic_efficiency():
    slow = engine_spec(0.5, 2.0, 1.0, 8.0, 2.0, 2.0, mu=1e-4)
    assert superadiabatic_efficiency(slow) == pytest.approx(0.75, abs=1e-6)
    fast = engine_spec(0.5, 2.0, 1.0, 8.0, 2.0, 2.0, ell=1)
    assert superadiabatic_efficiency(fast, variant="drive") < 0.75
    assert superadiabatic_efficiency(fast, variant="noise", delta_hc=0.01, delta_ch=0.02) < 0.75
    assert superadiabatic_efficiency(fast, variant="noise") == pytest.approx(0.75, abs=1e-12)


def test_extra_energy_matches_stroke_average():
    wc, wh = 0.5, 2.0
    p = frictionless_constmu(wc, wh, 1)
    E0 = 1.3 * wc
    assert extra_energy_constmu(wc, wh, E0, p.mu) / E0 == pytest.approx(4 * p.mu**2 / (4 - p.mu**2))
    ts = np.linspace(0.0, p.duration, 4001)
    sol = solve_ivp(
        lambda t, y: adiabat_generator(p.omega(t), p.omega_dot(t)) @ y,
        (0.0, p.duration), [E0, 0.0, 0.0], t_eval=ts, rtol=1e-11, atol=1e-13,
    )
    ideal = E0 * np.array([p.omega(t) for t in ts]) / wc
    rel = np.trapezoid(sol.y[0] / ideal - 1.0, ts) / p.duration
    assert rel * E0 * wh / wc == pytest.approx(extra_energy_constmu(wc, wh, E0, p.mu), rel=0.1)


def test_classify_mode():
    assert classify_mode(-1.0, 2.0, -1.0) == "engine"
    assert classify_mode(1.0, -2.0, 1.0) == "refrigerator"
    assert classify_mode(1.0, -0.5, -0.5) == "dissipator"
    assert classify_mode(1.0, 0.5, -1.5) == "accelerator"
    assert classify_mode(0.0, 0.5, -0.5) == "idle"


def test_third_law_flag_on_zero_temperature_bath():
    rep = report(engine_spec(0.5, 2.0, 0.0, 4.0, 1.0, 1.0))
    assert rep.third_law_flag


cycle_params = st.tuples(
    st.floats(0.2, 2.0),  # omega_c
    st.floats(1.05, 5.0),  # compression ratio
    st.floats(0.05, 5.0),  # T_c
    st.floats(0.05, 20.0),  # T_h
    st.floats(0.05, 5.0),  # tau_c
    st.floats(0.05, 5.0),  # tau_h
    st.sampled_from([None, 0.1, 0.8, 1.9, 2.5, "sudden"]),
)


def _random_spec(params):
    wc, C, Tc, Th, tc, th, mu = params
    wh = wc * C
    if mu == "sudden":
        return CycleSpec(BathSpec(Th, 1.0), BathSpec(Tc, 0.6), wh, wc, th, tc, sudden(wh, wc), sudden(wc, wh))
    return engine_spec(wc, wh, Tc, Th, tc, th, gamma_c=0.6, mu=mu)


@given(cycle_params)
@settings(max_examples=150, deadline=None)
def test_first_and_second_law(params):
    spec = _random_spec(params)
    # fast non-frictionless adiabats can pump energy faster than weak isochores remove it
    assume(convergence_rate(compose(spec)) < 1 - 1e-9)
    rep = report(spec)
    scale = max(abs(rep.work), abs(rep.q_hot), abs(rep.q_cold), 1.0)
    assert abs(rep.work + rep.q_hot + rep.q_cold) <= 1e-10 * scale
    assert rep.entropy_production >= -1e-10


@given(cycle_params)
@settings(max_examples=60, deadline=None)
def test_mode_matches_frictionless_criterion(params):
    wc, C, Tc, Th, tc, th, _ = params
    if abs(1 / C - Tc / Th) < 1e-3:
        return
    rep = report(engine_spec(wc, wc * C, Tc, Th, tc, th))
    assume(abs(rep.work) > 1e-9)
    assert rep.mode == ("engine" if 1 / C > Tc / Th else "refrigerator")


@pytest.mark.parametrize("tau", [0.1, 0.5, 1.0, 3.0, 10.0])
def test_entropy_linear_in_power(tau):
    Tc, Th, wc, wh = 1.0, 6.0, 0.5, 1.5
    rep = report(engine_spec(wc, wh, Tc, Th, tau, 0.7 * tau))
    k = entropy_rate_per_power(Tc, wc, Th, wh)
    assert rep.entropy_production == pytest.approx(k * (-rep.work), rel=1e-8)


def test_oracle_limit_cycle_matches_algebra():
    wc, wh, Tc, Th = 1.0, 1.6, 0.2, 0.6
    spec = engine_spec(wc, wh, Tc, Th, 1.0, 1.0, mu=0.6)
    lc = limit_cycle(spec)
    space = FockSpace(64, 1.0)
    rho0 = thermal_state(space, wh, Th)
    rho, dists, _ = oracle_limit_cycle(
        space, rho0, wh, wc, spec.hot_bath, spec.cold_bath, 1.0, 1.0, spec.expansion, spec.compression, periods=12
    )
    assert all(b <= a * (1 + 1e-9) for a, b in zip(dists, dists[1:]))
    o = expectations(space, rho, wh)
    assert np.allclose(o.as_vector(), lc.stroke_starts[0].as_vector(), atol=1e-4)


def test_parametric_amplification_has_no_limit_cycle():
    spec = engine_spec(1.0, 3.0, 1.0, 1.0, 1.0, 0.5, gamma_c=0.6, mu=1.9)
    assert convergence_rate(compose(spec)) > 1
    with pytest.raises(NoLimitCycleError):
        limit_cycle(spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        engine_spec(2.0, 1.0, 1.0, 2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        CycleSpec(BathSpec(2.0, 1.0), BathSpec(1.0, 1.0), 2.0, 1.0, 1.0, 1.0, constant_mu(1.0, 2.0, 0.3), constant_mu(1.0, 2.0, 0.3))
    assert isinstance(OscillatorState(1.0, 0.0, 0.0, 1.0), OscillatorState)
