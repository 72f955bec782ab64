"""Closed-form performance formulas, optimizers and scaling scans.

Numbers ``N`` are ``E_eq / w`` and include the zero-point half, matching
:mod:`qotto.state`. The compression ratio is ``C = w_h / w_c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .cycle import CycleSpec, report
from .protocols import bang_bang, frictionless_constmu
from .state import equilibrium_number
from .strokes import AffineMap4, BathSpec, sudden_propagator

__all__ = [
    "DesignPoint",
    "SuddenForms",
    "CompleteSudden",
    "RefrigeratorPerformance",
    "ThirdLawResult",
    "f_function",
    "g_work",
    "g_work_high_t",
    "g_entropy",
    "g_entropy_high_t",
    "entropy_rate_per_power",
    "optimal_time_allocation",
    "max_power_design",
    "max_power_numeric",
    "sudden_closed_forms",
    "sudden_optimum_high_t",
    "sudden_optimum_numeric",
    "sudden_efficiency_printed",
    "complete_sudden_cycle",
    "complete_sudden_printed_propagator",
    "refrigerator_performance",
    "optimal_cooling_rate",
    "sudden_cooling_rate",
    "thirdlaw_scan",
]

ROOT_XTOL = 1e-10
ROOT_MAXITER = 200


@dataclass(frozen=True)
class DesignPoint:
    T_h: float
    T_c: float
    omega_h: float
    omega_c: float
    gamma_h: float = 1.0
    gamma_c: float = 1.0
    x_h: float = math.inf
    x_c: float = math.inf

    @property
    def compression_ratio(self) -> float:
        return self.omega_h / self.omega_c


# ------------------------------------------------------------ factorization


def f_function(x_c: float, x_h: float) -> float:
    """Heat-transport factor ``(e^xc - 1)(e^xh - 1)/(e^(xc+xh) - 1)`` in [0, 1]."""
    if x_c < 0 or x_h < 0:
        raise ValueError("x must be >= 0")
    if x_c == 0 or x_h == 0:
        return 0.0
    # divide through by e^(xc+xh): finite for infinite arguments
    return float(-np.expm1(-x_c) * -np.expm1(-x_h) / -np.expm1(-(x_c + x_h)))


def _n(omega: float, T: float) -> float:
    return equilibrium_number(omega, T)


def g_work(T_c: float, omega_c: float, T_h: float, omega_h: float) -> float:
    """``(w_h - w_c)(N_h - N_c)``, i.e. half the coth difference times ``w_h - w_c``."""
    return (omega_h - omega_c) * (_n(omega_h, T_h) - _n(omega_c, T_c))


def g_work_high_t(T_c: float, T_h: float, C: float) -> float:
    return T_c * (1.0 - C) + T_h * (1.0 - 1.0 / C)


def g_entropy(T_c: float, omega_c: float, T_h: float, omega_h: float) -> float:
    """``(w_h/T_h - w_c/T_c)(N_c - N_h)``; non-negative for any positive inputs."""
    return (omega_h / T_h - omega_c / T_c) * (_n(omega_c, T_c) - _n(omega_h, T_h))


def g_entropy_high_t(T_c: float, T_h: float, C: float) -> float:
    return C * T_c / T_h + T_h / (C * T_c) - 2.0


def entropy_rate_per_power(T_c: float, omega_c: float, T_h: float, omega_h: float) -> float:
    """``G_S / G_W = (w_c/T_c - w_h/T_h)/(w_h - w_c)``: entropy production rate per unit power."""
    return (omega_c / T_c - omega_h / T_h) / (omega_h - omega_c)


# ------------------------------------------------------------ time allocation


def _x_c_of(x_h: float, gamma_h: float, gamma_c: float) -> float:
    # Gamma_h (cosh x_c - 1) = Gamma_c (cosh x_h - 1), written with cosh x - 1 = 2 sinh^2(x/2)
    return 2.0 * math.asinh(math.sqrt(gamma_c / gamma_h) * math.sinh(0.5 * x_h))


def optimal_time_allocation(
    gamma_h: float,
    gamma_c: float,
    tau_adi: float,
    x_max: float = 60.0,
) -> tuple[float, float]:
    """Isochore durations ``(tau_h, tau_c)`` maximizing ``F / tau_cyc``.

    ``x_c`` follows from the partition condition; ``x_h`` is the bracketed
    root of the cycle-time stationarity condition.

    Raises
    ------
    ValueError
        If no sign change is found on the scan ``x_h`` in ``[1e-8, x_max]``.
    """
    if gamma_h <= 0 or gamma_c <= 0:
        raise ValueError("rates must be positive")
    if tau_adi < 0:
        raise ValueError("tau_adi must be >= 0")
    if tau_adi == 0:
        # supremum approached as x -> 0
        return 0.0, 0.0

    def resid(x_h: float) -> float:
        x_c = _x_c_of(x_h, gamma_h, gamma_c)
        tau = tau_adi + x_h / gamma_h + x_c / gamma_c
        rhs = math.sinh(x_h + x_c) - math.sinh(x_c) - math.sinh(x_h)
        return rhs - gamma_c * tau * 2.0 * math.sinh(0.5 * x_h) ** 2

    grid = np.geomspace(1e-8, x_max, 400)
    vals = [resid(float(x)) for x in grid]
    for k in range(len(grid) - 1):
        if vals[k] == 0:
            x_h = float(grid[k])
            break
        if vals[k] * vals[k + 1] < 0:
            x_h = optimize.brentq(resid, grid[k], grid[k + 1], xtol=ROOT_XTOL, maxiter=ROOT_MAXITER)
            break
    else:
        raise ValueError(f"no bracket for the time-allocation optimum on x_h in [1e-8, {x_max}]")
    x_c = _x_c_of(x_h, gamma_h, gamma_c)
    return x_h / gamma_h, x_c / gamma_c


# ------------------------------------------------------------ maximum power


def max_power_design(T_c: float, T_h: float) -> tuple[float, float]:
    """High-temperature optimum ``(C*, eta) = (sqrt(T_h/T_c), 1 - sqrt(T_c/T_h))``."""
    if not T_h > T_c > 0:
        raise ValueError("require T_h > T_c > 0")
    return math.sqrt(T_h / T_c), 1.0 - math.sqrt(T_c / T_h)


def max_power_numeric(T_c: float, T_h: float, omega_c: float, x_c: float = 1.0, x_h: float = 1.0) -> tuple[float, float]:
    """Golden-section maximization of ``-W = G_W F`` over ``C`` at fixed ``w_c``."""
    if not T_h > T_c > 0:
        raise ValueError("require T_h > T_c > 0")
    F = f_function(x_c, x_h)
    cmax = T_h / T_c

    def neg(C: float) -> float:
        return -g_work(T_c, omega_c, T_h, C * omega_c) * F

    res = optimize.minimize_scalar(
        neg, bracket=(1.0, math.sqrt(cmax), cmax), method="golden", tol=1e-10
    )
    C = float(res.x)
    return C, 1.0 - 1.0 / C


# ------------------------------------------------------------ sudden limit


@dataclass(frozen=True)
class SuddenForms:
    work: float
    q_hot: float
    efficiency: float
    c_opt_high_t: float
    w_friction: float


def _sudden_work(T_c: float, T_h: float, omega_c: float, omega_h: float) -> float:
    Nh, Nc = _n(omega_h, T_h), _n(omega_c, T_c)
    return (omega_c - omega_h) * (omega_c + omega_h) / (2.0 * omega_c * omega_h) * (omega_c * Nh - omega_h * Nc)


def sudden_closed_forms(T_c: float, T_h: float, omega_c: float, omega_h: float) -> SuddenForms:
    """Sudden adiabats with fully thermalizing isochores.

    ``work`` is the closed form in ``N``; ``q_hot`` and ``efficiency`` are
    taken from the sudden propagator acting on the thermal corners;
    ``w_friction`` is the bound written with excitation numbers ``n = N - 1/2``.
    """
    Nh, Nc = _n(omega_h, T_h), _n(omega_c, T_c)
    W = _sudden_work(T_c, T_h, omega_c, omega_h)
    # compression: thermal state at w_c quenched to w_h
    pre_hot = sudden_propagator(omega_c, omega_h).matrix @ np.array([omega_c * Nc, 0.0, 0.0, 1.0])
    q_hot = omega_h * Nh - pre_hot[0]
    eff = -W / q_hot if (W < 0 and q_hot > 0) else math.nan
    C = omega_h / omega_c
    nh, nc = Nh - 0.5, Nc - 0.5
    wf = omega_h * (C - 1.0) ** 2 * (1.0 + C + 2.0 * C * nc + 2.0 * nh) / (4.0 * C * C)
    return SuddenForms(W, float(q_hot), eff, (T_h / T_c) ** 0.25, wf)


def sudden_optimum_high_t(T_c: float, T_h: float) -> tuple[float, float, float]:
    """``(C*, W*, eta*)`` of the sudden engine at high temperature.

    ``eta* = (1 - sqrt(T_c/T_h)) / (2 + sqrt(T_c/T_h))`` from ``-W/Q_h``.
    """
    s = math.sqrt(T_h / T_c)
    return s**0.5, -0.5 * T_c * (1.0 - s) ** 2, (1.0 - 1.0 / s) / (2.0 + 1.0 / s)


def sudden_efficiency_printed(T_c: float, T_h: float) -> float:
    """Reference form with ``sqrt(T_h/T_c)``; negative for ``T_h > T_c`` (see the notes)."""
    s = math.sqrt(T_h / T_c)
    return (1.0 - s) / (2.0 + s)


def sudden_optimum_numeric(T_c: float, T_h: float, omega_c: float) -> tuple[float, SuddenForms]:
    """Maximize ``-W_s`` over ``C`` at fixed ``w_c``; returns ``(C*, forms at C*)``."""
    s = math.sqrt(T_h / T_c)

    def neg(C: float) -> float:
        return _sudden_work(T_c, T_h, omega_c, C * omega_c)

    res = optimize.minimize_scalar(neg, bracket=(1.0, s**0.5, s), method="golden", tol=1e-10)
    C = float(res.x)
    return C, sudden_closed_forms(T_c, T_h, omega_c, C * omega_c)


# ------------------------------------------------------------ complete sudden cycle


@dataclass(frozen=True)
class CompleteSudden:
    propagator: AffineMap4
    work: float
    q_hot: float
    q_cold: float
    power: float
    entropy_production: float
    efficiency: float
    work_printed: float
    power_printed: float
    entropy_printed: float
    efficiency_printed: float


def _partial_isochore(g: float, omega: float, N: float) -> AffineMap4:
    # thermalization by a fraction g, phase rotation neglected
    m = np.diag([1.0 - g, 1.0 - g, 1.0 - g, 1.0])
    m[0, 3] = g * omega * N
    return AffineMap4(m, omega, omega)


def complete_sudden_printed_propagator(T_c: float, T_h: float, omega_c: float, omega_h: float, g: float) -> AffineMap4:
    """The closed-form cycle matrix, fixed point at the start of the expansion."""
    C = omega_h / omega_c
    Nh, Nc = _n(omega_h, T_h), _n(omega_c, T_c)
    d = (1.0 - g) ** 2
    m = np.diag([d, d, d, 1.0])
    m[0, 3] = g * (1 - g) * 0.5 * (1 + C * C) * omega_c * Nc + g * omega_h * Nh
    m[1, 3] = (1 - g) * g * 0.5 * (1 - C * C) * omega_c * Nc
    return AffineMap4(m, omega_h, omega_h)


def complete_sudden_cycle(
    T_c: float, T_h: float, omega_c: float, omega_h: float, g: float, gamma: float = 1.0
) -> CompleteSudden:
    """Cycle of sudden adiabats and short balanced isochores (``g = 1 - e^{-Gamma tau}``).

    Work, heats, entropy production and efficiency come from the fixed point
    of the composed maps; ``power = -W / tau_cyc`` with ``tau_cyc`` the sum of
    both isochore durations. The ``*_printed`` fields hold the literal closed
    forms for comparison.
    """
    if not 0 < g < 1:
        raise ValueError("require 0 < g < 1")
    Nh, Nc = _n(omega_h, T_h), _n(omega_c, T_c)
    Uh = _partial_isochore(g, omega_h, Nh)
    Uc = _partial_isochore(g, omega_c, Nc)
    Uhc = sudden_propagator(omega_h, omega_c)
    Uch = sudden_propagator(omega_c, omega_h)
    M = Uh @ Uch @ Uc @ Uhc
    v = np.linalg.solve(np.eye(3) - M.homogeneous, M.affine)
    s = np.append(v, 1.0)
    s1 = Uhc.matrix @ s
    s2 = Uc.matrix @ s1
    s3 = Uch.matrix @ s2
    s4 = Uh.matrix @ s3
    W = (s1[0] - s[0]) + (s3[0] - s2[0])
    q_cold = s2[0] - s1[0]
    q_hot = s4[0] - s3[0]
    tau_cyc = -2.0 * math.log1p(-g) / gamma
    dS = -q_hot / T_h - q_cold / T_c
    eff = -W / q_hot if (W < 0 and q_hot > 0) else math.nan

    C = omega_h / omega_c
    w_pr = -omega_h * g / (2 - g) * (C * C - 1) / (2 * C * C) * (Nh - C * Nc)
    p_pr = -omega_h * gamma / 2 * (C * C - 1) / (2 * C * C) * (Nh - C * Nc)
    ds_pr = omega_h * g / (2 - g) * (C * C - 1) / (2 * C) * (
        Nh * ((1 + C * C) / (2 * C * T_c) - C / T_h) + Nc * ((1 + C * C) / (2 * T_h) - 1 / T_c)
    )
    r = Nc / Nh
    e_pr = (C * C - 1) / (2 * C * C) * (1 - C * r) / (2 - (1 + C * C) / C * r)
    return CompleteSudden(
        complete_sudden_printed_propagator(T_c, T_h, omega_c, omega_h, g),
        float(W), float(q_hot), float(q_cold), float(-W / tau_cyc), float(dS), float(eff),
        float(w_pr), float(p_pr), float(ds_pr), float(e_pr),
    )


# ------------------------------------------------------------ refrigerator


@dataclass(frozen=True)
class RefrigeratorPerformance:
    cop: float
    cooling_rate: float
    cooling_rate_opt: float
    z_opt: float
    sudden_cooling_rate: float
    sudden_valid: bool


def optimal_cooling_rate(gamma: float, tau_adi: float, omega_c: float, N_c: float, N_h: float) -> tuple[float, float]:
    """``(R_c*, z)`` with ``R_c* = e^z/(1+e^z)^2 Gamma w_c (N_c - N_h)`` and ``2z + Gamma tau_adi = 2 sinh z``."""
    tau_h, _ = optimal_time_allocation(gamma, gamma, tau_adi)
    z = gamma * tau_h
    if z == 0:
        return 0.25 * gamma * omega_c * (N_c - N_h), 0.0
    # e^z/(1+e^z)^2 = 1/(4 cosh^2(z/2))
    return gamma * omega_c * (N_c - N_h) / (4.0 * math.cosh(0.5 * z) ** 2), z


def sudden_cooling_rate(gamma: float, omega_c: float, omega_h: float, N_c: float, N_h: float) -> tuple[float, bool]:
    """Vanishing-cycle-time cooling power ``(Gamma w_c / 4)(N_c - (1 + C^2) N_h / (2C))``.

    Returns ``(0, False)`` below the validity cutoff.
    """
    C = omega_h / omega_c
    excess = N_c - (1.0 + C * C) * N_h / (2.0 * C)
    if excess <= 0:
        return 0.0, False
    return 0.25 * gamma * omega_c * excess, True


def refrigerator_performance(spec: CycleSpec) -> RefrigeratorPerformance:
    """COP, simulated cooling rate, optimal frictionless and sudden-limit cooling rates."""
    if spec.order != "refrigerator":
        raise ValueError("spec must use refrigerator ordering")
    rep = report(spec)
    Nh = _n(spec.omega_h, spec.hot_bath.temperature)
    Nc = _n(spec.omega_c, spec.cold_bath.temperature)
    gamma = spec.cold_bath.conductance
    tau_adi = spec.expansion.duration + spec.compression.duration
    rc_opt, z = optimal_cooling_rate(gamma, tau_adi, spec.omega_c, Nc, Nh)
    rs, ok = sudden_cooling_rate(gamma, spec.omega_c, spec.omega_h, Nc, Nh)
    return RefrigeratorPerformance(
        spec.omega_c / (spec.omega_h - spec.omega_c), rep.cooling_rate, rc_opt, z, rs, ok
    )


# ------------------------------------------------------------ third law


@dataclass(frozen=True)
class ThirdLawResult:
    scheme: str
    T_c: np.ndarray
    cooling_rate: np.ndarray
    tau_adi: np.ndarray
    slope: float
    alpha: float
    zeta: float | None


def thirdlaw_scan(
    scheme: str,
    T_c_grid,
    omega_h: float = 100.0,
    T_h: float = 5.0,
    gamma: float = 100.0,
    eta_cv: float | None = None,
) -> ThirdLawResult:
    """Fit ``R_c ~ T_c^(1 + alpha)`` with ``w_c = T_c``.

    At each grid point the adiabats are the fastest frictionless schedules of
    the chosen scheme (``constmu``: ell = 1 constant mu; ``optimal``:
    bang-bang between ``w_c`` and ``w_h``), the isochore times are optimized
    and the cooling rate is read from the simulated limit cycle.
    ``zeta = 1 + alpha - eta_cv`` when a bath heat-capacity exponent is given.
    """
    if scheme not in ("constmu", "optimal"):
        raise ValueError(f"unknown scheme {scheme!r}")
    Tc = np.asarray(T_c_grid, dtype=float)
    if Tc.ndim != 1 or Tc.size < 2 or np.unique(Tc).size < 2:
        raise ValueError("fit degeneracy: need at least two distinct T_c values")
    rates, taus = [], []
    for T in Tc:
        wc = float(T)
        if scheme == "constmu":
            exp_p = frictionless_constmu(omega_h, wc, 1)
            com_p = frictionless_constmu(wc, omega_h, 1)
        else:
            exp_p = bang_bang(omega_h, wc, wc, omega_h)
            com_p = bang_bang(wc, omega_h, wc, omega_h)
        tau_adi = exp_p.duration + com_p.duration
        tau_h, tau_c = optimal_time_allocation(gamma, gamma, tau_adi)
        spec = CycleSpec(
            BathSpec(T_h, gamma), BathSpec(wc, gamma), omega_h, wc, tau_h, tau_c,
            exp_p, com_p, order="refrigerator",
        )
        rates.append(report(spec).cooling_rate)
        taus.append(tau_adi)
    R = np.asarray(rates)
    if np.any(~np.isfinite(R)) or np.any(R <= 0):
        raise ValueError("fit degeneracy: non-positive cooling rate on the grid")
    slope = float(np.polyfit(np.log(Tc), np.log(R), 1)[0])
    alpha = slope - 1.0
    zeta = None if eta_cv is None else 1.0 + alpha - eta_cv
    return ThirdLawResult(scheme, Tc, R, np.asarray(taus), slope, alpha, zeta)
