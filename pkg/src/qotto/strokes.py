"""Stroke propagators as affine maps on ``(<H>, <L>, <C>, 1)``.

Conventions
-----------
* Maps act on column vectors; ``A @ B`` applies ``B`` first.
* Adiabat equations of motion (``a = w'/w``)::

      dH/dt =  a (H - L)
      dL/dt = -a (H - L) - 2 w C
      dC/dt =  2 w L + a C

* Isochore: ``dH/dt = -Gamma (H - H_eq)`` with ``H_eq = (w/2) coth(w/2T)``
  and a damped rotation of ``(L, C)`` at angular rate ``2 w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .protocols import BangBang, Jump, Protocol, Smooth, constmu_duration
from .state import OscillatorState, equilibrium_energy

__all__ = [
    "AffineMap4",
    "BathSpec",
    "NoiseSpec",
    "IntegrationError",
    "EP_WINDOW",
    "isochore_generator",
    "isochore_propagator",
    "squeezed_targets",
    "squeezed_isochore_generator",
    "squeezed_isochore_propagator",
    "squeezed_stationary_state",
    "adiabat_generator",
    "constmu_theta_generator",
    "adiabat_generator_eigenvalues",
    "adiabat_constmu_propagator",
    "sudden_propagator",
    "adiabat_numeric_propagator",
    "noisy_adiabat_generator",
    "noisy_adiabat_propagator",
    "magnus_reference",
    "magnus_F",
    "magnus_beta",
    "delta_f",
    "q_star",
    "heat_flux",
]

# |4 - mu^2| below this uses the series expansion around the exceptional point
EP_WINDOW = 1e-6


class IntegrationError(RuntimeError):
    """The adaptive integrator failed; ``t_fail`` is the last time reached."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (at t={t_fail!r})")
        self.t_fail = t_fail


@dataclass(frozen=True)
class AffineMap4:
    """A 4x4 matrix with last row ``(0, 0, 0, 1)`` plus bookkeeping."""

    matrix: np.ndarray
    omega_in: float
    omega_out: float
    duration: float = 0.0

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("matrix must be 4x4")
        if not np.allclose(m[3], [0, 0, 0, 1], atol=0, rtol=0):
            raise ValueError(f"last row must be (0, 0, 0, 1), got {m[3]}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, omega: float) -> "AffineMap4":
        return cls(np.eye(4), omega, omega, 0.0)

    @property
    def homogeneous(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def affine(self) -> np.ndarray:
        return self.matrix[:3, 3]

    def __matmul__(self, other: "AffineMap4") -> "AffineMap4":
        if not isinstance(other, AffineMap4):
            return NotImplemented
        if not np.isclose(other.omega_out, self.omega_in, rtol=1e-12, atol=0):
            raise ValueError(
                f"frequency mismatch in composition: {other.omega_out!r} -> {self.omega_in!r}"
            )
        m = self.matrix @ other.matrix
        m[3] = (0.0, 0.0, 0.0, 1.0)
        return AffineMap4(m, other.omega_in, self.omega_out, other.duration + self.duration)

    def apply(self, s: OscillatorState) -> OscillatorState:
        if not np.isclose(s.frequency, self.omega_in, rtol=1e-12, atol=0):
            raise ValueError(f"state at w={s.frequency!r} fed to map expecting {self.omega_in!r}")
        return OscillatorState.from_vector(self.matrix @ s.as_vector(), self.omega_out)


@dataclass(frozen=True)
class BathSpec:
    """Heat bath with conductance ``Gamma = k_down - k_up`` and optional squeezing."""

    temperature: float
    conductance: float
    squeezing: float = 0.0

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not self.conductance > 0:
            raise ValueError("conductance must be > 0")
        if self.squeezing < 0:
            raise ValueError("squeezing must be >= 0")

    def boltzmann(self, omega: float) -> float:
        return 0.0 if self.temperature == 0 else float(np.exp(-omega / self.temperature))

    def k_down(self, omega: float) -> float:
        return self.conductance / (1.0 - self.boltzmann(omega))

    def k_up(self, omega: float) -> float:
        return self.k_down(omega) * self.boltzmann(omega)

    def equilibrium_energy(self, omega: float) -> float:
        return equilibrium_energy(omega, self.temperature)


@dataclass(frozen=True)
class NoiseSpec:
    """Amplitude (``gamma_a``) and phase (``gamma_p``) control-noise strengths."""

    gamma_a: float = 0.0
    gamma_p: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma_a < 0 or self.gamma_p < 0:
            raise ValueError("noise strengths must be >= 0")

    @property
    def is_zero(self) -> bool:
        return self.gamma_a == 0 and self.gamma_p == 0


# ------------------------------------------------------------------ isochores


def isochore_generator(bath: BathSpec, omega: float) -> np.ndarray:
    G = bath.conductance
    return np.array(
        [
            [-G, 0.0, 0.0, G * bath.equilibrium_energy(omega)],
            [0.0, -G, -2.0 * omega, 0.0],
            [0.0, 2.0 * omega, -G, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ]
    )


def isochore_propagator(bath: BathSpec, omega: float, tau: float) -> AffineMap4:
    """Closed-form thermalization map at fixed ``omega`` for time ``tau``."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if bath.squeezing > 0:
        return squeezed_isochore_propagator(bath, omega, tau)
    R = np.exp(-bath.conductance * tau)
    c, s = np.cos(2.0 * omega * tau), np.sin(2.0 * omega * tau)
    m = np.array(
        [
            [R, 0.0, 0.0, bath.equilibrium_energy(omega) * (1.0 - R)],
            [0.0, R * c, -R * s, 0.0],
            [0.0, R * s, R * c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return AffineMap4(m, omega, omega, tau)


def squeezed_targets(bath: BathSpec, omega: float) -> tuple[float, float]:
    """``(<H>_sq, <C>_sq)`` toward which the squeezed dissipator relaxes.

    With ``s = a cosh(r) + i a^dag sinh(r)`` the bath relaxes every quadratic
    moment to the ``s``-thermal values, giving ``<H>_sq = cosh(2r) H_eq`` and
    ``<C>_sq = -sinh(2r) H_eq`` (``<L>_sq = 0``).
    """
    r = bath.squeezing
    Heq = bath.equilibrium_energy(omega)
    return float(np.cosh(2 * r) * Heq), float(-np.sinh(2 * r) * Heq)


def squeezed_isochore_generator(bath: BathSpec, omega: float) -> np.ndarray:
    G = bath.conductance
    Hsq, Csq = squeezed_targets(bath, omega)
    return np.array(
        [
            [-G, 0.0, 0.0, G * Hsq],
            [0.0, -G, -2.0 * omega, 0.0],
            [0.0, 2.0 * omega, -G, G * Csq],
            [0.0, 0.0, 0.0, 0.0],
        ]
    )


def squeezed_isochore_propagator(bath: BathSpec, omega: float, tau: float) -> AffineMap4:
    if tau < 0:
        raise ValueError("tau must be >= 0")
    m = expm(squeezed_isochore_generator(bath, omega) * tau)
    m[3] = (0.0, 0.0, 0.0, 1.0)
    return AffineMap4(m, omega, omega, tau)


def squeezed_stationary_state(bath: BathSpec, omega: float) -> OscillatorState:
    """Fixed point of the squeezed isochore generator."""
    A = squeezed_isochore_generator(bath, omega)
    v = np.linalg.solve(A[:3, :3], -A[:3, 3])
    return OscillatorState.from_vector(v, omega)


# ------------------------------------------------------------------- adiabats


def adiabat_generator(omega: float, omega_dot: float) -> np.ndarray:
    """Homogeneous 3x3 generator in physical time."""
    a = omega_dot / omega
    return np.array([[a, -a, 0.0], [-a, a, -2.0 * omega], [0.0, 2.0 * omega, a]])


def constmu_theta_generator(mu: float) -> np.ndarray:
    """Generator in ``theta = int w dt`` for constant ``mu``."""
    return np.array([[mu, -mu, 0.0], [-mu, mu, -2.0], [0.0, 2.0, mu]])


def adiabat_generator_eigenvalues(mu: float) -> np.ndarray:
    """Eigenvalues of the traceless part: ``0, +-i sqrt(4 - mu^2)``.

    The full generator adds ``mu`` to each. Returned in the order
    ``(0, +i Omega, -i Omega)`` below the exceptional point and
    ``(0, +k, -k)``, ``k = sqrt(mu^2 - 4)``, beyond it.
    """
    Om = np.sqrt(complex(mu * mu - 4.0))
    return np.array([0.0, Om, -Om])


def _f12(Om2: float, theta: float) -> tuple[float, float]:
    """``f1 = sin(Om th)/Om`` and ``f2 = (1 - cos(Om th))/Om^2`` for any sign of ``Om2``."""
    if abs(Om2) < EP_WINDOW:
        # series in Om2; the first neglected term is O(Om2^4 theta^9)
        t2 = theta * theta
        z = Om2 * t2
        f1 = theta * (1 - z / 6 + z * z / 120 - z**3 / 5040 + z**4 / 362880)
        f2 = t2 * (0.5 - z / 24 + z * z / 720 - z**3 / 40320 + z**4 / 3628800)
        return f1, f2
    if Om2 > 0:
        Om = np.sqrt(Om2)
        return np.sin(Om * theta) / Om, (1 - np.cos(Om * theta)) / Om2
    k = np.sqrt(-Om2)
    return np.sinh(k * theta) / k, (np.cosh(k * theta) - 1) / (-Om2)


def adiabat_constmu_propagator(omega_i: float, omega_f: float, mu: float) -> AffineMap4:
    """Analytic constant-``mu`` stroke map.

    ``U = (w_f/w_i) expm(A1 theta)`` with ``theta = ln(w_f/w_i)/mu`` and
    ``A1`` the traceless generator; evaluated as ``I + f1 A1 + f2 A1^2``.
    """
    if omega_i <= 0 or omega_f <= 0:
        raise ValueError("frequencies must be positive")
    if omega_i == omega_f:
        return AffineMap4.identity(omega_i)
    tau = constmu_duration(omega_i, omega_f, mu)
    theta = np.log(omega_f / omega_i) / mu
    A1 = constmu_theta_generator(mu) - mu * np.eye(3)
    f1, f2 = _f12(4.0 - mu * mu, theta)
    U = np.eye(3) + f1 * A1 + f2 * (A1 @ A1)
    m = np.eye(4)
    m[:3, :3] = (omega_f / omega_i) * U
    return AffineMap4(m, omega_i, omega_f, tau)


def sudden_propagator(omega_i: float, omega_f: float) -> AffineMap4:
    """Instantaneous frequency jump.

    ``Q`` and ``P`` are unchanged, so ``(H, L)`` mix with ``alpha = (w_f/w_i)^2``
    and ``C = w D`` rescales by ``w_f/w_i``.
    """
    if omega_i <= 0 or omega_f <= 0:
        raise ValueError("frequencies must be positive")
    al = (omega_f / omega_i) ** 2
    m = np.eye(4)
    m[0, 0] = m[1, 1] = 0.5 * (1 + al)
    m[0, 1] = m[1, 0] = 0.5 * (1 - al)
    m[2, 2] = omega_f / omega_i
    return AffineMap4(m, omega_i, omega_f, 0.0)


def _noise_matrix(omega: float, noise: NoiseSpec) -> np.ndarray:
    # -gamma_a w^2 [B,[B,.]] with B = w Q^2/2 adds gamma_a w^2 (H - L) to the H and L rows;
    # -gamma_p [H,[H,.]] damps L and C at rate 4 gamma_p w^2.
    ga = noise.gamma_a * omega * omega
    gp = 4.0 * noise.gamma_p * omega * omega
    return np.array([[ga, -ga, 0.0], [ga, -ga - gp, 0.0], [0.0, 0.0, -gp]])


def noisy_adiabat_generator(p: Protocol, noise: NoiseSpec) -> Callable[[float], np.ndarray]:
    """Time-dependent 4x4 generator of the (possibly noisy) adiabat."""

    def gen(t: float) -> np.ndarray:
        w = p.omega(t)
        g = np.zeros((4, 4))
        g[:3, :3] = adiabat_generator(w, p.omega_dot(t)) + _noise_matrix(w, noise)
        return g

    return gen


def _integrate_block(
    gen3: Callable[[float], np.ndarray], t0: float, t1: float, tol: float
) -> np.ndarray:
    def rhs(t, y):
        return (gen3(t) @ y.reshape(3, 3)).ravel()

    sol = solve_ivp(rhs, (t0, t1), np.eye(3).ravel(), method="DOP853", rtol=tol, atol=tol * 1e-3)
    if not sol.success:
        raise IntegrationError(sol.message, float(sol.t[-1]) if sol.t.size else t0)
    return sol.y[:, -1].reshape(3, 3)


def _moment_map(S: np.ndarray, omega_i: float, omega_f: float) -> np.ndarray:
    """3x3 (H, L, C) map induced by the linear phase-space map ``(Q, P) -> S (Q, P)``."""
    (a, b), (c, d) = S
    # second moments (Q^2, P^2, D), D = <QP + PQ>/2
    K = np.array([
        [a * a, b * b, 2 * a * b],
        [c * c, d * d, 2 * c * d],
        [a * c, b * d, a * d + b * c],
    ])
    wi2, wf2 = omega_i**2, omega_f**2
    to_mom = np.array([[1 / wi2, -1 / wi2, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1 / omega_i]])
    to_hlc = np.array([[0.5 * wf2, 0.5, 0.0], [-0.5 * wf2, 0.5, 0.0], [0.0, 0.0, omega_f]])
    return to_hlc @ K @ to_mom


def _bangbang_propagator(p: BangBang) -> AffineMap4:
    # compose in (Q, P): jumps are the identity there, holds are rotations.
    # Avoids the w_max^2/w_min^2 amplification of composing jump maps in (H, L, C).
    S = np.eye(2)
    for w, h in p.holds:
        c, s = np.cos(w * h), np.sin(w * h)
        S = np.array([[c, s / w], [-w * s, c]]) @ S
    m = np.eye(4)
    m[:3, :3] = _moment_map(S, p.omega_start, p.omega_end)
    return AffineMap4(m, p.omega_start, p.omega_end, p.duration)


def noisy_adiabat_propagator(p: Protocol, noise: NoiseSpec | None = None, tol: float = 1e-9) -> AffineMap4:
    """Integrate the homogeneous stroke map, handling jumps exactly."""
    noise = noise or NoiseSpec()
    if isinstance(p, BangBang) and noise.is_zero:
        return _bangbang_propagator(p)
    M = np.eye(3)
    for pc in p.pieces():
        if isinstance(pc, Jump):
            M = sudden_propagator(pc.omega_from, pc.omega_to).homogeneous @ M
        elif isinstance(pc, Smooth):
            if pc.t1 <= pc.t0:
                continue
            if isinstance(p, BangBang):
                w = p.omega(0.5 * (pc.t0 + pc.t1))
                step = expm((adiabat_generator(w, 0.0) + _noise_matrix(w, noise)) * (pc.t1 - pc.t0))
            else:
                step = _integrate_block(
                    lambda t: adiabat_generator(p.omega(t), p.omega_dot(t)) + _noise_matrix(p.omega(t), noise),
                    pc.t0,
                    pc.t1,
                    tol,
                )
            M = step @ M
    m = np.eye(4)
    m[:3, :3] = M
    return AffineMap4(m, p.omega_start, p.omega_end, p.duration)


def adiabat_numeric_propagator(p: Protocol, tol: float = 1e-9) -> AffineMap4:
    """Noise-free numeric stroke map for an arbitrary protocol."""
    return noisy_adiabat_propagator(p, None, tol)


# -------------------------------------------------------------- Magnus forms


def magnus_F(omega0: float, mu: float, ell: int) -> float:
    """Printed amplitude-noise factor with the exponent read as ``2 pi ell mu / Omega``.

    Returned with the sign normalized to ``|w_f/w_i - 1| * 16 w0/(16 - 3 mu^2)``;
    ``exp(2 pi ell mu / Omega) = w_f/w_i`` along a frictionless stroke.
    """
    Om = np.sqrt(4.0 - mu * mu)
    return float(16.0 * omega0 / (16.0 - 3.0 * mu * mu) * abs(np.expm1(2.0 * np.pi * ell * mu / Om)))


def magnus_beta(omega0: float, mu: float, ell: int, gamma_p: float) -> float:
    """Printed second-order phase-noise mixing angle, same exponent reading."""
    Om = np.sqrt(4.0 - mu * mu)
    return float(16.0 * omega0**2 * gamma_p**2 / (4.0 + 3.0 * mu * mu) * abs(np.expm1(2.0 * np.pi * ell * mu / Om)))


def magnus_reference(kind: str, *, gamma: float, omega0: float, mu: float, ell: int = 1) -> AffineMap4:
    """Closed-form noise propagators from the Magnus expansion.

    ``kind="amplitude"``: diagonal ``(e^{g F/mu}, e^{-g F/2mu}, e^{-g F/2mu})``
    with ``|mu|`` in the exponent so that the energy is amplified.
    ``kind="phase"``: the second-order ``cosh/-sinh`` mixing of ``H`` and ``L``.
    ``kind="phase_b1"``: the printed first-order phase-noise matrix.
    The maps are noise corrections in the interaction frame (``omega_in =
    omega_out = omega0``).
    """
    m = np.eye(4)
    if kind == "amplitude":
        F = magnus_F(omega0, mu, ell)
        k = gamma * F / abs(mu)
        m[0, 0] = np.exp(k)
        m[1, 1] = m[2, 2] = np.exp(-0.5 * k)
    elif kind == "phase":
        b = magnus_beta(omega0, mu, ell, gamma)
        m[0, 0] = m[1, 1] = np.cosh(b)
        m[0, 1] = m[1, 0] = -np.sinh(b)
    elif kind == "phase_b1":
        e = np.exp(8 * np.pi * gamma * omega0)
        m[0, 2] = (1 - e) * mu / 2
        m[2, 0] = (e - 1) * mu / 2
        m[1, 1] = m[2, 2] = e * (1 - 4 * np.pi**2 * mu * gamma * omega0)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return AffineMap4(m, omega0, omega0, 0.0)


# ------------------------------------------------------------- diagnostics


def delta_f(m: AffineMap4) -> float:
    """Fractional extra energy ``(w_i/w_f) U[0,0] - 1`` of an adiabat map."""
    r = m.omega_out / m.omega_in
    return float(m.matrix[0, 0] / r - 1.0)


def q_star(p: Protocol, tol: float = 1e-11) -> float:
    """Adiabaticity measure from the classical parametric oscillator.

    Integrates ``X'' + w(t)^2 X = 0`` for ``(X, X') = (0, 1)`` and ``(1, 0)``
    across smooth pieces (``X`` and ``X'`` are continuous at jumps) and returns
    ``(w_i^2 (w_f^2 X^2 + X'^2) + w_f^2 Y^2 + Y'^2) / (2 w_i w_f)``.
    """
    y = np.array([0.0, 1.0, 1.0, 0.0])
    for pc in p.pieces():
        if not isinstance(pc, Smooth) or pc.t1 <= pc.t0:
            continue

        def rhs(t, u):
            w2 = p.omega(t) ** 2
            return np.array([u[1], -w2 * u[0], u[3], -w2 * u[2]])

        sol = solve_ivp(rhs, (pc.t0, pc.t1), y, method="DOP853", rtol=tol, atol=tol * 1e-2)
        if not sol.success:
            raise IntegrationError(sol.message, float(sol.t[-1]))
        y = sol.y[:, -1]
    X, Xd, Y, Yd = y
    wi, wf = p.omega_start, p.omega_end
    return float((wi**2 * (wf**2 * X**2 + Xd**2) + wf**2 * Y**2 + Yd**2) / (2.0 * wi * wf))


def heat_flux(bath: BathSpec, s: OscillatorState) -> float:
    """``-Gamma (<H> - <H>_eq)``."""
    return float(-bath.conductance * (s.energy - bath.equilibrium_energy(s.frequency)))
