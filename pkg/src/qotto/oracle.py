"""Brute-force truncated Fock-space oracle.

Position and momentum matrices are built once in the number basis of a
reference frequency ``omega_ref``; every ``H(w) = P^2/2 + w^2 Q^2/2`` is
formed from them, so a sudden frequency jump leaves ``rho`` untouched.
Quadratic operators are computed in a space two levels larger and then
cropped, which keeps their matrix elements exact inside the truncation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from .protocols import Jump, Protocol, Smooth
from .state import OscillatorState
from .strokes import BathSpec, NoiseSpec

__all__ = [
    "FockSpace",
    "TruncationError",
    "TruncationWarning",
    "thermal_state",
    "expectations",
    "evolve_lindblad",
    "evolve_protocol",
    "tail_population",
    "trace_distance",
    "purity",
    "vn_entropy_rho",
    "energy_variance_rho",
    "check_density",
    "oracle_limit_cycle",
    "STROKE_KINDS",
    "SuiteRecord",
    "run_oracle_suite",
]


class TruncationError(RuntimeError):
    """Positivity lost beyond tolerance: the Fock space is too small."""


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FockSpace:
    dim: int = 64
    omega_ref: float = 1.0
    Q: np.ndarray = field(init=False, repr=False, compare=False)
    P: np.ndarray = field(init=False, repr=False, compare=False)
    Q2: np.ndarray = field(init=False, repr=False, compare=False)
    P2: np.ndarray = field(init=False, repr=False, compare=False)
    D: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.dim < 8:
            raise ValueError("dim must be >= 8")
        if self.dim > 256:
            raise ValueError("dense oracle limited to dim <= 256")
        n = self.dim + 2
        a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
        w = self.omega_ref
        Q = (a + a.conj().T) / np.sqrt(2 * w)
        P = 1j * (a.conj().T - a) * np.sqrt(w / 2)
        d = self.dim
        object.__setattr__(self, "Q", Q[:d, :d].copy())
        object.__setattr__(self, "P", P[:d, :d].copy())
        object.__setattr__(self, "Q2", (Q @ Q)[:d, :d].copy())
        object.__setattr__(self, "P2", (P @ P)[:d, :d].copy())
        object.__setattr__(self, "D", (0.5 * (Q @ P + P @ Q))[:d, :d].copy())

    def H(self, w: float) -> np.ndarray:
        return 0.5 * self.P2 + 0.5 * w * w * self.Q2

    def L(self, w: float) -> np.ndarray:
        return 0.5 * self.P2 - 0.5 * w * w * self.Q2

    def C(self, w: float) -> np.ndarray:
        return w * self.D

    def a(self, w: float) -> np.ndarray:
        """Annihilation operator of frequency ``w`` in the fixed basis."""
        return np.sqrt(w / 2) * self.Q + 1j * self.P / np.sqrt(2 * w)

    def eigh(self, w: float) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.H(w))


def thermal_state(space: FockSpace, omega: float, T: float) -> np.ndarray:
    """Gibbs state of the truncated ``H(omega)``; ground projector at ``T = 0``."""
    e, V = space.eigh(omega)
    if T == 0:
        p = np.zeros_like(e)
        p[0] = 1.0
    else:
        x = -(e - e[0]) / T
        p = np.exp(np.maximum(x, -745.0))
        p /= p.sum()
    rho = (V * p) @ V.conj().T
    if tail_population(rho) > 1e-8:
        warnings.warn("thermal state has tail population > 1e-8", TruncationWarning, stacklevel=2)
    return rho


def expectations(space: FockSpace, rho: np.ndarray, omega: float) -> OscillatorState:
    ev = lambda X: float(np.real(np.trace(X @ rho)))  # noqa: E731
    return OscillatorState(ev(space.H(omega)), ev(space.L(omega)), ev(space.C(omega)), omega)


def tail_population(rho: np.ndarray) -> float:
    """Population in the top 10% of fixed-basis levels."""
    d = rho.shape[0]
    k = max(1, d // 10)
    return float(np.real(np.trace(rho[d - k :, d - k :])))


def trace_distance(r1: np.ndarray, r2: np.ndarray) -> float:
    return float(0.5 * np.abs(np.linalg.eigvalsh(r1 - r2)).sum())


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def vn_entropy_rho(rho: np.ndarray) -> float:
    p = np.linalg.eigvalsh(rho)
    p = p[p > 1e-300]
    return float(-(p * np.log(p)).sum())


def energy_variance_rho(space: FockSpace, rho: np.ndarray, omega: float) -> float:
    H = space.H(omega)
    return float(np.real(np.trace(H @ H @ rho) - np.trace(H @ rho) ** 2))


def check_density(rho: np.ndarray, pos_tol: float = 1e-8) -> None:
    """Raise :class:`TruncationError` when positivity is lost beyond ``pos_tol``."""
    ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if ev[0] < -pos_tol:
        raise TruncationError(f"negative eigenvalue {ev[0]:.3e}: increase dim")


# ---------------------------------------------------------- Liouvillians


def _spre(A):
    return sp.kron(sp.csr_matrix(A), sp.identity(A.shape[0]), format="csr")


def _spost(A):
    # row-major vec: vec(rho A) = (I kron A^T) vec(rho)
    return sp.kron(sp.identity(A.shape[0]), sp.csr_matrix(A.T), format="csr")


def _sparse(A: np.ndarray) -> sp.csr_matrix:
    A = A.copy()
    A[np.abs(A) < 1e-14] = 0.0
    return sp.csr_matrix(A)


def _dissipator(J: np.ndarray, rate: float):
    Js = _sparse(J)
    JdJ = _sparse(J.conj().T @ J)
    return rate * (_spre(Js) @ _spost(_sparse(J.conj().T)) - 0.5 * _spre(JdJ) - 0.5 * _spost(JdJ))


def _double_comm(B: np.ndarray, rate: float):
    # -rate [B, [B, rho]]
    Bs = _sparse(B)
    lb, rb = _spre(Bs), _spost(Bs)
    comm = lb - rb
    return -rate * (comm @ comm)


def _liouvillian(space: FockSpace, omega: float, bath: BathSpec | None, noise: NoiseSpec | None):
    H = _sparse(space.H(omega))
    Lv = -1j * (_spre(H) - _spost(H))
    if bath is not None:
        a = space.a(omega)
        if bath.squeezing > 0:
            r = bath.squeezing
            J = a * np.cosh(r) + 1j * a.conj().T * np.sinh(r)
        else:
            J = a
        Lv = Lv + _dissipator(J, bath.k_down(omega))
        if bath.k_up(omega) > 0:
            Lv = Lv + _dissipator(J.conj().T, bath.k_up(omega))
    if noise is not None and not noise.is_zero:
        Lv = Lv + _noise_liouvillian(space, omega, noise)
    return Lv.tocsr()


def _noise_liouvillian(space: FockSpace, omega: float, noise: NoiseSpec):
    out = sp.csr_matrix((space.dim**2, space.dim**2), dtype=complex)
    if noise.gamma_a > 0:
        B = 0.5 * omega * space.Q2
        out = out + _double_comm(B, noise.gamma_a * omega * omega)
    if noise.gamma_p > 0:
        out = out + _double_comm(space.H(omega), noise.gamma_p)
    return out


def evolve_lindblad(
    space: FockSpace,
    rho: np.ndarray,
    omega: float,
    bath: BathSpec | None,
    tau: float,
    noise: NoiseSpec | None = None,
    check: bool = True,
) -> np.ndarray:
    """Propagate at fixed ``omega`` for time ``tau`` with the bath dissipator.

    Uses the exact action of the (sparse) Liouvillian exponential.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0:
        return rho.copy()
    Lv = _liouvillian(space, omega, bath, noise)
    v = expm_multiply(Lv * tau, rho.reshape(-1))
    out = v.reshape(rho.shape)
    out = 0.5 * (out + out.conj().T)
    if check:
        check_density(out)
    return out


def evolve_protocol(
    space: FockSpace,
    rho: np.ndarray,
    p: Protocol,
    noise: NoiseSpec | None = None,
    rtol: float = 1e-10,
    check: bool = True,
) -> np.ndarray:
    """Time-ordered evolution under ``H(t)`` (plus optional noise dissipators).

    Jumps act trivially in the fixed quadrature basis. Noise-free smooth
    pieces integrate the unitary ``U(t)``; noisy ones integrate ``rho``.
    """
    d = space.dim
    for pc in p.pieces():
        if isinstance(pc, Jump) or pc.t1 <= pc.t0:
            continue
        if noise is None or noise.is_zero:

            def rhs(t, y):
                w = p.omega(t)
                U = y.view(complex).reshape(d, d)
                return (-1j * (space.H(w) @ U)).reshape(-1).view(float)

            y0 = np.eye(d, dtype=complex).reshape(-1).view(float)
            sol = solve_ivp(rhs, (pc.t0, pc.t1), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-2)
            if not sol.success:
                raise RuntimeError(f"oracle unitary integration failed: {sol.message}")
            U = sol.y[:, -1].copy().view(complex).reshape(d, d)
            rho = U @ rho @ U.conj().T
        else:
            Q2 = space.Q2

            def rhs(t, y):
                w = p.omega(t)
                r = y.view(complex).reshape(d, d)
                H = space.H(w)
                out = -1j * (H @ r - r @ H)
                if noise.gamma_a > 0:
                    B = 0.5 * w * Q2
                    c1 = B @ r - r @ B
                    out -= noise.gamma_a * w * w * (B @ c1 - c1 @ B)
                if noise.gamma_p > 0:
                    c1 = H @ r - r @ H
                    out -= noise.gamma_p * (H @ c1 - c1 @ H)
                return out.reshape(-1).view(float)

            y0 = np.ascontiguousarray(rho, dtype=complex).reshape(-1).view(float)
            sol = solve_ivp(rhs, (pc.t0, pc.t1), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-2)
            if not sol.success:
                raise RuntimeError(f"oracle noisy integration failed: {sol.message}")
            rho = sol.y[:, -1].copy().view(complex).reshape(d, d)
        rho = 0.5 * (rho + rho.conj().T)
    if check:
        check_density(rho)
    return rho


def oracle_limit_cycle(
    space: FockSpace,
    rho0: np.ndarray,
    omega_h: float,
    omega_c: float,
    hot: BathSpec,
    cold: BathSpec,
    tau_h: float,
    tau_c: float,
    expansion: Protocol,
    compression: Protocol,
    periods: int = 10,
) -> tuple[np.ndarray, list[float], list[OscillatorState]]:
    """Iterate the full cycle on ``rho`` (start of the hot isochore).

    Returns the final ``rho``, the trace distances between successive period
    starts and the observables at each period start.
    """
    dists: list[float] = []
    obs: list[OscillatorState] = [expectations(space, rho0, omega_h)]
    rho = rho0
    for _ in range(periods):
        r = evolve_lindblad(space, rho, omega_h, hot, tau_h)
        r = evolve_protocol(space, r, expansion)
        r = evolve_lindblad(space, r, omega_c, cold, tau_c)
        r = evolve_protocol(space, r, compression)
        dists.append(trace_distance(r, rho))
        obs.append(expectations(space, r, omega_h))
        rho = r
    return rho, dists, obs


# ---------------------------------------------------------- comparison suite

STROKE_KINDS = ("isochore", "adiabat", "sudden", "squeezed", "noisy")


@dataclass(frozen=True)
class SuiteRecord:
    kind: str
    deviation: float
    skipped: bool
    tail: float


def _prepare(space: FockSpace, w0: float, T0: float, w: float, t0: float):
    """Thermal state at ``w0`` quenched to ``w`` and held for ``t0``: carries L and C."""
    from .protocols import BangBang
    from .state import equilibrium_state
    from .strokes import noisy_adiabat_propagator

    prep = BangBang(w0, w, t0, holds=((w, t0),))
    rho = evolve_protocol(space, thermal_state(space, w0, T0), prep, check=False)
    s = noisy_adiabat_propagator(prep).apply(equilibrium_state(w0, T0))
    return rho, s


def run_oracle_suite(
    seed: int = 0,
    draws: int = 50,
    dim: int = 64,
    tail_limit: float = 1e-8,
    kinds: tuple[str, ...] = STROKE_KINDS,
    hot_T: float | None = None,
) -> list[SuiteRecord]:
    """Random strokes propagated by the algebra and by the oracle.

    Draws cycle through ``kinds``. The deviation is the largest absolute
    difference of ``(E, L, C)`` at the stroke end. Runs whose initial or final
    tail population exceeds ``tail_limit`` are marked skipped. ``hot_T``
    overrides the bath temperature of the isochore draws.
    """
    from .protocols import constant_mu, linear_ramp, sudden
    from .strokes import (
        isochore_propagator,
        noisy_adiabat_propagator,
        adiabat_constmu_propagator,
        sudden_propagator,
    )

    rng = np.random.default_rng(seed)
    space = FockSpace(dim, 1.0)
    out: list[SuiteRecord] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for k in range(draws):
            kind = kinds[k % len(kinds)]
            w0, w = rng.uniform(0.7, 1.4, size=2)
            T0 = rng.uniform(0.1, 0.8)
            rho, s = _prepare(space, w0, T0, w, rng.uniform(0.0, 2.0))
            tail = tail_population(rho)
            if kind in ("isochore", "squeezed"):
                T = hot_T if hot_T is not None else rng.uniform(0.0, 0.8)
                r = rng.uniform(0.05, 0.3) if kind == "squeezed" else 0.0
                bath = BathSpec(T, rng.uniform(0.2, 1.5), r)
                tau = rng.uniform(0.1, 3.0)
                s1 = isochore_propagator(bath, w, tau).apply(s)
                rho1 = evolve_lindblad(space, rho, w, bath, tau, check=False)
                w1 = w
            elif kind == "adiabat":
                w1 = w * rng.uniform(0.6, 1.6)
                mu = abs(rng.uniform(0.05, 3.0)) * (1 if w1 > w else -1)
                s1 = adiabat_constmu_propagator(w, w1, mu).apply(s)
                rho1 = evolve_protocol(space, rho, constant_mu(w, w1, mu), check=False)
            elif kind == "sudden":
                w1 = w * rng.uniform(0.6, 1.6)
                s1 = sudden_propagator(w, w1).apply(s)
                rho1 = evolve_protocol(space, rho, sudden(w, w1), check=False)
            elif kind == "noisy":
                w1 = w * rng.uniform(0.7, 1.4)
                p = linear_ramp(w, w1, rng.uniform(0.3, 1.5))
                noise = NoiseSpec(rng.uniform(0.0, 0.05), rng.uniform(0.0, 0.05))
                s1 = noisy_adiabat_propagator(p, noise, tol=1e-11).apply(s)
                rho1 = evolve_protocol(space, rho, p, noise, check=False)
            else:
                raise ValueError(f"unknown stroke kind {kind!r}")
            tail = max(tail, tail_population(rho1))
            o = expectations(space, rho1, w1)
            dev = max(abs(o.energy - s1.energy), abs(o.lagrangian - s1.lagrangian), abs(o.correlation - s1.correlation))
            out.append(SuiteRecord(kind, float(dev), tail > tail_limit, float(tail)))
    return out
