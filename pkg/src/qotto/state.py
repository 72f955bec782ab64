"""Working-medium state on the closed quadratic observable algebra.

A Gaussian, zero-mean oscillator state is fully described by the expectations
of the Hamiltonian ``H = P^2/2 + w^2 Q^2/2``, the Lagrangian
``L = P^2/2 - w^2 Q^2/2`` and the position-momentum correlation
``C = w (QP + PQ)/2`` together with the current frequency ``w``.
Units: hbar = k_B = m = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "OscillatorState",
    "GibbsParams",
    "DerivedObservables",
    "UnphysicalStateError",
    "CASIMIR_MIN",
    "CASIMIR_CLAMP",
    "equilibrium_energy",
    "equilibrium_number",
    "equilibrium_state",
    "casimir_companion",
    "check_physical",
    "coherence_measure",
    "internal_temperature",
    "bose_entropy",
    "energy_entropy",
    "vn_entropy",
    "vn_entropy_casimir_form",
    "entropies",
    "derived_observables",
    "energy_variance",
    "gibbs_params",
    "gibbs_expectations",
    "gibbs_roundtrip",
]

CASIMIR_MIN = 0.25
# states within this distance below the bound are clamped, not rejected
CASIMIR_CLAMP = 1e-9


class UnphysicalStateError(ValueError):
    """Raised when (E, L, C) violate the uncertainty bound X >= 1/4."""


@dataclass(frozen=True)
class OscillatorState:
    """Expectation values (<H>, <L>, <C>) at frequency ``frequency``."""

    energy: float
    lagrangian: float
    correlation: float
    frequency: float

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise ValueError(f"frequency must be positive, got {self.frequency!r}")

    def as_vector(self) -> np.ndarray:
        """Homogeneous coordinates ``(H, L, C, 1)``."""
        return np.array([self.energy, self.lagrangian, self.correlation, 1.0])

    @classmethod
    def from_vector(cls, v, frequency: float) -> "OscillatorState":
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]), float(frequency))

    @property
    def number(self) -> float:
        """N = <H>/w (zero-point half included)."""
        return self.energy / self.frequency


@dataclass(frozen=True)
class GibbsParams:
    """Parameters of the product-form generalized Gibbs state.

    ``rho = exp(gamma a^2) exp(-beta H) exp(gamma* a^dag^2) / Z``.
    """

    beta: float
    gamma_re: float
    gamma_im: float
    partition: float

    @property
    def gamma(self) -> complex:
        return complex(self.gamma_re, self.gamma_im)


@dataclass(frozen=True)
class DerivedObservables:
    number: float
    casimir: float
    coherence: float
    internal_temperature: float
    s_energy: float
    s_vn: float
    rel_coherence: float


def _check_frequency(omega: float) -> None:
    if not omega > 0:
        raise ValueError(f"frequency must be positive, got {omega!r}")


def equilibrium_energy(omega: float, T: float) -> float:
    """Thermal energy ``(w/2) coth(w/2T)``; ``w/2`` at ``T = 0``."""
    _check_frequency(omega)
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T!r}")
    if T == 0:
        return 0.5 * omega
    x = omega / T
    # coth(x/2)/2 = 1/2 + 1/(e^x - 1), stable for large x
    return omega * (0.5 + 1.0 / np.expm1(x)) if x < 700 else 0.5 * omega


def equilibrium_number(omega: float, T: float) -> float:
    """``N_eq = E_eq / w`` including the zero-point half."""
    return equilibrium_energy(omega, T) / omega


def equilibrium_state(omega: float, T: float) -> OscillatorState:
    return OscillatorState(equilibrium_energy(omega, T), 0.0, 0.0, omega)


def casimir_companion(s: OscillatorState) -> float:
    """``X = (E^2 - L^2 - C^2)/w^2``; no physicality check (see :func:`check_physical`)."""
    w = s.frequency
    return (s.energy**2 - s.lagrangian**2 - s.correlation**2) / w**2


def check_physical(s: OscillatorState) -> float:
    """Return the (clamped) Casimir companion or raise if the state is unphysical."""
    X = casimir_companion(s)
    if X < CASIMIR_MIN - CASIMIR_CLAMP or s.energy < 0:
        raise UnphysicalStateError(
            f"Casimir companion {X:.12g} below 1/4 for state {s}"
        )
    return max(X, CASIMIR_MIN)


def coherence_measure(s: OscillatorState) -> float:
    """``Co = sqrt(L^2 + C^2)/w``."""
    return float(np.hypot(s.lagrangian, s.correlation) / s.frequency)


def internal_temperature(s: OscillatorState) -> float:
    """Invert ``E = (w/2) coth(w/2T)``.

    Returns 0 at (or numerically at) the ground-state energy and raises
    :class:`UnphysicalStateError` below it.
    """
    w, E = s.frequency, s.energy
    if E < 0.5 * w * (1 - 1e-12):
        raise UnphysicalStateError(f"energy {E!r} below ground state {0.5 * w!r}")
    if E <= 0.5 * w:
        return 0.0
    return float(w / (2.0 * np.arctanh(0.5 * w / E)))


def bose_entropy(n: float) -> float:
    """``(n+1) ln(n+1) - n ln n`` for a mean excitation number ``n >= 0``."""
    if n < 0:
        if n > -1e-12:
            n = 0.0
        else:
            raise UnphysicalStateError(f"negative occupation {n!r}")
    if n == 0:
        return 0.0
    return float((n + 1) * np.log1p(n) - n * np.log(n))


def energy_entropy(energy: float, omega: float) -> float:
    """Entropy of the energy measurement; equals the thermal entropy at that energy."""
    return bose_entropy(energy / omega - 0.5)


def vn_entropy(s: OscillatorState) -> float:
    """von Neumann entropy from the symplectic eigenvalue ``nu = 2 sqrt(X)``."""
    X = check_physical(s)
    nu = 2.0 * np.sqrt(X)
    return bose_entropy(0.5 * (nu - 1.0))


def vn_entropy_casimir_form(s: OscillatorState) -> float:
    """Alternative closed form written in terms of the Casimir, kept as a cross-check.

    It is evaluated literally as ``ln(sqrt(G - 1/4)) + sqrt(G) asinh(sqrt(G)/(G - 1/4))``
    and does *not* agree with :func:`vn_entropy`; see the notes in the README.
    """
    G = check_physical(s)
    d = G - 0.25
    if d <= 0:
        return float("nan")
    return float(np.log(np.sqrt(d)) + np.sqrt(G) * np.arcsinh(np.sqrt(G) / d))


def entropies(s: OscillatorState) -> tuple[float, float, float]:
    """Return ``(S_E, S_VN, S_E - S_VN)``."""
    s_vn = vn_entropy(s)
    s_e = energy_entropy(s.energy, s.frequency)
    return s_e, s_vn, max(s_e - s_vn, 0.0)


def derived_observables(s: OscillatorState) -> DerivedObservables:
    s_e, s_vn, d = entropies(s)
    return DerivedObservables(
        number=s.number,
        casimir=check_physical(s),
        coherence=coherence_measure(s),
        internal_temperature=internal_temperature(s),
        s_energy=s_e,
        s_vn=s_vn,
        rel_coherence=d,
    )


def energy_variance(s: OscillatorState) -> float:
    """Exact energy variance of the zero-mean Gaussian state.

    ``Var(H) = E^2 + L^2 + C^2 - w^2/4``. For thermal states this is
    ``w^2 / (4 sinh^2(w/2T))``, which approaches ``T_int^2`` only at high
    temperature.
    """
    return s.energy**2 + s.lagrangian**2 + s.correlation**2 - 0.25 * s.frequency**2


def gibbs_params(s: OscillatorState) -> GibbsParams:
    """Invert the product-form expectations for ``beta`` and ``gamma``.

    The product form reaches exactly the states with
    ``sqrt(L^2 + C^2) < E - w/2``; strongly squeezed states outside this
    region are physical but have no such parameters.

    Raises
    ------
    UnphysicalStateError
        For pure states (``X = 1/4``) where ``beta`` is infinite, and for
        states outside the product-form domain.
    """
    X = check_physical(s)
    w, E, L, C = s.frequency, s.energy, s.lagrangian, s.correlation
    if X - CASIMIR_MIN <= 1e-12 * max(1.0, X):
        raise UnphysicalStateError("pure state: beta is infinite")
    den = L**2 + C**2 - (0.5 * w - E) ** 2
    if den >= 0:
        raise UnphysicalStateError(
            "coherence sqrt(L^2 + C^2) >= E - w/2: outside the product-form Gibbs domain"
        )
    num = L**2 + C**2 - E**2 + 0.25 * w**2
    ebw = num / den
    beta = float(np.log(ebw) / w)
    g = 0.5 * w * complex(L, C) / den
    q = (ebw - 1.0) ** 2
    Z = np.exp(0.5 * beta * w) / ((ebw - 1.0) * np.sqrt(1.0 - 4.0 * abs(g) ** 2 / q))
    return GibbsParams(beta, g.real, g.imag, float(Z))


def gibbs_expectations(p: GibbsParams, omega: float) -> OscillatorState:
    """Forward map ``(beta, gamma) -> (E, L, C)`` using ``<a^2> = (-L + iC)/w``."""
    _check_frequency(omega)
    x = np.exp(p.beta * omega)
    g2 = abs(p.gamma) ** 2
    den = (x - 1.0) ** 2 - 4.0 * g2
    if den <= 0:
        raise UnphysicalStateError("4|gamma|^2 >= (e^{beta w} - 1)^2: Z not real")
    E = omega * (x * x - 4.0 * g2 - 1.0) / (2.0 * den)
    a2 = 2.0 * np.conj(p.gamma) / den
    return OscillatorState(float(E), float(-omega * a2.real), float(omega * a2.imag), omega)


def gibbs_roundtrip(s: OscillatorState) -> tuple[GibbsParams, OscillatorState]:
    """State -> Gibbs parameters -> state."""
    p = gibbs_params(s)
    return p, gibbs_expectations(p, s.frequency)
