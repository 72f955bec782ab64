"""Otto cycle assembly, limit cycle and thermodynamic accounting.

The cycle map is ``U_cyc = U_ch U_c U_hc U_h`` (hot isochore applied first).
Its fixed point is the state at the start of the hot isochore.

Corner labels
-------------
engine:       hot isochore D->A, expansion A->B, cold isochore B->C, compression C->D
refrigerator: hot isochore A->D, expansion D->C, cold isochore C->B, compression B->A
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .protocols import ConstantMu, Protocol, constant_mu, frictionless_constmu
from .state import OscillatorState, coherence_measure, internal_temperature
from .strokes import (
    AffineMap4,
    BathSpec,
    NoiseSpec,
    adiabat_constmu_propagator,
    isochore_propagator,
    noisy_adiabat_propagator,
    sudden_propagator,
)

__all__ = [
    "CycleSpec",
    "LimitCycle",
    "CycleReport",
    "NoLimitCycleError",
    "MODE_DEAD_BAND",
    "stroke_maps",
    "compose",
    "convergence_rate",
    "limit_cycle",
    "report",
    "classify_mode",
    "work_variance",
    "superadiabatic_efficiency",
    "extra_energy_constmu",
    "engine_spec",
]

MODE_DEAD_BAND = 1e-12


class NoLimitCycleError(RuntimeError):
    """The homogeneous block of the cycle map is not contracting."""


@dataclass(frozen=True)
class CycleSpec:
    hot_bath: BathSpec
    cold_bath: BathSpec
    omega_h: float
    omega_c: float
    tau_h: float
    tau_c: float
    expansion: Protocol
    compression: Protocol
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    order: str = "engine"

    def __post_init__(self) -> None:
        if not self.omega_h > self.omega_c > 0:
            raise ValueError("require omega_h > omega_c > 0")
        if self.tau_h < 0 or self.tau_c < 0:
            raise ValueError("isochore durations must be >= 0")
        if self.order not in ("engine", "refrigerator"):
            raise ValueError(f"order must be engine|refrigerator, got {self.order!r}")
        for name, p, (a, b) in (
            ("expansion", self.expansion, (self.omega_h, self.omega_c)),
            ("compression", self.compression, (self.omega_c, self.omega_h)),
        ):
            if not (math.isclose(p.omega_start, a, rel_tol=1e-12) and math.isclose(p.omega_end, b, rel_tol=1e-12)):
                raise ValueError(f"{name} protocol must run {a} -> {b}")

    @property
    def compression_ratio(self) -> float:
        return self.omega_h / self.omega_c

    @property
    def tau_cycle(self) -> float:
        return self.tau_h + self.tau_c + self.expansion.duration + self.compression.duration


@dataclass(frozen=True)
class LimitCycle:
    corners: dict[str, OscillatorState]
    monodromy: AffineMap4
    convergence_rate: float
    order: str
    # state before each stroke in application order, then the closing state
    stroke_starts: tuple[OscillatorState, ...] = ()


@dataclass(frozen=True)
class CycleReport:
    work: float
    q_hot: float
    q_cold: float
    entropy_production: float
    efficiency: float
    cop: float
    power: float
    cooling_rate: float
    work_variance: float
    mode: str
    tau_cycle: float
    corner_convention: str
    third_law_flag: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def engine_spec(
    omega_c: float,
    omega_h: float,
    T_c: float,
    T_h: float,
    tau_c: float,
    tau_h: float,
    gamma_c: float = 1.0,
    gamma_h: float = 1.0,
    mu: float | None = None,
    ell: int = 1,
    noise: NoiseSpec | None = None,
    order: str = "engine",
) -> CycleSpec:
    """Convenience builder with constant-mu adiabats (frictionless ``ell`` if ``mu`` is None)."""
    if mu is None:
        exp_p = frictionless_constmu(omega_h, omega_c, ell)
        com_p = frictionless_constmu(omega_c, omega_h, ell)
    else:
        m = abs(mu)
        exp_p = constant_mu(omega_h, omega_c, -m)
        com_p = constant_mu(omega_c, omega_h, m)
    return CycleSpec(
        BathSpec(T_h, gamma_h), BathSpec(T_c, gamma_c), omega_h, omega_c, tau_h, tau_c,
        exp_p, com_p, noise or NoiseSpec(), order,
    )


def _adiabat_map(p: Protocol, noise: NoiseSpec) -> AffineMap4:
    if p.duration == 0:
        return sudden_propagator(p.omega_start, p.omega_end)
    if noise.is_zero and isinstance(p, ConstantMu):
        return adiabat_constmu_propagator(p.omega_start, p.omega_end, p.mu)
    return noisy_adiabat_propagator(p, noise)


def stroke_maps(spec: CycleSpec) -> tuple[AffineMap4, AffineMap4, AffineMap4, AffineMap4]:
    """``(U_h, U_hc, U_c, U_ch)`` in application order."""
    return (
        isochore_propagator(spec.hot_bath, spec.omega_h, spec.tau_h),
        _adiabat_map(spec.expansion, spec.noise),
        isochore_propagator(spec.cold_bath, spec.omega_c, spec.tau_c),
        _adiabat_map(spec.compression, spec.noise),
    )


def compose(spec: CycleSpec) -> AffineMap4:
    Uh, Uhc, Uc, Uch = stroke_maps(spec)
    return Uch @ Uc @ Uhc @ Uh


def convergence_rate(m: AffineMap4) -> float:
    """Largest eigenvalue modulus of the homogeneous block."""
    return float(np.max(np.abs(np.linalg.eigvals(m.homogeneous))))


def _corner_names(order: str) -> tuple[str, str, str, str]:
    # names of the states at the start of (hot, expansion, cold, compression)
    return ("D", "A", "B", "C") if order == "engine" else ("A", "D", "C", "B")


def limit_cycle(spec: CycleSpec) -> LimitCycle:
    """Solve ``(I - M) v = b`` for the fixed point and propagate it to the corners."""
    maps = stroke_maps(spec)
    U = maps[3] @ maps[2] @ maps[1] @ maps[0]
    rate = convergence_rate(U)
    if not rate < 1 - 1e-12:
        raise NoLimitCycleError(f"spectral radius {rate!r} >= 1: no limit cycle")
    v = np.linalg.solve(np.eye(3) - U.homogeneous, U.affine)
    s = OscillatorState.from_vector(v, spec.omega_h)
    starts = [s]
    for m in maps:
        s = m.apply(s)
        starts.append(s)
    names = _corner_names(spec.order)
    corners = {n: st for n, st in zip(names, starts[:4])}
    return LimitCycle(corners, U, rate, spec.order, tuple(starts))


def classify_mode(work: float, q_hot: float, q_cold: float, band: float = MODE_DEAD_BAND) -> str:
    """engine | refrigerator | dissipator | accelerator | idle."""
    if work < -band:
        return "engine"
    if work > band:
        if q_cold > band:
            return "refrigerator"
        if q_hot < -band and q_cold < -band:
            return "dissipator"
        return "accelerator"
    return "idle"


def _entropy_term(q: float, T: float) -> tuple[float, bool]:
    if T == 0:
        if abs(q) <= MODE_DEAD_BAND:
            return 0.0, True
        return (math.inf if q < 0 else -math.inf), True
    return -q / T, False


def report(spec: CycleSpec, lc: LimitCycle | None = None) -> CycleReport:
    lc = lc or limit_cycle(spec)
    s0, s1, s2, s3, s4 = lc.stroke_starts
    q_hot = s1.energy - s0.energy
    w_exp = s2.energy - s1.energy
    q_cold = s3.energy - s2.energy
    w_com = s4.energy - s3.energy
    work = w_exp + w_com
    mode = classify_mode(work, q_hot, q_cold)
    sh, fh = _entropy_term(q_hot, spec.hot_bath.temperature)
    sc, fc = _entropy_term(q_cold, spec.cold_bath.temperature)
    tau = spec.tau_cycle
    eff = -work / q_hot if (work < 0 and q_hot > 0) else math.nan
    cop = q_cold / work if (work > 0 and q_cold > 0) else math.nan
    try:
        wv = work_variance(lc, spec)
    except ValueError:
        wv = math.nan
    return CycleReport(
        work=work,
        q_hot=q_hot,
        q_cold=q_cold,
        entropy_production=sh + sc,
        efficiency=eff,
        cop=cop,
        power=-work / tau if tau > 0 else math.nan,
        cooling_rate=q_cold / tau if tau > 0 else math.nan,
        work_variance=wv,
        mode=mode,
        tau_cycle=tau,
        corner_convention=spec.order,
        third_law_flag=fh or fc,
    )


def work_variance(lc: LimitCycle, spec: CycleSpec | None = None, coherence_tol: float = 1e-8) -> float:
    """``T_h^2 (1 + 1/C^2) + T_c^2 (1 + C^2)`` from the internal temperatures.

    ``T_h``, ``T_c`` are taken at the ends of the hot and cold isochores.
    Refused (``ValueError``) when any corner carries coherence.
    """
    for name, st in lc.corners.items():
        if coherence_measure(st) > coherence_tol * max(1.0, st.energy / st.frequency):
            raise ValueError(f"corner {name} is coherent; formula applies to frictionless cycles")
    s0, s1, s2, s3 = lc.stroke_starts[:4]
    Cr = s0.frequency / s2.frequency
    Th = internal_temperature(s1)
    Tc = internal_temperature(s3)
    return Th**2 * (1 + 1 / Cr**2) + Tc**2 * (1 + Cr**2)


def extra_energy_constmu(omega_start: float, omega_end: float, E_start: float, mu: float) -> float:
    """Average extra energy ``w_end N_start mu^2/(4 - mu^2)`` of a constant-mu stroke."""
    return omega_end * (E_start / omega_start) * mu * mu / (4.0 - mu * mu)


def superadiabatic_efficiency(
    spec: CycleSpec,
    rep: CycleReport | None = None,
    lc: LimitCycle | None = None,
    *,
    variant: str = "drive",
    delta_hc: float = 0.0,
    delta_ch: float = 0.0,
) -> float:
    """Efficiency with extra energy costs added to the hot-bath heat.

    ``variant="drive"`` adds the stroke-average extra energy of both
    constant-mu adiabats; ``variant="noise"`` adds ``E_C delta_ch + E_A delta_hc``
    (engine corner names).
    """
    lc = lc or limit_cycle(spec)
    rep = rep or report(spec, lc)
    if rep.mode != "engine":
        raise ValueError("superadiabatic efficiency is defined for engines")
    s0, s1, s2, s3 = lc.stroke_starts[:4]
    if variant == "drive":
        extra = 0.0
        for p, st in ((spec.expansion, s1), (spec.compression, s3)):
            if isinstance(p, ConstantMu):
                extra += extra_energy_constmu(p.omega_start, p.omega_end, st.energy, p.mu)
    elif variant == "noise":
        extra = s3.energy * delta_ch + s1.energy * delta_hc
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return -rep.work / (rep.q_hot + extra)

