"""Frequency schedules w(t) for the adiabatic strokes.

Every protocol exposes ``omega(t)``, ``omega_dot(t)`` and a decomposition
into smooth pieces and instantaneous jumps, which is what the numeric
propagators in :mod:`qotto.strokes` and :mod:`qotto.oracle` consume.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "Protocol",
    "ConstantMu",
    "Linear",
    "ErmakovSTA",
    "BangBang",
    "Tabulated",
    "Smooth",
    "Jump",
    "InfeasibleProtocolError",
    "frictionless_mu",
    "frictionless_constmu",
    "constant_mu",
    "linear_ramp",
    "constmu_duration",
    "ermakov_sta",
    "bang_bang",
    "sudden",
    "sample",
    "minimal_time_estimate",
    "to_table",
    "from_table",
]


class InfeasibleProtocolError(ValueError):
    """No real-frequency protocol satisfies the requested constraints."""


@dataclass(frozen=True)
class Smooth:
    t0: float
    t1: float


@dataclass(frozen=True)
class Jump:
    t: float
    omega_from: float
    omega_to: float


Piece = Smooth | Jump


@dataclass(frozen=True)
class Protocol:
    """Base class; subclasses define the schedule."""

    omega_start: float
    omega_end: float
    duration: float

    kind = "protocol"

    def omega(self, t: float) -> float:
        raise NotImplementedError

    def omega_dot(self, t: float) -> float:
        raise NotImplementedError

    def pieces(self) -> list[Piece]:
        """Smooth stretches and jumps in time order."""
        if self.duration == 0:
            return [Jump(0.0, self.omega_start, self.omega_end)] if self.omega_start != self.omega_end else []
        return [Smooth(0.0, self.duration)]

    def params(self) -> dict[str, float]:
        return {}

    def _check_t(self, t: float) -> None:
        if t < -1e-12 * max(1.0, self.duration) or t > self.duration * (1 + 1e-12) + 1e-15:
            raise ValueError(f"t={t!r} outside [0, {self.duration!r}]")


@dataclass(frozen=True)
class ConstantMu(Protocol):
    """``w(t) = w_i / (1 - mu w_i t)``, constant adiabatic parameter ``mu``."""

    mu: float = 0.0
    kind = "constmu"

    def omega(self, t: float) -> float:
        return self.omega_start / (1.0 - self.mu * self.omega_start * t)

    def omega_dot(self, t: float) -> float:
        w = self.omega(t)
        return self.mu * w * w

    def params(self) -> dict[str, float]:
        return {"mu": self.mu}


@dataclass(frozen=True)
class Linear(Protocol):
    """``w(t) = w_i + rate t``."""

    rate: float = 0.0
    kind = "linear"

    def omega(self, t: float) -> float:
        return self.omega_start + self.rate * t

    def omega_dot(self, t: float) -> float:
        return self.rate

    def params(self) -> dict[str, float]:
        return {"rate": self.rate}


def _ermakov_coeffs(b_end: float) -> tuple[float, ...]:
    # b(s) = 1 + (b_end - 1)(10 s^3 - 15 s^4 + 6 s^5), s = t/tau
    d = float(b_end) - 1.0
    return (1.0, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d)


@dataclass(frozen=True)
class ErmakovSTA(Protocol):
    """Invariant-based shortcut: ``w^2 = w_i^2 / b^4 - b''/b`` with quintic ``b``."""

    coeffs: tuple[float, ...] = (1.0,)
    kind = "ermakov"

    def _b(self, t: float, d: int = 0) -> float:
        p = np.polynomial.Polynomial(self.coeffs)
        return float(p.deriv(d)(t / self.duration)) / self.duration**d if d else float(p(t / self.duration))

    def omega2(self, t: float) -> float:
        b, b2 = self._b(t), self._b(t, 2)
        return self.omega_start**2 / b**4 - b2 / b

    def omega(self, t: float) -> float:
        w2 = self.omega2(t)
        if w2 <= 0:
            raise InfeasibleProtocolError(f"imaginary frequency at t={t!r}")
        return float(np.sqrt(w2))

    def omega_dot(self, t: float) -> float:
        b, b1, b2, b3 = (self._b(t, d) for d in range(4))
        dw2 = -4.0 * self.omega_start**2 * b1 / b**5 - b3 / b + b2 * b1 / b**2
        return dw2 / (2.0 * self.omega(t))

    def ermakov_residual(self, t: float) -> float:
        b, b2 = self._b(t), self._b(t, 2)
        return b2 + self.omega2(t) * b - self.omega_start**2 / b**3

    def params(self) -> dict[str, float]:
        return {f"c{k}": c for k, c in enumerate(self.coeffs)}


@dataclass(frozen=True)
class BangBang(Protocol):
    """Piecewise-constant frequency with instantaneous jumps.

    ``holds`` is a sequence of ``(frequency, hold_time)``; the schedule jumps
    from ``omega_start`` to the first hold frequency at ``t = 0`` and from the
    last one to ``omega_end`` at ``t = duration``.
    """

    holds: tuple[tuple[float, float], ...] = ()
    kind = "bangbang"

    def _locate(self, t: float) -> int:
        acc = 0.0
        for k, (_, h) in enumerate(self.holds):
            acc += h
            if t < acc:
                return k
        return len(self.holds)

    def omega(self, t: float) -> float:
        if not self.holds:
            return self.omega_start if t <= 0 else self.omega_end
        k = self._locate(t)
        return self.omega_end if k == len(self.holds) else self.holds[k][0]

    def omega_dot(self, t: float) -> float:
        return 0.0

    def pieces(self) -> list[Piece]:
        out: list[Piece] = []
        t, w = 0.0, self.omega_start
        for wk, hk in self.holds:
            if wk != w:
                out.append(Jump(t, w, wk))
            if hk > 0:
                out.append(Smooth(t, t + hk))
            t, w = t + hk, wk
        if w != self.omega_end:
            out.append(Jump(t, w, self.omega_end))
        return out

    def jump_times(self) -> list[float]:
        return [p.t for p in self.pieces() if isinstance(p, Jump)]

    def params(self) -> dict[str, float]:
        d: dict[str, float] = {}
        for k, (w, h) in enumerate(self.holds):
            d[f"w{k}"] = w
            d[f"h{k}"] = h
        return d


@dataclass(frozen=True)
class Tabulated(Protocol):
    """Shape-preserving cubic interpolation of ``(t, w)`` samples."""

    times: tuple[float, ...] = ()
    omegas: tuple[float, ...] = ()
    kind = "tabulated"
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        w = np.asarray(self.omegas, dtype=float)
        if t.size < 2 or np.any(np.diff(t) <= 0):
            raise ValueError("tabulated protocol needs >= 2 strictly increasing times")
        if np.any(w <= 0):
            raise InfeasibleProtocolError("tabulated frequencies must be positive")
        object.__setattr__(self, "_interp", PchipInterpolator(t - t[0], w))

    def omega(self, t: float) -> float:
        return float(self._interp(t))

    def omega_dot(self, t: float) -> float:
        return float(self._interp.derivative()(t))


# ---------------------------------------------------------------- designers


def frictionless_mu(omega_i: float, omega_f: float, ell: int = 1) -> float:
    """Signed ``mu*`` whose constant-mu stroke closes ``ell`` generator periods."""
    if omega_i <= 0 or omega_f <= 0:
        raise ValueError("frequencies must be positive")
    if omega_i == omega_f:
        raise ValueError("frictionless_mu requires omega_i != omega_f")
    if int(ell) != ell or ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell!r}")
    lr = np.log(omega_f / omega_i)
    return float(2.0 * lr / np.sqrt(4.0 * np.pi**2 * ell**2 + lr**2))


def constmu_duration(omega_i: float, omega_f: float, mu: float) -> float:
    """Exact stroke time ``(1 - w_i/w_f)/(mu w_i)`` of the constant-mu schedule."""
    if omega_i == omega_f:
        return 0.0
    if mu == 0:
        raise ValueError("mu = 0 never reaches omega_f != omega_i")
    tau = (1.0 - omega_i / omega_f) / (mu * omega_i)
    if tau <= 0:
        raise ValueError("sign of mu inconsistent with the stroke direction")
    return float(tau)


def constant_mu(omega_i: float, omega_f: float, mu: float) -> ConstantMu:
    return ConstantMu(omega_i, omega_f, constmu_duration(omega_i, omega_f, mu), mu=mu)


def frictionless_constmu(omega_i: float, omega_f: float, ell: int = 1) -> ConstantMu:
    mu = frictionless_mu(omega_i, omega_f, ell)
    return constant_mu(omega_i, omega_f, mu)


def linear_ramp(omega_i: float, omega_f: float, duration: float) -> Linear:
    if duration <= 0:
        raise ValueError("duration must be positive")
    return Linear(omega_i, omega_f, duration, rate=(omega_f - omega_i) / duration)


def ermakov_sta(omega_i: float, omega_f: float, tau: float, check_points: int = 2001) -> ErmakovSTA:
    """Quintic-``b`` shortcut from ``omega_i`` to ``omega_f`` in time ``tau``.

    Raises
    ------
    InfeasibleProtocolError
        If ``w(t)^2 <= 0`` somewhere, naming the first violating time.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    b_end = np.sqrt(omega_i / omega_f)
    proto = ErmakovSTA(omega_i, omega_f, tau, coeffs=_ermakov_coeffs(b_end))
    ts = np.linspace(0.0, tau, check_points)
    w2 = np.array([proto.omega2(t) for t in ts])
    bad = np.flatnonzero(w2 <= 0)
    if bad.size:
        raise InfeasibleProtocolError(
            f"infeasible duration tau={tau!r}: w^2 <= 0 first at t={float(ts[bad[0]])!r}"
        )
    return proto


def _bb_coherence(holds: Sequence[tuple[float, float]], omega_i: float, omega_f: float) -> np.ndarray:
    from .strokes import adiabat_numeric_propagator

    p = BangBang(omega_i, omega_f, sum(h for _, h in holds), holds=tuple(holds))
    M = adiabat_numeric_propagator(p).matrix
    return M[:3, 0].copy()


def _rot(phi: float) -> np.ndarray:
    # free evolution at w rotates (sqrt(w) Q, P/sqrt(w)) clockwise by w t
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def _bb_candidates(omega_i: float, omega_f: float, w1: float, w2: float) -> list[tuple[float, float]]:
    """Hold times ``(t1, t2)`` that map a diagonal state at ``omega_i`` to one at ``omega_f``.

    Works on the normalized covariance of ``(sqrt(w) Q, P/sqrt(w))``: a hold
    is a rotation, a jump ``w -> w'`` a diagonal rescaling. The first hold must
    make the trace in ``w2`` coordinates match the target ellipse; the second
    aligns its axes.
    """
    T = lambda x: x + 1.0 / x  # noqa: E731
    a, k, b = w1 / omega_i, w2 / w1, w2 / omega_f
    den = T(k * a) - T(k / a)
    if abs(den) < 1e-14 * T(k * a):
        return []
    s2 = (T(k * a) - T(b)) / den
    if not -1e-12 <= s2 <= 1 + 1e-12:
        return []
    base = float(np.arcsin(np.sqrt(min(max(s2, 0.0), 1.0))))
    S = np.diag([np.sqrt(k), 1.0 / np.sqrt(k)])
    out = []
    for phi1 in {base, (np.pi - base) % np.pi}:
        R = _rot(phi1)
        M = S @ R @ np.diag([a, 1.0 / a]) @ R.T @ S
        ev, V = np.linalg.eigh(M)
        v = V[:, int(np.argmin(np.abs(ev - b)))]
        phi2 = float(np.arctan2(-v[1], v[0]) % np.pi)
        # arctan2 sign follows the clockwise convention of _rot
        for p2 in (phi2, (np.pi - phi2) % np.pi):
            out.append((phi1 / w1, p2 / w2))
    return out


def bang_bang(
    omega_i: float,
    omega_f: float,
    omega_min: float,
    omega_max: float,
    target_E_ratio: float | None = None,
    tol: float = 1e-6,
) -> BangBang:
    """Three-jump minimal-time schedule with a diagonal final state.

    The schedule jumps to one bound, holds ``t1``, jumps to the other bound,
    holds ``t2`` and jumps to ``omega_f``. Hold times follow in closed form
    from the rotation of the phase-space ellipse; both bound orderings are
    tried, each candidate is checked against the numeric propagator and the
    shortest valid one is kept. Wrong branches leave O(1) coherence, so
    candidates within a factor 1e3 of the best residual count as valid. Because the Casimir companion is conserved, a
    diagonal final state forces ``E_f/E_i = omega_f/omega_i``; any other
    ``target_E_ratio`` is infeasible.
    """
    if omega_min > min(omega_i, omega_f) or omega_max < max(omega_i, omega_f) or omega_min <= 0:
        raise ValueError("bounds must enclose both endpoints and be positive")
    ratio = omega_f / omega_i
    if target_E_ratio is not None and abs(target_E_ratio - ratio) > 1e-9 * max(1.0, ratio):
        raise InfeasibleProtocolError(
            f"target_E_ratio={target_E_ratio!r} unreachable with a diagonal final state "
            f"(Casimir conservation fixes it to {ratio!r})"
        )
    if omega_i == omega_f:
        return BangBang(omega_i, omega_f, 0.0, holds=())

    cands = []
    for w1, w2 in ((omega_min, omega_max), (omega_max, omega_min)):
        if w1 == w2:
            continue
        for t1, t2 in _bb_candidates(omega_i, omega_f, w1, w2):
            holds = ((w1, t1), (w2, t2))
            v = _bb_coherence(holds, omega_i, omega_f)
            cands.append((float(np.linalg.norm(v[1:]) / abs(v[0])), t1 + t2, holds))
    if not cands:
        raise InfeasibleProtocolError("no bang-bang schedule reaches a diagonal final state")
    # accept anything close to the best residual
    r_min = min(c[0] for c in cands)
    if r_min > 1e-6:
        raise InfeasibleProtocolError(f"bang-bang residual coherence {r_min:.3e} too large")
    ok = [c for c in cands if c[0] <= max(tol, 1e3 * r_min)]
    _, dur, holds = min(ok, key=lambda c: c[1])
    return BangBang(omega_i, omega_f, dur, holds=holds)


def sudden(omega_i: float, omega_f: float) -> BangBang:
    """Instantaneous quench ``omega_i -> omega_f`` (zero duration)."""
    return BangBang(omega_i, omega_f, 0.0, holds=())


def sample(p: Protocol, t: float) -> tuple[float, float]:
    """``(w(t), mu(t))`` with ``mu = w'/w^2``; ``mu = inf`` at a jump instant."""
    p._check_t(t)
    if isinstance(p, BangBang):
        for pc in p.pieces():
            if isinstance(pc, Jump) and abs(pc.t - t) <= 1e-15 * max(1.0, p.duration):
                return pc.omega_to, float("inf")
        # a hold: return post-jump side at t exactly at a boundary
        return p.omega(t), 0.0
    w = p.omega(t)
    return w, p.omega_dot(t) / (w * w)


def minimal_time_estimate(omega_c: float, omega_h: float, scheme: str = "constmu") -> float:
    """ell = 1 constant-mu time or measured bang-bang time for the hot-to-cold stroke."""
    if not omega_c < omega_h:
        if omega_c == omega_h:
            return 0.0
        raise ValueError("requires omega_c < omega_h")
    if scheme == "constmu":
        return frictionless_constmu(omega_h, omega_c, 1).duration
    if scheme == "optimal":
        return bang_bang(omega_h, omega_c, omega_c, omega_h).duration
    raise ValueError(f"unknown scheme {scheme!r}")


# ------------------------------------------------------------ table format


def to_table(p: Protocol, points: int = 201) -> str:
    """Two-column ``t omega`` text table with a ``#`` header line.

    Jumps appear as repeated times with both the pre- and post-jump frequency.
    """
    head = [f"kind={p.kind}", f"omega_start={p.omega_start!r}", f"omega_end={p.omega_end!r}",
            f"duration={p.duration!r}"]
    head += [f"{k}={float(v)!r}" for k, v in p.params().items()]
    lines = ["# " + " ".join(head), "# t omega"]
    if isinstance(p, BangBang):
        t, w = 0.0, p.omega_start
        lines.append(f"{0.0!r} {w!r}")
        for wk, hk in p.holds:
            lines.append(f"{t!r} {wk!r}")
            t += hk
            lines.append(f"{t!r} {wk!r}")
        lines.append(f"{t!r} {p.omega_end!r}")
    else:
        for t in np.linspace(0.0, p.duration, points):
            lines.append(f"{float(t)!r} {p.omega(float(t))!r}")
    return "\n".join(lines) + "\n"


def from_table(text: str) -> Protocol:
    """Inverse of :func:`to_table`; unknown kinds fall back to :class:`Tabulated`."""
    header: dict[str, str] = {}
    rows: list[tuple[float, float]] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            for tok in s[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    header[k] = v
            continue
        parts = s.split()
        if len(parts) != 2:
            raise ValueError(f"line {ln}: expected two columns, got {raw!r}")
        rows.append((float(parts[0]), float(parts[1])))
    kind = header.get("kind", "tabulated")
    if kind in ("constmu", "linear", "ermakov", "bangbang"):
        wi, wf, dur = (float(header[k]) for k in ("omega_start", "omega_end", "duration"))
        if kind == "constmu":
            return ConstantMu(wi, wf, dur, mu=float(header["mu"]))
        if kind == "linear":
            return Linear(wi, wf, dur, rate=float(header["rate"]))
        if kind == "ermakov":
            cs = tuple(float(header[f"c{k}"]) for k in itertools.takewhile(lambda k: f"c{k}" in header, itertools.count()))
            return ErmakovSTA(wi, wf, dur, coeffs=cs)
        holds = []
        for k in itertools.count():
            if f"w{k}" not in header:
                break
            holds.append((float(header[f"w{k}"]), float(header[f"h{k}"])))
        return BangBang(wi, wf, dur, holds=tuple(holds))
    if len(rows) < 2:
        raise ValueError("table needs at least two rows")
    t, w = zip(*rows)
    return Tabulated(w[0], w[-1], t[-1] - t[0], times=tuple(t), omegas=tuple(w))


def _iter_smooth(p: Protocol) -> Iterator[Smooth]:
    for pc in p.pieces():
        if isinstance(pc, Smooth):
            yield pc
