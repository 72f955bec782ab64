"""Command-line front end.

Subcommands: ``cycle run``, ``sweep``, ``figure-data``, ``thirdlaw``,
``protocol design``, ``oracle-check``.

Config files are flat ``key = value`` text with ``#`` comments; stroke and
noise settings use dotted keys (``expansion.kind``, ``noise.gamma_p``).
Exit codes: 0 ok, 2 config error, 3 no limit cycle, 4 infeasible protocol,
5 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from . import __version__
from .analysis import thirdlaw_scan
from .cycle import CycleSpec, NoLimitCycleError, limit_cycle, report
from .oracle import STROKE_KINDS, run_oracle_suite
from .protocols import (
    ConstantMu,
    InfeasibleProtocolError,
    Jump,
    Protocol,
    Smooth,
    bang_bang,
    constant_mu,
    ermakov_sta,
    frictionless_constmu,
    linear_ramp,
    sudden,
    to_table,
)
from .state import OscillatorState, energy_entropy, equilibrium_energy
from .strokes import (
    BathSpec,
    NoiseSpec,
    adiabat_constmu_propagator,
    adiabat_generator,
    delta_f,
    isochore_propagator,
    noisy_adiabat_propagator,
    sudden_propagator,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CYCLE = 3
EXIT_INFEASIBLE = 4
EXIT_ORACLE = 5

THREADS_ENV = "QOTTO_THREADS"
UNITS = "hbar=k_B=m=1"


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ config

_FLOAT_KEYS = {
    "omega_h", "omega_c", "T_h", "T_c", "gamma_h", "gamma_c", "tau_h", "tau_c", "squeezing_h",
    "noise.gamma_a", "noise.gamma_p",
    "thirdlaw.tc_min", "thirdlaw.tc_max", "thirdlaw.omega_h", "thirdlaw.T_h", "thirdlaw.gamma",
    "thirdlaw.eta_cv",
}
_INT_KEYS = {"thirdlaw.points"}
_STR_KEYS = {"order", "sweep.axis1", "sweep.grid1", "sweep.axis2", "sweep.grid2", "thirdlaw.scheme"}
for _s in ("expansion", "compression"):
    _STR_KEYS.add(f"{_s}.kind")
    _INT_KEYS.add(f"{_s}.l")
    _FLOAT_KEYS.update({f"{_s}.mu", f"{_s}.duration", f"{_s}.omega_min", f"{_s}.omega_max"})
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS

DEFAULTS: dict[str, object] = {
    "order": "engine",
    "gamma_h": 1.0,
    "gamma_c": 1.0,
    "squeezing_h": 0.0,
    "expansion.kind": "frictionless",
    "compression.kind": "frictionless",
    "expansion.l": 1,
    "compression.l": 1,
    "noise.gamma_a": 0.0,
    "noise.gamma_p": 0.0,
}

SWEEP_ALIASES = {"C": "compression ratio, sets omega_h = C * omega_c", "tau_iso": "sets tau_h = tau_c"}


@dataclass
class Config:
    values: dict[str, object]
    lines: dict[str, int]
    source: str

    def get(self, key: str, default=None):
        return self.values.get(key, DEFAULTS.get(key, default))

    def require(self, key: str):
        v = self.get(key)
        if v is None:
            raise ConfigError(f"missing required key {key!r}")
        return v

    def digest(self) -> str:
        canon = "\n".join(f"{k}={self.values[k]!r}" for k in sorted(self.values))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def with_overrides(self, **kv) -> "Config":
        vals = dict(self.values)
        vals.update(kv)
        return Config(vals, dict(self.lines), self.source)


def parse_config(text: str, source: str = "<config>") -> Config:
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"{source}:{ln}: expected 'key = value', got {raw.strip()!r}")
        k, v = (x.strip() for x in s.split("=", 1))
        if k not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{ln}: unknown key {k!r}")
        if k in values:
            raise ConfigError(f"{source}:{ln}: duplicate key {k!r} (first on line {lines[k]})")
        try:
            if k in _FLOAT_KEYS:
                val: object = float(v)
            elif k in _INT_KEYS:
                val = int(v)
            else:
                val = v
        except ValueError:
            raise ConfigError(f"{source}:{ln}: bad value {v!r} for {k!r}") from None
        values[k] = val
        lines[k] = ln
    return Config(values, lines, source)


def load_config(path: str | None) -> Config:
    if path is None:
        return Config({}, {}, "<defaults>")
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from None
    return parse_config(text, path)


def _where(cfg: Config, key: str) -> str:
    return f"{cfg.source}:{cfg.lines[key]}: " if key in cfg.lines else ""


def _protocol(cfg: Config, stroke: str, w_i: float, w_f: float) -> Protocol:
    kind = str(cfg.get(f"{stroke}.kind"))
    sign = 1.0 if w_f > w_i else -1.0
    if kind == "frictionless":
        return frictionless_constmu(w_i, w_f, int(cfg.get(f"{stroke}.l")))
    if kind == "constmu":
        return constant_mu(w_i, w_f, sign * abs(float(cfg.require(f"{stroke}.mu"))))
    if kind == "linear":
        return linear_ramp(w_i, w_f, float(cfg.require(f"{stroke}.duration")))
    if kind == "ermakov":
        return ermakov_sta(w_i, w_f, float(cfg.require(f"{stroke}.duration")))
    if kind == "bangbang":
        lo = float(cfg.get(f"{stroke}.omega_min", min(w_i, w_f)))
        hi = float(cfg.get(f"{stroke}.omega_max", max(w_i, w_f)))
        return bang_bang(w_i, w_f, lo, hi)
    if kind == "sudden":
        return sudden(w_i, w_f)
    raise ConfigError(f"{_where(cfg, stroke + '.kind')}unknown {stroke}.kind {kind!r}")


def build_spec(cfg: Config) -> CycleSpec:
    """Translate a config into a :class:`CycleSpec` (line-numbered errors)."""
    try:
        wh, wc = float(cfg.require("omega_h")), float(cfg.require("omega_c"))
        hot = BathSpec(float(cfg.require("T_h")), float(cfg.get("gamma_h")), float(cfg.get("squeezing_h")))
        cold = BathSpec(float(cfg.require("T_c")), float(cfg.get("gamma_c")))
        noise = NoiseSpec(float(cfg.get("noise.gamma_a")), float(cfg.get("noise.gamma_p")))
        return CycleSpec(
            hot, cold, wh, wc, float(cfg.require("tau_h")), float(cfg.require("tau_c")),
            _protocol(cfg, "expansion", wh, wc), _protocol(cfg, "compression", wc, wh),
            noise, str(cfg.get("order")),
        )
    except InfeasibleProtocolError:
        raise
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"{cfg.source}: {e}") from None


# ------------------------------------------------------------------ output


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path: str | None, header: list[str], rows: list[list], digest: str, extra: str = "") -> None:
    buf = io.StringIO()
    buf.write(f"# units: {UNITS}; qotto {__version__}; config_sha256={digest}\n")
    if extra:
        for line in extra.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    _emit(path, buf.getvalue())


def _emit(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# ------------------------------------------------------------------ commands

REPORT_FIELDS = [
    "work", "q_hot", "q_cold", "entropy_production", "efficiency", "cop", "power",
    "cooling_rate", "work_variance", "mode", "tau_cycle", "third_law_flag",
]


def cmd_cycle_run(args) -> int:
    cfg = load_config(args.config)
    spec = build_spec(cfg)
    lc = limit_cycle(spec)
    rep = report(spec, lc)
    out = Path(args.out)
    d = rep.to_dict()
    d["convergence_rate"] = lc.convergence_rate
    d["units"] = UNITS
    d["version"] = __version__
    d["config_sha256"] = cfg.digest()
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(d, indent=2, sort_keys=True, allow_nan=True) + "\n")
    rows = [[n, s.frequency, s.energy, s.lagrangian, s.correlation] for n, s in lc.corners.items()]
    write_csv(str(out / "corners.csv"), ["corner", "omega", "H", "L", "C"], rows, cfg.digest(),
              f"corner convention: {spec.order}")
    print(f"mode={rep.mode} work={rep.work:.17g} efficiency={rep.efficiency:.17g} cop={rep.cop:.17g}")
    return EXIT_OK


_GRID_RE = re.compile(r"^(lin|geom)\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)$")


def parse_grid(text: str) -> list[float]:
    t = text.strip()
    m = _GRID_RE.match(t)
    if m:
        a, b, n = float(m.group(2)), float(m.group(3)), int(m.group(4))
        if n < 1:
            raise ConfigError("empty grid")
        g = np.linspace(a, b, n) if m.group(1) == "lin" else np.geomspace(a, b, n)
        return [float(x) for x in g]
    vals = [v.strip() for v in t.split(",") if v.strip()]
    if not vals:
        raise ConfigError("empty grid")
    try:
        return [float(v) for v in vals]
    except ValueError:
        raise ConfigError(f"bad grid {text!r}") from None


def _apply_axis(cfg: Config, name: str, value: float) -> Config:
    if name == "C":
        return cfg.with_overrides(omega_h=value * float(cfg.require("omega_c")))
    if name == "tau_iso":
        return cfg.with_overrides(tau_h=value, tau_c=value)
    return cfg.with_overrides(**{name: value})


def _sweep_axes(cfg: Config) -> list[tuple[str, list[float]]]:
    axes = []
    for i in (1, 2):
        name, grid = cfg.get(f"sweep.axis{i}"), cfg.get(f"sweep.grid{i}")
        if name is None and grid is None:
            continue
        if name is None or grid is None:
            raise ConfigError(f"sweep.axis{i} and sweep.grid{i} must be given together")
        if name not in _FLOAT_KEYS and name not in SWEEP_ALIASES:
            raise ConfigError(f"{_where(cfg, f'sweep.axis{i}')}unknown sweep parameter {name!r}")
        try:
            axes.append((str(name), parse_grid(str(grid))))
        except ConfigError as e:
            raise ConfigError(f"{_where(cfg, f'sweep.grid{i}')}{e}") from None
    if not axes:
        raise ConfigError("sweep needs sweep.axis1 and sweep.grid1")
    return axes


def _sweep_point(cfg: Config, point: tuple[tuple[str, float], ...]) -> list:
    c = cfg
    for name, v in point:
        c = _apply_axis(c, name, v)
    try:
        rep = report(build_spec(c))
        return [getattr(rep, f) for f in REPORT_FIELDS] + [""]
    except (NoLimitCycleError, InfeasibleProtocolError, ConfigError, ValueError) as e:
        return [math.nan] * 9 + ["", math.nan, ""] + [type(e).__name__ + ": " + str(e).replace("\n", " ")]


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    axes = _sweep_axes(cfg)
    points: list[tuple[tuple[str, float], ...]] = [((axes[0][0], v),) for v in axes[0][1]]
    if len(axes) == 2:
        points = [p + ((axes[1][0], v),) for p in points for v in axes[1][1]]
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        results = list(ex.map(lambda p: _sweep_point(cfg, p), points))
    header = [a for a, _ in axes] + REPORT_FIELDS + ["error"]
    rows = [[v for _, v in p] + r for p, r in zip(points, results)]
    write_csv(args.out, header, rows, cfg.digest())
    return EXIT_OK


# ------------------------------------------------------------------ figure data

FIGURE_DEFAULTS = {
    2: dict(omega_c=0.5, T_c=1.5, omega_h=3.0, T_h=3.0, tau_c=2.1, tau_h=2.1, order="refrigerator",
            **{"expansion.kind": "constmu", "expansion.mu": 0.5,
               "compression.kind": "constmu", "compression.mu": 0.5}),
    3: dict(omega_c=0.5, T_c=5.0, omega_h=2.0, T_h=200.0, tau_c=2.1, tau_h=2.1, order="engine",
            **{"expansion.kind": "constmu", "expansion.mu": 0.8,
               "compression.kind": "constmu", "compression.mu": 0.8}),
    4: dict(omega_c=0.5, T_c=1.5, omega_h=3.0, T_h=3.0, tau_c=2.1, tau_h=2.1, order="refrigerator",
            **{"expansion.kind": "constmu", "expansion.mu": 0.5,
               "compression.kind": "constmu", "compression.mu": 0.5}),
}


def _adiabat_samples(p: Protocol, s: OscillatorState, n: int) -> list[tuple[float, OscillatorState]]:
    out = [(0.0, s)]
    if isinstance(p, ConstantMu):
        for t in np.linspace(0.0, p.duration, n)[1:]:
            w = p.omega(float(t))
            out.append((float(t), adiabat_constmu_propagator(p.omega_start, w, p.mu).apply(s)))
        return out
    for pc in p.pieces():
        if isinstance(pc, Jump):
            s = sudden_propagator(pc.omega_from, pc.omega_to).apply(s)
            out.append((pc.t, s))
        elif isinstance(pc, Smooth) and pc.t1 > pc.t0:
            ts = np.linspace(pc.t0, pc.t1, n)
            sol = solve_ivp(
                lambda t, y: adiabat_generator(p.omega(t), p.omega_dot(t)) @ y,
                (pc.t0, pc.t1), s.as_vector()[:3], t_eval=ts, method="DOP853", rtol=1e-11, atol=1e-13,
            )
            for k in range(1, ts.size):
                out.append((float(ts[k]), OscillatorState.from_vector(sol.y[:, k], p.omega(float(ts[k])))))
            s = out[-1][1]
    if out[-1][1].frequency != p.omega_end:
        st = out[-1][1]
        out.append((p.duration, OscillatorState(st.energy, st.lagrangian, st.correlation, p.omega_end)))
    return out


def figure_rows(spec: CycleSpec, n: int = 200) -> tuple[list[list], float]:
    """Time-resolved limit cycle: ``(stroke, t, omega, H, L, C, S_E)`` rows and the closure gap."""
    lc = limit_cycle(spec)
    starts = lc.stroke_starts
    names = ("hot", "expansion", "cold", "compression")
    rows: list[list] = []
    t_off = 0.0
    end_state = starts[0]
    for k, name in enumerate(names):
        s0 = starts[k]
        if name in ("hot", "cold"):
            bath = spec.hot_bath if name == "hot" else spec.cold_bath
            w = spec.omega_h if name == "hot" else spec.omega_c
            tau = spec.tau_h if name == "hot" else spec.tau_c
            samples = [(float(t), isochore_propagator(bath, w, float(t)).apply(s0)) for t in np.linspace(0, tau, n)]
            dur = tau
        else:
            p = spec.expansion if name == "expansion" else spec.compression
            samples = _adiabat_samples(p, s0, n)
            dur = p.duration
        for t, s in samples:
            rows.append([name, t_off + t, s.frequency, s.energy, s.lagrangian, s.correlation,
                         energy_entropy(s.energy, s.frequency)])
        end_state = samples[-1][1]
        t_off += dur
    v0 = starts[0].as_vector()
    gap = float(np.max(np.abs(end_state.as_vector() - v0)))
    return rows, gap


def isotherm_rows(spec: CycleSpec, n: int = 200) -> list[list]:
    rows = []
    ws = np.linspace(spec.omega_c, spec.omega_h, n)
    for label, T in (("isotherm_hot", spec.hot_bath.temperature), ("isotherm_cold", spec.cold_bath.temperature)):
        for w in ws:
            E = equilibrium_energy(float(w), T)
            rows.append([label, math.nan, float(w), E, 0.0, 0.0, energy_entropy(E, float(w))])
    return rows


def cmd_figure_data(args) -> int:
    fig = int(args.figure)
    if fig not in FIGURE_DEFAULTS:
        raise ConfigError(f"figure must be one of {sorted(FIGURE_DEFAULTS)}")
    base = load_config(args.config)
    cfg = Config({**FIGURE_DEFAULTS[fig], **base.values}, base.lines, base.source)
    spec = build_spec(cfg)
    rows, gap = figure_rows(spec, args.points)
    if fig in (3, 4):
        rows += isotherm_rows(spec, args.points)
    write_csv(args.out, ["stroke", "t", "omega", "H", "L", "C", "S_E"], rows, cfg.digest(),
              f"figure {fig}; loop closure gap {gap:.3e}")
    return EXIT_OK


# ------------------------------------------------------------------ third law


def cmd_thirdlaw(args) -> int:
    cfg = load_config(args.config)
    scheme = str(cfg.get("thirdlaw.scheme", args.scheme))
    lo = float(cfg.get("thirdlaw.tc_min", 1e-3))
    hi = float(cfg.get("thirdlaw.tc_max", 1e-1))
    npts = int(cfg.get("thirdlaw.points", 9))
    if npts < 2:
        raise ConfigError("thirdlaw.points must be >= 2 for a fit")
    grid = np.geomspace(lo, hi, npts)
    eta = cfg.get("thirdlaw.eta_cv")
    res = thirdlaw_scan(
        scheme, grid, omega_h=float(cfg.get("thirdlaw.omega_h", 100.0)), T_h=float(cfg.get("thirdlaw.T_h", 5.0)),
        gamma=float(cfg.get("thirdlaw.gamma", 100.0)), eta_cv=None if eta is None else float(eta),
    )
    rows = [[T, T, r, ta] for T, r, ta in zip(res.T_c, res.cooling_rate, res.tau_adi)]
    summary = f"scheme={scheme} slope={res.slope:.17g} alpha={res.alpha:.17g}"
    if res.zeta is not None:
        summary += f" zeta={res.zeta:.17g}"
    write_csv(args.out, ["T_c", "omega_c", "cooling_rate", "tau_adi"], rows, cfg.digest(), summary)
    print(summary, file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------------ protocol design


def cmd_protocol_design(args) -> int:
    wi, wf = args.omega_i, args.omega_f
    if args.kind == "frictionless":
        p = frictionless_constmu(wi, wf, args.l)
    elif args.kind == "constmu":
        if args.mu is None:
            raise ConfigError("--mu required for constmu")
        p = constant_mu(wi, wf, math.copysign(abs(args.mu), wf - wi))
    elif args.kind == "linear":
        p = linear_ramp(wi, wf, _need(args.duration, "--duration"))
    elif args.kind == "ermakov":
        p = ermakov_sta(wi, wf, _need(args.duration, "--duration"))
    elif args.kind == "bangbang":
        lo = args.omega_min if args.omega_min is not None else min(wi, wf)
        hi = args.omega_max if args.omega_max is not None else max(wi, wf)
        p = bang_bang(wi, wf, lo, hi)
    else:
        p = sudden(wi, wf)
    text = to_table(p, args.points)
    if p.duration > 0:
        text = f"# delta_f={delta_f(noisy_adiabat_propagator(p)):.3e}\n" + text
    _emit(args.out, text)
    return EXIT_OK


def _need(v, flag: str):
    if v is None:
        raise ConfigError(f"{flag} required")
    return v


# ------------------------------------------------------------------ oracle check


def cmd_oracle_check(args) -> int:
    kinds = tuple(args.kinds.split(",")) if args.kinds else STROKE_KINDS
    recs = run_oracle_suite(seed=args.seed, draws=args.draws, dim=args.dim, kinds=kinds, hot_T=args.hot_T)
    failed = False
    print(f"{'stroke':<10} {'n':>4} {'skipped':>8} {'max_dev':>12} status")
    for k in kinds:
        rs = [r for r in recs if r.kind == k]
        used = [r for r in rs if not r.skipped]
        tol = args.noise_tol if k == "noisy" else args.tol
        dev = max((r.deviation for r in used), default=math.nan)
        if not used:
            status = "skipped"
        elif dev <= tol:
            status = "pass"
        else:
            status = "FAIL"
            failed = True
        print(f"{k:<10} {len(rs):>4} {len(rs) - len(used):>8} {dev:>12.3e} {status}")
    return EXIT_ORACLE if failed else EXIT_OK


# ------------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qotto", description="Quantum harmonic Otto cycle toolkit")
    ap.add_argument("--version", action="version", version=f"qotto {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    cyc = sub.add_parser("cycle", help="cycle commands")
    csub = cyc.add_subparsers(dest="action", required=True)
    run = csub.add_parser("run", help="limit cycle and report")
    run.add_argument("config")
    run.add_argument("--out", default="qotto_out")
    run.set_defaults(func=cmd_cycle_run)

    sw = sub.add_parser("sweep", help="parameter sweep to CSV")
    sw.add_argument("config")
    sw.add_argument("--out", default="-")
    sw.set_defaults(func=cmd_sweep)

    fd = sub.add_parser("figure-data", help="trajectory data for figures 2, 3, 4")
    fd.add_argument("figure", type=int, choices=(2, 3, 4))
    fd.add_argument("--config")
    fd.add_argument("--points", type=int, default=200)
    fd.add_argument("--out", default="-")
    fd.set_defaults(func=cmd_figure_data)

    tl = sub.add_parser("thirdlaw", help="cooling-power scaling scan")
    tl.add_argument("--config")
    tl.add_argument("--scheme", choices=("constmu", "optimal"), default="constmu")
    tl.add_argument("--out", default="-")
    tl.set_defaults(func=cmd_thirdlaw)

    pr = sub.add_parser("protocol", help="protocol commands")
    psub = pr.add_subparsers(dest="action", required=True)
    de = psub.add_parser("design", help="design an adiabat schedule")
    de.add_argument("--kind", choices=("frictionless", "constmu", "linear", "ermakov", "bangbang", "sudden"),
                    default="frictionless")
    de.add_argument("--omega-i", type=float, required=True)
    de.add_argument("--omega-f", type=float, required=True)
    de.add_argument("--l", type=int, default=1)
    de.add_argument("--mu", type=float)
    de.add_argument("--duration", type=float)
    de.add_argument("--omega-min", type=float)
    de.add_argument("--omega-max", type=float)
    de.add_argument("--points", type=int, default=201)
    de.add_argument("--out", default="-")
    de.set_defaults(func=cmd_protocol_design)

    oc = sub.add_parser("oracle-check", help="algebra vs Fock-space oracle")
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--draws", type=int, default=50)
    oc.add_argument("--dim", type=int, default=64)
    oc.add_argument("--kinds", help="comma-separated subset of " + ",".join(STROKE_KINDS))
    oc.add_argument("--hot-T", type=float, help="bath temperature for isochore draws")
    oc.add_argument("--tol", type=float, default=1e-4)
    oc.add_argument("--noise-tol", type=float, default=1e-6)
    oc.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args))
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NoLimitCycleError as e:
        print(f"no limit cycle: {e}", file=sys.stderr)
        return EXIT_NO_CYCLE
    except InfeasibleProtocolError as e:
        print(f"infeasible protocol: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
