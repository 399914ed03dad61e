"""Scenario-driven validation: paired nonlinear/lifted runs and error metrics.

A scenario declares the body, initial condition, input signals, truncation
sweep, and integration grid. The runner integrates the exact dynamics once,
simulates the truncated lifted model per truncation on the identical grid, and
reports the normalized approximation errors

    e_nu(t) = ||nu_nl - nu_lift|| / ||nu(t0)||

(and for full scenarios the z/p/v/eta counterparts, normalized by the initial
value or, when that vanishes, by the trajectory maximum). Results are emitted
as one CSV per truncation (header: t, quantity, truncation, value) plus a JSON
summary whose config echo re-parses to an identical scenario.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import GOOD_WINDOW_FACTOR, SWITCH_FACTOR, spectral_norm, t_lim_forced
from .attitude import TruncationConfig
from .errors import ConfigError, InfiniteHorizon, ZeroNormalizer
from .lifted import LiftedTrajectory, lift, simulate_attitude, simulate_lifted
from .rigidbody import (
    GIMBAL_COS_TOL,
    BodyParams,
    RigidBodyState,
    RigidBodyTrajectory,
    integrate,
    rotation_from_euler,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_DT = 1e-3
HORIZON_CAP = 100.0

NAMED_INERTIAS = {
    "J0": [0.0131, 0.020, 0.0234],
    "J1": [0.001, 0.01, 0.1],
    "J2": [0.1, 0.11, 0.012],
    "J3": [0.1, 0.11, 0.12],
    "J4": [1.0, 2.0, 3.0],
    "JQ": [0.0131, 0.0131, 0.0234],
    "JI": [1.0, 1.0, 1.0],
}


@dataclass
class TorqueSignal:
    """M(t) = alpha [b1 sin(r1 t), b2 sin(r2 (t - rho_t)), b3 sin(r3 t)]."""

    alpha: float = 0.0
    beta: list = field(default_factory=lambda: [1.0, 1.0, 1.0])
    rho: list = field(default_factory=lambda: [2 * np.pi, 2 * np.pi, 2 * np.pi])
    rho_t: float = 0.0

    def fn(self):
        if self.alpha == 0.0:
            return None
        a = float(self.alpha)
        b = np.asarray(self.beta, float)
        r = np.asarray(self.rho, float)
        rt = float(self.rho_t)

        def M(t):
            return a * np.array([
                b[0] * np.sin(r[0] * t),
                b[1] * np.sin(r[1] * (t - rt)),
                b[2] * np.sin(r[2] * t),
            ])

        return M

    def antiderivative_norm(self) -> float:
        """Magnitude of the torque antiderivative (per-axis amplitude alpha*b/r)."""
        amps = [abs(self.alpha * b) / abs(r) for b, r in zip(self.beta, self.rho)
                if r != 0.0 and b != 0.0]
        return float(np.linalg.norm(amps)) if amps else 0.0


@dataclass
class ForceSignal:
    """Constant body-frame force."""

    constant: list = field(default_factory=lambda: [0.0, 0.0, 0.0])

    def fn(self):
        Fv = np.asarray(self.constant, float)
        if not np.any(Fv):
            return None
        return lambda t: Fv


@dataclass
class ScenarioConfig:
    """Declarative description of one validation run."""

    name: str
    kind: str = "attitude"  # attitude | full
    inertia: object = "J0"  # named key or 3 diagonal values
    mass: float = 1.2
    gravity: float = 9.81
    nu0: object = 0.0  # scalar = per-component value, or 3-vector
    eta0: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    p0: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    v0: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    truncations: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    dt: Optional[float] = None
    horizon: Optional[float] = None
    b_source: str = "lifted"
    b_update: str = "step"
    torque: TorqueSignal = field(default_factory=TorqueSignal)
    force: ForceSignal = field(default_factory=ForceSignal)

    def __post_init__(self):
        if self.kind not in ("attitude", "full"):
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.b_source not in ("lifted", "nonlinear"):
            raise ConfigError(f"unknown b_source {self.b_source!r}")
        if not self.truncations:
            raise ConfigError("truncations must be nonempty")
        if isinstance(self.torque, dict):
            self.torque = TorqueSignal(**self.torque)
        if isinstance(self.force, dict):
            self.force = ForceSignal(**self.force)
        if self.horizon is not None and self.horizon <= 0:
            raise ConfigError("horizon must be positive")

    # -- resolution helpers ------------------------------------------------

    def params(self) -> BodyParams:
        if isinstance(self.inertia, str):
            try:
                diag = NAMED_INERTIAS[self.inertia]
            except KeyError:
                raise ConfigError(f"unknown inertia name {self.inertia!r}") from None
        else:
            diag = list(self.inertia)
        return BodyParams(J=np.diag(np.asarray(diag, float)), m=self.mass, g=self.gravity)

    def nu0_vec(self) -> np.ndarray:
        if np.isscalar(self.nu0):
            return float(self.nu0) * np.ones(3)
        return np.asarray(self.nu0, float)

    def initial_state(self) -> RigidBodyState:
        return RigidBodyState(p=np.asarray(self.p0, float), v=np.asarray(self.v0, float),
                              R=rotation_from_euler(self.eta0), nu=self.nu0_vec())

    def truncation_pairs(self) -> list:
        pairs = []
        for tr in self.truncations:
            if isinstance(tr, (list, tuple)):
                pairs.append(TruncationConfig(N_nu=int(tr[0]), N_z=int(tr[1])))
            elif self.kind == "attitude":
                pairs.append(TruncationConfig(N_nu=int(tr), N_z=1))
            else:
                pairs.append(TruncationConfig(N_nu=int(tr), N_z=int(tr)))
        return pairs

    def t_lim(self) -> Optional[float]:
        params = self.params()
        gamma0 = params.J @ self.nu0_vec()
        gn = float(np.linalg.norm(gamma0))
        if gn == 0.0:
            return None
        return 1.0 / (spectral_norm(params.J_inv) * gn)

    def resolve_grid(self):
        """(dt, horizon): preset values win, else dt = 1e-3 and 10 t_lim capped."""
        dt = self.dt if self.dt is not None else DEFAULT_DT
        if self.horizon is not None:
            horizon = self.horizon
        else:
            tl = self.t_lim()
            horizon = min(10.0 * tl, HORIZON_CAP) if tl is not None else HORIZON_CAP
        return float(dt), float(horizon)

    def input_fn(self):
        """Combined (F, M) callable for the nonlinear plant; None if unforced."""
        M_fn = self.torque.fn()
        F_fn = self.force.fn()
        if M_fn is None and F_fn is None:
            return None
        zero = np.zeros(3)

        def fn(t):
            return (F_fn(t) if F_fn else zero, M_fn(t) if M_fn else zero)

        return fn

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["inertia"] = self.inertia if isinstance(self.inertia, str) else list(self.inertia)
        d["nu0"] = self.nu0 if np.isscalar(self.nu0) else list(self.nu0)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_toml(cls, path) -> "ScenarioConfig":
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh))


def apply_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    """New config with dotted-path overrides applied (CLI > file > defaults)."""
    d = cfg.to_dict()
    for key, value in overrides.items():
        parts = key.split(".")
        node = d
        for part in parts[:-1]:
            if part not in node or not isinstance(node[part], dict):
                raise ConfigError(f"unknown override path {key!r}")
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError(f"unknown override key {key!r}")
        node[parts[-1]] = value
    return ScenarioConfig.from_dict(d)


# ---------------------------------------------------------------------------
# Error metric
# ---------------------------------------------------------------------------

@dataclass
class ErrorSeries:
    """Normalized approximation errors on the shared time grid."""

    t: np.ndarray
    e_nu_pct: np.ndarray
    e_z_pct: Optional[np.ndarray] = None
    e_p_pct: Optional[np.ndarray] = None
    e_v_pct: Optional[np.ndarray] = None
    e_eta_pct: Optional[np.ndarray] = None
    maxima: dict = field(default_factory=dict)
    tot: Optional[float] = None
    normalizers: dict = field(default_factory=dict)
    n_valid: int = 0
    onset_time: Optional[float] = None
    divergence_time: Optional[float] = None
    reconstruction_stops_at: Optional[float] = None

    def quantities(self) -> dict:
        out = {"e_nu_pct": self.e_nu_pct}
        for name in ("e_z_pct", "e_p_pct", "e_v_pct", "e_eta_pct"):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        return out


def _normalizer(series0: np.ndarray, series: np.ndarray, label: str) -> float:
    n0 = float(np.linalg.norm(series0))
    if n0 > 0.0:
        return n0
    mx = float(np.max(np.linalg.norm(series, axis=1)))
    if mx > 0.0:
        return mx
    raise ZeroNormalizer(f"{label}: initial value and trajectory maximum both vanish")


def error_metric(nl: RigidBodyTrajectory, lifted: LiftedTrajectory, params: BodyParams,
                 kind: str = "attitude") -> ErrorSeries:
    """Normalized error series between a nonlinear and a lifted trajectory."""
    n = min(len(nl.t), lifted.n_valid)
    t = nl.t[:n]
    norms = {}

    nu_nl = nl.nu[:n]
    nu_lift = lifted.nu0[:n]
    norms["nu"] = _normalizer(nl.nu[0], nl.nu, "nu")
    e_nu = np.linalg.norm(nu_nl - nu_lift, axis=1) / norms["nu"]

    es = ErrorSeries(t=t, e_nu_pct=e_nu, n_valid=n, normalizers=norms)
    es.divergence_time = lifted.diverged_at
    over = np.nonzero(e_nu > 1.0)[0]
    es.onset_time = float(t[over[0]]) if over.size else None
    es.maxima["e_nu_pct"] = float(np.max(e_nu)) if n else float("nan")

    if kind != "full":
        return es

    z_nl = np.einsum("tji,tj->ti", nl.R[:n], nl.p[:n])
    norms["z"] = _normalizer(z_nl[0], z_nl, "z")
    e_z = np.linalg.norm(z_nl - lifted.z0[:n], axis=1) / norms["z"]
    es.e_z_pct = e_z
    es.maxima["e_z_pct"] = float(np.max(e_z))

    v_nl = nl.v[:n]
    norms["v"] = _normalizer(v_nl[0], v_nl, "v")
    e_v = np.linalg.norm(v_nl - lifted.v[:n, 0:3], axis=1) / norms["v"]
    es.e_v_pct = e_v
    es.maxima["e_v_pct"] = float(np.max(e_v))

    # eta and p need the reconstructed attitude: phi/theta from the gravity
    # observable, yaw integrated from the lifted angular velocity
    eta_nl = nl.eta[:n]
    g_lift = lifted.g[:n, 0:3]
    gn = np.linalg.norm(g_lift, axis=1)
    ok = np.abs(gn - params.g) <= 0.01 * params.g
    s_th = np.clip(-g_lift[:, 0] / params.g, -1.0, 1.0)
    c_th = np.sqrt(1.0 - s_th**2)
    ok &= c_th > GIMBAL_COS_TOL
    bad = np.nonzero(~ok)[0]
    m = int(bad[0]) if bad.size else n
    es.reconstruction_stops_at = float(t[m - 1]) if m < n else None

    theta = np.arcsin(s_th[:m])
    phi = np.arctan2(g_lift[:m, 1], g_lift[:m, 2])
    nu_hat = nu_lift[:m]
    psi_dot = (np.sin(phi) * nu_hat[:, 1] + np.cos(phi) * nu_hat[:, 2]) / c_th[:m]
    psi = np.empty(m)
    psi[0] = eta_nl[0, 2]
    if m > 1:
        dt_grid = np.diff(t[:m])
        psi[1:] = psi[0] + np.cumsum(0.5 * dt_grid * (psi_dot[1:] + psi_dot[:-1]))
    eta_hat = np.column_stack([phi, theta, psi])

    norms["eta"] = _normalizer(eta_nl[0], eta_nl, "eta")
    e_eta = np.full(n, np.nan)
    e_eta[:m] = np.linalg.norm(eta_nl[:m] - eta_hat, axis=1) / norms["eta"]
    es.e_eta_pct = e_eta
    es.maxima["e_eta_pct"] = float(np.nanmax(e_eta[:m])) if m else float("nan")

    p_hat = np.empty((m, 3))
    for i in range(m):
        p_hat[i] = rotation_from_euler(eta_hat[i]) @ lifted.z0[i]
    norms["p"] = _normalizer(nl.p[0], nl.p, "p")
    e_p = np.full(n, np.nan)
    e_p[:m] = np.linalg.norm(nl.p[:m] - p_hat, axis=1) / norms["p"]
    es.e_p_pct = e_p
    es.maxima["e_p_pct"] = float(np.nanmax(e_p[:m])) if m else float("nan")

    es.tot = float(np.sqrt(es.maxima["e_p_pct"] ** 2 + es.maxima["e_v_pct"] ** 2
                           + es.maxima["e_eta_pct"] ** 2))
    return es


# ---------------------------------------------------------------------------
# Scenario runner
# ---------------------------------------------------------------------------

@dataclass
class TruncationRun:
    label: str
    N_nu: int
    N_z: int
    error: ErrorSeries
    t_lim_M: Optional[float] = None


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    dt: float
    horizon: float
    t_lim: Optional[float]
    runs: list
    gamma_rms: Optional[float] = None

    @property
    def good_window(self) -> Optional[float]:
        return None if self.t_lim is None else GOOD_WINDOW_FACTOR * self.t_lim

    @property
    def switch_estimate(self) -> Optional[float]:
        return None if self.t_lim is None else SWITCH_FACTOR * self.t_lim


def _run_truncation(cfg: ScenarioConfig, tc: TruncationConfig, params, state0,
                    nl: RigidBodyTrajectory, dt: float, horizon: float) -> TruncationRun:
    x0 = lift(state0, params, tc)
    needs_nl = cfg.b_source == "nonlinear"
    if cfg.kind == "attitude":
        traj = simulate_attitude(
            x0, cfg.torque.fn(), params, dt, horizon,
            b_source=cfg.b_source, b_update=cfg.b_update,
            nonlinear_traj=nl if needs_nl else None,
        )
        label = f"nu{tc.N_nu}"
    else:
        traj = simulate_lifted(
            x0, cfg.input_fn(), params, dt, horizon,
            b_source=cfg.b_source, b_update=cfg.b_update,
            nonlinear_traj=nl if needs_nl else None,
        )
        label = f"nu{tc.N_nu}_z{tc.N_z}"
    err = error_metric(nl, traj, params, kind=cfg.kind)
    return TruncationRun(label=label, N_nu=tc.N_nu, N_z=tc.N_z, error=err)


def _run_truncation_packed(args):
    cfg_dict, pair, dt, horizon = args
    cfg = ScenarioConfig.from_dict(cfg_dict)
    params = cfg.params()
    state0 = cfg.initial_state()
    nl = integrate(state0, cfg.input_fn() or (lambda t: (np.zeros(3), np.zeros(3))),
                   params, dt, horizon)
    tc = TruncationConfig(N_nu=pair[0], N_z=pair[1])
    return _run_truncation(cfg, tc, params, state0, nl, dt, horizon)


def run_scenario(cfg: ScenarioConfig, jobs: int = 1) -> ScenarioResult:
    """Run the paired nonlinear/lifted validation for every truncation."""
    params = cfg.params()
    state0 = cfg.initial_state()
    dt, horizon = cfg.resolve_grid()
    tl = cfg.t_lim()
    pairs = cfg.truncation_pairs()

    if jobs > 1:
        packed = [(cfg.to_dict(), (tc.N_nu, tc.N_z), dt, horizon) for tc in pairs]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_truncation_packed, packed))
        nl = integrate(state0, cfg.input_fn() or (lambda t: (np.zeros(3), np.zeros(3))),
                       params, dt, horizon)
    else:
        input_fn = cfg.input_fn() or (lambda t: (np.zeros(3), np.zeros(3)))
        nl = integrate(state0, input_fn, params, dt, horizon)
        runs = [_run_truncation(cfg, tc, params, state0, nl, dt, horizon) for tc in pairs]

    gamma_rms = None
    if cfg.torque.fn() is not None:
        gamma_norms = np.linalg.norm(nl.nu @ params.J.T, axis=1)
        gamma_rms = float(np.sqrt(np.mean(gamma_norms**2)))
        M_int = cfg.torque.antiderivative_norm()
        for run in runs:
            if run.N_nu >= 2 and M_int > 0 and gamma_rms > 0:
                run.t_lim_M = t_lim_forced(params, gamma_rms, M_int, run.N_nu - 1)

    return ScenarioResult(config=cfg, dt=dt, horizon=horizon, t_lim=tl, runs=runs,
                          gamma_rms=gamma_rms)


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _write_csv(path: Path, t: np.ndarray, series: dict, label: str):
    lines = ["t,quantity,truncation,value"]
    for name, values in series.items():
        for ti, vi in zip(t.tolist(), np.asarray(values).tolist()):
            lines.append(f"{ti!r},{name},{label},{vi!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def emit_results(result: ScenarioResult, outdir) -> list:
    """Write one CSV per truncation plus the JSON summary; returns paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    name = result.config.name
    written = []
    per_truncation = {}
    for run in result.runs:
        csv_path = outdir / f"{name}__{run.label}.csv"
        _write_csv(csv_path, run.error.t, run.error.quantities(), run.label)
        written.append(csv_path)
        per_truncation[run.label] = {
            "N_nu": run.N_nu,
            "N_z": run.N_z,
            "maxima": run.error.maxima,
            "tot": run.error.tot,
            "normalizers": run.error.normalizers,
            "onset_time": run.error.onset_time,
            "divergence_time": run.error.divergence_time,
            "reconstruction_stops_at": run.error.reconstruction_stops_at,
            "n_valid": run.error.n_valid,
            "t_lim_M": run.t_lim_M,
            "csv": csv_path.name,
        }
    summary = {
        "schema": "kooplift-summary/1",
        "scenario": result.config.to_dict(),
        "dt": result.dt,
        "horizon": result.horizon,
        "t_lim": result.t_lim,
        "good_window": result.good_window,
        "switch_estimate": result.switch_estimate,
        "gamma_rms": result.gamma_rms,
        "truncations": per_truncation,
    }
    summary_path = outdir / f"{name}__summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
    written.append(summary_path)
    return written
