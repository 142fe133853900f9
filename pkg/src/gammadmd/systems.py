"""Data generators: periodic linear system, travelling-wave signal, combustor.

The first two have closed-form solutions corrupted by multiplicative gamma
noise.  The combustor is a modal (Galerkin) model of a 1-d open-open duct
with a delayed heat source, integrated with classical RK4; pink noise enters
the heat-release law, giving a mixed additive/multiplicative corruption of
the pressure field.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ShapeError, SimulationDivergedError
from .model import SnapshotSet
from .noise import NoiseSpec, apply_multiplicative, pink_noise

#: Noise-to-reference-amplitude ratios for the three combustor scenarios.
NOISE_PROFILES = {"weak": 0.0016, "intermediate": 0.0031, "strong": 0.0079}


# ---------------------------------------------------------------------------
# periodic two-dimensional linear system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicConfig:
    n: int
    dt: float = 0.1
    c1: float = 1.0
    c2: float = 0.1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two snapshots")
        if self.dt <= 0:
            raise ValueError("dt must be positive")


def periodic_solution(t: np.ndarray, c1: float = 1.0, c2: float = 0.1) -> np.ndarray:
    """Closed-form trajectory of the periodic system, one row per time."""
    t = np.asarray(t, dtype=float)
    z1 = c1 * (np.sin(t) + np.cos(t)) - 2.0 * c2 * np.sin(t)
    z2 = c1 * np.sin(t) + c2 * (np.cos(t) - np.sin(t))
    return np.column_stack([z1, z2])


def gen_periodic(cfg: PeriodicConfig, sigma2: float, seed: int):
    """Clean and gamma-corrupted snapshots of the periodic system.

    Returns ``(noisy, clean, alpha_exact)`` with ``alpha_exact = [i, -i]``.
    ``sigma2 == 0`` yields identical clean and noisy sets.
    """
    times = np.arange(cfg.n) * cfg.dt
    clean = periodic_solution(times, cfg.c1, cfg.c2)
    if sigma2 == 0.0:
        noisy = clean.copy()
    else:
        noisy = apply_multiplicative(clean, sigma2, seed)
    alpha_exact = np.array([1j, -1j])
    return SnapshotSet(times, noisy), SnapshotSet(times, clean), alpha_exact


# ---------------------------------------------------------------------------
# two travelling sinusoids, one growing and one decaying
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HiddenConfig:
    n: int
    m: int = 300
    x_max: float = 15.0
    t_max: float = 1.0
    k1: float = 1.0
    omega1: float = 1.0
    growth1: float = 1.0
    k2: float = 0.4
    omega2: float = 3.7
    growth2: float = -0.2

    def __post_init__(self):
        if self.n < 2 or self.m < 2:
            raise ValueError("need at least two samples in each dimension")


def hidden_solution(cfg: HiddenConfig, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Superposed travelling waves on the (time, space) grid, rows are times."""
    xg = np.asarray(x, dtype=float)[None, :]
    tg = np.asarray(t, dtype=float)[:, None]
    wave1 = np.sin(cfg.k1 * xg - cfg.omega1 * tg) * np.exp(cfg.growth1 * tg)
    wave2 = np.sin(cfg.k2 * xg - cfg.omega2 * tg) * np.exp(cfg.growth2 * tg)
    return wave1 + wave2


def gen_hidden(cfg: HiddenConfig, sigma2: float, seed: int):
    """Clean and gamma-corrupted travelling-wave snapshots.

    Returns ``(noisy, clean, alpha_exact)`` where the four exact eigenvalues
    are ``growth1 +- i omega1`` and ``growth2 +- i omega2``.
    """
    x = np.linspace(0.0, cfg.x_max, cfg.m)
    times = np.linspace(0.0, cfg.t_max, cfg.n)
    clean = hidden_solution(cfg, x, times)
    if sigma2 == 0.0:
        noisy = clean.copy()
    else:
        noisy = apply_multiplicative(clean, sigma2, seed)
    alpha_exact = np.array(
        [
            cfg.growth1 + 1j * cfg.omega1,
            cfg.growth1 - 1j * cfg.omega1,
            cfg.growth2 + 1j * cfg.omega2,
            cfg.growth2 - 1j * cfg.omega2,
        ]
    )
    return SnapshotSet(times, noisy), SnapshotSet(times, clean), alpha_exact


# ---------------------------------------------------------------------------
# one-dimensional combustor (Galerkin modes with delayed heat release)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CombustorConfig:
    """Physics and discretisation of the duct combustor.

    The heat source sits at ``x_f`` and reacts to the local velocity
    fluctuation with delay ``tau``.  Modal damping follows
    ``0.1 + 0.06 sqrt(j)``.  The state starts from a small deterministic
    seed amplitude in the first mode (``kick``); the zero-noise run from the
    same seed amplitude is the clean reference trajectory.  Output is
    recorded every ``record_stride`` integration steps.
    """

    ma: float = 0.005
    x_f: float = 0.25
    tau: float = 0.16
    k_q: float = 0.0035
    gamma: float = 1.4
    j_max: int = 10
    dt: float = 0.01
    t_end: float = 200.0
    n_space: int = 500
    record_stride: int = 10
    kick: float = 0.05
    noise: NoiseSpec | None = None
    zeta0: tuple[float, ...] | None = None
    zeta_dot0: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.j_max < 1:
            raise ValueError("j_max must be at least 1")
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.tau != 0.0 and self.tau < self.dt:
            raise ValueError("delay must be zero or at least one time step")
        n_steps = round(self.t_end / self.dt)
        if abs(n_steps * self.dt - self.t_end) > 1e-9 * self.t_end:
            raise ValueError("t_end must be an integer number of time steps")
        if n_steps % self.record_stride != 0:
            raise ValueError("record_stride must divide the number of steps")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)

    def damping(self) -> np.ndarray:
        j = np.arange(1, self.j_max + 1, dtype=float)
        return 0.1 + 0.06 * np.sqrt(j)


@dataclass
class CombustorRun:
    """Recorded output of one combustor simulation."""

    times: np.ndarray          # recorded sample times
    x: np.ndarray              # spatial grid, n_space + 1 points
    pressure: np.ndarray       # (len(times), len(x)) pressure fluctuation
    u_f: np.ndarray            # velocity fluctuation at the heater, full rate
    noise: np.ndarray          # pink-noise trace, full rate
    full_times: np.ndarray = field(repr=False, default=None)


def _initial_state(cfg: CombustorConfig) -> np.ndarray:
    zeta = np.zeros(cfg.j_max)
    zdot = np.zeros(cfg.j_max)
    if cfg.zeta0 is not None:
        zeta[:] = np.asarray(cfg.zeta0, dtype=float)
    else:
        zeta[0] = cfg.kick
    if cfg.zeta_dot0 is not None:
        zdot[:] = np.asarray(cfg.zeta_dot0, dtype=float)
    return np.concatenate([zeta, zdot])


def simulate_combustor(cfg: CombustorConfig, seed: int | None = None) -> CombustorRun:
    """Integrate the modal combustor equations with classical RK4.

    The delayed velocity is read from the stored history with linear
    interpolation at the half-step stage times (zero history before t = 0);
    with ``tau == 0`` the stage states are used directly, so the delayed and
    instantaneous formulations coincide exactly.  Raises
    ``SimulationDivergedError`` if the state leaves finite range.
    """
    if seed is None:
        seed = cfg.noise.seed if cfg.noise is not None else 0
    n_steps = cfg.n_steps
    dt = cfg.dt
    jmax = cfg.j_max

    if cfg.noise is None:
        d = np.zeros(n_steps + 1)
    else:
        d = pink_noise(
            n_steps + 1, dt, cfg.noise.intensity, combustor_reference_rms(cfg), seed
        )

    j = np.arange(1, jmax + 1, dtype=float)
    omega2 = (j * np.pi) ** 2
    damp = cfg.damping()
    cos_f = np.cos(j * np.pi * cfg.x_f)
    force = -cfg.k_q * (2.0 * j * np.pi / (cfg.gamma * cfg.ma)) * np.sin(j * np.pi * cfg.x_f)
    sqrt_third = math.sqrt(1.0 / 3.0)

    y = _initial_state(cfg)
    u_hist = np.zeros(n_steps + 1)
    n_rec = n_steps // cfg.record_stride + 1
    zdot_rec = np.zeros((n_rec, jmax))

    def u_at(state):
        return float(cos_f @ state[:jmax])

    def delayed_u(t_query, state):
        if cfg.tau == 0.0:
            return u_at(state)
        tq = t_query - cfg.tau
        if tq <= 0.0:
            return 0.0
        pos = tq / dt
        i0 = min(int(pos), n_steps - 1)
        w = pos - i0
        return (1.0 - w) * u_hist[i0] + w * u_hist[i0 + 1]

    def rhs(state, u_delay, d_val):
        s = 1.0 / 3.0 + u_delay + d_val
        q = math.sqrt(abs(s)) - sqrt_third
        dy = np.empty(2 * jmax)
        dy[:jmax] = state[jmax:]
        dy[jmax:] = force * q - omega2 * state[:jmax] - damp * state[jmax:]
        return dy

    zdot_rec[0] = y[jmax:]
    u_hist[0] = u_at(y)
    rec = 1
    for k in range(n_steps):
        t = k * dt
        d_half = 0.5 * (d[k] + d[k + 1])
        k1 = rhs(y, delayed_u(t, y), d[k])
        y2 = y + (0.5 * dt) * k1
        k2 = rhs(y2, delayed_u(t + 0.5 * dt, y2), d_half)
        y3 = y + (0.5 * dt) * k2
        k3 = rhs(y3, delayed_u(t + 0.5 * dt, y3), d_half)
        y4 = y + dt * k3
        k4 = rhs(y4, delayed_u(t + dt, y4), d[k + 1])
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        u_hist[k + 1] = u_at(y)
        if (k + 1) % cfg.record_stride == 0:
            zdot_rec[rec] = y[jmax:]
            rec += 1
        if (k + 1) % 200 == 0 and not np.all(np.isfinite(y)):
            raise SimulationDivergedError("combustor state blew up", time=t + dt)
    if not np.all(np.isfinite(y)):
        raise SimulationDivergedError("combustor state blew up", time=n_steps * dt)

    x = np.linspace(0.0, 1.0, cfg.n_space + 1)
    sin_basis = np.sin(np.outer(j * np.pi, x))
    sin_basis[:, 0] = 0.0
    sin_basis[:, -1] = 0.0  # analytic boundary zeros, not float residue
    coeffs = -cfg.gamma * cfg.ma / (j * np.pi)
    pressure = (zdot_rec * coeffs) @ sin_basis
    rec_times = np.arange(n_rec) * (dt * cfg.record_stride)
    full_times = np.arange(n_steps + 1) * dt
    return CombustorRun(rec_times, x, pressure, u_hist, d, full_times)


@functools.lru_cache(maxsize=8)
def _reference_rms_cached(key) -> float:
    cfg = CombustorConfig(
        ma=key[0], x_f=key[1], tau=key[2], k_q=key[3], gamma=key[4],
        j_max=key[5], dt=key[6], t_end=200.0, kick=key[7],
        zeta0=key[8], zeta_dot0=key[9], noise=None,
    )
    run = simulate_combustor(cfg, seed=0)
    window = run.full_times >= 100.0
    return float(np.sqrt(np.mean(run.u_f[window] ** 2)))


def combustor_reference_rms(cfg: CombustorConfig) -> float:
    """RMS velocity fluctuation of the saturated noise-free oscillation.

    Computed once from a deterministic calibration run over [0, 200] (RMS of
    the heater velocity over the second half) and cached; this is the
    amplitude against which the pink-noise intensity ratios are defined.
    """
    key = (
        cfg.ma, cfg.x_f, cfg.tau, cfg.k_q, cfg.gamma, cfg.j_max, cfg.dt,
        cfg.kick, cfg.zeta0, cfg.zeta_dot0,
    )
    return _reference_rms_cached(key)


def combustor_config_for_profile(profile: str, seed: int = 0, **overrides) -> CombustorConfig:
    """Standard configuration with the named pink-noise intensity."""
    if profile not in NOISE_PROFILES:
        raise ValueError(f"unknown noise profile {profile!r}")
    spec = NoiseSpec(kind="pink", intensity=NOISE_PROFILES[profile], seed=seed)
    return replace(CombustorConfig(noise=spec), **overrides)


def segment_snapshots(field: np.ndarray, times: np.ndarray, window_count: int = 10):
    """Split a sampled field into contiguous equal-width time windows.

    The sample count minus one must be divisible by ``window_count``; the
    final window additionally keeps the last sample, so concatenating the
    windows reproduces the field exactly.
    """
    field = np.asarray(field)
    times = np.asarray(times, dtype=float)
    if field.ndim != 2 or times.ndim != 1 or times.size != field.shape[0]:
        raise ShapeError("field rows must match the time vector")
    n = times.size
    if window_count < 1 or (n - 1) % window_count != 0:
        raise ValueError("window_count must divide the horizon evenly")
    base = (n - 1) // window_count
    windows = []
    for i in range(window_count):
        lo = i * base
        hi = (i + 1) * base if i < window_count - 1 else n
        windows.append(SnapshotSet(times[lo:hi], field[lo:hi]))
    return windows
