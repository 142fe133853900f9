"""Shared data model for the two DMD variants.

The central objects are a snapshot matrix ``h`` (rows are time samples,
columns are spatial points), a complex vector ``alpha`` of continuous-time
eigenvalues, and the exponential basis built from them.  The multiplicative
noise model additionally constrains the denoised matrix to the sign cone of
the data: entries keep the sign of the observation and are pinned to zero
wherever the observation is zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpectrumError, DegenerateSpectrumWarning, ShapeError
from .linalg import RangeProjector

#: Pairwise eigenvalue separations below this trigger degeneracy handling.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class SnapshotSet:
    """Time samples of a (possibly noisy) field.

    ``data`` has one row per sample time; ``times`` must be strictly
    increasing.  Sample spacing does not need to be uniform.
    """

    times: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ShapeError("snapshot data must be 2-d (time x space)")
        if times.ndim != 1 or times.size != data.shape[0]:
            raise ShapeError("times must be 1-d with one entry per snapshot row")
        if times.size < 2:
            raise ValueError("need at least two snapshots")
        if not np.all(np.diff(times) > 0):
            raise ValueError("sample times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(data))):
            raise ValueError("snapshots contain non-finite values")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "data", data)

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_space(self) -> int:
        return self.data.shape[1]


@dataclass
class ModelConfig:
    """Parameters of the penalised multiplicative-noise model and its solver.

    ``eta`` is interpreted per unit sample time by default: the solver
    weights the penalty with ``eta / mean_dt``, treating the data term as a
    quadrature of an integral over the sampling window.  The reference
    experiment tables reproduce under this convention; set
    ``eta_per_unit_time=False`` to take ``eta`` as the absolute weight from
    the energy formula.

    ``tau_alpha0`` defaults to ``0.1 / eta_effective``; both step sizes are
    only starting points for the backtracking searches.  ``alpha_bounds``
    optionally clamps eigenvalues to a rectangle
    ``(re_min, re_max, im_min, im_max)`` applied after each update; by
    default the eigenvalues are unconstrained.
    """

    rank: int
    eta: float
    tol: float = 1e-5
    max_outer_iters: int = 10_000
    tau_h0: float = 0.1
    tau_alpha0: float | None = None
    alpha_bounds: tuple[float, float, float, float] | None = None
    zero_tol: float = 0.0
    eta_per_unit_time: bool = True

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be positive")
        if self.tau_h0 <= 0:
            raise ValueError("tau_h0 must be positive")
        if self.tau_alpha0 is not None and self.tau_alpha0 <= 0:
            raise ValueError("tau_alpha0 must be positive")

    def eta_effective(self, times) -> float:
        """Penalty weight the solver uses for data sampled at these times."""
        if not self.eta_per_unit_time:
            return self.eta
        times = np.asarray(times, dtype=float)
        return self.eta / float(np.mean(np.diff(times)))


def min_pairwise_distance(alpha: np.ndarray) -> float:
    """Smallest modulus of a difference between two eigenvalue entries."""
    alpha = np.asarray(alpha)
    if alpha.size < 2:
        return math.inf
    diff = np.abs(alpha[:, None] - alpha[None, :])
    diff[np.diag_indices_from(diff)] = math.inf
    return float(diff.min())


def check_eigenvalues(alpha: np.ndarray, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Validate an eigenvalue vector, warning on near-coincident entries."""
    alpha = np.asarray(alpha, dtype=complex).ravel()
    if alpha.size == 0:
        raise ValueError("eigenvalue vector is empty")
    if not np.all(np.isfinite(alpha)):
        raise ValueError("eigenvalues contain non-finite values")
    if min_pairwise_distance(alpha) < tol:
        warnings.warn(
            "eigenvalue entries are nearly coincident; the exponential basis "
            "is close to rank-deficient",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    return alpha


def build_phi(alpha: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Exponential basis matrix with entries ``exp(alpha_r * t_n)``."""
    alpha = np.asarray(alpha, dtype=complex).ravel()
    times = np.asarray(times, dtype=float).ravel()
    return np.exp(np.outer(times, alpha))


def amplitudes(data: np.ndarray, alpha: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Least-squares mode amplitudes ``B = Phi(alpha)^+ data``.

    Raises if the exponential basis is rank-deficient, since the amplitudes
    are then not identifiable.
    """
    data = np.asarray(data)
    phi = build_phi(alpha, times)
    if data.shape[0] != phi.shape[0]:
        raise ShapeError("data rows must match the number of sample times")
    proj = RangeProjector(phi)
    if proj.rank < phi.shape[1]:
        raise DegenerateSpectrumError(
            "exponential basis is rank-deficient; amplitudes are not identifiable"
        )
    return proj.pinv_apply(data)


def project_sign_cone(k: np.ndarray, h: np.ndarray, zero_tol: float = 0.0) -> np.ndarray:
    """Euclidean projection of ``k`` onto the sign cone of ``h``.

    Entrywise: clamp to ``>= 0`` where ``h > 0``, to ``<= 0`` where ``h < 0``,
    and to exactly zero where ``h`` is zero.
    """
    k = np.asarray(k, dtype=float)
    h = np.asarray(h, dtype=float)
    if k.shape != h.shape:
        raise ShapeError("sign-cone projection needs matching shapes")
    zero = np.abs(h) <= zero_tol
    out = np.where(h > 0, np.maximum(k, 0.0), np.minimum(k, 0.0))
    out[zero] = 0.0
    return out


def in_sign_cone(k: np.ndarray, h: np.ndarray, zero_tol: float = 0.0) -> bool:
    """Whether ``k`` lies in the (closed) sign cone of ``h``."""
    k = np.asarray(k)
    h = np.asarray(h)
    if k.shape != h.shape:
        raise ShapeError("sign-cone membership needs matching shapes")
    zero = np.abs(h) <= zero_tol
    ok_pos = np.all(k[h > 0] >= 0) if np.any(h > 0) else True
    ok_neg = np.all(k[h < 0] <= 0) if np.any(h < 0) else True
    return bool(ok_pos and ok_neg and np.all(k[zero] == 0))


def in_open_sign_cone(k: np.ndarray, h: np.ndarray, zero_tol: float = 0.0) -> bool:
    """Strict-sign membership: signs agree exactly wherever ``h`` is nonzero."""
    k = np.asarray(k)
    h = np.asarray(h)
    if k.shape != h.shape:
        raise ShapeError("sign-cone membership needs matching shapes")
    zero = np.abs(h) <= zero_tol
    ok_pos = np.all(k[h > 0] > 0) if np.any(h > 0) else True
    ok_neg = np.all(k[h < 0] < 0) if np.any(h < 0) else True
    return bool(ok_pos and ok_neg and np.all(k[zero] == 0))


def fidelity(h: np.ndarray, htilde: np.ndarray, zero_tol: float = 0.0) -> float:
    """Multiplicative-noise data term ``sum(log|ht| + h/ht)`` over nonzero data.

    Returns ``inf`` when some denoised entry vanishes where the data does
    not; that is the saturating convention used throughout the solver.
    """
    h = np.asarray(h, dtype=float)
    htilde = np.asarray(htilde, dtype=float)
    if h.shape != htilde.shape:
        raise ShapeError("fidelity needs matching shapes")
    mask = np.abs(h) > zero_tol
    ht = htilde[mask]
    if np.any(ht == 0.0):
        return math.inf
    return float(np.sum(np.log(np.abs(ht)) + h[mask] / ht))


def penalty(htilde: np.ndarray, proj: RangeProjector, eta: float) -> float:
    """Quadratic range penalty ``eta/2 * || (I - Phi Phi^+) htilde ||_F^2``."""
    res = proj.residual(htilde)
    return 0.5 * eta * float(np.sum(res.real**2 + res.imag**2))


def energy(
    h: np.ndarray,
    htilde: np.ndarray,
    alpha: np.ndarray,
    times: np.ndarray,
    eta: float,
    zero_tol: float = 0.0,
) -> float:
    """Objective of the penalised multiplicative-noise model.

    Sum of the entrywise data term and the range penalty; ``inf`` (a
    saturating sentinel that compares greater than any finite value) when the
    data term is singular.
    """
    fid = fidelity(h, htilde, zero_tol)
    if math.isinf(fid):
        return math.inf
    proj = RangeProjector(build_phi(alpha, times))
    return fid + penalty(np.asarray(htilde, dtype=float), proj, eta)


def fidelity_floor(h: np.ndarray, zero_tol: float = 0.0) -> float:
    """Lower bound ``sum(log|h| + 1)`` of the data term over nonzero entries."""
    h = np.asarray(h, dtype=float)
    nz = h[np.abs(h) > zero_tol]
    return float(np.sum(np.log(np.abs(nz)) + 1.0))


def energy_shifted(
    h: np.ndarray,
    htilde: np.ndarray,
    alpha: np.ndarray,
    times: np.ndarray,
    eta: float,
    zero_tol: float = 0.0,
) -> float:
    """Energy minus its data-term floor; nonnegative, zero only at the optimum."""
    e = energy(h, htilde, alpha, times, eta, zero_tol)
    if math.isinf(e):
        return math.inf
    return e - fidelity_floor(h, zero_tol)


def reconstruct(alpha: np.ndarray, times: np.ndarray, source: np.ndarray) -> np.ndarray:
    """Real part of the projection of ``source`` onto the exponential basis."""
    source = np.asarray(source)
    phi = build_phi(alpha, times)
    if source.shape[0] != phi.shape[0]:
        raise ShapeError("source rows must match the number of sample times")
    return RangeProjector(phi).project(source).real


@dataclass
class SolveTrace:
    """Per-iteration record of a proposed-model solve."""

    energies: list[float] = field(default_factory=list)
    alpha_steps: list[float] = field(default_factory=list)
    h_steps: list[float] = field(default_factory=list)
    status: str = "running"


@dataclass
class SolveResult:
    """Final state of a proposed-model solve."""

    htilde: np.ndarray
    alpha: np.ndarray
    amplitudes: np.ndarray
    trace: SolveTrace
    iterations: int
    init_label: str | None = None

    @property
    def energy(self) -> float:
        return self.trace.energies[-1]

    @property
    def status(self) -> str:
        return self.trace.status
