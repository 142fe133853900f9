"""Alternating projected gradient descent for the multiplicative-noise model.

Each outer iteration sweeps twice: a projected gradient step in the denoised
matrix (kept inside the sign cone of the data) and a gradient step in the
complex eigenvalues, each with its own doubling/halving backtracking search
on the step size.  Accepted steps satisfy a sufficient-decrease inequality,
so the energy trace is non-increasing by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, FidelitySingularityError
from .linalg import RangeProjector
from .model import (
    DEGENERACY_TOL,
    ModelConfig,
    SolveResult,
    SolveTrace,
    build_phi,
    in_open_sign_cone,
    min_pairwise_distance,
    project_sign_cone,
)
from .varpro import LmConfig, lm_solve

#: Halvings allowed in one backtracking search before declaring stagnation.
MAX_HALVINGS = 60


@dataclass
class IterateState:
    """Mutable state carried between descent blocks."""

    htilde: np.ndarray
    alpha: np.ndarray
    tau_h: float
    tau_alpha: float
    k: int = 0


def fidelity_grad_matrix(h: np.ndarray, htilde: np.ndarray, zero_tol: float = 0.0) -> np.ndarray:
    """Entrywise gradient of the data term: ``1/ht - h/ht^2`` where ``h != 0``."""
    h = np.asarray(h, dtype=float)
    htilde = np.asarray(htilde, dtype=float)
    mask = np.abs(h) > zero_tol
    ht = htilde[mask]
    if np.any(ht == 0.0):
        raise FidelitySingularityError(
            "denoised entry is zero at a nonzero data entry; gradient undefined"
        )
    out = np.zeros_like(htilde)
    out[mask] = 1.0 / ht - h[mask] / ht**2
    return out


def grad_h(
    h: np.ndarray,
    htilde: np.ndarray,
    alpha: np.ndarray,
    times: np.ndarray,
    eta: float,
    zero_tol: float = 0.0,
) -> np.ndarray:
    """Gradient of the energy in the denoised matrix."""
    proj = RangeProjector(build_phi(alpha, times))
    return fidelity_grad_matrix(h, htilde, zero_tol) + eta * proj.residual(htilde).real


def grad_alpha(
    htilde: np.ndarray,
    alpha: np.ndarray,
    times: np.ndarray,
    eta: float,
) -> np.ndarray:
    """Complex gradient of the energy in the eigenvalues.

    Uses the convention that the real and imaginary parts of the returned
    vector are the partial derivatives in the real and imaginary parts of
    each eigenvalue, so the descent direction is the negated return value.
    """
    htilde = np.asarray(htilde, dtype=float)
    alpha = np.asarray(alpha, dtype=complex).ravel()
    times = np.asarray(times, dtype=float).ravel()
    phi = build_phi(alpha, times)
    proj = RangeProjector(phi)
    if proj.rank < alpha.size:
        raise DegenerateSpectrumError("exponential basis is rank-deficient")
    return _grad_alpha_fast(htilde, phi, proj, times, eta)


def _grad_alpha_fast(htilde, phi, proj, times, eta):
    # Equivalent to eta * J^H vec(residual) with J the residual Jacobian; the
    # second Golub-Pereyra term annihilates against the residual, leaving one
    # contraction over the first term.
    b = proj.pinv_apply(htilde)
    rho = proj.residual(htilde)
    dcols = times[:, None] * phi
    w = rho.conj().T @ dcols
    s = np.einsum("rm,mr->r", b, w)
    return -eta * np.conj(s)


class _Objective:
    """Cached pieces of the energy for one data matrix and penalty weight."""

    def __init__(self, h, times, eta, zero_tol):
        self.h = np.asarray(h, dtype=float)
        self.times = np.asarray(times, dtype=float).ravel()
        self.eta = float(eta)
        self.zero_tol = float(zero_tol)
        self.mask = np.abs(self.h) > self.zero_tol
        self.h_nz = self.h[self.mask]

    def factor(self, alpha):
        return RangeProjector(build_phi(alpha, self.times))

    def fidelity(self, htilde):
        ht = htilde[self.mask]
        if np.any(ht == 0.0):
            return math.inf
        return float(np.sum(np.log(np.abs(ht)) + self.h_nz / ht))

    def penalty(self, htilde, proj):
        res = proj.residual(htilde)
        return 0.5 * self.eta * float(np.sum(res.real**2 + res.imag**2))

    def energy(self, htilde, proj):
        fid = self.fidelity(htilde)
        if math.isinf(fid):
            return math.inf
        return fid + self.penalty(htilde, proj)


def _h_block(obj, htilde, proj, e_cur, tau):
    """Backtracking projected gradient sweep in the denoised matrix."""
    grad = fidelity_grad_matrix(obj.h, htilde, obj.zero_tol)
    grad += obj.eta * proj.residual(htilde).real
    tau *= 2.0
    halvings = 0
    while True:
        cand = project_sign_cone(htilde - tau * grad, obj.h, obj.zero_tol)
        e_new = obj.energy(cand, proj)
        decrease = float(np.sum((cand - htilde) ** 2)) / (2.0 * tau)
        if e_new <= e_cur - decrease:
            return cand, e_new, tau, False
        tau *= 0.5
        halvings += 1
        if halvings > MAX_HALVINGS:
            return htilde, e_cur, tau, True


def _clamp_rectangle(alpha, bounds):
    re = np.clip(alpha.real, bounds[0], bounds[1])
    im = np.clip(alpha.imag, bounds[2], bounds[3])
    return re + 1j * im


def _alpha_block(obj, htilde, alpha, proj, e_cur, tau, bounds):
    """Backtracking gradient sweep in the eigenvalues."""
    grad = _grad_alpha_fast(htilde, build_phi(alpha, obj.times), proj, obj.times, obj.eta)
    fid = e_cur - obj.penalty(htilde, proj)
    tau *= 2.0
    halvings = 0
    while True:
        cand = alpha - tau * grad
        if bounds is not None:
            cand = _clamp_rectangle(cand, bounds)
        if min_pairwise_distance(cand) < DEGENERACY_TOL or not np.all(np.isfinite(cand)):
            e_new, proj_c = math.inf, None
        else:
            proj_c = obj.factor(cand)
            e_new = fid + obj.penalty(htilde, proj_c)
        decrease = float(np.linalg.norm(cand - alpha) ** 2) / (2.0 * tau)
        if e_new <= e_cur - decrease:
            return cand, proj_c, e_new, tau, False
        tau *= 0.5
        halvings += 1
        if halvings > MAX_HALVINGS:
            return alpha, proj, e_cur, tau, True


def descend_h(
    state: IterateState,
    h: np.ndarray,
    times: np.ndarray,
    eta: float,
    zero_tol: float = 0.0,
) -> IterateState:
    """Run one projected-gradient block in the denoised matrix."""
    obj = _Objective(h, times, eta, zero_tol)
    proj = obj.factor(state.alpha)
    e_cur = obj.energy(state.htilde, proj)
    htilde, _, tau, _ = _h_block(obj, state.htilde, proj, e_cur, state.tau_h)
    return IterateState(htilde, state.alpha, tau, state.tau_alpha, state.k)


def descend_alpha(
    state: IterateState,
    h: np.ndarray,
    times: np.ndarray,
    eta: float,
    zero_tol: float = 0.0,
) -> IterateState:
    """Run one gradient block in the eigenvalues."""
    obj = _Objective(h, times, eta, zero_tol)
    proj = obj.factor(state.alpha)
    e_cur = obj.energy(state.htilde, proj)
    alpha, _, _, tau, _ = _alpha_block(
        obj, state.htilde, state.alpha, proj, e_cur, state.tau_alpha, None
    )
    return IterateState(state.htilde, alpha, state.tau_h, tau, state.k + 1)


def _rel_step(delta_norm, new_norm):
    if new_norm > 0:
        return delta_norm / new_norm
    return 0.0 if delta_norm == 0 else math.inf


def alternating_descent(
    h: np.ndarray,
    times: np.ndarray,
    alpha0: np.ndarray,
    cfg: ModelConfig,
    htilde0: np.ndarray | None = None,
    init_label: str | None = None,
) -> SolveResult:
    """Solve the penalised multiplicative-noise model by alternating descent.

    Parameters
    ----------
    h : (N, M) real snapshot matrix (rows are time samples).
    times : (N,) strictly increasing sample times.
    alpha0 : (R,) complex initial eigenvalues, pairwise distinct.
    cfg : ModelConfig
    htilde0 : optional starting denoised matrix with strict data signs;
        defaults to ``h`` itself.

    Returns
    -------
    SolveResult
        Final denoised matrix, eigenvalues, amplitudes and the energy trace.
        ``trace.status`` is ``converged``, ``max_iters``, ``degenerate``
        (eigenvalues collided) or ``stagnated`` (both backtracking searches
        underflowed).
    """
    h = np.asarray(h, dtype=float)
    times = np.asarray(times, dtype=float).ravel()
    alpha = np.asarray(alpha0, dtype=complex).ravel().copy()
    if alpha.size != cfg.rank:
        raise ValueError("alpha0 length must equal cfg.rank")
    if min_pairwise_distance(alpha) < DEGENERACY_TOL:
        raise DegenerateSpectrumError("initial eigenvalues coincide")
    htilde = h.copy() if htilde0 is None else np.asarray(htilde0, dtype=float).copy()
    if not in_open_sign_cone(htilde, h, cfg.zero_tol):
        raise ValueError("initial denoised matrix must have strict data signs")

    eta = cfg.eta_effective(times)
    obj = _Objective(h, times, eta, cfg.zero_tol)
    proj = obj.factor(alpha)
    e = obj.energy(htilde, proj)
    if math.isinf(e):
        raise ValueError("initial state has infinite energy")

    trace = SolveTrace(energies=[e])
    tau_h = cfg.tau_h0
    tau_a = cfg.tau_alpha0 if cfg.tau_alpha0 is not None else 0.1 / eta
    status = "max_iters"
    iterations = 0

    for _ in range(cfg.max_outer_iters):
        iterations += 1
        htilde_new, e, tau_h, stuck_h = _h_block(obj, htilde, proj, e, tau_h)
        h_step = _rel_step(
            float(np.linalg.norm(htilde_new - htilde)), float(np.linalg.norm(htilde_new))
        )
        htilde = htilde_new

        alpha_new, proj_new, e, tau_a, stuck_a = _alpha_block(
            obj, htilde, alpha, proj, e, tau_a, cfg.alpha_bounds
        )
        a_step = _rel_step(
            float(np.linalg.norm(alpha_new - alpha)), float(np.linalg.norm(alpha_new))
        )
        alpha = alpha_new
        if proj_new is not None:
            proj = proj_new

        trace.energies.append(e)
        trace.h_steps.append(h_step)
        trace.alpha_steps.append(a_step)

        if min_pairwise_distance(alpha) < DEGENERACY_TOL:
            status = "degenerate"
            break
        if stuck_h and stuck_a:
            status = "stagnated"
            break
        if max(h_step, a_step) < cfg.tol:
            status = "converged"
            break

    trace.status = status
    b = proj.pinv_apply(htilde)
    return SolveResult(htilde, alpha, b, trace, iterations, init_label)


def fd_init(h: np.ndarray, times: np.ndarray, rank: int) -> np.ndarray:
    """Eigenvalue initial guess from a trapezoidal finite-difference fit.

    Projects the snapshots onto their leading left singular subspace, fits
    the reduced linear generator from centred differences in time, and
    returns its eigenvalues.
    """
    h = np.asarray(h, dtype=float)
    times = np.asarray(times, dtype=float).ravel()
    n = h.shape[0]
    if rank < 1:
        raise ValueError("rank must be positive")
    if n < rank + 1:
        raise ValueError("need at least rank + 1 snapshots for the initial guess")

    x = h.T
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    if s.size < rank or s[0] == 0.0 or s[rank - 1] <= s[0] * np.finfo(float).eps * max(x.shape):
        raise DegenerateSpectrumError("projected snapshots collapse below the target rank")
    reduced = s[:rank, None] * vh[:rank]

    dt = np.diff(times)
    slopes = (reduced[:, 1:] - reduced[:, :-1]) / dt
    midpoints = 0.5 * (reduced[:, 1:] + reduced[:, :-1])
    generator = slopes @ np.linalg.pinv(midpoints)
    return np.linalg.eigvals(generator)


def full_solve(
    h: np.ndarray,
    times: np.ndarray,
    cfg: ModelConfig,
    lm_cfg: LmConfig | None = None,
) -> SolveResult:
    """Run the alternating descent from both initial guesses and keep the best.

    The first run starts from the finite-difference eigenvalue estimate, the
    second from the output of the baseline variable-projection solver seeded
    with the same estimate.  The result with the smaller final energy wins.
    """
    alpha_fd = fd_init(h, times, cfg.rank)
    runs = []
    errors = []
    try:
        runs.append(alternating_descent(h, times, alpha_fd, cfg, init_label="fd"))
    except DegenerateSpectrumError as exc:
        errors.append(exc)
    try:
        lm = lm_solve(h, times, alpha_fd, lm_cfg)
        runs.append(alternating_descent(h, times, lm.alpha, cfg, init_label="lm"))
    except DegenerateSpectrumError as exc:
        errors.append(exc)
    if not runs:
        raise errors[-1]
    return min(runs, key=lambda r: r.energy)
