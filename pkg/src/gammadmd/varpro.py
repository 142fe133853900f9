"""Variable-projection fit of exponentials (the additive-noise baseline).

The linear amplitudes are eliminated through the pseudoinverse, leaving a
nonlinear least-squares problem in the continuous-time eigenvalues alone,
which is solved with Levenberg-Marquardt.  Because the objective is a real
function of complex eigenvalues, the solver works in the 2R real coordinates
``(Re alpha, Im alpha)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpectrumError, ShapeError
from .linalg import RangeProjector
from .model import DEGENERACY_TOL, build_phi, min_pairwise_distance


@dataclass
class LmConfig:
    """Damping schedule and stop criteria for the Levenberg-Marquardt driver."""

    lambda0: float = 1.0
    lambda_up: float = 2.0
    lambda_down: float = 1.0 / 3.0
    tol: float = 1e-5
    max_iters: int = 200
    lambda_max: float = 1e15

    def __post_init__(self):
        if self.lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        if self.lambda_up <= 1:
            raise ValueError("lambda_up must exceed 1")
        if not 0 < self.lambda_down < 1:
            raise ValueError("lambda_down must lie in (0, 1)")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


@dataclass
class LmResult:
    """Outcome of an LM run; the trace holds residual norms at accepted steps."""

    alpha: np.ndarray
    residual_norms: list[float] = field(default_factory=list)
    iterations: int = 0
    status: str = "running"


def varpro_residual(h: np.ndarray, alpha: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Misfit ``h - Phi Phi^+ h`` of the best exponential fit at ``alpha``."""
    h = np.asarray(h)
    phi = build_phi(alpha, times)
    if h.shape[0] != phi.shape[0]:
        raise ShapeError("data rows must match the number of sample times")
    if min_pairwise_distance(np.asarray(alpha, dtype=complex)) < DEGENERACY_TOL:
        raise DegenerateSpectrumError("eigenvalue entries coincide")
    return RangeProjector(phi).residual(h)


def _jacobian_parts(h, alpha, times, proj=None):
    """Wirtinger blocks of the derivative of the fitted part ``Phi Phi^+ h``.

    Returns ``(ja, jb)`` with shape (N*M, R).  The derivative of the fit
    along the real axis of eigenvalue ``r`` is column ``r`` of ``ja + jb``;
    along the imaginary axis it is ``i * (ja - jb)``.
    """
    h = np.asarray(h, dtype=float)
    alpha = np.asarray(alpha, dtype=complex).ravel()
    times = np.asarray(times, dtype=float).ravel()
    phi = build_phi(alpha, times)
    if proj is None:
        proj = RangeProjector(phi)
    if proj.rank < alpha.size:
        raise DegenerateSpectrumError("exponential basis is rank-deficient")
    n, m = h.shape
    r = alpha.size

    b = proj.pinv_apply(h)                    # R x M amplitudes
    rho = proj.residual(h)                    # N x M residual
    dcols = times[:, None] * phi              # column r is d(phi[:, r])/d(alpha_r)
    dcols_perp = proj.residual(dcols)
    pinv_h = proj._u / proj._s @ proj._vh     # (Phi^+)^H, N x R
    w = dcols.conj().T @ rho                  # R x M

    ja = np.einsum("nr,rm->nmr", dcols_perp, b).reshape(n * m, r)
    jb = np.einsum("nr,rm->nmr", pinv_h, w).reshape(n * m, r)
    return ja, jb


def varpro_jacobian(h: np.ndarray, alpha: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Derivative of the fitted part ``vec(Phi Phi^+ h)`` in each eigenvalue.

    Column ``r`` is the full two-term (Golub-Pereyra) derivative along the
    real axis of eigenvalue ``r``; shape (N*M, R).
    """
    ja, jb = _jacobian_parts(h, alpha, times)
    return ja + jb


def _real_residual(rho):
    return np.concatenate([rho.real.ravel(), rho.imag.ravel()])


def _real_jacobian(ja, jb):
    """Residual Jacobian over the 2R real coordinates, shape (2NM, 2R)."""
    d_re = -(ja + jb)
    d_im = -1j * (ja - jb)
    nm, r = ja.shape
    out = np.empty((2 * nm, 2 * r))
    out[:nm, :r] = d_re.real
    out[nm:, :r] = d_re.imag
    out[:nm, r:] = d_im.real
    out[nm:, r:] = d_im.imag
    return out


def lm_solve(
    h: np.ndarray,
    times: np.ndarray,
    alpha0: np.ndarray,
    cfg: LmConfig | None = None,
) -> LmResult:
    """Minimise the variable-projection misfit with Levenberg-Marquardt.

    Steps are accepted only when they do not increase the residual norm, so
    the recorded trace is non-increasing.  Terminates when the relative
    eigenvalue change at an accepted step drops below ``cfg.tol``, on
    iteration exhaustion, or when damping saturates without progress.  A
    rank-deficient basis encountered mid-run returns the best iterate found
    so far with a ``degenerate`` status.

    Parameters
    ----------
    h : (N, M) real array of snapshots (rows are time samples).
    times : (N,) strictly increasing sample times.
    alpha0 : (R,) complex initial eigenvalues, pairwise distinct.

    Returns
    -------
    LmResult
    """
    cfg = cfg or LmConfig()
    h = np.asarray(h, dtype=float)
    times = np.asarray(times, dtype=float).ravel()
    alpha = np.asarray(alpha0, dtype=complex).ravel().copy()
    r = alpha.size
    if h.shape[0] < r:
        raise ShapeError("need at least as many snapshots as eigenvalues")
    if min_pairwise_distance(alpha) < DEGENERACY_TOL:
        raise DegenerateSpectrumError("initial eigenvalues coincide")

    def factor(a):
        proj = RangeProjector(build_phi(a, times))
        rho = proj.residual(h)
        return proj, rho, float(np.linalg.norm(rho))

    proj, rho, rnorm = factor(alpha)
    result = LmResult(alpha=alpha, residual_norms=[rnorm])
    lam = cfg.lambda0

    for it in range(1, cfg.max_iters + 1):
        result.iterations = it
        if proj.rank < r:
            result.status = "degenerate"
            return result
        ja, jb = _jacobian_parts(h, alpha, times, proj)
        jac = _real_jacobian(ja, jb)
        grad = jac.T @ _real_residual(rho)
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        floor = 1e-14 * diag.max() if diag.max() > 0 else 1.0
        diag = np.maximum(diag, floor)

        accepted = False
        while lam <= cfg.lambda_max:
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= cfg.lambda_up
                continue
            cand = alpha + delta[:r] + 1j * delta[r:]
            if min_pairwise_distance(cand) < DEGENERACY_TOL:
                lam *= cfg.lambda_up
                continue
            proj_c, rho_c, rnorm_c = factor(cand)
            if rnorm_c <= rnorm:
                step = float(np.linalg.norm(cand - alpha))
                alpha, proj, rho, rnorm = cand, proj_c, rho_c, rnorm_c
                lam = max(lam * cfg.lambda_down, 1e-14)
                result.alpha = alpha
                result.residual_norms.append(rnorm)
                accepted = True
                break
            lam *= cfg.lambda_up
        if not accepted:
            result.status = "stalled"
            return result
        scale = float(np.linalg.norm(alpha))
        if scale > 0 and step / scale < cfg.tol:
            result.status = "converged"
            return result

    result.status = "max_iters"
    return result
