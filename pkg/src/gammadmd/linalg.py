"""Dense matrix kernels shared by the solvers.

Everything here operates on plain NumPy arrays (real or complex) and is a
pure function of its inputs.  Pseudoinverses always go through the SVD;
problem sizes in this package never justify anything fancier.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError


def _svd_cutoff(s: np.ndarray, shape: tuple[int, int], rtol: float | None) -> np.ndarray:
    """Boolean mask of singular values kept at the given relative tolerance."""
    if rtol is None:
        rtol = np.finfo(float).eps * max(shape)
    if rtol < 0:
        raise ValueError("rtol must be nonnegative")
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(s.shape, dtype=bool)
    return (s > 0.0) & (s >= rtol * s[0])


def pinv(a: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below ``rtol * s_max`` are treated as zero.  The default
    tolerance is ``eps * max(a.shape)``.

    Parameters
    ----------
    a : (N, M) array_like, real or complex
    rtol : float, optional
        Relative singular-value cutoff.

    Returns
    -------
    (M, N) ndarray
    """
    a = np.asarray(a)
    if a.ndim != 2:
        raise ShapeError("pinv expects a 2-d array")
    if not np.all(np.isfinite(a)):
        raise ValueError("pinv: input has non-finite entries")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = _svd_cutoff(s, a.shape, rtol)
    if not np.any(keep):
        return np.zeros((a.shape[1], a.shape[0]), dtype=u.dtype)
    u = u[:, keep]
    vh = vh[keep]
    return (vh.conj().T / s[keep]) @ u.conj().T


class RangeProjector:
    """Orthogonal projector onto the column space of a matrix.

    Holds the thin SVD of ``phi`` so that projections, residuals and
    pseudoinverse products can all be applied without refactorising.
    """

    def __init__(self, phi: np.ndarray, rtol: float | None = None):
        phi = np.asarray(phi)
        if phi.ndim != 2:
            raise ShapeError("RangeProjector expects a 2-d array")
        u, s, vh = np.linalg.svd(phi, full_matrices=False)
        keep = _svd_cutoff(s, phi.shape, rtol)
        self.shape = phi.shape
        self.rank = int(np.count_nonzero(keep))
        self._u = u[:, keep]
        self._s = s[keep]
        self._vh = vh[keep]

    def project(self, k: np.ndarray) -> np.ndarray:
        """Apply ``Phi Phi^+`` to ``k``."""
        if k.shape[0] != self.shape[0]:
            raise ShapeError("row count mismatch in projection")
        return self._u @ (self._u.conj().T @ k)

    def residual(self, k: np.ndarray) -> np.ndarray:
        """Apply ``I - Phi Phi^+`` to ``k``."""
        return k - self.project(k)

    def pinv_apply(self, k: np.ndarray) -> np.ndarray:
        """Apply ``Phi^+`` to ``k``."""
        if k.shape[0] != self.shape[0]:
            raise ShapeError("row count mismatch in pseudoinverse product")
        return self._vh.conj().T @ ((self._u.conj().T @ k) / self._s[:, None])


def projector_residual(phi: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Project each column of ``k`` onto the orthogonal complement of range(phi).

    Returns ``(I - phi phi^+) k`` without forming the projector explicitly.
    """
    phi = np.asarray(phi)
    k = np.asarray(k)
    if phi.ndim != 2 or k.ndim != 2 or phi.shape[0] != k.shape[0]:
        raise ShapeError("projector_residual: phi and k must share their row count")
    return RangeProjector(phi).residual(k)


def frob_norm(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(a)))


def l2_norm(v: np.ndarray) -> float:
    """Euclidean norm of a vector."""
    return float(np.linalg.norm(np.asarray(v)))
