"""Dense real-symmetric and complex-Hermitian matrix services.

Everything downstream (SDP iterates, dual certificates, pseudo-density
matrices) is carried by the two value types defined here.  The eigensolver
is a cyclic Jacobi iteration; matrices in this toolkit stay small (dim of
a few dozen at most), where Jacobi is simple, accurate to machine
precision, and needs no external linear-algebra kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Default tolerance on the minimum eigenvalue for PSD verdicts.
PSD_TOL = 1e-9

_HERM_TOL = 1e-12
_RECON_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Eigensolver failed to reach its off-diagonal target."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix; construction symmetrizes and records the slip.

    ``asymmetry`` is the largest absolute difference between the input and
    its transpose, kept so callers can audit how non-symmetric their data
    was before the (M + M^T)/2 cleanup.
    """

    entries: np.ndarray
    asymmetry: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        if not np.array_equal(arr, arr.T):
            raise ValueError("entries must be exactly symmetric; use from_array")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_array(cls, m) -> "SymMatrix":
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
        return cls(entries=(m + m.T) / 2.0, asymmetry=asym)

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls(entries=np.eye(dim))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class HermMatrix:
    """Complex Hermitian matrix (validated to 1e-12, then exactly hermitized)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        slip = float(np.max(np.abs(arr - arr.conj().T)))
        if slip > _HERM_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {slip:.3e})")
        arr = (arr + arr.conj().T) / 2.0
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_array(cls, m) -> "HermMatrix":
        return cls(entries=np.asarray(m, dtype=complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted ascending with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class PsdVerdict:
    """PSD yes/no together with the raw minimum eigenvalue behind it."""

    is_psd: bool
    min_eigenvalue: float


def jacobi_eigh(a: np.ndarray, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric/Hermitian array.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvector columns ``v``.  Real input stays in real arithmetic; complex
    input uses the phase-aware rotation.  Raises ConvergenceError if the
    off-diagonal mass has not dropped to the target after ``max_sweeps``
    full sweeps.
    """
    a = np.array(a)
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real]), np.eye(1, dtype=a.dtype)

    v = np.eye(n, dtype=a.dtype)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v

    target = 1e-14 * scale
    # Entries individually below target/n cannot push the off-diagonal norm
    # over target, so rotating them away is wasted work.
    skip = target / n
    off = _offdiag_norm(a)
    for _ in range(max_sweeps):
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                # smaller root of t^2 - 2*tau*t - 1 = 0
                if tau >= 0.0:
                    t = -1.0 / (tau + math.sqrt(tau * tau + 1.0))
                else:
                    t = 1.0 / (-tau + math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = (t * c) * np.conj(phase)

                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p + np.conj(s) * row_q
                a[q, :] = -s * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p + s * col_q
                a[:, q] = -np.conj(s) * col_p + c * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p + s * vec_q
                v[:, q] = -np.conj(s) * vec_p + c * vec_q
        off = _offdiag_norm(a)
    else:
        raise ConvergenceError("Jacobi sweeps exhausted", residual=off)

    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _offdiag_norm(a: np.ndarray) -> float:
    d = a - np.diag(np.diag(a))
    return float(np.linalg.norm(d))


def _checked_decomposition(m: np.ndarray, w: np.ndarray, v: np.ndarray) -> EigenDecomposition:
    dec = EigenDecomposition(eigenvalues=w, eigenvectors=v)
    norm = max(1.0, float(np.linalg.norm(m)))
    recon_err = float(np.linalg.norm(dec.reconstruct() - m))
    ortho_err = float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[0])))
    if recon_err > _RECON_TOL * norm or ortho_err > _RECON_TOL:
        raise ConvergenceError(
            "eigendecomposition failed its reconstruction contract",
            residual=max(recon_err / norm, ortho_err),
        )
    return dec


def eig_sym(m: SymMatrix) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix, eigenvalues ascending."""
    w, v = jacobi_eigh(m.entries)
    return _checked_decomposition(m.entries, w, v)


def eig_herm(m: HermMatrix) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix; eigenvalues are real, ascending."""
    w, v = jacobi_eigh(m.entries)
    return _checked_decomposition(m.entries, w, v)


def min_eigenvalue(m: SymMatrix | HermMatrix) -> float:
    """Smallest eigenvalue; the input is PSD iff this is >= -tolerance."""
    w, _ = jacobi_eigh(m.entries)
    return float(w[0])


def psd_verdict(m: SymMatrix | HermMatrix, tol: float = PSD_TOL) -> PsdVerdict:
    """PSD verdict at tolerance ``tol`` plus the raw minimum eigenvalue."""
    lo = min_eigenvalue(m)
    return PsdVerdict(is_psd=lo >= -tol, min_eigenvalue=lo)


def trace_norm(m: HermMatrix | SymMatrix) -> float:
    """Trace norm (sum of absolute eigenvalues) of a Hermitian matrix."""
    w, _ = jacobi_eigh(m.entries)
    return float(np.sum(np.abs(w)))


def frobenius_distance(a: SymMatrix, b: SymMatrix) -> float:
    """Frobenius-norm distance between two symmetric matrices of equal dim."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(np.linalg.norm(a.entries - b.entries))


def principal_sqrt(m: SymMatrix, psd_tol: float = PSD_TOL) -> SymMatrix:
    """Symmetric PSD square root; refuses matrices that are not PSD."""
    w, v = jacobi_eigh(m.entries)
    if w[0] < -psd_tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return SymMatrix.from_array(root)
