"""Interior-point solver for unit-diagonal PSD maximization.

Solves

    maximize    sum_ij lambda_ij X_ij
    subject to  X symmetric PSD,  X_ii = 1 for all i

together with its dual

    minimize    sum_i y_i
    subject to  S = Diag(y) - Lambda PSD,

using a feasible-start predictor-corrector path-following method with
Nesterov-Todd scaling.  Because the identity matrix is strictly feasible
and the dual start Diag(y0) - Lambda is made strictly positive by choosing
y0 large enough, every iterate is exactly feasible on both sides and the
duality gap <X, S> is a certified bound on the distance to optimality.

The constraint family is fixed to the unit diagonal: for these constraints
the Newton system reduces to an n x n linear solve against the Hadamard
square of the scaling point, which keeps the solver dense, small and exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrixcore import PSD_TOL, SymMatrix, jacobi_eigh, min_eigenvalue

STATUS_OPTIMAL = "optimal"
STATUS_MAX_ITER = "max_iter"
STATUS_INFEASIBLE = "infeasible"

_FRACTION_TO_BOUNDARY = 0.98


class NumericalError(RuntimeError):
    """Newton system became numerically singular or the iteration stalled."""


@dataclass(frozen=True)
class SdpProblem:
    """Unit-diagonal PSD maximization instance.

    The objective matrix must have a zero diagonal: the objective never
    references the constrained entries X_ii.
    """

    dim: int
    objective: SymMatrix

    constraint_kind = "unit diagonal"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.objective.dim != self.dim:
            raise ValueError(
                f"objective dim {self.objective.dim} does not match problem dim {self.dim}"
            )
        if np.any(np.diag(self.objective.entries) != 0.0):
            raise ValueError("objective must have a zero diagonal")

    def value_of(self, x: SymMatrix) -> float:
        """Objective value sum_ij lambda_ij X_ij of a candidate matrix."""
        return float(np.sum(self.objective.entries * x.entries))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "lambda": self.objective.entries.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "SdpProblem":
        lam = SymMatrix.from_array(np.array(data["lambda"], dtype=float))
        return cls(dim=int(data["dim"]), objective=lam)


@dataclass(frozen=True)
class SdpSolution:
    primal: SymMatrix
    dual: np.ndarray
    dual_slack: SymMatrix
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    status: str


@dataclass(frozen=True)
class CertificateVerdict:
    """Feasibility, complementarity and optimality report for a primal/dual pair."""

    diag_residual: float
    primal_min_eig: float
    dual_slack_min_eig: float
    complementarity: float
    primal_feasible: bool
    dual_feasible: bool
    optimal_pair: bool


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def _is_pd(a: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return False
    return True


def _max_step(m: np.ndarray, dm: np.ndarray, steps: int = 40) -> float:
    """Largest alpha in [0, 1] keeping m + alpha*dm positive definite.

    Bisection on Cholesky success; the returned alpha is itself certified
    positive definite, so any shorter step is safe.
    """
    if _is_pd(m + dm):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = (lo + hi) / 2.0
        if _is_pd(m + mid * dm):
            lo = mid
        else:
            hi = mid
    return lo


def solve(problem: SdpProblem, tol: float = 1e-9, max_iter: int = 200) -> SdpSolution:
    """Solve the unit-diagonal SDP to a certified duality gap of ``tol``.

    Returns status "optimal" once gap <= tol; "max_iter" returns the best
    (still feasible) iterate.  A singular Newton system or a stalled step
    raises NumericalError.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    n = problem.dim
    lam = problem.objective.entries

    x = np.eye(n)
    y = np.full(n, 1.0 + float(np.linalg.norm(lam)))
    s = np.diag(y) - lam

    status = STATUS_MAX_ITER
    iterations = 0
    for iterations in range(max_iter + 1):
        gap = float(np.sum(x * s))
        if gap <= tol:
            status = STATUS_OPTIMAL
            break
        if iterations == max_iter:
            break

        # Nesterov-Todd scaling point W with W S W = X.
        wx, vx = jacobi_eigh(x)
        wx = np.clip(wx, 1e-300, None)
        rx = (vx * np.sqrt(wx)) @ vx.T
        x_inv = (vx * (1.0 / wx)) @ vx.T
        wm, vm = jacobi_eigh(_sym(rx @ s @ rx))
        wm = np.clip(wm, 1e-300, None)
        mid_isqrt = (vm * (1.0 / np.sqrt(wm))) @ vm.T
        w_nt = _sym(rx @ mid_isqrt @ rx)
        s_inv = _sym(w_nt @ x_inv @ w_nt)

        schur = w_nt * w_nt
        mu = gap / n

        def newton_step(sigma_mu: float) -> tuple[np.ndarray, np.ndarray]:
            rhs = sigma_mu * np.diag(s_inv) - 1.0
            try:
                dy = np.linalg.solve(schur, rhs)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"singular Newton system at iteration {iterations}") from exc
            dx = _sym(sigma_mu * s_inv - x - w_nt @ (w_nt * dy).T)
            return dx, dy

        # Predictor: pure affine step to estimate the centering weight.
        dx_aff, dy_aff = newton_step(0.0)
        ds_aff = np.diag(dy_aff)
        ap = _FRACTION_TO_BOUNDARY * _max_step(x, dx_aff)
        ad = _FRACTION_TO_BOUNDARY * _max_step(s, ds_aff)
        gap_aff = float(np.sum((x + ap * dx_aff) * (s + ad * ds_aff)))
        sigma = min(max((max(gap_aff, 0.0) / gap) ** 3, 1e-4), 0.99)

        # Corrector: recentered step actually taken.
        dx, dy = newton_step(sigma * mu)
        ds = np.diag(dy)
        ap = _FRACTION_TO_BOUNDARY * _max_step(x, dx)
        ad = _FRACTION_TO_BOUNDARY * _max_step(s, ds)
        if max(ap, ad) < 1e-13:
            raise NumericalError(f"step length collapsed at iteration {iterations}")

        x = _sym(x + ap * dx)
        np.fill_diagonal(x, 1.0)
        y = y + ad * dy
        s = np.diag(y) - lam

    primal = SymMatrix.from_array(x)
    dual_slack = SymMatrix.from_array(s)
    primal_value = problem.value_of(primal)
    dual_value = float(np.sum(y))
    return SdpSolution(
        primal=primal,
        dual=y.copy(),
        dual_slack=dual_slack,
        primal_value=primal_value,
        dual_value=dual_value,
        gap=dual_value - primal_value,
        iterations=iterations,
        status=status,
    )


def check_certificate(
    problem: SdpProblem,
    x: SymMatrix,
    y: np.ndarray,
    feas_tol: float = 1e-9,
    psd_tol: float = PSD_TOL,
    comp_tol: float = 1e-9,
) -> CertificateVerdict:
    """Judge a candidate primal/dual pair by feasibility and complementary slackness.

    A feasible pair whose slack inner product <X, S> vanishes is optimal on
    both sides; the verdict reports each ingredient separately so a failure
    can be attributed (primal infeasible, dual infeasible, or slack).
    """
    if x.dim != problem.dim:
        raise ValueError(f"dimension mismatch: x has dim {x.dim}, problem {problem.dim}")
    y = np.asarray(y, dtype=float)
    if y.shape != (problem.dim,):
        raise ValueError(f"dual vector must have shape ({problem.dim},), got {y.shape}")

    slack = SymMatrix.from_array(np.diag(y) - problem.objective.entries)
    diag_residual = float(np.max(np.abs(np.diag(x.entries) - 1.0)))
    primal_min = min_eigenvalue(x)
    dual_min = min_eigenvalue(slack)
    comp = float(np.sum(x.entries * slack.entries))

    primal_ok = diag_residual <= feas_tol and primal_min >= -psd_tol
    dual_ok = dual_min >= -psd_tol
    return CertificateVerdict(
        diag_residual=diag_residual,
        primal_min_eig=primal_min,
        dual_slack_min_eig=dual_min,
        complementarity=comp,
        primal_feasible=primal_ok,
        dual_feasible=dual_ok,
        optimal_pair=primal_ok and dual_ok and abs(comp) <= comp_tol,
    )
