"""The N-cycle sequential-correlation inequality and its certificates.

The inequality sums the correlations of adjacent measurement pairs around
a cycle of length N, with a sign flip on the closing edge.  Macro-realist
models reach at most N - 2 while quantum strategies reach N cos(pi/N).
This module carries the closed-form optimizer, the explicit dual
certificate that proves the quantum bound, the nondegeneracy test behind
uniqueness of the optimizer, and a seeded robustness experiment measuring
how fast near-optimal correlation matrices approach the optimizer.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import qsim
from .matrixcore import PSD_TOL, SymMatrix, jacobi_eigh, min_eigenvalue, principal_sqrt
from .sdpsolve import SdpProblem


@dataclass(frozen=True)
class NCycleInequality:
    """Coefficients and bounds of one cycle inequality.

    The coefficient matrix is stored symmetrized (half weight on each of
    (i, j) and (j, i)) so that sum_ij lambda_ij X_ij evaluated on a
    symmetric X equals the cycle expression exactly.
    """

    n: int
    coefficients: SymMatrix
    classical_bound: float
    quantum_bound: float

    def sdp_problem(self) -> SdpProblem:
        return SdpProblem(dim=self.n, objective=self.coefficients)

    def evaluate(self, x: SymMatrix) -> float:
        """Cycle expression sum_ij lambda_ij X_ij on a symmetric matrix."""
        return float(np.sum(self.coefficients.entries * x.entries))


def build(n: int) -> NCycleInequality:
    """Cycle inequality of length ``n`` (needs n >= 3)."""
    if n < 3:
        raise ValueError(f"cycle length must be at least 3, got {n}")
    lam = np.zeros((n, n))
    for i in range(n - 1):
        lam[i, i + 1] = lam[i + 1, i] = 0.5
    lam[0, n - 1] = lam[n - 1, 0] = -0.5
    return NCycleInequality(
        n=n,
        coefficients=SymMatrix.from_array(lam),
        classical_bound=float(n - 2),
        quantum_bound=float(n * np.cos(np.pi / n)),
    )


def analytic_optimizer(n: int) -> SymMatrix:
    """Closed-form optimizer X[i][j] = cos((i - j) pi / n).

    This is the Gram matrix of unit vectors fanned out in a plane at
    angles i pi / n, so it is PSD with unit diagonal by construction.  It
    is certified, not trusted: certificate_bundle checks complementary
    slackness against the dual certificate at runtime.
    """
    if n < 3:
        raise ValueError(f"cycle length must be at least 3, got {n}")
    idx = np.arange(n)
    return SymMatrix.from_array(np.cos((idx[:, None] - idx[None, :]) * np.pi / n))


def dual_certificate(n: int) -> tuple[SymMatrix, SymMatrix]:
    """Dual-optimal pair (W, T) with W = cos(pi/n) I + T/2.

    T carries -1 on the two cycle off-diagonals and +1 in the closing
    corners; its spectrum is bounded below by -2 cos(pi/n), which makes W
    PSD with trace n cos(pi/n), matching the quantum bound.
    """
    if n < 3:
        raise ValueError(f"cycle length must be at least 3, got {n}")
    t = np.zeros((n, n))
    for i in range(n - 1):
        t[i, i + 1] = t[i + 1, i] = -1.0
    t[0, n - 1] = t[n - 1, 0] = 1.0
    w = np.cos(np.pi / n) * np.eye(n) + 0.5 * t
    return SymMatrix.from_array(w), SymMatrix.from_array(t)


def t_spectrum_analytic(n: int) -> np.ndarray:
    """Closed-form spectrum of T: {-2 cos((2m + 1) pi / n)}, sorted ascending.

    For odd n the value +2 shows up (at 2m + 1 = n); the multiset agrees
    with the numerical spectrum of the T matrix.
    """
    if n < 3:
        raise ValueError(f"cycle length must be at least 3, got {n}")
    m = np.arange(n)
    return np.sort(-2.0 * np.cos((2 * m + 1) * np.pi / n))


def nondegeneracy_nullspace(n: int, w: SymMatrix | None = None) -> int:
    """Dimension of {M symmetric, zero diagonal : M W = 0}, by numerical rank.

    The linear system is assembled over the n(n-1)/2 free off-diagonal
    entries; singular values below 1e-9 of the largest count as zero.  A
    zero nullspace makes the dual certificate nondegenerate, which is what
    forces the primal optimizer to be unique.
    """
    if n < 3:
        raise ValueError(f"cycle length must be at least 3, got {n}")
    w_arr = dual_certificate(n)[0].entries if w is None else w.entries
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    system = np.zeros((n * n, len(pairs)))
    for col, (i, j) in enumerate(pairs):
        system[i * n : (i + 1) * n, col] += w_arr[j, :]
        system[j * n : (j + 1) * n, col] += w_arr[i, :]
    svals = np.linalg.svd(system, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return len(pairs)
    return int(np.sum(svals < 1e-9 * svals[0]))


@dataclass(frozen=True)
class CertificateBundle:
    """Primal optimizer, dual certificate and every verdict for one cycle length."""

    n: int
    x_opt: SymMatrix
    w: SymMatrix
    t: SymMatrix
    objective: float
    slackness: float
    w_min_eig: float
    nullspace_dim: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "objective": self.objective,
            "slackness": self.slackness,
            "w_min_eig": self.w_min_eig,
            "nullspace_dim": self.nullspace_dim,
            "ok": self.ok,
            "failures": list(self.failures),
            "x_opt": self.x_opt.entries.tolist(),
            "w": self.w.entries.tolist(),
            "t": self.t.entries.tolist(),
        }


def certificate_bundle(
    n: int,
    x_override: SymMatrix | None = None,
    w_override: SymMatrix | None = None,
) -> CertificateBundle:
    """Assemble and judge the full certificate for cycle length ``n``.

    The overrides exist to exercise failure reporting: substituting a
    corrupted optimizer or dual matrix yields a bundle whose ``failures``
    name the broken check instead of raising.
    """
    ineq = build(n)
    x = analytic_optimizer(n) if x_override is None else x_override
    w, t = dual_certificate(n)
    if w_override is not None:
        w = w_override

    objective = ineq.evaluate(x)
    slackness = float(np.sum(x.entries * w.entries))
    w_min = min_eigenvalue(w)
    null_dim = nondegeneracy_nullspace(n, w=w)

    failures = []
    if abs(objective - ineq.quantum_bound) > 1e-10:
        failures.append("objective")
    if float(np.max(np.abs(np.diag(x.entries) - 1.0))) > 1e-9:
        failures.append("primal-diag")
    if min_eigenvalue(x) < -PSD_TOL:
        failures.append("primal-psd")
    if w_min < -PSD_TOL:
        failures.append("dual-slack-psd")
    if abs(slackness) > 1e-9:
        failures.append("slackness")
    if null_dim != 0:
        failures.append("nullspace")

    return CertificateBundle(
        n=n,
        x_opt=x,
        w=w,
        t=t,
        objective=objective,
        slackness=slackness,
        w_min_eig=w_min,
        nullspace_dim=null_dim,
        failures=tuple(failures),
    )


def project_feasible(m: np.ndarray) -> np.ndarray | None:
    """Project a symmetric matrix to the PSD unit-diagonal set.

    Eigenvalues are clipped to zero, then the diagonal is renormalized by
    a two-sided diagonal scaling.  Returns None when the clipped diagonal
    degenerates (no sensible rescaling exists).
    """
    w, v = jacobi_eigh((m + m.T) / 2.0)
    clipped = (v * np.clip(w, 0.0, None)) @ v.T
    diag = np.diag(clipped).copy()
    if np.any(diag <= 1e-12):
        return None
    scale = 1.0 / np.sqrt(diag)
    out = clipped * np.outer(scale, scale)
    out = (out + out.T) / 2.0
    np.fill_diagonal(out, 1.0)
    return out


@dataclass(frozen=True)
class RobustnessCurve:
    """Measured (objective deficit, distance-to-optimizer) samples and a linear fit.

    ``fitted_slope`` is the least-squares slope of distance against deficit
    through the origin; ``fit_residual`` is the RMS deviation from that
    line relative to the RMS distance.
    """

    n: int
    samples: tuple[tuple[float, float], ...]
    fitted_slope: float
    fit_residual: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": [[e, d] for e, d in self.samples],
            "fitted_slope": self.fitted_slope,
            "fit_residual": self.fit_residual,
            "loglog_exponent": loglog_exponent(self.samples),
        }


def loglog_exponent(samples) -> float:
    """Slope of log(distance) against log(deficit) over the samples."""
    eps = np.array([e for e, _ in samples])
    dist = np.array([d for _, d in samples])
    if len(eps) < 2:
        raise ValueError("need at least two samples to fit an exponent")
    return float(np.polyfit(np.log(eps), np.log(dist), 1)[0])


def robustness_experiment(
    n: int,
    epsilons,
    trials_per_eps: int = 20,
    seed: int = 0,
) -> RobustnessCurve:
    """Sample feasible near-optimal matrices at target deficits and fit distance vs deficit.

    For each target deficit, random zero-diagonal symmetric directions are
    added to the optimizer, projected back to the feasible set, and the
    step size is bisected until the realized deficit lands within 5% of
    the target.  Trials that cannot be tuned within the iteration cap are
    skipped with a warning.
    """
    ineq = build(n)
    x_opt = analytic_optimizer(n).entries
    optimum = ineq.quantum_bound
    lam = ineq.coefficients.entries
    rng = np.random.default_rng(seed)

    def deficit_of(m: np.ndarray) -> tuple[float, np.ndarray] | None:
        proj = project_feasible(m)
        if proj is None:
            return None
        return optimum - float(np.sum(lam * proj)), proj

    samples = []
    for eps in epsilons:
        if eps <= 0.0:
            raise ValueError(f"target deficits must be positive, got {eps}")
        for _ in range(trials_per_eps):
            direction = rng.standard_normal((n, n))
            direction = (direction + direction.T) / 2.0
            np.fill_diagonal(direction, 0.0)
            direction /= np.linalg.norm(direction)

            t_hi, reached = eps, None
            for _ in range(60):
                reached = deficit_of(x_opt + t_hi * direction)
                if reached is not None and reached[0] >= eps:
                    break
                t_hi *= 2.0
            else:
                warnings.warn(f"robustness trial skipped: deficit never reached {eps}")
                continue

            t_lo = 0.0
            value, proj = reached
            for _ in range(80):
                if abs(value - eps) <= 0.05 * eps:
                    break
                mid = (t_lo + t_hi) / 2.0
                probed = deficit_of(x_opt + mid * direction)
                if probed is None:
                    t_hi = mid
                    continue
                value, proj = probed
                if value < eps:
                    t_lo = mid
                else:
                    t_hi = mid
            else:
                warnings.warn(f"robustness trial skipped: could not tune deficit to {eps}")
                continue
            samples.append((value, float(np.linalg.norm(proj - x_opt))))

    if not samples:
        raise RuntimeError("every robustness trial failed to reach its target deficit")
    eps_arr = np.array([e for e, _ in samples])
    dist_arr = np.array([d for _, d in samples])
    slope = float(np.sum(eps_arr * dist_arr) / np.sum(eps_arr * eps_arr))
    residual = float(
        np.sqrt(np.mean((dist_arr - slope * eps_arr) ** 2) / np.mean(dist_arr**2))
    )
    return RobustnessCurve(
        n=n, samples=tuple(samples), fitted_slope=slope, fit_residual=residual
    )


def gram_vectors(x: SymMatrix) -> list[np.ndarray]:
    """Unit vectors whose pairwise inner products reproduce a PSD unit-diagonal matrix.

    These are the columns of the principal square root; a non-PSD input is
    rejected with its minimum eigenvalue in the message.
    """
    if float(np.max(np.abs(np.diag(x.entries) - 1.0))) > 1e-8:
        raise ValueError("gram_vectors needs a unit-diagonal matrix")
    root = principal_sqrt(x)
    return [root.entries[:, i].copy() for i in range(x.dim)]


@dataclass(frozen=True)
class QubitRealizationReport:
    """Check that planar qubit measurements realize the optimizer for any state."""

    n: int
    states_checked: int
    max_entry_deviation: float
    max_objective_deviation: float
    objective: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "states_checked": self.states_checked,
            "max_entry_deviation": self.max_entry_deviation,
            "max_objective_deviation": self.max_objective_deviation,
            "objective": self.objective,
            "passed": self.passed,
        }


def qubit_realization_check(n: int, seed: int = 0, trials: int = 50) -> QubitRealizationReport:
    """Realize the optimizer with planar Bloch measurements on random states.

    Measurement i points along the planar angle i pi / n.  Because the
    anticommutator of two Bloch observables is a multiple of the identity,
    every state reproduces the optimizer entries and the quantum bound;
    the report carries the worst deviation seen.
    """
    ineq = build(n)
    x_opt = analytic_optimizer(n).entries
    observables = [qsim.BlochObservable.planar(i * np.pi / n) for i in range(n)]
    rng = np.random.default_rng(seed)
    states = [qsim.DensityMatrix.ket0(), qsim.DensityMatrix.maximally_mixed()]
    states += [qsim.DensityMatrix.random(rng) for _ in range(trials)]

    worst_entry = 0.0
    worst_objective = 0.0
    for rho in states:
        corr = np.array(
            [
                [qsim.seq_corr_simple(rho, observables[i], observables[j]) for j in range(n)]
                for i in range(n)
            ]
        )
        worst_entry = max(worst_entry, float(np.max(np.abs(corr - x_opt))))
        s_value = sum(corr[i, i + 1] for i in range(n - 1)) - corr[n - 1, 0]
        worst_objective = max(worst_objective, abs(s_value - ineq.quantum_bound))

    return QubitRealizationReport(
        n=n,
        states_checked=len(states),
        max_entry_deviation=worst_entry,
        max_objective_deviation=worst_objective,
        objective=ineq.quantum_bound,
        passed=worst_entry <= 1e-10 and worst_objective <= 1e-10,
    )
