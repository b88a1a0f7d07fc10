"""Qubit states, observables, Kraus channels and pseudo-density matrices.

The pseudo-density matrix (PDM) of a set of measurement events collects
all joint Pauli correlations into one Hermitian unit-trace operator.  For
events on distinct qubits it reduces to the ordinary joint state; for
sequential events on one qubit it can develop negative eigenvalues, which
is exactly what the causality monotone measures.  Everything here is
qubit-sized: states are 2x2, channels act on 2x2, PDMs have at most four
event slots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .matrixcore import HermMatrix, min_eigenvalue, trace_norm

_S0 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (_S0, _SX, _SY, _SZ):
    _m.setflags(write=False)

#: Pauli basis, index convention (0, 1, 2, 3) = (I, X, Y, Z).
PAULIS = (_S0, _SX, _SY, _SZ)

_AXIS_INDEX = {"X": 1, "Y": 2, "Z": 3}


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix: Hermitian, unit trace, PSD."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise ValueError(f"density matrix must have unit trace, got {np.trace(m)}")
        if min_eigenvalue(HermMatrix.from_array(m)) < -1e-10:
            raise ValueError("density matrix must be positive semidefinite")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def pure(cls, ket) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=complex).reshape(2)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def ket0(cls) -> "DensityMatrix":
        return cls.pure([1.0, 0.0])

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(np.eye(2, dtype=complex) / 2.0)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "DensityMatrix":
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        m = g @ g.conj().T
        return cls(m / np.trace(m).real)


@dataclass(frozen=True)
class BlochObservable:
    """Binary (+-1) observable a . sigma given by a unit Bloch vector a."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float).reshape(3)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector must have unit norm, got |a| = {np.linalg.norm(v)}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @property
    def matrix(self) -> np.ndarray:
        v = self.vector
        return v[0] * _SX + v[1] * _SY + v[2] * _SZ

    @classmethod
    def axis(cls, name: str) -> "BlochObservable":
        v = np.zeros(3)
        v[_AXIS_INDEX[name.upper()] - 1] = 1.0
        return cls(v)

    @classmethod
    def planar(cls, angle: float) -> "BlochObservable":
        return cls(np.array([np.cos(angle), np.sin(angle), 0.0]))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "BlochObservable":
        v = rng.standard_normal(3)
        return cls(v / np.linalg.norm(v))


@dataclass(frozen=True)
class KrausChannel:
    """Quantum channel as a list of 2x2 Kraus operators (trace preserving)."""

    operators: tuple

    def __post_init__(self):
        if len(self.operators) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        ops = []
        total = np.zeros((2, 2), dtype=complex)
        for k in self.operators:
            k = np.asarray(k, dtype=complex)
            if k.shape != (2, 2):
                raise ValueError(f"Kraus operators must be 2x2, got shape {k.shape}")
            k = k.copy()
            k.setflags(write=False)
            ops.append(k)
            total += k.conj().T @ k
        slip = float(np.max(np.abs(total - np.eye(2))))
        if slip > 1e-10:
            raise ValueError(f"channel is not trace preserving (deviation {slip:.3e})")
        object.__setattr__(self, "operators", tuple(ops))

    def apply(self, m: np.ndarray) -> np.ndarray:
        """Forward action sum_k K m K^dagger."""
        return sum(k @ m @ k.conj().T for k in self.operators)

    def adjoint_apply(self, m: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action sum_k K^dagger m K."""
        return sum(k.conj().T @ m @ k for k in self.operators)

    def to_dict(self) -> dict:
        return {"kraus": [_complex_to_pairs(k) for k in self.operators]}

    @classmethod
    def identity(cls) -> "KrausChannel":
        return cls((np.eye(2, dtype=complex),))

    @classmethod
    def depolarizing(cls) -> "KrausChannel":
        return cls(tuple(p / 2.0 for p in PAULIS))

    @classmethod
    def haar_random(cls, rng: np.random.Generator) -> "KrausChannel":
        """Two-Kraus channel from a Haar-random 4x2 isometry split in halves."""
        g = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        q, _ = np.linalg.qr(g)
        return cls((q[:2, :], q[2:, :]))


@dataclass(frozen=True)
class PauliChannelParams:
    """Angles (u, v) selecting one extremal two-Kraus qubit channel."""

    u: float
    v: float

    def __post_init__(self):
        if not 0.0 <= self.u <= 2.0 * np.pi:
            raise ValueError(f"u must lie in [0, 2*pi], got {self.u}")
        if not 0.0 <= self.v <= np.pi:
            raise ValueError(f"v must lie in [0, pi], got {self.v}")


@dataclass(frozen=True)
class Pdm:
    """Pseudo-density matrix over n measurement events: Hermitian, unit trace.

    Unlike a density matrix it may have negative eigenvalues; those witness
    causal (temporal) correlations between the events.
    """

    events: int
    matrix: HermMatrix

    def __post_init__(self):
        if self.matrix.dim != 2 ** self.events:
            raise ValueError(
                f"PDM over {self.events} events must have dim {2 ** self.events}, "
                f"got {self.matrix.dim}"
            )
        tr = float(np.trace(self.matrix.entries).real)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"PDM must have unit trace, got {tr}")

    def to_dict(self) -> dict:
        return {"events": self.events, "matrix": _complex_to_pairs(self.matrix.entries)}


def _complex_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def seq_corr_simple(rho: DensityMatrix, a: BlochObservable, b: BlochObservable) -> float:
    """Symmetrized two-point correlation (1/2) Tr[rho {A, B}].

    For qubit observables this equals the Euclidean inner product of the
    two Bloch vectors, for every state rho.
    """
    am, bm = a.matrix, b.matrix
    return float(0.5 * np.trace(rho.matrix @ (am @ bm + bm @ am)).real)


def seq_corr_channel(
    rho: DensityMatrix, a: BlochObservable, b: BlochObservable, ch: KrausChannel
) -> float:
    """Sequential correlation with a channel acting between the two measurements."""
    am = a.matrix
    smeared = am @ rho.matrix + rho.matrix @ am
    return float(0.5 * np.trace(smeared @ ch.adjoint_apply(b.matrix)).real)


def _apply_to_second_factor(ch: KrausChannel, m: np.ndarray) -> np.ndarray:
    out = np.zeros_like(m)
    for i in range(2):
        for j in range(2):
            out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = ch.apply(
                m[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
            )
    return out


def pdm_two_events(rho: DensityMatrix, ch: KrausChannel) -> Pdm:
    """PDM of two sequential measurement events with a channel in between.

    Built as the anticommutator of rho (x) I/2 with the two-point Pauli
    kernel (1/2) sum_i sigma_i (x) sigma_i, followed by the channel acting
    on the second tensor factor.
    """
    kernel = 0.5 * sum(np.kron(p, p) for p in PAULIS)
    anchored = np.kron(rho.matrix, _S0 / 2.0)
    braided = anchored @ kernel + kernel @ anchored
    return Pdm(events=2, matrix=HermMatrix.from_array(_apply_to_second_factor(ch, braided)))


def _embed(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for q in range(n_qubits):
        out = np.kron(out, op if q == qubit else _S0)
    return out


def _sequential_expectation(state: np.ndarray, steps: list) -> float:
    """Expected product of outcomes of projective +-1 measurements in sequence.

    ``steps`` holds (projector_plus, projector_minus) pairs in time order;
    the post-measurement state follows the projection postulate.
    """
    total = 0.0
    stack = [(state, 1.0, 0)]
    while stack:
        mat, sign, idx = stack.pop()
        if idx == len(steps):
            total += sign * float(np.trace(mat).real)
            continue
        pp, pm = steps[idx]
        stack.append((pp @ mat @ pp, sign, idx + 1))
        stack.append((pm @ mat @ pm, -sign, idx + 1))
    return total


def pdm_general(state: np.ndarray, events: list) -> Pdm:
    """PDM of up to four measurement events on a multi-qubit state.

    ``events`` is an ordered list of (qubit, time_slot) pairs; the PDM
    tensor slots follow the list order while the measurement sequence
    follows the time slots.  Two events may share a time slot only on
    distinct qubits.  Each Pauli correlation is computed by explicit
    sequential projective simulation, whose two-event case coincides with
    the symmetrized anticommutator correlation.
    """
    state = np.asarray(state, dtype=complex)
    n = len(events)
    if not 1 <= n <= 4:
        raise ValueError(f"supported event counts are 1..4, got {n}")
    dim = state.shape[0]
    n_qubits = int(round(np.log2(dim)))
    if state.shape != (dim, dim) or 2 ** n_qubits != dim:
        raise ValueError(f"state must be a square matrix over qubits, got shape {state.shape}")
    if abs(np.trace(state) - 1.0) > 1e-10 or np.max(np.abs(state - state.conj().T)) > 1e-10:
        raise ValueError("state must be a Hermitian unit-trace density matrix")
    seen = set()
    for qubit, slot in events:
        if not 0 <= qubit < n_qubits:
            raise ValueError(f"event names qubit {qubit}, state has {n_qubits} qubits")
        if (qubit, slot) in seen:
            raise ValueError(f"two events on qubit {qubit} share time slot {slot}")
        seen.add((qubit, slot))

    time_order = sorted(range(n), key=lambda j: (events[j][1], j))
    eye = np.eye(dim, dtype=complex)
    r = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for assignment in itertools.product(range(4), repeat=n):
        steps = []
        for j in time_order:
            if assignment[j] == 0:
                continue
            full = _embed(PAULIS[assignment[j]], events[j][0], n_qubits)
            steps.append(((eye + full) / 2.0, (eye - full) / 2.0))
        corr = _sequential_expectation(state, steps)
        if corr == 0.0:
            continue
        term = np.array([[1.0 + 0j]])
        for j in range(n):
            term = np.kron(term, PAULIS[assignment[j]])
        r += corr * term
    return Pdm(events=n, matrix=HermMatrix.from_array(r / 2 ** n))


def causality_monotone(r: Pdm) -> float:
    """Trace norm of the PDM minus one; zero exactly for valid density matrices."""
    return max(0.0, trace_norm(r.matrix) - 1.0)


def pdm_correlation(r: Pdm, a: BlochObservable, b: BlochObservable) -> float:
    """Two-point correlation Tr[(A (x) B) R] read off a two-event PDM."""
    if r.events != 2:
        raise ValueError(f"pdm_correlation needs a two-event PDM, got {r.events} events")
    return float(np.trace(np.kron(a.matrix, b.matrix) @ r.matrix.entries).real)


def pauli_channel(params: PauliChannelParams) -> KrausChannel:
    """Extremal two-Kraus qubit channel for angles (u, v).

    Its action on the Pauli basis is
        sigma_0 -> sigma_0 + sin(u) sin(v) sigma_3,
        sigma_1 -> cos(u) sigma_1,
        sigma_2 -> cos(v) sigma_2,
        sigma_3 -> cos(u) cos(v) sigma_3,
    and at the four angle corners {0, pi} x {0, pi} one of the two Kraus
    operators vanishes, leaving a unitary Pauli rotation.
    """
    cu, su = np.cos(params.u / 2.0), np.sin(params.u / 2.0)
    cv, sv = np.cos(params.v / 2.0), np.sin(params.v / 2.0)
    k_plus = cv * cu * _S0 + sv * su * _SZ
    k_minus = sv * cu * _SX + 1j * cv * su * _SY
    return KrausChannel((k_plus, k_minus))


def pauli_corr_lemma_check(
    rho: DensityMatrix, ch: KrausChannel, k: int, l: int
) -> tuple[float, float]:
    """Pauli-pair correlation via the PDM route and via the closed form.

    Returns ``(lhs, rhs)`` where lhs reads sigma_k, sigma_l off the PDM and
    rhs evaluates (1/2)[<sigma_k>_rho Tr(sigma_l E(sigma_0)) +
    Tr(sigma_l E(sigma_k))].
    """
    if k not in (1, 2, 3) or l not in (1, 2, 3):
        raise ValueError("Pauli indices must be in {1, 2, 3}")
    lhs = pdm_correlation(
        pdm_two_events(rho, ch),
        BlochObservable.axis("XYZ"[k - 1]),
        BlochObservable.axis("XYZ"[l - 1]),
    )
    mean_k = float(np.trace(rho.matrix @ PAULIS[k]).real)
    rhs = 0.5 * (
        mean_k * np.trace(PAULIS[l] @ ch.apply(_S0)).real
        + np.trace(PAULIS[l] @ ch.apply(PAULIS[k])).real
    )
    return lhs, float(rhs)


def _bloch_of(m: np.ndarray) -> BlochObservable:
    v = np.array([float(np.trace(PAULIS[i] @ m).real) / 2.0 for i in (1, 2, 3)])
    return BlochObservable(v)


def isometry_in_time_check(
    rho: DensityMatrix,
    ch: KrausChannel,
    a: BlochObservable,
    b: BlochObservable,
    v_choice: str,
    u_unitary: np.ndarray,
) -> tuple[float, float]:
    """Correlation before and after the time-local isometry transformation.

    The first measurement, state and channel input are conjugated by the
    Pauli V in {X, Y, Z}; the second measurement and channel output by an
    arbitrary unitary U; the Kraus operators map K -> U K V^dagger.  The
    two returned correlations agree for every valid input.
    """
    u = np.asarray(u_unitary, dtype=complex)
    if u.shape != (2, 2) or np.max(np.abs(u @ u.conj().T - np.eye(2))) > 1e-12:
        raise ValueError("u_unitary must be a 2x2 unitary matrix")
    if v_choice.upper() not in _AXIS_INDEX:
        raise ValueError(f"v_choice must be one of X, Y, Z, got {v_choice!r}")
    v = PAULIS[_AXIS_INDEX[v_choice.upper()]]

    before = pdm_correlation(pdm_two_events(rho, ch), a, b)

    rho_t = DensityMatrix(v @ rho.matrix @ v.conj().T)
    a_t = _bloch_of(v @ a.matrix @ v.conj().T)
    b_t = _bloch_of(u @ b.matrix @ u.conj().T)
    ch_t = KrausChannel(tuple(u @ k @ v.conj().T for k in ch.operators))
    after = pdm_correlation(pdm_two_events(rho_t, ch_t), a_t, b_t)
    return before, after


_PSEUDO_BELL_SIGNS = {
    1: (1.0, 1.0, 1.0),
    2: (1.0, -1.0, -1.0),
    3: (-1.0, 1.0, -1.0),
    4: (-1.0, -1.0, 1.0),
}


def pseudo_bell(index: int) -> Pdm:
    """One of the four two-event PDMs (1/4)(I +- XX +- YY +- ZZ)."""
    if index not in _PSEUDO_BELL_SIGNS:
        raise ValueError(f"pseudo-Bell index must be 1..4, got {index}")
    signs = _PSEUDO_BELL_SIGNS[index]
    m = np.kron(_S0, _S0).astype(complex)
    for sign, p in zip(signs, (_SX, _SY, _SZ)):
        m = m + sign * np.kron(p, p)
    return Pdm(events=2, matrix=HermMatrix.from_array(m / 4.0))


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary via phase-fixed QR of a complex Gaussian."""
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def lemma1_residual(trials: int = 200, seed: int = 0) -> float:
    """Worst disagreement between the PDM route and the direct sequential route.

    Samples random (state, two-Kraus channel, observable pair) scenarios and
    compares Tr[(A (x) B) R] against the channel-adjoint correlation formula.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        rho = DensityMatrix.random(rng)
        ch = KrausChannel.haar_random(rng)
        a = BlochObservable.random(rng)
        b = BlochObservable.random(rng)
        lhs = pdm_correlation(pdm_two_events(rho, ch), a, b)
        rhs = seq_corr_channel(rho, a, b, ch)
        worst = max(worst, abs(lhs - rhs))
    return worst


def isometry_residual(trials: int = 100, seed: int = 0) -> float:
    """Worst |before - after| over random time-local isometry scenarios."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        rho = DensityMatrix.random(rng)
        ch = KrausChannel.haar_random(rng)
        a = BlochObservable.random(rng)
        b = BlochObservable.random(rng)
        v_choice = "XYZ"[rng.integers(0, 3)]
        u = haar_unitary(rng)
        before, after = isometry_in_time_check(rho, ch, a, b, v_choice, u)
        worst = max(worst, abs(before - after))
    return worst
