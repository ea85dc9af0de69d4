"""Dense statevector and density-matrix simulation for small registers.

Conventions: qubit 0 is the leftmost tensor factor and basis states are
encoded big-endian, so basis index b assigns qubit i the bit
(b >> (q-1-i)) & 1.  Registers are capped at 12 qubits.  State equality
is never tested amplitude-wise; compare projectors so global phase is
irrelevant (see `projector_distance`).
"""

from __future__ import annotations

import numpy as np

MAX_QUBITS = 12
CONSTRUCTION_TOL = 1e-12
DERIVED_TOL = 1e-10

_GATES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
}


class StateVector:
    """Normalized pure state on `qubit_count` qubits."""

    def __init__(self, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0 or amps.size & (amps.size - 1):
            raise ValueError("amplitude vector length must be a power of two")
        q = amps.size.bit_length() - 1
        if q > MAX_QUBITS:
            raise ValueError(f"{q} qubits exceeds the {MAX_QUBITS}-qubit cap")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > CONSTRUCTION_TOL:
            raise ValueError(f"state not normalized (norm {norm})")
        self.amplitudes = amps
        self.qubit_count = q

    @property
    def dim(self) -> int:
        return self.amplitudes.size


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator."""

    def __init__(self, matrix):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        d = mat.shape[0]
        if d == 0 or d & (d - 1):
            raise ValueError("dimension must be a power of two")
        if np.max(np.abs(mat - mat.conj().T)) > CONSTRUCTION_TOL:
            raise ValueError("matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > CONSTRUCTION_TOL:
            raise ValueError(f"trace is {tr}, not 1")
        if np.linalg.eigvalsh(mat).min() < -DERIVED_TOL:
            raise ValueError("matrix has a negative eigenvalue")
        self.matrix = mat
        self.qubit_count = d.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


class MeasurementBasis:
    """Orthonormal basis of a full register; a projective measurement."""

    def __init__(self, vectors):
        vectors = list(vectors)
        if not vectors:
            raise ValueError("empty basis")
        dim = vectors[0].dim
        if any(v.dim != dim for v in vectors) or len(vectors) != dim:
            raise ValueError("need exactly dim vectors of equal dimension")
        mat = np.array([v.amplitudes for v in vectors])
        gram = mat.conj() @ mat.T
        if np.max(np.abs(gram - np.eye(dim))) > DERIVED_TOL:
            raise ValueError("basis is not orthonormal")
        self.vectors = vectors
        self.matrix = mat  # row i = basis vector i

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def ghz(k: int) -> StateVector:
    """(|0..0> + |1..1>)/sqrt(2) on k qubits."""
    if k < 1:
        raise ValueError("need at least one qubit")
    amps = np.zeros(1 << k, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return StateVector(amps)


def apply_gate(state: StateVector, gate: str, qubit: int) -> StateVector:
    """Apply a named single-qubit gate (X, Z or H) to one qubit."""
    if gate not in _GATES:
        raise ValueError(f"unknown gate {gate!r}")
    q = state.qubit_count
    if not 0 <= qubit < q:
        raise ValueError(f"qubit {qubit} out of range for {q} qubits")
    tensor = state.amplitudes.reshape([2] * q)
    tensor = np.moveaxis(np.tensordot(_GATES[gate], tensor, axes=([1], [qubit])), 0, qubit)
    return StateVector(tensor.reshape(-1))


def apply_phase_oracle(state: StateVector, signs) -> StateVector:
    """Multiply each computational amplitude by the matching +/-1 sign."""
    signs = np.asarray(signs)
    if signs.shape != (state.dim,):
        raise ValueError("sign vector length must match the state dimension")
    if not np.all(np.abs(signs * signs - 1) == 0):
        raise ValueError("signs must be +1 or -1")
    return StateVector(state.amplitudes * signs)


def phi_basis(k: int) -> MeasurementBasis:
    """GHZ-type basis {(|y,0> + (-1)^z |~y,1>)/sqrt(2)} on k qubits.

    Basis vector index is the integer with bits y_1..y_{k-1} z, so y is
    carried by the first k-1 qubits and the last qubit separates the
    two branches.
    """
    if k < 2:
        raise ValueError("basis needs at least two qubits")
    dim = 1 << k
    vectors = []
    root = 1 / np.sqrt(2)
    for y in range(1 << (k - 1)):
        ybar = y ^ ((1 << (k - 1)) - 1)
        for z in (0, 1):
            amps = np.zeros(dim, dtype=complex)
            amps[y << 1] = root
            amps[(ybar << 1) | 1] = -root if z else root
            vectors.append(StateVector(amps))
    return MeasurementBasis(vectors)


def measure(state: StateVector, basis: MeasurementBasis) -> np.ndarray:
    """Outcome probabilities of measuring `state` in `basis`."""
    if basis.dim != state.dim:
        raise ValueError("state and basis dimensions differ")
    probs = np.abs(basis.matrix.conj() @ state.amplitudes) ** 2
    total = probs.sum()
    if abs(total - 1.0) > DERIVED_TOL:
        raise AssertionError(f"outcome probabilities sum to {total}")
    return probs


def mix(ensemble) -> DensityMatrix:
    """Density matrix sum_i w_i |psi_i><psi_i| of a weighted ensemble."""
    ensemble = list(ensemble)
    if not ensemble:
        raise ValueError("empty ensemble")
    weights = np.array([w for w, _ in ensemble], dtype=float)
    if weights.min() < 0 or abs(weights.sum() - 1.0) > CONSTRUCTION_TOL:
        raise ValueError("weights must be nonnegative and sum to 1")
    states = np.array([s.amplitudes for _, s in ensemble])
    return DensityMatrix((states.T * weights) @ states.conj())


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2); equals the squared Frobenius norm for Hermitian rho."""
    return float(np.vdot(rho.matrix, rho.matrix).real)


def matrix_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Frobenius norm of the difference."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    return float(np.linalg.norm(a.matrix - b.matrix))


def projector(state: StateVector) -> np.ndarray:
    """Rank-one projector |psi><psi|."""
    return np.outer(state.amplitudes, state.amplitudes.conj())


def projector_distance(a: StateVector, b: StateVector) -> float:
    """Frobenius distance of projectors; zero iff equal up to global phase."""
    return float(np.linalg.norm(projector(a) - projector(b)))
