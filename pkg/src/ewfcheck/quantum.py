"""Small exact quantum mechanics: states, projective measurements, unitaries.

Everything here works on dense numpy arrays; Hilbert spaces are tiny (a few
qubits), so no attempt is made at sparsity or lazy evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sin
from typing import Iterable, Sequence, Union

import numpy as np

ATOL = 1e-12
EIG_ATOL = 1e-10

TWO_PI = 2 * pi


class QuantumError(ValueError):
    """Raised when a quantum object violates its algebraic invariants."""


def normalize_angle(theta: float) -> float:
    """Map an angle to [0, 2pi)."""
    t = float(theta) % TWO_PI
    # float modulo can return exactly 2pi for tiny negative inputs
    return 0.0 if t >= TWO_PI else t


def _frozen(arr) -> np.ndarray:
    a = np.array(arr, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise QuantumError("amplitudes must be a non-empty vector")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > ATOL:
            raise QuantumError(f"state is not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise QuantumError("density matrix must be square")
        if not np.allclose(m, m.conj().T, rtol=0, atol=ATOL):
            raise QuantumError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise QuantumError(f"density matrix has trace {tr!r}")
        if np.linalg.eigvalsh(m).min() < -EIG_ATOL:
            raise QuantumError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class UnitaryOp:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise QuantumError("unitary must be square")
        if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0, atol=ATOL):
            raise QuantumError("matrix is not unitary")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> "UnitaryOp":
        return UnitaryOp(self.matrix.conj().T)

    def __call__(self, state: PureState) -> PureState:
        return PureState(self.matrix @ state.amplitudes)


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Projectors indexed by outcome label 0..n-1."""

    projectors: tuple

    def __post_init__(self):
        projs = tuple(_frozen(p) for p in self.projectors)
        if not projs:
            raise QuantumError("measurement needs at least one outcome")
        d = projs[0].shape[0]
        for i, p in enumerate(projs):
            if p.shape != (d, d):
                raise QuantumError("projectors must share one square shape")
            if not np.allclose(p, p.conj().T, rtol=0, atol=ATOL):
                raise QuantumError(f"projector {i} is not Hermitian")
            if not np.allclose(p @ p, p, rtol=0, atol=ATOL):
                raise QuantumError(f"projector {i} is not idempotent")
            for j in range(i):
                if not np.allclose(p @ projs[j], 0, rtol=0, atol=ATOL):
                    raise QuantumError(f"projectors {j} and {i} are not orthogonal")
        if not np.allclose(sum(projs), np.eye(d), rtol=0, atol=ATOL):
            raise QuantumError("projectors do not sum to the identity")
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.projectors)

    @classmethod
    def from_basis(cls, vectors: Sequence) -> "ProjectiveMeasurement":
        """Rank-one measurement in an orthonormal basis (outcome k <-> vectors[k])."""
        vecs = [v.amplitudes if isinstance(v, PureState) else np.asarray(v, dtype=complex)
                for v in vectors]
        return cls(tuple(np.outer(v, v.conj()) for v in vecs))


def computational_measurement(dim: int) -> ProjectiveMeasurement:
    eye = np.eye(dim)
    return ProjectiveMeasurement.from_basis(list(eye))


def basis_state(dim: int, k: int) -> PureState:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return PureState(v)


def make_bloch_state(theta: float) -> PureState:
    """cos(theta/2)|0> + sin(theta/2)|1>, a pure state in the x-z plane of the Bloch sphere."""
    t = normalize_angle(theta)
    return PureState(np.array([cos(t / 2), sin(t / 2)], dtype=complex))


def pauli_xz_measurement(angle: float) -> ProjectiveMeasurement:
    """Two-outcome qubit measurement along Bloch angle ``angle`` in the x-z plane.

    Outcome 0 is the +1 eigenvector (the Bloch state at ``angle``), outcome 1 the
    antipodal state. ``angle=0`` is Z, ``pi/2`` is X, ``pi/4`` is (X+Z)/sqrt(2).
    """
    return ProjectiveMeasurement.from_basis(
        [make_bloch_state(angle), make_bloch_state(angle + pi)])


def y_rotation(phi: float) -> UnitaryOp:
    """Rotation about the Bloch y-axis taking Bloch angle theta to theta + phi."""
    c, s = cos(phi / 2), sin(phi / 2)
    return UnitaryOp(np.array([[c, -s], [s, c]], dtype=complex))


State = Union[PureState, DensityOperator]


def as_density(state: State) -> DensityOperator:
    return state.density() if isinstance(state, PureState) else state


def born(state: State, meas: ProjectiveMeasurement) -> np.ndarray:
    """Outcome probabilities tr(Pi_k rho)."""
    rho = as_density(state)
    if rho.dim != meas.dim:
        raise QuantumError(f"dimension mismatch: state {rho.dim}, measurement {meas.dim}")
    p = np.array([np.trace(P @ rho.matrix).real for P in meas.projectors])
    # roundoff can leave -1e-17 entries
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def tensor(a, b):
    """Kronecker product; joint index is i_a * dim_b + i_b."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, UnitaryOp) and isinstance(b, UnitaryOp):
        return UnitaryOp(np.kron(a.matrix, b.matrix))
    if isinstance(a, (PureState, DensityOperator)) and isinstance(b, (PureState, DensityOperator)):
        return DensityOperator(np.kron(as_density(a).matrix, as_density(b).matrix))
    return np.kron(_raw(a), _raw(b))


def _raw(x) -> np.ndarray:
    if isinstance(x, PureState):
        return x.amplitudes
    if isinstance(x, (DensityOperator, UnitaryOp)):
        return x.matrix
    return np.asarray(x)


def measurement_dilation(meas: ProjectiveMeasurement) -> UnitaryOp:
    """Reversible model of ``meas`` on system (x) n-level memory.

    U = sum_c Pi_c (x) Shift^c, so U(|psi>|0>) = sum_c Pi_c|psi>|c> and
    U(|phi_c>|m>) = |phi_c>|m + c mod n> for eigenvectors |phi_c> of Pi_c.
    """
    n = meas.n_outcomes
    shift = np.roll(np.eye(n), 1, axis=0)  # |m> -> |m+1 mod n>
    u = sum(np.kron(P, np.linalg.matrix_power(shift, c))
            for c, P in enumerate(meas.projectors))
    return UnitaryOp(u)


def mix(pairs: Iterable[tuple]) -> DensityOperator:
    """sum_i w_i |psi_i><psi_i| for (weight, PureState) pairs."""
    pairs = list(pairs)
    weights = np.array([w for w, _ in pairs], dtype=float)
    if (weights < 0).any():
        raise QuantumError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1.0) > ATOL:
        raise QuantumError(f"mixture weights sum to {weights.sum()!r}")
    rho = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in pairs)
    return DensityOperator(rho)


def trace_distance(rho: State, sigma: State) -> float:
    d = as_density(rho).matrix - as_density(sigma).matrix
    return 0.5 * float(np.abs(np.linalg.eigvalsh(d)).sum())


def fidelity(psi: PureState, phi: PureState) -> float:
    return abs(psi.overlap(phi)) ** 2


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on subsystems ``keep`` (in their original order)."""
    n = len(dims)
    t = np.asarray(rho).reshape(tuple(dims) * 2)
    keep = sorted(keep)
    drop = [i for i in range(n) if i not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for i in drop:
        cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    k = int(np.prod([dims[i] for i in keep])) if keep else 1
    return red.reshape(k, k)


def singlet() -> PureState:
    """(|01> - |10>)/sqrt(2)."""
    zero, one = basis_state(2, 0), basis_state(2, 1)
    v = (tensor(zero, one).amplitudes - tensor(one, zero).amplitudes) / np.sqrt(2)
    return PureState(v)
