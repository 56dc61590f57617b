"""Brute-force route through explicit 4x4 matrices.

Builds the Hamiltonian, exponentiates it numerically, applies the
projective measurement with an explicit rotation V(theta, phi), and
diagonalizes the result.  This is the independent check for every closed
form in `model` and `measurement`; it is used by the tests only and never
sits on a hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams

__all__ = [
    "DenseState",
    "MeasurementOutcome",
    "dense_post_measurement",
    "dense_thermal_state",
    "extractable_work",
    "hamiltonian",
    "projector_pair",
    "von_neumann_entropy",
]

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def hamiltonian(p: ModelParams) -> np.ndarray:
    """Two-site XXZ Hamiltonian with a uniform longitudinal field."""
    h = -0.5 * (
        p.J * (np.kron(SX, SX) + np.kron(SY, SY)) + p.Jz * np.kron(SZ, SZ)
    )
    h -= 0.5 * p.B * (np.kron(SZ, I2) + np.kron(I2, SZ))
    return h


@dataclass(frozen=True, eq=False)
class DenseState:
    """A 4x4 density matrix with its defining sanity checks."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = self.matrix
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise ValueError("trace differs from one")
        if np.linalg.eigvalsh(m).min() < -1e-12:
            raise ValueError("matrix has a negative eigenvalue")

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def dense_thermal_state(p: ModelParams) -> DenseState:
    """exp(-H/T) normalized, via eigendecomposition of the Hamiltonian."""
    evals, vecs = np.linalg.eigh(hamiltonian(p))
    w = np.exp(-(evals - evals.min()) / p.T)
    w /= w.sum()
    rho = (vecs * w) @ vecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)  # strip rounding skew
    return DenseState(rho)


def projector_pair(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Rank-one projectors along the rotated basis V|0>, V|1>."""
    ct = math.cos(theta / 2.0)
    st = math.sin(theta / 2.0)
    e = complex(math.cos(phi), math.sin(phi))
    v = np.array([[ct, e * st], [st, -e * ct]], dtype=complex)
    p0 = np.outer(v[:, 0], v[:, 0].conj())
    p1 = np.outer(v[:, 1], v[:, 1].conj())
    return p0, p1


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """Averaged post-measurement state plus the per-outcome pieces."""

    state: DenseState
    probabilities: tuple[float, float]
    conditional_states: tuple[np.ndarray, np.ndarray]


def dense_post_measurement(
    rho: DenseState, theta: float, phi: float
) -> MeasurementOutcome:
    """Nonselective projective measurement on the second spin."""
    terms = []
    probs = []
    conds = []
    for pk in projector_pair(theta, phi):
        k = np.kron(I2, pk)
        term = k @ rho.matrix @ k.conj().T
        prob = float(np.trace(term).real)
        terms.append(term)
        probs.append(prob)
        conds.append(term / prob if prob > 1e-300 else np.zeros_like(term))
    avg = terms[0] + terms[1]
    avg = 0.5 * (avg + avg.conj().T)
    return MeasurementOutcome(
        state=DenseState(avg),
        probabilities=(probs[0], probs[1]),
        conditional_states=(conds[0], conds[1]),
    )


def von_neumann_entropy(matrix: np.ndarray) -> float:
    """-Tr rho ln rho from the numeric spectrum, in nats."""
    evals = np.clip(np.linalg.eigvalsh(matrix).real, 0.0, None)
    nz = evals[evals > 0.0]
    return float(-(nz * np.log(nz)).sum())


def extractable_work(rho: DenseState, T: float) -> float:
    """Work T (ln 4 - S) drawable from a bath at temperature T through a
    two-qubit working medium in state rho."""
    if T <= 0.0:
        raise ValueError("temperature must be positive")
    return T * (math.log(4.0) - von_neumann_entropy(rho.matrix))
