"""Dense complex linear algebra and quantum-state primitives for small registers.

Everything here is a plain numpy array plus a validator; at dimension <= 16
there is no reason for anything fancier.  The one piece of real structure is
the basis convention for the three-qubit register:

* logical order:  index(i, j, k) = 4i + 2j + k, where i and j are the bits of
  the two hot qubits (wires q0 and q2) and k is the bit of the cold qubit q1.
* physical order: wire order (q0, q1, q2) with wire 0 the most significant
  bit, as used by the circuit evaluator.

Mixing the two orderings is the most likely silent bug in this codebase, so
the permutation between them is a first-class, tested object
(``logical_to_physical_matrix``).
"""
from __future__ import annotations

import numpy as np

N_WIRES = 3
DIM = 8

UNITARY_ATOL = 1e-10
STATE_ATOL = 1e-12
NEG_CLIP = 1e-10


def basis_index(i: int, j: int, k: int) -> int:
    """Index of |ij,k> in logical order."""
    return 4 * i + 2 * j + k


def basis_label(m: int) -> tuple[int, int, int]:
    """Inverse of :func:`basis_index`."""
    return (m >> 2) & 1, (m >> 1) & 1, m & 1


def physical_index(i: int, j: int, k: int) -> int:
    """Index of the same state in physical wire order (q0, q1, q2)."""
    return 4 * i + 2 * k + j


#: phys_of_logical[m] is the physical index of logical basis state m.
phys_of_logical = np.array(
    [physical_index(*basis_label(m)) for m in range(DIM)], dtype=int
)


def logical_to_physical_matrix() -> np.ndarray:
    """Permutation matrix P with v_phys = P @ v_logical."""
    p = np.zeros((DIM, DIM))
    for m in range(DIM):
        p[phys_of_logical[m], m] = 1.0
    return p


def check_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("state vector must be one-dimensional")
    if abs(np.vdot(psi, psi).real - 1.0) > STATE_ATOL:
        raise ValueError("state vector is not normalized")
    return psi


def check_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("unitary must be a square matrix")
    d = u.shape[0]
    if np.max(np.abs(u.conj().T @ u - np.eye(d))) > atol:
        raise ValueError("matrix is not unitary")
    return u


def check_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density operator must be a square matrix")
    if np.max(np.abs(rho - rho.conj().T)) > STATE_ATOL:
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > STATE_ATOL:
        raise ValueError("density operator trace is not 1")
    if np.min(np.linalg.eigvalsh(rho)) < -NEG_CLIP:
        raise ValueError("density operator has a negative eigenvalue")
    return rho


def check_probabilities(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError("probability vector must be one-dimensional")
    if np.min(p) < 0:
        raise ValueError("probability vector has a negative entry")
    if abs(p.sum() - 1.0) > STATE_ATOL:
        raise ValueError("probability vector does not sum to 1")
    return p


def basis_state(m: int, dim: int = DIM) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[m] = 1.0
    return psi


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = check_state(psi)
    return np.outer(psi, psi.conj())


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product, first factor most significant."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise ValueError("kron expects square matrices")
    return np.kron(a, b)


def apply_unitary(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """U rho U^dagger."""
    u = np.asarray(u, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if u.shape != rho.shape:
        raise ValueError(
            f"dimension mismatch: unitary {u.shape} vs state {rho.shape}"
        )
    return u @ rho @ u.conj().T


def born_probabilities(rho: np.ndarray) -> np.ndarray:
    """Computational-basis outcome probabilities of a density operator.

    Diagonal entries within -NEG_CLIP of zero are clipped to zero and the
    vector renormalized; anything more negative signals an upstream bug and
    raises.
    """
    rho = np.asarray(rho, dtype=complex)
    diag = np.diag(rho).real
    if np.min(diag) < -NEG_CLIP:
        raise ValueError(f"diagonal entry {np.min(diag)} below -{NEG_CLIP}")
    p = np.clip(diag, 0.0, None)
    return p / p.sum()


def sample_counts(p: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Multinomial counts over the outcomes of p; deterministic in seed."""
    p = check_probabilities(p)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.multinomial(shots, p)
