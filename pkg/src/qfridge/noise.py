"""Depolarizing gate noise, readout error, calibration, and mitigation.

The gate-noise model is deliberately minimal: after each gate's unitary, the
gate's wires are depolarized with probability p1 (single-qubit gates) or p2
(two-qubit gates).  Readout error is a per-qubit classical bit flip applied
to the outcome distribution.  Both are unital, so they cannot cool anything
for free.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .circuits import Circuit, _embed_gate


@dataclass(frozen=True)
class NoiseModel:
    """p1/p2: depolarizing probability per 1q/2q gate; readout: per-qubit flips."""

    p1: float = 0.0
    p2: float = 0.0
    #: eps01[q] = P(read 1 | state 0), eps10[q] = P(read 0 | state 1)
    eps01: tuple[float, ...] = (0.0, 0.0, 0.0)
    eps10: tuple[float, ...] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for v in (self.p1, self.p2, *self.eps01, *self.eps10):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"probability {v} outside [0, 1]")
        if len(self.eps01) != len(self.eps10):
            raise ValueError("eps01 and eps10 must cover the same qubits")

    @classmethod
    def uniform(cls, p1=0.0, p2=0.0, eps01=0.0, eps10=0.0, n_qubits=3):
        return cls(p1, p2, (eps01,) * n_qubits, (eps10,) * n_qubits)

    def flip_matrix(self, qubit: int) -> np.ndarray:
        e01, e10 = self.eps01[qubit], self.eps10[qubit]
        return np.array([[1 - e01, e10], [e01, 1 - e10]])

    def is_gate_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0


def _replace_with_mixed(rho: np.ndarray, wires, n: int) -> np.ndarray:
    """Trace out `wires` (physical order) and reinsert maximally mixed there."""
    keep = [w for w in range(n) if w not in wires]
    t = rho.reshape([2] * (2 * n))
    letters = string.ascii_lowercase
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    traced = list(col)
    for w in wires:
        traced[w] = row[w]
    sigma_sub = "".join([row[w] for w in keep] + [col[w] for w in keep])
    sigma = np.einsum("".join(row + traced) + "->" + sigma_sub, t)
    operands = [sigma]
    subs = [sigma_sub]
    for w in wires:
        operands.append(np.eye(2) / 2)
        subs.append(row[w] + col[w])
    out = np.einsum(",".join(subs) + "->" + "".join(row + col), *operands)
    return out.reshape(2 ** n, 2 ** n)


def _depolarize(rho: np.ndarray, wires, p: float, n: int) -> np.ndarray:
    if p == 0.0:
        return rho
    return (1 - p) * rho + p * _replace_with_mixed(rho, wires, n)


def evolve_noisy(c: Circuit, rho: np.ndarray, nm: NoiseModel) -> np.ndarray:
    """Run a circuit on a density operator with per-gate depolarizing noise.

    rho is taken and returned in logical order; the per-gate evolution runs
    in physical wire order.
    """
    c.validate()
    rho = np.asarray(rho, dtype=complex)
    dim = 2 ** c.n_wires
    if rho.shape != (dim, dim):
        raise ValueError("state dimension does not match the circuit")
    perm = None
    if c.n_wires == qcore.N_WIRES:
        perm = qcore.logical_to_physical_matrix()
        rho = perm @ rho @ perm.T
    for g in c.gates:
        u = _embed_gate(g, c.n_wires)
        rho = u @ rho @ u.conj().T
        p = nm.p2 if g.name == "cx" else nm.p1
        rho = _depolarize(rho, g.wires, p, c.n_wires)
    if perm is not None:
        rho = perm.T @ rho @ perm
    return rho


def readout_matrix(nm: NoiseModel, dim: int = qcore.DIM) -> np.ndarray:
    """Tensor product of per-qubit flip matrices, in logical index order.

    For the three-qubit register the logical bits (i, j, k) belong to qubits
    (q0, q2, q1), so the factors are ordered accordingly.
    """
    n = int(round(np.log2(dim)))
    order = (0, 2, 1) if n == qcore.N_WIRES else tuple(range(n))
    if max(order) >= len(nm.eps01):
        raise ValueError("noise model does not cover enough qubits")
    m = np.eye(1)
    for q in order:
        m = np.kron(m, nm.flip_matrix(q))
    return m


def apply_readout_error(p: np.ndarray, nm: NoiseModel) -> np.ndarray:
    p = qcore.check_probabilities(p)
    return readout_matrix(nm, p.size) @ p


@dataclass(frozen=True)
class ConfusionMatrix:
    """entries[m, t] = P(measure m | true state t); columns sum to 1."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.min(e) < 0:
            raise ValueError("confusion matrix has a negative entry")
        if np.max(np.abs(e.sum(axis=0) - 1.0)) > qcore.STATE_ATOL:
            raise ValueError("confusion matrix columns must sum to 1")
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def calibrate(
    nm: NoiseModel, shots: int, seed: int, dim: int = qcore.DIM
) -> ConfusionMatrix:
    """Empirical confusion matrix: prepare each basis state, read out, count.

    Column t uses seed + t, so columns can be sampled in parallel without
    changing the result.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    m_ro = readout_matrix(nm, dim)
    cols = []
    for t in range(dim):
        counts = qcore.sample_counts(m_ro[:, t], shots, seed + t)
        cols.append(counts / shots)
    return ConfusionMatrix(np.column_stack(cols))


def exact_confusion(nm: NoiseModel, dim: int = qcore.DIM) -> ConfusionMatrix:
    """Infinite-shot limit of calibrate."""
    return ConfusionMatrix(readout_matrix(nm, dim))


def mitigate(raw: np.ndarray, m: ConfusionMatrix) -> np.ndarray:
    """Least-squares inversion of the confusion matrix, clipped to the simplex."""
    raw = qcore.check_probabilities(raw)
    if raw.size != m.dim:
        raise ValueError("dimension mismatch between distribution and matrix")
    cond = np.linalg.cond(m.entries)
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"confusion matrix is singular (cond={cond:.3g})")
    q, *_ = np.linalg.lstsq(m.entries, raw, rcond=None)
    q = np.clip(q, 0.0, None)
    total = q.sum()
    if total <= 0:
        raise ValueError("mitigated distribution vanished")
    return q / total
