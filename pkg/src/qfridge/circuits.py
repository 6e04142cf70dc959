"""Elementary-gate IR, the cooling-gate constructors, and the QASM emitter.

The hardware gate set is {rz(theta), x, sx, cx}.  Circuits live in physical
wire order; :func:`unitary_of_circuit` conjugates the evaluated matrix with
the logical/physical permutation so its result compares directly against
:func:`build_target_unitary`, which is written in logical |ij,k> order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qcore

GATE_NAMES = ("rz", "x", "sx", "cx")

X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
# fixed convention for sqrt(X)
SX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


def rz_matrix(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


@dataclass(frozen=True)
class Gate:
    name: str
    wires: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate {self.name!r}")
        if self.name == "cx":
            if len(self.wires) != 2 or self.wires[0] == self.wires[1]:
                raise ValueError("cx needs two distinct wires")
        elif len(self.wires) != 1:
            raise ValueError(f"{self.name} is a single-wire gate")
        if (self.angle is not None) != (self.name == "rz"):
            raise ValueError("angle is required for rz and only for rz")
        if self.angle is not None and not np.isfinite(self.angle):
            raise ValueError("rz angle must be finite")

    def matrix(self) -> np.ndarray:
        """2x2 (or 4x4 for cx, control most significant) gate matrix."""
        if self.name == "rz":
            return rz_matrix(self.angle)
        if self.name == "x":
            return X_MATRIX
        if self.name == "sx":
            return SX_MATRIX
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = X_MATRIX
        return m


def rz(wire: int, angle: float) -> Gate:
    return Gate("rz", (wire,), angle)


def x(wire: int) -> Gate:
    return Gate("x", (wire,))


def sx(wire: int) -> Gate:
    return Gate("sx", (wire,))


def cx(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


class CouplingMap:
    """Undirected set of wire pairs on which cx is allowed."""

    def __init__(self, pairs):
        self.pairs = frozenset(frozenset(p) for p in pairs)
        for p in self.pairs:
            if len(p) != 2:
                raise ValueError("coupling pairs must join two distinct wires")

    @classmethod
    def line(cls, n_wires: int) -> "CouplingMap":
        return cls((w, w + 1) for w in range(n_wires - 1))

    def allows(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.pairs

    def neighbors(self, w: int):
        return sorted(next(iter(p - {w})) for p in self.pairs if w in p)

    def __eq__(self, other):
        return isinstance(other, CouplingMap) and self.pairs == other.pairs

    def __repr__(self):
        body = ", ".join(sorted(str(tuple(sorted(p))) for p in self.pairs))
        return f"CouplingMap([{body}])"


LINE3 = CouplingMap.line(3)


@dataclass(frozen=True)
class PhaseChoice:
    """Free phases of the swap block and, optionally, of the V* block."""

    w: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    v: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if len(self.w) != 4 or (self.v is not None and len(self.v) != 4):
            raise ValueError("phase choice needs 4 angles per block")


ZERO_PHASES = PhaseChoice()


@dataclass
class Circuit:
    n_wires: int
    gates: list[Gate] = field(default_factory=list)
    coupling: CouplingMap | None = None

    def validate(self) -> "Circuit":
        for g in self.gates:
            if max(g.wires) >= self.n_wires or min(g.wires) < 0:
                raise ValueError(f"gate {g} uses a wire outside the register")
            if g.name == "cx" and self.coupling is not None:
                if not self.coupling.allows(*g.wires):
                    raise ValueError(f"cx on {g.wires} violates the coupling map")
        return self

    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.name == "cx")

    def depth(self) -> int:
        level = [0] * self.n_wires
        for g in self.gates:
            d = 1 + max(level[w] for w in g.wires)
            for w in g.wires:
                level[w] = d
        return max(level, default=0)


def _swap_block(phases: tuple[float, float, float, float]) -> np.ndarray:
    """4x4 block that phases the outer states and swaps the inner pair."""
    p1, p2, p3, p4 = phases
    b = np.zeros((4, 4), dtype=complex)
    b[0, 0] = np.exp(1j * p1)
    b[1, 2] = np.exp(1j * p2)
    b[2, 1] = np.exp(1j * p3)
    b[3, 3] = np.exp(1j * p4)
    return b


# logical indices of the two invariant subspaces of the cooling gate
W_SUBSPACE = [qcore.basis_index(i, i, k) for i in (0, 1) for k in (0, 1)]
V_SUBSPACE = [qcore.basis_index(i, 1 - i, k) for i in (0, 1) for k in (0, 1)]


def build_target_unitary(v_choice, phases: PhaseChoice = ZERO_PHASES) -> np.ndarray:
    """8x8 cooling unitary in logical order.

    The gate is block diagonal: a swap block on span{|00,.>, |11,.>} that
    exchanges |00,1> and |11,0>, and a block V on span{|01,.>, |10,.>}.
    v_choice selects V: "identity", "vstar" (same shape as the swap block),
    or an explicit 4x4 unitary.
    """
    u = np.zeros((qcore.DIM, qcore.DIM), dtype=complex)
    w = _swap_block(phases.w)
    for a, ia in enumerate(W_SUBSPACE):
        for b, ib in enumerate(W_SUBSPACE):
            u[ia, ib] = w[a, b]
    if isinstance(v_choice, str):
        if v_choice == "identity":
            v = np.eye(4, dtype=complex)
        elif v_choice == "vstar":
            v = _swap_block(phases.v if phases.v is not None else (0.0,) * 4)
        else:
            raise ValueError(f"unknown v_choice {v_choice!r}")
    else:
        v = qcore.check_unitary(np.asarray(v_choice, dtype=complex))
        if v.shape != (4, 4):
            raise ValueError("custom V must be 4x4")
    for a, ia in enumerate(V_SUBSPACE):
        for b, ib in enumerate(V_SUBSPACE):
            u[ia, ib] = v[a, b]
    return u


def _embed_gate(g: Gate, n_wires: int) -> np.ndarray:
    """Full-register matrix of a gate, physical order, wire 0 most significant."""
    if g.name == "cx":
        dim = 2 ** n_wires
        c, t = g.wires
        m = np.zeros((dim, dim), dtype=complex)
        for s in range(dim):
            cbit = (s >> (n_wires - 1 - c)) & 1
            out = s ^ (cbit << (n_wires - 1 - t))
            m[out, s] = 1.0
        return m
    w = g.wires[0]
    m = np.eye(1, dtype=complex)
    for pos in range(n_wires):
        m = np.kron(m, g.matrix() if pos == w else np.eye(2, dtype=complex))
    return m


def unitary_of_circuit(c: Circuit) -> np.ndarray:
    """Evaluate the circuit to a matrix.

    Gates are multiplied in application order in physical wire order; for the
    three-wire register the result is conjugated into logical |ij,k> order so
    it compares directly against build_target_unitary.
    """
    c.validate()
    dim = 2 ** c.n_wires
    u = np.eye(dim, dtype=complex)
    for g in c.gates:
        u = _embed_gate(g, c.n_wires) @ u
    if c.n_wires == qcore.N_WIRES:
        p = qcore.logical_to_physical_matrix()
        u = p.T @ u @ p
    return u


def build_vstar_circuit() -> Circuit:
    """Four-CNOT realization of the cooling gate with the V* block.

    On physical wires (q0 carries i, q1 carries k, q2 carries j) the sequence
    cx(0,1) cx(1,0) cx(1,2) cx(0,1) realizes the basis permutation
    (i, j, k) -> (k, i^j^k, i).
    """
    return Circuit(3, [cx(0, 1), cx(1, 0), cx(1, 2), cx(0, 1)], LINE3).validate()


def emit_qasm(c: Circuit) -> str:
    """OpenQASM 2.0 text for a circuit; angles carry 17 significant digits."""
    c.validate()
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{c.n_wires}];"]
    for g in c.gates:
        if g.name == "rz":
            lines.append(f"rz({g.angle:.17g}) q[{g.wires[0]}];")
        elif g.name == "cx":
            lines.append(f"cx q[{g.wires[0]}],q[{g.wires[1]}];")
        else:
            lines.append(f"{g.name} q[{g.wires[0]}];")
    return "\n".join(lines) + "\n"
