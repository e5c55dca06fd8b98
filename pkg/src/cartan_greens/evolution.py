"""Statevector time evolution through ``U(t) = K exp(-i h t) K^dag`` and circuit emission.

States are plain 1-D complex numpy arrays of length ``2**n``; qubit ``q`` is
bit ``q`` of the basis index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .pauli import PauliString, PauliSum, basis_phases
from .solver import CartanCoordinates, KFactorization


@lru_cache(maxsize=32)
def _indices(dim: int) -> np.ndarray:
    idx = np.arange(dim)
    idx.setflags(write=False)
    return idx


def _check_state(state: np.ndarray, n_qubits: int) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1 or state.shape[0] != 1 << n_qubits:
        raise ValueError(f"expected a statevector of length {1 << n_qubits}, got shape {state.shape}")
    return state


def apply_pauli(state: np.ndarray, p: PauliString) -> np.ndarray:
    state = _check_state(state, p.n_qubits)
    idx = _indices(state.shape[0])
    out = np.empty_like(state)
    out[idx ^ p.x] = basis_phases(p, idx) * state
    return out


def apply_pauli_exp(state: np.ndarray, p: PauliString, alpha: float) -> np.ndarray:
    """``exp(i alpha p)|state> = cos(alpha)|state> + i sin(alpha) p|state>``."""
    return math.cos(alpha) * _check_state(state, p.n_qubits) + 1j * math.sin(alpha) * apply_pauli(state, p)


def inner_product(a: np.ndarray, b: np.ndarray) -> complex:
    """``<a|b>``, conjugating ``a``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"state shapes differ: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


@dataclass(frozen=True)
class EvolutionOperator:
    k_factors: KFactorization
    h_coords: CartanCoordinates
    n_qubits: int

    def __post_init__(self):
        strings = [k for k, _ in self.k_factors.factors] + list(self.h_coords.coefficients)
        if any(p.n_qubits != self.n_qubits for p in strings):
            raise ValueError("operator strings disagree on the qubit count")

    def h_terms(self) -> list[tuple[PauliString, float]]:
        return list(self.h_coords.coefficients.items())

    def to_dense(self, t: float) -> np.ndarray:
        K = self.k_factors.to_dense() if self.k_factors.factors else np.eye(1 << self.n_qubits)
        h = self.h_coords.as_pauli_sum(self.n_qubits).to_dense()
        w, v = np.linalg.eigh(h)
        eh = (v * np.exp(-1j * (w + self.h_coords.offset) * t)) @ v.conj().T
        return K @ eh @ K.conj().T


def evolve(state: np.ndarray, op: EvolutionOperator, t: float) -> np.ndarray:
    """Apply ``K exp(-i h t) K^dag``; the operation count does not depend on ``t``."""
    psi = _check_state(state, op.n_qubits).copy()
    factors = op.k_factors.factors
    for k, th in factors:
        psi = apply_pauli_exp(psi, k, -th)
    for p, lam in op.h_terms():
        psi = apply_pauli_exp(psi, p, -lam * t)
    for k, th in reversed(factors):
        psi = apply_pauli_exp(psi, k, th)
    if op.h_coords.offset:
        psi *= np.exp(-1j * op.h_coords.offset * t)
    return psi


# --- circuits ---------------------------------------------------------------

@dataclass
class QuantumCircuit:
    """Gate list over ``h``, ``s``, ``sdg``, ``cx`` and ``rz``; global phase is not tracked."""

    n_qubits: int
    gates: list[tuple] = field(default_factory=list)

    def add(self, name: str, *qubits: int, param: float | None = None) -> None:
        self.gates.append((name, tuple(qubits), param))

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def count_ops(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for name, _, _ in self.gates:
            counts[name] = counts.get(name, 0) + 1
        return counts

    @property
    def depth(self) -> int:
        level = [0] * self.n_qubits
        for _, qubits, _ in self.gates:
            d = max(level[q] for q in qubits) + 1
            for q in qubits:
                level[q] = d
        return max(level, default=0)

    def to_qasm(self) -> str:
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n_qubits}];"]
        for name, qubits, param in self.gates:
            args = ",".join(f"q[{q}]" for q in qubits)
            if param is None:
                lines.append(f"{name} {args};")
            else:
                lines.append(f"{name}({param!r}) {args};")
        lines.append(f"// gates={self.gate_count} depth={self.depth}")
        return "\n".join(lines) + "\n"


def append_pauli_exp(circuit: QuantumCircuit, p: PauliString, theta: float) -> None:
    """Append ``exp(i theta p)``: basis change, CX ladder, ``rz(-2 theta)``, and back."""
    support = p.support
    if not support:
        return
    for q in support:
        op = p.op(q)
        if op == "X":
            circuit.add("h", q)
        elif op == "Y":
            circuit.add("sdg", q)
            circuit.add("h", q)
    for a, b in zip(support, support[1:]):
        circuit.add("cx", a, b)
    circuit.add("rz", support[-1], param=-2.0 * theta)
    for a, b in reversed(list(zip(support, support[1:]))):
        circuit.add("cx", a, b)
    for q in support:
        op = p.op(q)
        if op == "X":
            circuit.add("h", q)
        elif op == "Y":
            circuit.add("h", q)
            circuit.add("s", q)


def emit_circuit(op: EvolutionOperator, t: float) -> QuantumCircuit:
    circ = QuantumCircuit(op.n_qubits)
    for k, th in op.k_factors.factors:
        append_pauli_exp(circ, k, -th)
    for p, lam in op.h_terms():
        append_pauli_exp(circ, p, -lam * t)
    for k, th in reversed(op.k_factors.factors):
        append_pauli_exp(circ, k, th)
    return circ


_SQ = 1 / math.sqrt(2)
_ONE_QUBIT = {
    "h": np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
}


def simulate_circuit(circuit: QuantumCircuit, state: np.ndarray) -> np.ndarray:
    """Gate-by-gate statevector simulation, independent of :func:`evolve`."""
    n = circuit.n_qubits
    psi = _check_state(state, n).reshape([2] * n).copy()
    for name, qubits, param in circuit.gates:
        if name == "cx":
            c, tq = (n - 1 - q for q in qubits)
            sl = [slice(None)] * n
            sl[c] = 1
            sub = psi[tuple(sl)]
            t_axis = tq if tq < c else tq - 1
            psi[tuple(sl)] = np.flip(sub, axis=t_axis).copy()
            continue
        if name == "rz":
            gate = np.diag([np.exp(-0.5j * param), np.exp(0.5j * param)])
        else:
            gate = _ONE_QUBIT[name]
        axis = n - 1 - qubits[0]
        psi = np.moveaxis(np.tensordot(gate, psi, axes=([1], [axis])), 0, axis)
    return psi.reshape(-1)


def dense_evolution(H: PauliSum, t: float) -> np.ndarray:
    """Reference ``exp(-i H t)`` from a dense eigendecomposition."""
    w, v = np.linalg.eigh(H.to_dense())
    return (v * np.exp(-1j * w * t)) @ v.conj().T
