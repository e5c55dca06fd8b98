"""Model Hamiltonians, Jordan-Wigner ladder operators and exact ground states."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, PauliSum

DENSE_MAX_QUBITS = 12


@dataclass(frozen=True)
class FermiHubbardSpec:
    U: float
    t_hop: float = -1.0
    n_sites: int = 2

    def __post_init__(self):
        if self.n_sites != 2:
            raise ValueError("only the two-site Hubbard model is supported")

    @property
    def label(self) -> str:
        return f"hubbard_U{self.U:g}"


@dataclass(frozen=True)
class TFIMSpec:
    n_sites: int
    h_x: float = 1.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("TFIM needs at least two sites")

    @property
    def label(self) -> str:
        return f"tfim_N{self.n_sites}"


@dataclass(frozen=True)
class LadderOperator:
    action: PauliSum
    label: str

    def adjoint(self) -> "LadderOperator":
        return LadderOperator(self.action.adjoint(), self.label + "^dag")

    def apply(self, state: np.ndarray) -> np.ndarray:
        return self.action.apply(state)


@dataclass(frozen=True)
class GroundState:
    energy: float
    state: np.ndarray
    degenerate: bool


def jordan_wigner(mode: int, create: bool, n_modes: int) -> LadderOperator:
    """Fermionic ladder operator on ``mode`` with a Z string on all lower qubits.

    ``create`` gives ``(X - iY)/2``, otherwise ``(X + iY)/2``; occupied is ``|1>``.
    """
    if not 0 <= mode < n_modes:
        raise IndexError(f"mode {mode} out of range for {n_modes} modes")
    zstr = (1 << mode) - 1
    bit = 1 << mode
    xs = PauliString(n_modes, bit, zstr)
    ys = PauliString(n_modes, bit, zstr | bit)
    sign = -1 if create else 1
    action = PauliSum(n_modes, {xs: 0.5, ys: sign * 0.5j})
    return LadderOperator(action, f"c{'^dag' if create else ''}_{mode}")


def number_op(mode: int, n_modes: int) -> PauliSum:
    return jordan_wigner(mode, True, n_modes).action @ jordan_wigner(mode, False, n_modes).action


def build_hubbard(spec: FermiHubbardSpec) -> PauliSum:
    """Particle-hole symmetric dimer with spin-orbital (i, s) on qubit ``2i + s``."""
    n = 2 * spec.n_sites
    H = PauliSum(n)
    ident = PauliSum.from_string(PauliString.identity(n))
    for s in (0, 1):
        a0 = jordan_wigner(s, False, n).action
        a1dag = jordan_wigner(2 + s, True, n).action
        hop = a1dag @ a0
        H = H + spec.t_hop * (hop + hop.adjoint())
    for i in range(spec.n_sites):
        nu = number_op(2 * i, n) - 0.5 * ident
        nd = number_op(2 * i + 1, n) - 0.5 * ident
        H = H + spec.U * (nu @ nd)
    return _real(H)


def build_tfim(spec: TFIMSpec) -> PauliSum:
    """Open chain ``sum Z_i Z_{i+1} + h_x sum X_i``."""
    n = spec.n_sites
    terms = [(1.0, PauliString(n, 0, 0b11 << i)) for i in range(n - 1)]
    terms += [(spec.h_x, PauliString(n, 1 << i, 0)) for i in range(n)]
    return PauliSum.from_terms(n, terms)


def momentum_op(k: float | str, spin: int, create: bool) -> LadderOperator:
    """Dimer Bloch operators ``(a_0 +/- a_1)/sqrt 2`` for ``k`` in {0, pi}."""
    if k in (0, "0"):
        sign = 1.0
    elif k in ("pi", math.pi):
        sign = -1.0
    else:
        raise ValueError(f"unsupported momentum {k!r}; use 0 or 'pi'")
    if spin not in (0, 1):
        raise ValueError("spin must be 0 (up) or 1 (down)")
    a0 = jordan_wigner(spin, create, 4).action
    a1 = jordan_wigner(2 + spin, create, 4).action
    action = (a0 + sign * a1) * (1 / math.sqrt(2))
    kname = "0" if sign > 0 else "pi"
    return LadderOperator(action, f"c{'^dag' if create else ''}_k{kname}_{'ud'[spin]}")


def anticommutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return a @ b + b @ a


def _real(H: PauliSum) -> PauliSum:
    if not H.is_real():
        raise ValueError("built Hamiltonian is not Hermitian")
    return PauliSum(H.n_qubits, H.real_coeffs())


def dense_check(n_qubits: int) -> None:
    if n_qubits > DENSE_MAX_QUBITS:
        raise ValueError(f"dense diagonalization limited to {DENSE_MAX_QUBITS} qubits, got {n_qubits}")


def ground_state(H: PauliSum, degeneracy_tol: float = 1e-9) -> GroundState:
    dense_check(H.n_qubits)
    w, v = np.linalg.eigh(H.to_dense())
    degenerate = len(w) > 1 and w[1] - w[0] < degeneracy_tol
    return GroundState(float(w[0]), v[:, 0].astype(complex), bool(degenerate))
