"""Pauli strings in symplectic (x, z) bit-mask form and sparse sums of them.

Qubit ``q`` corresponds to bit ``q`` of both masks and of computational-basis
indices, so ``X0`` flips the least significant bit of a statevector index.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .exceptions import QubitCountMismatch

PRUNE_TOL = 1e-14
MAX_QUBITS = 64

_I_POWERS = (1, 1j, -1, -1j)


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """Phase-free tensor product of I, X, Y, Z on ``n_qubits`` qubits.

    Bit ``q`` of ``x`` is set when qubit ``q`` carries X or Y; bit ``q`` of
    ``z`` is set when it carries Z or Y.
    """

    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if not 0 < self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise ValueError("mask bits set beyond n_qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str, n_qubits: int) -> "PauliString":
        """Parse ``"X0 Z1 Y3"`` (unlisted qubits are identity); ``"I"`` is the identity."""
        x = z = 0
        for tok in label.split():
            m = re.fullmatch(r"([IXYZ])(\d*)", tok)
            if m is None:
                raise ValueError(f"bad Pauli token {tok!r}")
            op, idx = m.groups()
            if op == "I":
                continue
            if not idx:
                raise ValueError(f"Pauli token {tok!r} lacks a qubit index")
            q = int(idx)
            if q >= n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            bit = 1 << q
            if (x | z) & bit:
                raise ValueError(f"qubit {q} listed twice in {label!r}")
            if op in "XY":
                x |= bit
            if op in "ZY":
                z |= bit
        return cls(n_qubits, x, z)

    @property
    def support(self) -> list[int]:
        s = self.x | self.z
        return [q for q in range(self.n_qubits) if s >> q & 1]

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def op(self, q: int) -> str:
        return "IXZY"[(self.x >> q & 1) | (self.z >> q & 1) << 1]

    def sort_key(self) -> tuple[int, int]:
        return (self.z, self.x)

    def __lt__(self, other: "PauliString") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        toks = [f"{self.op(q)}{q}" for q in self.support]
        return " ".join(toks) if toks else "I"

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r}, n_qubits={self.n_qubits})"

    def to_dense(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        idx = np.arange(dim)
        out = np.zeros((dim, dim), dtype=complex)
        out[idx ^ self.x, idx] = basis_phases(self, idx)
        return out


def basis_phases(p: PauliString, idx: np.ndarray) -> np.ndarray:
    """Phases ``c_b`` with ``p|b> = c_b |b ^ p.x>`` for basis indices ``idx``."""
    signs = 1 - 2 * (np.bitwise_count(idx & p.z).astype(np.int64) & 1)
    return _I_POWERS[p.y_count % 4] * signs


def _check(p: PauliString, q: PauliString) -> None:
    if p.n_qubits != q.n_qubits:
        raise QubitCountMismatch(f"qubit counts differ: {p.n_qubits} vs {q.n_qubits}")


class PhasedString(NamedTuple):
    phase: complex
    string: PauliString


def _product_phase(p: PauliString, q: PauliString) -> tuple[int, PauliString]:
    # Y = i X Z, so P = i^{#Y} X^x Z^z; moving Z^{z_p} past X^{x_q} costs (-1)^{|z_p & x_q|}.
    r = PauliString(p.n_qubits, p.x ^ q.x, p.z ^ q.z)
    k = p.y_count + q.y_count - r.y_count + 2 * _popcount(p.z & q.x)
    return k % 4, r


def multiply(p: PauliString, q: PauliString) -> PhasedString:
    """Return ``(phase, r)`` with ``p @ q == phase * r``."""
    _check(p, q)
    k, r = _product_phase(p, q)
    return PhasedString(_I_POWERS[k], r)


def commutes(p: PauliString, q: PauliString) -> bool:
    _check(p, q)
    return (_popcount(p.x & q.z) + _popcount(p.z & q.x)) % 2 == 0


class PauliSum:
    """Sparse complex linear combination of Pauli strings.

    Instances are immutable. Terms with ``|coefficient| < PRUNE_TOL`` are
    dropped at construction and iteration follows the canonical
    ``(z, x)`` ordering of the strings.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping[PauliString, complex] | None = None):
        self.n_qubits = n_qubits
        clean = {}
        for p, c in (terms or {}).items():
            if p.n_qubits != n_qubits:
                raise QubitCountMismatch(f"string {p} has {p.n_qubits} qubits, sum has {n_qubits}")
            c = complex(c)
            if abs(c) >= PRUNE_TOL:
                clean[p] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))

    @classmethod
    def from_string(cls, p: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return cls(p.n_qubits, {p: coeff})

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[complex, str | PauliString]]) -> "PauliSum":
        """Build from ``(coeff, label)`` pairs, accumulating repeated strings."""
        acc: dict[PauliString, complex] = {}
        for c, p in terms:
            if isinstance(p, str):
                p = PauliString.from_label(p, n_qubits)
            acc[p] = acc.get(p, 0) + c
        return cls(n_qubits, acc)

    @property
    def terms(self) -> dict[PauliString, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def strings(self) -> list[PauliString]:
        return list(self._terms)

    def coeff(self, p: PauliString) -> complex:
        return self._terms.get(p, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __contains__(self, p) -> bool:
        return p in self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_qubits, tuple(self._terms.items())))

    def isclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= atol for c in diff._terms.values())

    def _same(self, other: "PauliSum") -> None:
        if self.n_qubits != other.n_qubits:
            raise QubitCountMismatch(f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._same(other)
        acc = dict(self._terms)
        for p, c in other._terms.items():
            acc[p] = acc.get(p, 0) + c
        return PauliSum(self.n_qubits, acc)

    def __neg__(self) -> "PauliSum":
        return PauliSum(self.n_qubits, {p: -c for p, c in self._terms.items()})

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, {p: scalar * c for p, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "PauliSum":
        return self * (1 / scalar)

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        self._same(other)
        acc: dict[PauliString, complex] = {}
        for p, a in self._terms.items():
            for q, b in other._terms.items():
                k, r = _product_phase(p, q)
                acc[r] = acc.get(r, 0) + _I_POWERS[k] * a * b
        return PauliSum(self.n_qubits, acc)

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.n_qubits, {p: c.conjugate() for p, c in self._terms.items()})

    def is_real(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.is_real(tol)

    def real_coeffs(self) -> dict[PauliString, float]:
        return {p: c.real for p, c in self._terms.items()}

    def norm(self) -> float:
        """Norm induced by :func:`inner`, i.e. the Hilbert-Schmidt norm over ``2^n``."""
        return math.sqrt(sum(abs(c) ** 2 for c in self._terms.values()))

    def coeff_norm(self) -> float:
        """Sum of absolute coefficients, an upper bound on the operator norm."""
        return sum(abs(c) for c in self._terms.values())

    def to_dense(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        idx = np.arange(dim)
        out = np.zeros((dim, dim), dtype=complex)
        for p, c in self._terms.items():
            out[idx ^ p.x, idx] += c * basis_phases(p, idx)
        return out

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Matrix-free action on a statevector."""
        idx = np.arange(state.shape[0])
        out = np.zeros(state.shape[0], dtype=complex)
        for p, c in self._terms.items():
            out[idx ^ p.x] += c * basis_phases(p, idx) * state
        return out

    def __str__(self) -> str:
        return format_pauli_sum(self)

    def __repr__(self) -> str:
        body = " + ".join(f"({_fmt_coeff(c)})*[{p}]" for p, c in self._terms.items())
        return f"PauliSum(n_qubits={self.n_qubits}, {body or '0'})"


def _as_sum(a) -> PauliSum:
    return PauliSum.from_string(a) if isinstance(a, PauliString) else a


def commutator(a: PauliSum | PauliString, b: PauliSum | PauliString) -> PauliSum:
    """``[a, b] = ab - ba``; only anticommuting string pairs contribute ``2 * a_P b_Q * P Q``."""
    a, b = _as_sum(a), _as_sum(b)
    a._same(b)
    acc: dict[PauliString, complex] = {}
    for p, ca in a.items():
        for q, cb in b.items():
            if (_popcount(p.x & q.z) + _popcount(p.z & q.x)) % 2 == 0:
                continue
            k, r = _product_phase(p, q)
            acc[r] = acc.get(r, 0) + 2 * _I_POWERS[k] * ca * cb
    return PauliSum(a.n_qubits, acc)


def adjoint_rotate(a: PauliSum | PauliString, k: PauliString, theta: float) -> PauliSum:
    """Exact ``exp(i theta k) a exp(-i theta k)``.

    Terms commuting with ``k`` are unchanged; an anticommuting ``P`` becomes
    ``cos(2 theta) P + i sin(2 theta) k P``.
    """
    a = _as_sum(a)
    if a.n_qubits != k.n_qubits:
        raise QubitCountMismatch(f"qubit counts differ: {a.n_qubits} vs {k.n_qubits}")
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    acc: dict[PauliString, complex] = {}
    for p, c in a.items():
        if (_popcount(p.x & k.z) + _popcount(p.z & k.x)) % 2 == 0:
            acc[p] = acc.get(p, 0) + c
            continue
        ph, r = _product_phase(k, p)
        acc[p] = acc.get(p, 0) + c2 * c
        acc[r] = acc.get(r, 0) + 1j * s2 * _I_POWERS[ph] * c
    return PauliSum(a.n_qubits, acc)


def inner(a: PauliSum | PauliString, b: PauliSum | PauliString) -> float:
    """Normalized trace form ``Tr(a b) / 2^n = sum_P a_P b_P`` (real part for algebra elements)."""
    a, b = _as_sum(a), _as_sum(b)
    a._same(b)
    if len(a) > len(b):
        a, b = b, a
    total = sum(c * b.coeff(p) for p, c in a.items())
    return complex(total).real


# --- text format -----------------------------------------------------------

def _fmt_coeff(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    sign = "+" if c.imag >= 0 else "-"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


def parse_coefficient(tok: str) -> complex:
    """Parse ``0.5``, ``-1e-3``, ``0.5+0.25i``, ``2i`` or ``-i``."""
    t = tok.strip().replace("I", "i")
    if t.endswith("i") or t.endswith("j"):
        t = t[:-1] + "j"
        if t in ("j", "+j", "-j"):
            t = t.replace("j", "1j")
        elif t[-2] in "+-":
            t = t[:-1] + "1j"
    try:
        return complex(t)
    except ValueError:
        raise ValueError(f"bad coefficient {tok!r}") from None


def parse_pauli_sum(text: str, n_qubits: int | None = None) -> PauliSum:
    """Parse the line format ``<coefficient> <string>`` with ``#`` comments.

    When ``n_qubits`` is omitted it is one more than the highest index seen.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        coeff_tok, _, label = line.partition(" ")
        try:
            coeff = parse_coefficient(coeff_tok)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        rows.append((coeff, label.strip() or "I", lineno))
    if n_qubits is None:
        hi = [int(i) for _, label, _ in rows for i in re.findall(r"\d+", label)]
        n_qubits = max(hi, default=0) + 1
    acc = []
    for coeff, label, lineno in rows:
        try:
            acc.append((coeff, PauliString.from_label(label, n_qubits)))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return PauliSum.from_terms(n_qubits, acc)


def format_pauli_sum(a: PauliSum) -> str:
    return "".join(f"{_fmt_coeff(c)} {p}\n" for p, c in a.items())
