"""Hamiltonian Lie algebra: commutator closure, Y-parity Cartan split, Cartan subalgebra."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .exceptions import AlgebraSizeError, CartanConditionError
from .pauli import PauliString, PauliSum, commutes, multiply

DEFAULT_MAX_SIZE = 4096


def closure(generators: Iterable[PauliString], max_size: int = DEFAULT_MAX_SIZE) -> list[PauliString]:
    """Smallest set of strings containing ``generators`` and closed under commutation.

    Only string identities matter: the commutator of two anticommuting strings
    is proportional to their product, so the product string joins the set.
    The identity is dropped since it commutes with everything.
    """
    gens = [p for p in dict.fromkeys(generators) if not p.is_identity]
    if not gens:
        raise ValueError("closure needs at least one non-identity generator")
    n = gens[0].n_qubits
    if any(p.n_qubits != n for p in gens):
        raise ValueError("generators have mismatched qubit counts")

    elements: list[PauliString] = []
    seen: set[PauliString] = set()
    work = list(gens)
    seen.update(gens)
    while work:
        p = work.pop()
        for q in elements:
            if commutes(p, q):
                continue
            r = multiply(p, q).string
            if r not in seen:
                seen.add(r)
                work.append(r)
                if len(seen) > max_size:
                    raise AlgebraSizeError(
                        f"closure exceeded {max_size} strings; the algebra is likely exponential in n"
                    )
        elements.append(p)
    return sorted(elements)


def is_k_string(p: PauliString) -> bool:
    """Y-parity involution ``theta(P) = -P^T``: odd Y-count strings are fixed."""
    return p.y_count % 2 == 1


def involution_split(g_basis: Sequence[PauliString]) -> tuple[list[PauliString], list[PauliString]]:
    k = [p for p in g_basis if is_k_string(p)]
    m = [p for p in g_basis if not is_k_string(p)]
    verify_cartan_conditions(g_basis, k, m)
    return k, m


def verify_cartan_conditions(g_basis, k_basis, m_basis) -> None:
    """Raise :class:`CartanConditionError` unless [k,k] in k, [m,m] in k, [k,m] in m pairwise."""
    k_set, m_set = set(k_basis), set(m_basis)
    if k_set & m_set or (k_set | m_set) != set(g_basis):
        raise CartanConditionError("k and m must partition g")
    checks = (
        (k_basis, k_basis, k_set, "[k,k]"),
        (m_basis, m_basis, k_set, "[m,m]"),
        (k_basis, m_basis, m_set, "[k,m]"),
    )
    for left, right, target, name in checks:
        for p in left:
            for q in right:
                if commutes(p, q):
                    continue
                r = multiply(p, q).string
                if r not in target:
                    raise CartanConditionError(f"{name} violated: [{p}, {q}] ~ {r}")


def cartan_subalgebra(
    m_basis: Sequence[PauliString],
    seed: PauliString | Sequence[PauliString] | None = None,
) -> list[PauliString]:
    """Greedy maximal abelian subset of ``m_basis``.

    Seeds are taken first, in the given order, then ``m_basis`` is scanned
    in canonical order and every string commuting with all current members
    is added. With no seed the first string of ``m_basis`` starts the scan.
    """
    if isinstance(seed, PauliString):
        seed = [seed]
    m_set = set(m_basis)
    h: list[PauliString] = []
    for s in seed or ():
        if s not in m_set:
            raise ValueError(f"seed {s} is not in m")
        if all(commutes(s, q) for q in h) and s not in h:
            h.append(s)
    for p in sorted(m_basis):
        if p not in h and all(commutes(p, q) for q in h):
            h.append(p)
    return h


@dataclass(frozen=True)
class HamiltonianAlgebra:
    g: tuple[PauliString, ...]
    k: tuple[PauliString, ...]
    m: tuple[PauliString, ...]
    h: tuple[PauliString, ...]

    @property
    def n_qubits(self) -> int:
        return self.g[0].n_qubits

    @property
    def dims(self) -> dict[str, int]:
        return {"g": len(self.g), "k": len(self.k), "m": len(self.m), "h": len(self.h)}

    def dims_line(self) -> str:
        return "dims " + " ".join(f"{key}={val}" for key, val in self.dims.items())

    def dump(self) -> str:
        """Sections G/K/M/H, one string per line, then the dims summary."""
        lines = []
        for name, basis in (("G", self.g), ("K", self.k), ("M", self.m), ("H", self.h)):
            lines.append(f"{name}:")
            lines.extend(f"1.0 {p}" for p in basis)
        lines.append(self.dims_line())
        return "\n".join(lines) + "\n"


def hamiltonian_strings(H: PauliSum) -> list[PauliString]:
    return [p for p in H if not p.is_identity]


def build_algebra(
    H: PauliSum,
    seed: PauliString | Sequence[PauliString] | None = None,
    max_size: int = DEFAULT_MAX_SIZE,
) -> HamiltonianAlgebra:
    """Closure, Y-parity split and Cartan subalgebra for a Hermitian Pauli sum.

    The default seed is the first non-identity Hamiltonian term in canonical
    order. Hamiltonians with odd-Y terms are rejected since they do not lie in m.
    """
    if not H.is_real():
        raise ValueError("Hamiltonian must have real coefficients")
    terms = hamiltonian_strings(H)
    odd = [p for p in terms if is_k_string(p)]
    if odd:
        raise CartanConditionError(
            "Hamiltonian terms with odd Y-count lie outside m under the Y-parity involution: "
            + ", ".join(map(str, odd))
        )
    g = closure(terms, max_size=max_size)
    k, m = involution_split(g)
    h = cartan_subalgebra(m, seed if seed is not None else terms[0])
    return HamiltonianAlgebra(tuple(g), tuple(k), tuple(m), tuple(h))
