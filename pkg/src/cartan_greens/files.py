"""Persisted decompositions: ``<k-string> <theta>`` lines plus an ``H:`` section."""
from __future__ import annotations

from pathlib import Path

from .evolution import EvolutionOperator
from .pauli import PauliString
from .solver import CartanCoordinates, KFactorization


def format_decomposition(op: EvolutionOperator) -> str:
    c = op.h_coords
    lines = [
        "# K = prod_i exp(i theta_i k_i), h = K^dag H K",
        f"# residual = {c.residual_norm!r} relative = {c.relative_residual!r}",
        f"n_qubits: {op.n_qubits}",
        f"offset: {c.offset!r}",
        "K:",
    ]
    lines += [f"{k} {th!r}" for k, th in op.k_factors.factors]
    lines.append("H:")
    lines += [f"{p} {lam!r}" for p, lam in c.coefficients.items()]
    return "\n".join(lines) + "\n"


def parse_decomposition(text: str) -> EvolutionOperator:
    n_qubits = None
    offset = 0.0
    section = None
    k_rows, h_rows = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n_qubits:"):
            n_qubits = int(line.split(":", 1)[1])
        elif line.startswith("offset:"):
            offset = float(line.split(":", 1)[1])
        elif line in ("K:", "H:"):
            section = line[0]
        elif section is None:
            raise ValueError(f"line {lineno}: entry outside a K:/H: section")
        else:
            label, _, value = line.rpartition(" ")
            (k_rows if section == "K" else h_rows).append((label, float(value)))
    if n_qubits is None:
        raise ValueError("decomposition file lacks an n_qubits line")
    factors = tuple((PauliString.from_label(lbl, n_qubits), th) for lbl, th in k_rows)
    coeffs = {PauliString.from_label(lbl, n_qubits): lam for lbl, lam in h_rows}
    coords = CartanCoordinates(coeffs, 0.0, 0.0, offset)
    return EvolutionOperator(KFactorization(factors), coords, n_qubits)


def save_decomposition(path: str | Path, op: EvolutionOperator) -> None:
    Path(path).write_text(format_decomposition(op))


def load_decomposition(path: str | Path) -> EvolutionOperator:
    return parse_decomposition(Path(path).read_text())
