"""Retarded Green's functions from Cartan-evolved states and their spectral functions."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.signal import find_peaks

from .evolution import EvolutionOperator, apply_pauli, evolve
from .models import GroundState, LadderOperator, dense_check
from .pauli import PauliString, PauliSum

DEFAULT_ETA = 0.2


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 35.0
    dt: float = 0.1

    def __post_init__(self):
        if self.t_max < 0 or not self.dt > 0:
            raise ValueError("need t_max >= 0 and dt > 0")
        steps = self.t_max / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f"t_max={self.t_max} is not a multiple of dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


def omega_grid(omega_min: float = -10.0, omega_max: float = 10.0, d_omega: float = 0.01) -> np.ndarray:
    n = int(round((omega_max - omega_min) / d_omega))
    return omega_min + d_omega * np.arange(n + 1)


@dataclass
class GreensSeries:
    grid: TimeGrid
    values: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


@dataclass
class SpectralSeries:
    omega: np.ndarray
    values: np.ndarray
    eta: float
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def d_omega(self) -> float:
        return float(self.omega[1] - self.omega[0]) if len(self.omega) > 1 else 0.0

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.omega))

    def peaks(self, rel_height: float = 0.1) -> np.ndarray:
        """Frequencies of local maxima above ``rel_height`` times the global maximum."""
        top = float(np.max(self.values))
        idx, _ = find_peaks(self.values, height=rel_height * top)
        return self.omega[idx]


def _warn_degenerate(gs: GroundState) -> None:
    if gs.degenerate:
        warnings.warn("ground state is degenerate; the Green's function depends on the chosen eigenvector",
                      RuntimeWarning, stacklevel=3)


def fermionic_gf(a: LadderOperator, b: LadderOperator, gs: GroundState, op: EvolutionOperator,
                 grid: TimeGrid, label: str = "") -> GreensSeries:
    """``G_ab(t) = -i <{c_a(t), c_b^dag}>`` for annihilation operators ``a`` and ``b``.

    The particle term evolves ``c_b^dag|Psi>`` forward and overlaps it with
    ``c_a^dag|Psi>``; the hole term evolves ``c_a|Psi>`` backward and overlaps
    it with ``c_b|Psi>``. Ground-state phases ``exp(+-i E_g t)`` are applied
    explicitly.
    """
    _warn_degenerate(gs)
    psi = gs.state
    particle_ket = b.adjoint().apply(psi)
    particle_bra = a.adjoint().apply(psi)
    hole_ket = a.apply(psi)
    hole_bra = b.apply(psi)
    times = grid.times
    values = np.zeros(len(times), dtype=complex)
    has_particle = np.linalg.norm(particle_ket) > 0 and np.linalg.norm(particle_bra) > 0
    has_hole = np.linalg.norm(hole_ket) > 0 and np.linalg.norm(hole_bra) > 0
    if not (has_particle or has_hole):
        warnings.warn("ladder operators annihilate the ground state in both sectors; G(t) = 0",
                      RuntimeWarning, stacklevel=2)
        return GreensSeries(grid, values, label)
    E = gs.energy
    for j, t in enumerate(times):
        g = 0j
        if has_particle:
            g += np.exp(1j * E * t) * np.vdot(particle_bra, evolve(particle_ket, op, t))
        if has_hole:
            g += np.exp(-1j * E * t) * np.vdot(hole_bra, evolve(hole_ket, op, -t))
        values[j] = -1j * g
    return GreensSeries(grid, values, label)


def spin_correlator_gf(gs: GroundState, op: EvolutionOperator, grid: TimeGrid,
                       sites: list[int] | None = None, label: str = "") -> GreensSeries:
    """Site average of ``-i <[Z_i(t), Z_0]>`` over ``sites`` (default: every site)."""
    _warn_degenerate(gs)
    n = op.n_qubits
    sites = list(range(n)) if sites is None else sites
    psi = gs.state
    z0psi = apply_pauli(psi, PauliString(n, 0, 1))
    bras = [apply_pauli(psi, PauliString(n, 0, 1 << i)) for i in sites]
    values = np.zeros(len(grid.times), dtype=complex)
    for j, t in enumerate(grid.times):
        ket = np.exp(1j * gs.energy * t) * evolve(z0psi, op, t)
        acc = 0j
        for bra in bras:
            x = np.vdot(bra, ket)
            acc += -1j * (x - x.conjugate())
        values[j] = acc / len(sites)
    return GreensSeries(grid, values, label)


def spectral_function(g: GreensSeries, eta: float = DEFAULT_ETA, omega: np.ndarray | None = None) -> SpectralSeries:
    """``A(w) = -Im G(w) / pi`` with ``G(w)`` the trapezoidal integral of ``exp(i(w + i eta)t) G(t)`` over ``[0, t_max]``."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    omega = omega_grid() if omega is None else np.asarray(omega, dtype=float)
    t = g.times
    w = np.full(len(t), g.grid.dt)
    w[0] = w[-1] = g.grid.dt / 2
    if len(t) == 1:
        w[0] = 0.0
    damped = w * np.exp(-eta * t) * g.values
    gw = np.exp(1j * np.outer(omega, t)) @ damped
    return SpectralSeries(omega, -gw.imag / math.pi, eta, g.label, dict(g.meta))


# --- dense references ---------------------------------------------------------

def lehmann_reference(H: PauliSum, a: LadderOperator, b: LadderOperator, eta: float = DEFAULT_ETA,
                      omega: np.ndarray | None = None, label: str = "") -> SpectralSeries:
    """Exact broadened ``A(w)`` from the full eigendecomposition of ``H``."""
    dense_check(H.n_qubits)
    omega = omega_grid() if omega is None else np.asarray(omega, dtype=float)
    w, v = np.linalg.eigh(H.to_dense())
    psi = v[:, 0]
    ex = w - w[0]
    A = a.action.to_dense()
    Bdag = b.action.adjoint().to_dense()
    # particle poles at +ex, hole poles at -ex
    res_p = (v.conj().T @ (A.conj().T @ psi)).conj() * (v.conj().T @ (Bdag @ psi))
    res_h = (v.conj().T @ (Bdag.conj().T @ psi)).conj() * (v.conj().T @ (A @ psi))
    z = omega[:, None] + 1j * eta
    gw = (res_p / (z - ex)).sum(axis=1) + (res_h / (z + ex)).sum(axis=1)
    return SpectralSeries(omega, -gw.imag / math.pi, eta, label)


def dense_fermionic_gf(H: PauliSum, a: LadderOperator, b: LadderOperator, grid: TimeGrid) -> np.ndarray:
    """Reference ``G_ab(t)`` with ``scipy.linalg.expm`` applied at every time step."""
    dense_check(H.n_qubits)
    Hd = H.to_dense()
    w, v = np.linalg.eigh(Hd)
    psi, E = v[:, 0], w[0]
    A = a.action.to_dense()
    Bd = b.action.adjoint().to_dense()
    out = []
    for t in grid.times:
        U = scipy.linalg.expm(-1j * Hd * t)
        term1 = np.exp(1j * E * t) * psi.conj() @ A @ U @ Bd @ psi
        term2 = np.exp(-1j * E * t) * psi.conj() @ Bd @ U.conj().T @ A @ psi
        out.append(-1j * (term1 + term2))
    return np.array(out)


def dense_spin_correlator(H: PauliSum, grid: TimeGrid, sites: list[int] | None = None) -> np.ndarray:
    dense_check(H.n_qubits)
    n = H.n_qubits
    sites = list(range(n)) if sites is None else sites
    Hd = H.to_dense()
    w, v = np.linalg.eigh(Hd)
    psi = v[:, 0]
    Z = [PauliString(n, 0, 1 << i).to_dense() for i in sites]
    Z0 = PauliString(n, 0, 1).to_dense()
    out = []
    for t in grid.times:
        U = scipy.linalg.expm(-1j * Hd * t)
        acc = 0j
        for Zi in Z:
            Zt = U.conj().T @ Zi @ U
            acc += -1j * (psi.conj() @ (Zt @ Z0 - Z0 @ Zt) @ psi)
        out.append(acc / len(sites))
    return np.array(out)


# --- CSV ---------------------------------------------------------------------------

def _header(meta: dict) -> str:
    return "".join(f"# {k} = {v}\n" for k, v in meta.items())


def write_greens_csv(path: str | Path, series: GreensSeries, meta: dict | None = None) -> None:
    meta = {**series.meta, **(meta or {}), "t_max": series.grid.t_max, "dt": series.grid.dt}
    rows = "".join(f"{t:.10g},{g.real:.15e},{g.imag:.15e}\n" for t, g in zip(series.times, series.values))
    Path(path).write_text(_header(meta) + "t,re_G,im_G\n" + rows)


def write_spectral_csv(path: str | Path, series: SpectralSeries, meta: dict | None = None) -> None:
    meta = {**series.meta, **(meta or {}), "eta": series.eta,
            "omega_min": f"{series.omega[0]:.10g}", "omega_max": f"{series.omega[-1]:.10g}",
            "d_omega": f"{series.d_omega:.10g}"}
    rows = "".join(f"{w:.10g},{a:.15e}\n" for w, a in zip(series.omega, series.values))
    Path(path).write_text(_header(meta) + "omega,A\n" + rows)


def read_csv(path: str | Path) -> tuple[dict, np.ndarray]:
    """Return ``(meta, data)`` from a file written by the writers above."""
    meta = {}
    lines = Path(path).read_text().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
        elif line and not line[0].isalpha():
            body.append([float(x) for x in line.split(",")])
    return meta, np.array(body)
