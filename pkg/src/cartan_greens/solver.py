"""KHK decomposition: find ``K = prod_i exp(i theta_i k_i)`` with ``K^dag H K`` in h.

``K`` is minimized through the trace-form cost ``f(theta) = <K v K^dag, H>``
where ``v`` is a generic element of h. Factors are ordered as in the k
basis with factor 0 leftmost, so ``K v K^dag`` is built by rotating ``v``
with the last factor first.

Two evaluation paths exist. :func:`cost` and :func:`gradient` work on
:class:`PauliSum` objects with :func:`adjoint_rotate`; :class:`KHKObjective`
works on coefficient vectors over the m basis with precomputed
rotation tables and is what :func:`minimize` uses.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import line_search

from .algebra import HamiltonianAlgebra
from .exceptions import ConvergenceError
from .pauli import PauliString, PauliSum, adjoint_rotate, commutes, inner, multiply


@dataclass(frozen=True)
class SolverConfig:
    gamma: float = math.pi
    grad_tol: float = 1e-10
    max_iters: int = 2000
    restarts: int = 5
    seed: int = 0
    residual_tol: float = 1e-8
    perturbation: float = 0.1

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError("gamma must exceed 1")
        if float(self.gamma).is_integer():
            raise ValueError("gamma must not be an integer")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 1 or self.restarts < 0:
            raise ValueError("max_iters must be >= 1 and restarts >= 0")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")


@dataclass(frozen=True)
class KFactorization:
    factors: tuple[tuple[PauliString, float], ...]

    @classmethod
    def from_arrays(cls, k_basis: Sequence[PauliString], theta) -> "KFactorization":
        theta = np.asarray(theta, dtype=float)
        if len(theta) != len(k_basis):
            raise ValueError("one angle per k element required")
        if not np.all(np.isfinite(theta)):
            raise ValueError("angles must be finite")
        return cls(tuple((k, float(a)) for k, a in zip(k_basis, theta)))

    @property
    def k_basis(self) -> list[PauliString]:
        return [k for k, _ in self.factors]

    @property
    def theta(self) -> np.ndarray:
        return np.array([a for _, a in self.factors])

    def conjugate(self, a: PauliSum) -> PauliSum:
        """``K a K^dag``."""
        for k, th in reversed(self.factors):
            a = adjoint_rotate(a, k, th)
        return a

    def conjugate_inverse(self, a: PauliSum) -> PauliSum:
        """``K^dag a K``."""
        for k, th in self.factors:
            a = adjoint_rotate(a, k, -th)
        return a

    def to_dense(self) -> np.ndarray:
        n = self.factors[0][0].n_qubits if self.factors else 0
        K = np.eye(1 << n, dtype=complex)
        for k, th in self.factors:
            K = K @ (math.cos(th) * np.eye(1 << n) + 1j * math.sin(th) * k.to_dense())
        return K


@dataclass(frozen=True)
class CartanCoordinates:
    coefficients: dict[PauliString, float]
    residual_norm: float
    relative_residual: float
    offset: float = 0.0

    def as_pauli_sum(self, n_qubits: int) -> PauliSum:
        return PauliSum(n_qubits, self.coefficients)


@dataclass
class MinimizeResult:
    factorization: KFactorization
    cost: float
    grad_norm: float
    n_iter: int
    n_restarts: int
    residual: float
    converged: bool
    trace: list[str] = field(default_factory=list)


# --- PauliSum evaluation path ----------------------------------------------

def build_v(h_basis: Sequence[PauliString], gamma: float = math.pi) -> PauliSum:
    """``sum_i gamma^i h_i`` (i from 1), scaled to unit norm."""
    if not h_basis:
        raise ValueError("h basis is empty")
    top = len(h_basis) * math.log(gamma)
    # smallest/largest coefficient must stay well above the prune threshold
    if (len(h_basis) - 1) * math.log(gamma) > math.log(1e12):
        raise OverflowError(f"gamma^{len(h_basis) - 1} spans too many decades; use gamma closer to 1")
    # scale by gamma^-|h| before summing so large |h| stays finite
    coeffs = np.array([math.exp((i + 1) * math.log(gamma) - top) for i in range(len(h_basis))])
    coeffs /= np.linalg.norm(coeffs)
    return PauliSum(h_basis[0].n_qubits, dict(zip(h_basis, coeffs)))


def _sweep_v(theta, v: PauliSum, k_basis) -> list[PauliSum]:
    """Suffix conjugates: entry j is ``prod_{i>=j} R_i (v)``; entry len is ``v``."""
    out = [v]
    for k, th in zip(reversed(k_basis), reversed(theta)):
        out.append(adjoint_rotate(out[-1], k, th))
    return out[::-1]


def cost(theta, v: PauliSum, H: PauliSum, k_basis: Sequence[PauliString]) -> float:
    if len(theta) != len(k_basis):
        raise ValueError("one angle per k element required")
    return inner(_sweep_v(theta, v, k_basis)[0], H)


def gradient(theta, v: PauliSum, H: PauliSum, k_basis: Sequence[PauliString]) -> np.ndarray:
    """``df/dtheta_j = <i [k_j, v_j], H_j>`` from cached forward and backward sweeps."""
    if len(theta) != len(k_basis):
        raise ValueError("one angle per k element required")
    vs = _sweep_v(theta, v, k_basis)
    grad = np.zeros(len(k_basis))
    Hj = H
    for j, (k, th) in enumerate(zip(k_basis, theta)):
        acc = 0.0
        for p, c in vs[j].items():
            if commutes(k, p):
                continue
            phase, r = multiply(k, p)
            acc += (2j * phase * c * Hj.coeff(r)).real
        grad[j] = acc
        Hj = adjoint_rotate(Hj, k, -th)
    return grad


# --- vectorized evaluation path --------------------------------------------

class KHKObjective:
    """Cost and gradient on coefficient vectors over the m basis.

    For each ``k_j`` the adjoint action pairs up anticommuting m strings:
    ``i k_j P_a = s P_b`` with real ``s``. Rotating by ``theta`` maps the
    coefficient of ``P_b`` to ``cos(2 theta) x_b + sin(2 theta) s x_a``.
    """

    def __init__(self, algebra: HamiltonianAlgebra, v: PauliSum, H: PauliSum):
        self.k_basis = list(algebra.k)
        self.m_basis = list(algebra.m)
        index = {p: i for i, p in enumerate(self.m_basis)}
        self.anti: list[np.ndarray] = []
        self.partner: list[np.ndarray] = []
        self.sign: list[np.ndarray] = []
        for k in self.k_basis:
            rows, partners, signs = [], [], []
            for a, p in enumerate(self.m_basis):
                if commutes(k, p):
                    continue
                phase, r = multiply(k, p)
                # coefficient landing on P_r comes from P_a with sign i*phase
                rows.append(index[r])
                partners.append(a)
                signs.append((1j * phase).real)
            self.anti.append(np.array(rows, dtype=int))
            self.partner.append(np.array(partners, dtype=int))
            self.sign.append(np.array(signs))
        self.v = self.to_vector(v)
        self.H = self.to_vector(H)

    def to_vector(self, a: PauliSum) -> np.ndarray:
        vec = np.zeros(len(self.m_basis))
        index = {p: i for i, p in enumerate(self.m_basis)}
        for p, c in a.items():
            if p not in index:
                raise ValueError(f"{p} is not in m")
            vec[index[p]] = c.real
        return vec

    def rotate(self, vec: np.ndarray, j: int, theta: float) -> np.ndarray:
        rows, src, s = self.anti[j], self.partner[j], self.sign[j]
        out = vec.copy()
        out[rows] = math.cos(2 * theta) * vec[rows] + math.sin(2 * theta) * s * vec[src]
        return out

    def conjugate(self, theta, vec):
        for j in reversed(range(len(theta))):
            vec = self.rotate(vec, j, theta[j])
        return vec

    def conjugate_inverse(self, theta, vec):
        for j in range(len(theta)):
            vec = self.rotate(vec, j, -theta[j])
        return vec

    def cost(self, theta) -> float:
        return float(self.conjugate(theta, self.v) @ self.H)

    def cost_and_gradient(self, theta) -> tuple[float, np.ndarray]:
        L = len(theta)
        vs = [None] * (L + 1)
        vs[L] = self.v
        for j in reversed(range(L)):
            vs[j] = self.rotate(vs[j + 1], j, theta[j])
        grad = np.empty(L)
        Hj = self.H
        for j in range(L):
            rows, src, s = self.anti[j], self.partner[j], self.sign[j]
            grad[j] = 2.0 * np.dot(s * vs[j][src], Hj[rows])
            Hj = self.rotate(Hj, j, -theta[j])
        return float(vs[0] @ self.H), grad


# --- optimizer --------------------------------------------------------------

def _bfgs(fg: Callable, x0: np.ndarray, grad_tol: float, max_iters: int, log=None):
    """Dense BFGS with a Wolfe line search.

    Near the optimum the cost stops resolving decreases in double
    precision; a failed line search then falls back to the full
    quasi-Newton step, accepted when it shrinks the gradient.
    """
    cache: dict[bytes, tuple[float, np.ndarray]] = {}

    def ev(x):
        key = x.tobytes()
        if key not in cache:
            if len(cache) > 64:
                cache.clear()
            cache[key] = fg(x)
        return cache[key]

    x = np.array(x0, dtype=float)
    f, g = ev(x)
    n = len(x)
    Hinv = np.eye(n)
    first = True
    it = 0
    for it in range(max_iters):
        gnorm = float(np.max(np.abs(g))) if n else 0.0
        if log:
            log(f"iter={it} f={f:.15g} |grad|={gnorm:.3e}")
        if gnorm < grad_tol:
            return x, f, g, it, True
        p = -Hinv @ g
        if g @ p >= 0:
            Hinv = np.eye(n)
            p = -g
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message="The line search algorithm")
            alpha = line_search(lambda y: ev(y)[0], lambda y: ev(y)[1], x, p, gfk=g, old_fval=f,
                                c1=1e-4, c2=0.9, maxiter=30)[0]
        if alpha is None:
            x_try = x + p
            f_try, g_try = ev(x_try)
            if np.max(np.abs(g_try)) < gnorm:
                alpha = 1.0
            else:
                if first:
                    return x, f, g, it, False
                Hinv = np.eye(n)
                first = True
                continue
        s = alpha * p
        x_new = x + s
        f_new, g_new = ev(x_new)
        y = g_new - g
        ys = float(y @ s)
        if ys > 1e-300:
            if first:
                Hinv = np.eye(n) * (ys / float(y @ y))
                first = False
            rho = 1.0 / ys
            Hy = Hinv @ y
            Hinv = Hinv + ((ys + y @ Hy) * rho * rho) * np.outer(s, s) - rho * (np.outer(Hy, s) + np.outer(s, Hy))
        x, f, g = x_new, f_new, g_new
    gnorm = float(np.max(np.abs(g))) if n else 0.0
    return x, f, g, max_iters, gnorm < grad_tol


def _relative_residual(obj: KHKObjective, theta, h_mask: np.ndarray) -> float:
    rotated = obj.conjugate_inverse(theta, obj.H)
    off = np.linalg.norm(rotated[~h_mask])
    return float(off / np.linalg.norm(obj.H))


def minimize(config: SolverConfig, v: PauliSum, H: PauliSum, algebra: HamiltonianAlgebra,
             log: Callable[[str], None] | None = None) -> MinimizeResult:
    """Quasi-Newton search for ``K`` from ``theta = 0`` with random restarts.

    An attempt succeeds when the off-h remainder of ``K^dag H K`` is below
    ``config.residual_tol`` relative to ``|H|``. Restarts perturb the best
    angles found so far. Raises :class:`ConvergenceError` when all attempts fail.
    """
    H = _strip_identity(H)
    obj = KHKObjective(algebra, v, H)
    h_set = set(algebra.h)
    h_mask = np.array([p in h_set for p in obj.m_basis], dtype=bool)
    rng = np.random.default_rng(config.seed)
    trace: list[str] = []

    def emit(line):
        trace.append(line)
        if log:
            log(line)

    x0 = np.zeros(len(obj.k_basis))
    best = None
    total_iter = 0
    for attempt in range(config.restarts + 1):
        if attempt:
            emit(f"restart={attempt}")
        x, f, g, nit, ok = _bfgs(obj.cost_and_gradient, x0, config.grad_tol, config.max_iters, emit)
        total_iter += nit
        res = _relative_residual(obj, x, h_mask)
        gnorm = float(np.max(np.abs(g))) if len(g) else 0.0
        if best is None or res < best[3]:
            best = (x, f, gnorm, res)
        if res < config.residual_tol:
            break
        x0 = best[0] + config.perturbation * rng.standard_normal(len(x0))
    x, f, gnorm, res = best
    emit(f"residual={res:.3e} dims k={len(obj.k_basis)}")
    result = MinimizeResult(
        factorization=KFactorization.from_arrays(obj.k_basis, x),
        cost=f, grad_norm=gnorm, n_iter=total_iter, n_restarts=attempt,
        residual=res, converged=res < config.residual_tol, trace=trace,
    )
    if not result.converged:
        raise ConvergenceError(
            f"KHK optimization failed after {config.restarts} restarts: "
            f"|grad|_inf={gnorm:.3e}, relative residual={res:.3e}",
            grad_norm=gnorm, residual=res,
        )
    return result


def _strip_identity(H: PauliSum) -> PauliSum:
    return PauliSum(H.n_qubits, {p: c for p, c in H.items() if not p.is_identity})


def extract_h(K0: KFactorization, H: PauliSum, algebra: HamiltonianAlgebra, tol: float = 1e-8) -> CartanCoordinates:
    """Coordinates of ``K0^dag H K0`` on the h basis; raises when the off-h part exceeds ``tol``."""
    offset = H.coeff(PauliString.identity(H.n_qubits)).real
    H = _strip_identity(H)
    rotated = K0.conjugate_inverse(H)
    h_set = set(algebra.h)
    coeffs = {p: rotated.coeff(p).real for p in algebra.h}
    off = math.sqrt(sum(abs(c) ** 2 for p, c in rotated.items() if p not in h_set))
    scale = H.norm() or 1.0
    coords = CartanCoordinates(coeffs, off, off / scale, offset)
    if coords.relative_residual >= tol:
        raise ConvergenceError(
            f"K^dag H K leaves an off-h remainder of {coords.relative_residual:.3e} (relative)",
            residual=coords.relative_residual,
        )
    return coords
