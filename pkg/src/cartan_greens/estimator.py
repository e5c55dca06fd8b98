"""scikit-learn style front end for the KHK decomposition."""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .algebra import DEFAULT_MAX_SIZE, build_algebra
from .evolution import EvolutionOperator, emit_circuit, evolve
from .pauli import PauliString, PauliSum, parse_pauli_sum
from .solver import SolverConfig, build_v, extract_h, minimize


def check_hamiltonian(H) -> PauliSum:
    """Accept a :class:`PauliSum` or text in the ``<coefficient> <string>`` format."""
    if isinstance(H, str):
        H = parse_pauli_sum(H)
    if not isinstance(H, PauliSum):
        raise TypeError(f"expected a PauliSum or Pauli-sum text, got {type(H).__name__}")
    if not H:
        raise ValueError("Hamiltonian is empty")
    if not H.is_real():
        raise ValueError("Hamiltonian coefficients must be real")
    return PauliSum(H.n_qubits, H.real_coeffs())


def check_states(X, n_qubits: int) -> tuple[np.ndarray, bool]:
    """Return ``(states, was_1d)`` with ``states`` shaped ``(n_states, 2**n)``."""
    X = np.asarray(X, dtype=complex)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != 1 << n_qubits:
        raise ValueError(f"states must have {1 << n_qubits} amplitudes, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("states contain non-finite amplitudes")
    return X, single


class CartanDecomposition(TransformerMixin, BaseEstimator):
    """Fixed-depth time evolution ``exp(-i H t) = K exp(-i h t) K^dag``.

    ``fit`` builds the Hamiltonian algebra, splits it by Y-parity, picks a
    Cartan subalgebra and optimizes ``K``. ``transform`` then evolves
    statevectors (one per row) by ``time``.

    Parameters
    ----------
    time : float
        Evolution time used by :meth:`transform` when none is passed.
    gamma : float
        Base of the generic element ``v = sum_i gamma^i h_i``.
    grad_tol, max_iters, restarts, random_state, residual_tol
        Optimizer settings; see :class:`~cartan_greens.solver.SolverConfig`.
    h_seed : str or list of str, optional
        Strings (``"Z0 Z1"``) that start the greedy Cartan subalgebra scan.
    max_algebra_size : int
        Cap on the closure size.

    Attributes
    ----------
    algebra_ : HamiltonianAlgebra
    factorization_ : KFactorization
    coordinates_ : CartanCoordinates
    operator_ : EvolutionOperator
    n_iter_, grad_norm_, residual_ : optimizer diagnostics
    """

    def __init__(self, time=1.0, gamma=math.pi, grad_tol=1e-10, max_iters=2000, restarts=5,
                 random_state=0, residual_tol=1e-8, h_seed=None, max_algebra_size=DEFAULT_MAX_SIZE):
        self.time = time
        self.gamma = gamma
        self.grad_tol = grad_tol
        self.max_iters = max_iters
        self.restarts = restarts
        self.random_state = random_state
        self.residual_tol = residual_tol
        self.h_seed = h_seed
        self.max_algebra_size = max_algebra_size

    def _solver_config(self) -> SolverConfig:
        return SolverConfig(gamma=self.gamma, grad_tol=self.grad_tol, max_iters=self.max_iters,
                            restarts=self.restarts, seed=self.random_state, residual_tol=self.residual_tol)

    def _seed_strings(self, n_qubits):
        if self.h_seed is None:
            return None
        seeds = [self.h_seed] if isinstance(self.h_seed, (str, PauliString)) else self.h_seed
        return [s if isinstance(s, PauliString) else PauliString.from_label(s, n_qubits) for s in seeds]

    def fit(self, H, y=None, log=None):
        H = check_hamiltonian(H)
        config = self._solver_config()
        self.hamiltonian_ = H
        self.n_qubits_ = H.n_qubits
        self.algebra_ = build_algebra(H, seed=self._seed_strings(H.n_qubits), max_size=self.max_algebra_size)
        v = build_v(list(self.algebra_.h), config.gamma)
        result = minimize(config, v, H, self.algebra_, log=log)
        self.factorization_ = result.factorization
        self.coordinates_ = extract_h(result.factorization, H, self.algebra_, tol=config.residual_tol)
        self.operator_ = EvolutionOperator(self.factorization_, self.coordinates_, H.n_qubits)
        self.n_iter_ = result.n_iter
        self.grad_norm_ = result.grad_norm
        self.residual_ = self.coordinates_.relative_residual
        self.trace_ = result.trace
        return self

    def transform(self, X, time=None):
        check_is_fitted(self, "operator_")
        t = self.time if time is None else time
        states, single = check_states(X, self.n_qubits_)
        out = np.array([evolve(s, self.operator_, t) for s in states])
        return out[0] if single else out

    def fit_transform(self, H, y=None, **fit_params):
        # fit sees a Hamiltonian and transform sees states, so chaining them on one input is meaningless
        raise TypeError("call fit(H) and then transform(states)")

    def cartan_hamiltonian(self) -> PauliSum:
        """``h = K^dag H K`` as a Pauli sum over the Cartan subalgebra."""
        check_is_fitted(self, "operator_")
        return self.coordinates_.as_pauli_sum(self.n_qubits_)

    def circuit(self, time=None):
        check_is_fitted(self, "operator_")
        return emit_circuit(self.operator_, self.time if time is None else time)
