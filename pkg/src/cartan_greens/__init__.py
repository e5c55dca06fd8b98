"""Cartan (KHK) decomposition of Pauli-sum Hamiltonians for fixed-depth time evolution
and real-time Green's functions."""

from .algebra import HamiltonianAlgebra, build_algebra, cartan_subalgebra, closure, involution_split
from .estimator import CartanDecomposition
from .evolution import EvolutionOperator, QuantumCircuit, apply_pauli_exp, emit_circuit, evolve, inner_product
from .greens import (GreensSeries, SpectralSeries, TimeGrid, fermionic_gf, lehmann_reference,
                     spectral_function, spin_correlator_gf)
from .models import (FermiHubbardSpec, TFIMSpec, build_hubbard, build_tfim, ground_state, jordan_wigner,
                     momentum_op)
from .pauli import (PauliString, PauliSum, adjoint_rotate, commutator, commutes, inner, multiply,
                    parse_pauli_sum)
from .solver import (CartanCoordinates, KFactorization, SolverConfig, build_v, cost, extract_h, gradient,
                     minimize)

__version__ = "0.1.0"
