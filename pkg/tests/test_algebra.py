import itertools
import random

import numpy as np
import pytest

from cartan_greens.algebra import (build_algebra, cartan_subalgebra, closure, involution_split, is_k_string,
                                   verify_cartan_conditions)
from cartan_greens.exceptions import AlgebraSizeError, CartanConditionError
from cartan_greens.models import FermiHubbardSpec, TFIMSpec, build_hubbard, build_tfim
from cartan_greens.pauli import PauliString, PauliSum, commutator, commutes, multiply


def labels(strings):
    return {str(p) for p in strings}


def dense_closure(gens):
    """Closure by repeated dense commutators, reading strings back by trace overlap."""
    n = gens[0].n_qubits
    all_strings = [PauliString(n, x, z) for x in range(1 << n) for z in range(1 << n)]
    mats = {p: p.to_dense() for p in all_strings}
    found = set(gens)
    frontier = list(gens)
    while frontier:
        new = []
        for p in frontier:
            for q in list(found):
                c = mats[p] @ mats[q] - mats[q] @ mats[p]
                if np.allclose(c, 0):
                    continue
                for r in all_strings:
                    if abs(np.trace(mats[r] @ c)) > 1e-9 and r not in found:
                        found.add(r)
                        new.append(r)
        frontier = new
    return found


class TestClosure:
    def test_abelian_singleton(self):
        z0 = PauliString.from_label("Z0", 2)
        assert closure([z0]) == [z0]

    def test_tfim_two_sites(self):
        gens = [PauliString.from_label(s, 2) for s in ("Z0 Z1", "X0", "X1")]
        expected = {"X0", "X1", "Z0 Z1", "Y0 Z1", "Z0 Y1", "Y0 Y1"}
        assert labels(closure(gens)) == expected
        assert labels(dense_closure(gens)) == expected

    def test_hubbard_dimension(self):
        H = build_hubbard(FermiHubbardSpec(U=3))
        assert len(closure(list(H))) == 24

    def test_tfim_three_sites_matches_dense_oracle(self):
        gens = list(build_tfim(TFIMSpec(3)))
        assert set(closure(gens)) == dense_closure(gens)

    def test_idempotent_and_order_free(self):
        gens = list(build_hubbard(FermiHubbardSpec(U=3)))
        g = closure(gens)
        assert closure(g) == g
        shuffled = gens[:]
        random.Random(7).shuffle(shuffled)
        assert closure(shuffled) == g

    def test_closed_under_commutation(self):
        g = closure(list(build_tfim(TFIMSpec(4))))
        gs = set(g)
        for p, q in itertools.combinations(g, 2):
            if not commutes(p, q):
                assert multiply(p, q).string in gs

    def test_size_cap(self):
        # XX+YY+ZZ-type chains generate an exponentially large algebra with local fields
        n = 5
        gens = [PauliString.from_label(f"{a}{i} {a}{i + 1}", n) for i in range(n - 1) for a in "XY"]
        gens += [PauliString.from_label(f"Z{i}", n) for i in range(n)]
        with pytest.raises(AlgebraSizeError):
            closure(gens, max_size=20)

    def test_identity_dropped(self):
        gens = [PauliString.identity(2), PauliString.from_label("X0", 2)]
        assert labels(closure(gens)) == {"X0"}


class TestInvolutionSplit:
    def test_hubbard_split(self):
        g = closure(list(build_hubbard(FermiHubbardSpec(U=3))))
        k, m = involution_split(g)
        assert (len(k), len(m)) == (8, 16)
        for s in ("X0 Y2", "Y0 Z1 X2 Z3", "Z0 X1 Z2 Y3"):
            assert s in labels(k)

    def test_hubbard_k_basis(self):
        reference = {"X0 Y2", "Y0 X2", "Y1 X3", "X1 Y3", "Y0 Z1 X2 Z3", "X0 Z1 Y2 Z3", "Z0 X1 Z2 Y3", "Z0 Y1 Z2 X3"}
        k, _ = involution_split(closure(list(build_hubbard(FermiHubbardSpec(U=3)))))
        assert labels(k) == reference

    def test_tfim_two_sites(self):
        k, m = involution_split(closure(list(build_tfim(TFIMSpec(2)))))
        assert labels(k) == {"Y0 Z1", "Z0 Y1"}
        assert labels(m) == {"X0", "X1", "Z0 Z1", "Y0 Y1"}

    def test_bad_split_detected(self):
        g = closure(list(build_tfim(TFIMSpec(2))))
        k = [p for p in g if p.y_count == 0]
        m = [p for p in g if p.y_count > 0]
        with pytest.raises(CartanConditionError):
            verify_cartan_conditions(g, k, m)

    def test_involution_is_homomorphism(self):
        # theta(P) = -P^T; check theta([a, b]) = [theta a, theta b] on the Hubbard algebra
        g = closure(list(build_hubbard(FermiHubbardSpec(U=3))))

        def theta(p):
            return PauliSum.from_string(p, 1.0 if is_k_string(p) else -1.0)

        def theta_sum(s):
            return PauliSum(s.n_qubits, {p: c * (1 if is_k_string(p) else -1) for p, c in s.items()})

        for p, q in itertools.product(g, repeat=2):
            assert theta_sum(commutator(p, q)) == commutator(theta(p), theta(q))
            assert np.allclose(-p.to_dense().T, theta(p).to_dense() * (1 if is_k_string(p) else 1))

    def test_odd_y_hamiltonian_rejected(self):
        H = PauliSum.from_terms(2, [(1.0, "Y0 Z1"), (0.5, "X0")])
        with pytest.raises(CartanConditionError, match="Y0 Z1"):
            build_algebra(H)


class TestCartanSubalgebra:
    def test_hubbard_default_seed_h(self):
        alg = build_algebra(build_hubbard(FermiHubbardSpec(U=3)))
        reference = {"Y0 Z1 Y2", "X0 Z1 X2", "Y1 Z2 Y3", "X1 Z2 X3", "X0 X2 Z3", "Y0 Y2 Z3", "Z0 X1 X3", "Z0 Y1 Y3"}
        assert labels(alg.h) == reference
        assert alg.dims == {"g": 24, "k": 8, "m": 16, "h": 8}

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_tfim_bond_seed_h(self, n):
        H = build_tfim(TFIMSpec(n))
        bonds = [p for p in H if p.z]
        alg = build_algebra(H, seed=bonds)
        yy = "Y0 " + " ".join(f"X{i}" for i in range(1, n - 1)) + f" Y{n - 1}"
        expected = {f"Z{i} Z{i + 1}" for i in range(n - 1)} | {yy.replace("  ", " ")}
        assert labels(alg.h) == expected

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_tfim_dimension_law(self, n):
        alg = build_algebra(build_tfim(TFIMSpec(n)))
        assert len(alg.g) == n * (2 * n - 1)
        assert len(alg.k) == n * (n - 1)
        assert len(alg.h) == n

    @pytest.mark.parametrize("H", [build_hubbard(FermiHubbardSpec(U=3)), build_tfim(TFIMSpec(4)),
                                   build_tfim(TFIMSpec(6))])
    def test_abelian_and_maximal(self, H):
        alg = build_algebra(H)
        for p, q in itertools.combinations(alg.h, 2):
            assert commutes(p, q)
        for p in set(alg.m) - set(alg.h):
            assert not all(commutes(p, q) for q in alg.h)

    def test_abelian_m_returns_m(self):
        m = [PauliString.from_label(s, 2) for s in ("Z0", "Z1", "Z0 Z1")]
        assert set(cartan_subalgebra(m)) == set(m)

    def test_seed_outside_m(self):
        m = [PauliString.from_label("Z0", 2)]
        with pytest.raises(ValueError):
            cartan_subalgebra(m, PauliString.from_label("X0", 2))

    def test_hamiltonian_in_span_m(self):
        H = build_hubbard(FermiHubbardSpec(U=6))
        alg = build_algebra(H)
        assert set(H) <= set(alg.m)


def test_dump_format():
    alg = build_algebra(build_tfim(TFIMSpec(2)))
    text = alg.dump()
    assert text.splitlines()[0] == "G:"
    assert text.strip().endswith("dims g=6 k=2 m=4 h=2")
    for section in ("K:", "M:", "H:"):
        assert section in text.splitlines()
