import math
import warnings

import numpy as np
import pytest

from cartan_greens import CartanDecomposition
from cartan_greens.greens import (GreensSeries, TimeGrid, dense_fermionic_gf, dense_spin_correlator,
                                  fermionic_gf, lehmann_reference, omega_grid, read_csv, spectral_function,
                                  spin_correlator_gf, write_greens_csv, write_spectral_csv)
from cartan_greens.models import FermiHubbardSpec, GroundState, build_hubbard, ground_state, jordan_wigner, momentum_op
from cartan_greens.pauli import parse_pauli_sum


@pytest.fixture(scope="module")
def hubbard_series(fitted):
    est = fitted("hubbard", 6)
    gs = ground_state(est.hamiltonian_)
    c = momentum_op(0, 0, False)
    return est, c, fermionic_gf(c, c, gs, est.operator_, TimeGrid())


class TestTimeGrid:
    def test_default(self):
        g = TimeGrid()
        assert g.n_steps == 350 and len(g.times) == 351
        assert g.times[-1] == pytest.approx(35.0)

    def test_zero_length(self):
        assert TimeGrid(0.0, 0.1).times.tolist() == [0.0]

    @pytest.mark.parametrize("t_max,dt", [(-1, 0.1), (1, 0), (1.05, 0.1)])
    def test_invalid(self, t_max, dt):
        with pytest.raises(ValueError):
            TimeGrid(t_max, dt)

    def test_omega_grid(self):
        w = omega_grid()
        assert len(w) == 2001 and w[0] == -10 and w[-1] == pytest.approx(10)


@pytest.fixture(scope="module")
def setup():
    H = parse_pauli_sum("1.0 Z0")
    est = CartanDecomposition().fit(H)
    return H, est, ground_state(H), jordan_wigner(0, False, 1)


class TestSinglePole:
    """One qubit, ``H = Z``: the lowering operator only has a hole pole at ``-2``."""

    def test_closed_form(self, setup):
        _, est, gs, c = setup
        g = fermionic_gf(c, c, gs, est.operator_, TimeGrid(5.0, 0.5))
        assert np.allclose(g.values, -1j * np.exp(2j * g.times), atol=1e-12)

    def test_lorentzian(self, setup):
        _, est, gs, c = setup
        g = fermionic_gf(c, c, gs, est.operator_, TimeGrid())
        A = spectral_function(g, 0.2)
        lorentz = 0.2 / math.pi / ((A.omega + 2) ** 2 + 0.04)
        assert np.max(np.abs(A.values - lorentz)) < 1e-2
        assert A.omega[np.argmax(A.values)] == pytest.approx(-2.0, abs=0.01)

    def test_particle_sector_empty(self, setup):
        H, _, gs, c = setup
        # c^dag|1> = 0, so only the hole term contributes; no warning for a half-empty GF
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            lehmann_reference(H, c, c)


class TestFermionic:
    def test_matches_dense(self, hubbard_series):
        est, c, g = hubbard_series
        ref = dense_fermionic_gf(est.hamiltonian_, c, c, g.grid)
        assert np.max(np.abs(g.values - ref)) < 1e-6

    def test_initial_value(self, hubbard_series):
        # {c, c^dag} = 1 gives G(0) = -i
        assert hubbard_series[2].values[0] == pytest.approx(-1j, abs=1e-12)

    def test_spectral_properties(self, hubbard_series):
        est, c, g = hubbard_series
        A = spectral_function(g, 0.2)
        assert abs(A.integral() - 1) < 0.05
        assert A.values.min() > -0.02
        ref = lehmann_reference(est.hamiltonian_, c, c)
        peaks, ref_peaks = A.peaks(), ref.peaks()
        assert len(peaks) == len(ref_peaks) == 2
        assert np.all(np.abs(peaks - ref_peaks) <= 2 * A.d_omega)

    def test_dt_refinement_stable(self, fitted):
        est = fitted("hubbard", 3)
        gs = ground_state(est.hamiltonian_)
        c = momentum_op("pi", 0, False)
        A1 = spectral_function(fermionic_gf(c, c, gs, est.operator_, TimeGrid(35, 0.1)))
        A2 = spectral_function(fermionic_gf(c, c, gs, est.operator_, TimeGrid(35, 0.05)))
        assert np.max(np.abs(A1.values - A2.values)) < 1e-3

    def test_momentum_mirror(self, fitted):
        est = fitted("hubbard", 3)
        gs = ground_state(est.hamiltonian_)
        A = {}
        for k in (0, "pi"):
            c = momentum_op(k, 0, False)
            A[k] = spectral_function(fermionic_gf(c, c, gs, est.operator_, TimeGrid()))
        assert np.allclose(A[0].values, A["pi"].values[::-1], atol=1e-10)

    def test_zero_sectors_warn(self, fitted):
        est = fitted("tfim", 2)
        gs = ground_state(est.hamiltonian_)
        zero = jordan_wigner(0, False, 2)
        zero = type(zero)(zero.action * 0.0, "zero")
        with pytest.warns(RuntimeWarning, match="annihilate"):
            g = fermionic_gf(zero, zero, gs, est.operator_, TimeGrid(1, 0.1))
        assert not np.any(g.values)

    def test_degenerate_warns(self, fitted):
        est = fitted("tfim", 2)
        gs = ground_state(est.hamiltonian_)
        fake = GroundState(gs.energy, gs.state, True)
        c = jordan_wigner(0, False, 2)
        with pytest.warns(RuntimeWarning, match="degenerate"):
            fermionic_gf(c, c, fake, est.operator_, TimeGrid(0.0, 0.1))


class TestSpinCorrelator:
    @pytest.mark.parametrize("n", [2, 4])
    def test_matches_dense(self, fitted, n):
        est = fitted("tfim", n)
        grid = TimeGrid(35, 0.1)
        g = spin_correlator_gf(ground_state(est.hamiltonian_), est.operator_, grid)
        ref = dense_spin_correlator(est.hamiltonian_, grid)
        assert np.max(np.abs(g.values - ref)) < 1e-6

    def test_real_and_zero_at_origin(self, fitted):
        est = fitted("tfim", 4)
        g = spin_correlator_gf(ground_state(est.hamiltonian_), est.operator_, TimeGrid())
        assert np.max(np.abs(g.values.imag)) < 1e-9
        assert abs(g.values[0]) < 1e-12

    def test_site_subset(self, fitted):
        est = fitted("tfim", 4)
        gs = ground_state(est.hamiltonian_)
        grid = TimeGrid(2, 0.1)
        g = spin_correlator_gf(gs, est.operator_, grid, sites=[1, 3])
        assert np.allclose(g.values, dense_spin_correlator(est.hamiltonian_, grid, [1, 3]), atol=1e-8)


class TestSpectralFunction:
    def test_rejects_bad_eta(self):
        g = GreensSeries(TimeGrid(1, 0.1), np.zeros(11, dtype=complex))
        with pytest.raises(ValueError):
            spectral_function(g, 0.0)

    def test_single_sample_is_zero(self):
        g = GreensSeries(TimeGrid(0.0, 0.1), np.array([-1j]))
        assert not np.any(spectral_function(g).values)

    def test_peak_filter(self):
        omega = omega_grid(-5, 5, 0.01)
        g = GreensSeries(TimeGrid(35, 0.1), -1j * np.exp(-1j * 1.5 * TimeGrid().times))
        A = spectral_function(g, 0.2, omega)
        assert A.peaks().tolist() == pytest.approx([1.5], abs=0.01)


class TestCSV:
    def test_roundtrip(self, hubbard_series, tmp_path):
        _, _, g = hubbard_series
        g.meta = {"model": "hubbard", "U": 6}
        write_greens_csv(tmp_path / "g.csv", g)
        meta, data = read_csv(tmp_path / "g.csv")
        assert meta["U"] == "6" and meta["dt"] == "0.1"
        assert data.shape == (351, 3)
        assert np.allclose(data[:, 1] + 1j * data[:, 2], g.values, atol=1e-14)

        A = spectral_function(g, 0.2)
        write_spectral_csv(tmp_path / "a.csv", A)
        meta, data = read_csv(tmp_path / "a.csv")
        assert meta["eta"] == "0.2" and meta["d_omega"] == "0.01"
        assert np.allclose(data[:, 1], A.values, atol=1e-14)

    def test_header_row(self, tmp_path):
        g = GreensSeries(TimeGrid(0.0, 0.1), np.array([0.5 - 0.25j]))
        write_greens_csv(tmp_path / "g.csv", g)
        lines = (tmp_path / "g.csv").read_text().splitlines()
        assert lines[-2] == "t,re_G,im_G"
        assert lines[-1] == "0,5.000000000000000e-01,-2.500000000000000e-01"


def test_short_window_u3(fitted):
    est = fitted("hubbard", 3)
    H = build_hubbard(FermiHubbardSpec(U=3))
    c = momentum_op("pi", 0, False)
    grid = TimeGrid(5, 0.1)
    g = fermionic_gf(c, c, ground_state(H), est.operator_, grid)
    assert np.allclose(g.values, dense_fermionic_gf(H, c, c, grid), atol=1e-9)
