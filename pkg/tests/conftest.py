import numpy as np
import pytest

from cartan_greens import CartanDecomposition, FermiHubbardSpec, TFIMSpec, build_hubbard, build_tfim

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fitted():
    """Fitted decompositions keyed by ``("hubbard", U)`` or ``("tfim", N)``, built on demand."""
    cache = {}

    def get(model, param):
        key = (model, param)
        if key not in cache:
            H = build_hubbard(FermiHubbardSpec(U=param)) if model == "hubbard" else build_tfim(TFIMSpec(param))
            cache[key] = CartanDecomposition().fit(H)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, n_qubits):
    psi = rng.standard_normal(1 << n_qubits) + 1j * rng.standard_normal(1 << n_qubits)
    return psi / np.linalg.norm(psi)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
