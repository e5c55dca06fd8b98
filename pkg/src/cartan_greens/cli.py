"""Command line entry point: ``cartan-greens <subcommand> --config run.cfg``."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .algebra import build_algebra
from .config import RunConfig
from .estimator import CartanDecomposition
from .evolution import emit_circuit
from .exceptions import AlgebraSizeError, CartanConditionError, ConfigError, ConvergenceError
from .files import load_decomposition, save_decomposition
from .greens import (TimeGrid, fermionic_gf, omega_grid, spectral_function, spin_correlator_gf,
                     write_greens_csv, write_spectral_csv)
from .models import FermiHubbardSpec, TFIMSpec, build_hubbard, build_tfim, ground_state, momentum_op
from .pauli import PauliString, parse_pauli_sum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_SIZE_CAP = 4
EXIT_ALGEBRA = 5


class _Job:
    """One model instance of a run: Hamiltonian, label and CSV metadata."""

    def __init__(self, cfg: RunConfig, spec):
        self.cfg = cfg
        self.spec = spec
        if isinstance(spec, FermiHubbardSpec):
            self.H = build_hubbard(spec)
            self.label = spec.label
            self.meta = {"model": "hubbard", "t_hop": spec.t_hop, "U": spec.U, "n_sites": spec.n_sites}
        elif isinstance(spec, TFIMSpec):
            self.H = build_tfim(spec)
            self.label = spec.label
            self.meta = {"model": "tfim", "n_sites": spec.n_sites, "h_x": spec.h_x}
        else:
            path = Path(cfg.hamiltonian_file)
            try:
                self.H = parse_pauli_sum(path.read_text())
            except OSError as exc:
                raise ConfigError(f"cannot read hamiltonian_file {path}: {exc}") from None
            except ValueError as exc:
                raise ConfigError(f"bad hamiltonian_file {path}: {exc}") from None
            self.label = path.stem
            self.meta = {"model": "pauli", "hamiltonian_file": path.name}
        self.out = Path(cfg.out_dir)

    def estimator(self) -> CartanDecomposition:
        c = self.cfg
        return CartanDecomposition(gamma=c.gamma, grad_tol=c.grad_tol, max_iters=c.max_iters,
                                   restarts=c.restarts, random_state=c.seed, residual_tol=c.residual_tol,
                                   h_seed=list(c.h_seed) or None, max_algebra_size=c.max_algebra_size)

    def decompose(self):
        """Fit, streaming the optimizer trace to disk so a failed run keeps it."""
        self.out.mkdir(parents=True, exist_ok=True)
        est = self.estimator()
        with open(self.out / f"trace_{self.label}.txt", "w") as fh:
            est.fit(self.H, log=lambda line: fh.write(line + "\n"))
        save_decomposition(self.out / f"decomposition_{self.label}.txt", est.operator_)
        (self.out / f"algebra_{self.label}.txt").write_text(est.algebra_.dump())
        return est

    def operator(self):
        path = self.out / f"decomposition_{self.label}.txt"
        if self.cfg.reuse_decomposition and path.exists():
            return load_decomposition(path)
        return self.decompose().operator_

    def greens(self) -> list:
        cfg = self.cfg
        if self.meta["model"] == "pauli":
            raise ConfigError("greens/spectral need model = hubbard or tfim")
        op = self.operator()
        gs = ground_state(self.H)
        grid = TimeGrid(cfg.t_max, cfg.dt)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if isinstance(self.spec, FermiHubbardSpec):
                out = []
                for k in cfg.momenta:
                    c = momentum_op(k, 0, False)
                    s = fermionic_gf(c, c, gs, op, grid, label=f"{self.label}_k{k}")
                    s.meta = {**self.meta, "k": k, "spin": "up"}
                    out.append(s)
            else:
                s = spin_correlator_gf(gs, op, grid, label=self.label)
                s.meta = dict(self.meta)
                out = [s]
        for s in out:
            s.meta["E_g"] = repr(gs.energy)
            if gs.degenerate:
                s.meta["warning"] = "degenerate ground state"
        return out


def _jobs(cfg: RunConfig) -> list[_Job]:
    return [_Job(cfg, spec) for spec in cfg.model_specs()]


def cmd_algebra(cfg: RunConfig) -> int:
    for job in _jobs(cfg):
        seeds = [PauliString.from_label(s, job.H.n_qubits) for s in cfg.h_seed] or None
        alg = build_algebra(job.H, seed=seeds, max_size=cfg.max_algebra_size)
        job.out.mkdir(parents=True, exist_ok=True)
        (job.out / f"algebra_{job.label}.txt").write_text(alg.dump())
        print(f"# {job.label}")
        print(alg.dump(), end="")
    return EXIT_OK


def cmd_decompose(cfg: RunConfig) -> int:
    for job in _jobs(cfg):
        est = job.decompose()
        print(f"{job.label}: {est.algebra_.dims_line()}")
        print(f"{job.label}: residual={est.residual_:.3e} |grad|={est.grad_norm_:.3e} iters={est.n_iter_}")
    return EXIT_OK


def cmd_greens(cfg: RunConfig) -> list:
    written = []
    for job in _jobs(cfg):
        for s in job.greens():
            path = job.out / f"greens_{s.label}.csv"
            write_greens_csv(path, s)
            written.append(s)
            print(f"wrote {path}")
    return written


def cmd_spectral(cfg: RunConfig) -> int:
    omega = omega_grid(cfg.omega_min, cfg.omega_max, cfg.d_omega)
    for s in cmd_greens(cfg):
        A = spectral_function(s, cfg.eta, omega)
        path = Path(cfg.out_dir) / f"spectral_{s.label}.csv"
        write_spectral_csv(path, A)
        peaks = A.peaks()
        heights = np.interp(peaks, A.omega, A.values)
        top = peaks[np.argsort(heights)[::-1][:2]]
        print(f"wrote {path}")
        print(f"{s.label}: dominant peaks at omega = " + ", ".join(f"{w:.4f}" for w in sorted(top)))
    return EXIT_OK


def cmd_emit_circuit(cfg: RunConfig, t: float | None) -> int:
    t = cfg.circuit_t if t is None else t
    for job in _jobs(cfg):
        circ = emit_circuit(job.operator(), t)
        path = job.out / f"circuit_{job.label}.qasm"
        path.write_text(circ.to_qasm())
        print(f"wrote {path} (gates={circ.gate_count} depth={circ.depth} t={t!r})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cartan-greens",
                                     description="Fixed-depth Cartan time evolution and Green's functions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("decompose", "build the algebra and optimize K"),
                        ("greens", "write G(t) CSV files"),
                        ("spectral", "write A(omega) CSV files"),
                        ("emit-circuit", "write the fixed-depth circuit as OpenQASM 2.0"),
                        ("algebra", "dump the g/k/m/h bases")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="key = value run configuration")
        p.add_argument("--out", help="output directory (overrides out_dir)")
        if name == "emit-circuit":
            p.add_argument("--t", type=float, help="evolution time (overrides circuit_t)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config)
        if args.out:
            cfg.out_dir = args.out
        if args.command == "decompose":
            return cmd_decompose(cfg)
        if args.command == "greens":
            cmd_greens(cfg)
            return EXIT_OK
        if args.command == "spectral":
            return cmd_spectral(cfg)
        if args.command == "emit-circuit":
            return cmd_emit_circuit(cfg, args.t)
        return cmd_algebra(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except AlgebraSizeError as exc:
        print(f"algebra too large: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except CartanConditionError as exc:
        print(f"algebra error: {exc}", file=sys.stderr)
        return EXIT_ALGEBRA


if __name__ == "__main__":
    sys.exit(main())
