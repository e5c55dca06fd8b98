"""Line-oriented ``key = value`` run configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .exceptions import ConfigError
from .models import FermiHubbardSpec, TFIMSpec

MODELS = ("hubbard", "tfim", "pauli")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _strs(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


@dataclass
class RunConfig:
    model: str = "hubbard"
    t_hop: float = -1.0
    U: list[float] = field(default_factory=lambda: [3.0])
    n_sites: list[int] = field(default_factory=lambda: [2])
    h_x: float = 1.0
    hamiltonian_file: str = ""
    momenta: tuple[str, ...] = ("0", "pi")
    gamma: float = math.pi
    grad_tol: float = 1e-10
    max_iters: int = 2000
    restarts: int = 5
    seed: int = 0
    residual_tol: float = 1e-8
    h_seed: tuple[str, ...] = ()
    max_algebra_size: int = 4096
    t_max: float = 35.0
    dt: float = 0.1
    eta: float = 0.2
    omega_min: float = -10.0
    omega_max: float = 10.0
    d_omega: float = 0.01
    circuit_t: float = 1.0
    out_dir: str = "."
    reuse_decomposition: bool = False

    _PARSERS = {
        "model": str.strip, "t_hop": float, "U": _floats, "n_sites": _ints, "h_x": float,
        "hamiltonian_file": str.strip, "momenta": _strs, "gamma": float, "grad_tol": float,
        "max_iters": int, "restarts": int, "seed": int, "residual_tol": float, "h_seed": _strs,
        "max_algebra_size": int, "t_max": float, "dt": float, "eta": float, "omega_min": float,
        "omega_max": float, "d_omega": float, "circuit_t": float, "out_dir": str.strip,
        "reuse_decomposition": _bool,
    }

    @classmethod
    def from_text(cls, text: str, base_dir: str | Path | None = None) -> "RunConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip()
            if not sep:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            if key not in cls._PARSERS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                values[key] = cls._PARSERS[key](val.strip())
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
        cfg = cls(**values)
        if base_dir is not None and cfg.hamiltonian_file and not Path(cfg.hamiltonian_file).is_absolute():
            cfg.hamiltonian_file = str(Path(base_dir) / cfg.hamiltonian_file)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text, base_dir=path.parent)

    def validate(self) -> None:
        def need(ok, key, msg):
            if not ok:
                raise ConfigError(f"invalid {key!r}: {msg}")

        need(self.model in MODELS, "model", f"must be one of {', '.join(MODELS)}")
        need(bool(self.U), "U", "at least one value required")
        need(bool(self.n_sites) and all(n >= 2 for n in self.n_sites), "n_sites", "every value must be >= 2")
        if self.model == "hubbard":
            need(self.n_sites == [2], "n_sites", "the Hubbard model supports only 2 sites")
            need(all(m in ("0", "pi") for m in self.momenta) and self.momenta, "momenta", "use 0 and/or pi")
        if self.model == "pauli":
            need(bool(self.hamiltonian_file), "hamiltonian_file", "required for model = pauli")
        need(self.gamma > 1 and not float(self.gamma).is_integer(), "gamma", "must be a non-integer > 1")
        need(self.grad_tol > 0, "grad_tol", "must be positive")
        need(self.max_iters >= 1, "max_iters", "must be >= 1")
        need(self.restarts >= 0, "restarts", "must be >= 0")
        need(self.residual_tol > 0, "residual_tol", "must be positive")
        need(self.max_algebra_size >= 1, "max_algebra_size", "must be >= 1")
        need(self.t_max >= 0, "t_max", "must be >= 0")
        need(self.dt > 0, "dt", "must be positive")
        steps = self.t_max / self.dt
        need(abs(steps - round(steps)) <= 1e-9 * max(1.0, steps), "t_max", "must be a multiple of dt")
        need(self.eta > 0, "eta", "must be positive")
        need(self.d_omega > 0, "d_omega", "must be positive")
        need(self.omega_max > self.omega_min, "omega_max", "must exceed omega_min")

    def model_specs(self) -> list:
        if self.model == "hubbard":
            return [FermiHubbardSpec(U=u, t_hop=self.t_hop) for u in self.U]
        if self.model == "tfim":
            return [TFIMSpec(n_sites=n, h_x=self.h_x) for n in self.n_sites]
        return [None]

    def describe(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
