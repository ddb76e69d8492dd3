"""Experiment configuration: strict parsing, validation, and resolution.

Configs are TOML (or JSON) files with a fixed table layout; unknown keys are
rejected with their full path so typos fail loudly.  "auto" placeholders for
the window exponent and the frequency cap are resolved from the data before
dispatch, and the fully resolved configuration is echoed into every report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli

from ..dynamics import EquationSpec, Model, mass
from ..energy import cap_exponent, window_exponent
from ..spectral import SpectralField, TorusGrid, bracket, sobolev_norm

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "resolve_config",
    "build_initial_field",
    "EXPERIMENTS",
]

EXPERIMENTS = (
    "solve",
    "gauge-check",
    "ledger",
    "norms",
    "strichartz",
    "resonance-audit",
    "oscillation",
    "apriori",
    "bootstrap",
)

_MODEL_NAMES = {
    "cubic": Model.CUBIC,
    "wick": Model.WICK,
    "gamma": Model.GAMMA,
    "fourth_order": Model.FOURTH_ORDER,
    "wick_fourth_order": Model.WICK_FOURTH_ORDER,
}

_DATA_KINDS = ("single_mode", "two_mode", "random", "hs_not_l2")


class ConfigError(ValueError):
    """Configuration file is malformed or inconsistent."""


def _require_keys(table: dict, allowed: dict, where: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key '{where}.{key}' (allowed: {sorted(allowed)})")
    for key, required in allowed.items():
        if required and key not in table:
            raise ConfigError(f"missing required key '{where}.{key}'")


def _typed(table: dict, key: str, types, where: str, default=None):
    if key not in table:
        return default
    value = table[key]
    if types is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, types if isinstance(types, tuple) else (types,)):
        raise ConfigError(f"'{where}.{key}' has wrong type {type(value).__name__}")
    return value


@dataclass
class ExperimentConfig:
    """Validated (and possibly resolved) experiment configuration."""

    experiment: str
    equation: dict
    grid: dict
    params: dict
    data: dict
    options: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    schema_version: int = 1

    def to_dict(self) -> dict:
        """Loadable echo: feeding this back through load_config reproduces
        the same resolved experiment."""
        return {
            "schema_version": self.schema_version,
            "experiment": {"name": self.experiment, **self.options},
            "equation": dict(self.equation),
            "grid": dict(self.grid),
            "params": dict(self.params),
            "data": dict(self.data),
            "output": dict(self.output),
        }

    def equation_spec(self) -> EquationSpec:
        model = _MODEL_NAMES[self.equation["model"]]
        return EquationSpec(model, self.equation["sign"], self.equation.get("gamma"))

    def torus_grid(self) -> TorusGrid:
        n_phys = self.grid.get("n_phys")
        return TorusGrid(self.grid["n_modes"], n_phys or 0)


def _parse_tables(raw: dict, path: str) -> ExperimentConfig:
    _require_keys(
        raw,
        {
            "schema_version": False,
            "experiment": True,
            "equation": False,
            "grid": False,
            "params": False,
            "data": False,
            "options": False,
            "output": False,
        },
        path,
    )
    exp_table = raw["experiment"]
    if not isinstance(exp_table, dict):
        raise ConfigError("'experiment' must be a table with a 'name' key")
    name = exp_table.get("name")
    if name not in EXPERIMENTS:
        raise ConfigError(f"'experiment.name' must be one of {EXPERIMENTS}, got {name!r}")
    options = {k: v for k, v in exp_table.items() if k != "name"}

    equation = dict(raw.get("equation", {}))
    _require_keys(equation, {"model": False, "sign": False, "gamma": False}, "equation")
    equation.setdefault("model", "wick")
    equation.setdefault("sign", "defocusing")
    if equation["model"] not in _MODEL_NAMES:
        raise ConfigError(f"'equation.model' must be one of {sorted(_MODEL_NAMES)}")
    if equation["sign"] not in ("defocusing", "focusing"):
        raise ConfigError("'equation.sign' must be 'defocusing' or 'focusing'")

    grid = dict(raw.get("grid", {}))
    _require_keys(grid, {"n_modes": False, "n_phys": False, "dt": False, "T": False}, "grid")
    grid.setdefault("n_modes", 64)
    grid.setdefault("dt", 1e-3)
    grid.setdefault("T", 1.0)
    n_modes = _typed(grid, "n_modes", int, "grid")
    if n_modes is None or n_modes < 2 or n_modes % 2:
        raise ConfigError("'grid.n_modes' must be a positive even integer")
    if _typed(grid, "dt", float, "grid") <= 0 or _typed(grid, "T", float, "grid") == 0:
        raise ConfigError("'grid.dt' must be positive and 'grid.T' nonzero")

    params = dict(raw.get("params", {}))
    _require_keys(
        params,
        {"s": False, "alpha": False, "M": False, "epsilon": False, "b": False},
        "params",
    )
    params.setdefault("s", -0.0625)
    params.setdefault("alpha", "auto")
    params.setdefault("M", "auto")
    params.setdefault("epsilon", 1e-3)
    params.setdefault("b", 0.5)

    data = dict(raw.get("data", {}))
    _require_keys(
        data,
        {
            "kind": False,
            "n": False,
            "amplitude": False,
            "amplitudes": False,
            "seed": False,
            "sobolev_s0": False,
            "norm": False,
            "normalize": False,
            "tail_exponent": False,
        },
        "data",
    )
    data.setdefault("kind", "random")
    if data["kind"] not in _DATA_KINDS:
        raise ConfigError(f"'data.kind' must be one of {_DATA_KINDS}")

    output = dict(raw.get("output", {}))
    _require_keys(output, {"directory": False, "formats": False, "figures": False}, "output")
    output.setdefault("directory", "out")
    output.setdefault("formats", ["json", "csv"])
    output.setdefault("figures", True)

    version = raw.get("schema_version", 1)
    return ExperimentConfig(name, equation, grid, params, data, options, output, version)


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a TOML or JSON config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        if path.suffix == ".json":
            raw = json.loads(text)
        else:
            raw = tomli.loads(text)
    except (json.JSONDecodeError, tomli.TOMLDecodeError) as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be a table")
    return _parse_tables(raw, "config")


def build_initial_field(config: ExperimentConfig, grid: TorusGrid, rng: np.random.Generator) -> SpectralField:
    """Construct the configured initial data on the given grid."""
    data = config.data
    kind = data["kind"]
    if kind == "single_mode":
        n = data.get("n", 1)
        amp = data.get("amplitude", 1.0)
        return SpectralField.from_modes(grid, {int(n): complex(amp)})
    if kind == "two_mode":
        amps = data.get("amplitudes", [1.0, 1.0])
        return SpectralField.from_modes(grid, {1: complex(amps[0]), 2: complex(amps[1])})
    if kind == "hs_not_l2":
        tail = float(data.get("tail_exponent", -0.5))
        coeffs = bracket(grid.modes) ** tail
        return SpectralField(grid, coeffs.astype(np.complex128))
    # random: complex gaussian modes shaped like <n>^-(s0+1), then normalized.
    s0 = float(data.get("sobolev_s0", 1.0))
    target = float(data.get("norm", 1.0))
    normalize = data.get("normalize", "mass")
    shape = bracket(grid.modes) ** (-(s0 + 1.0))
    z = rng.standard_normal(grid.n_modes) + 1j * rng.standard_normal(grid.n_modes)
    field = SpectralField(grid, shape * z)
    if normalize == "mass":
        scale = target / math.sqrt(mass(field))
    elif normalize == "hs":
        scale = target / sobolev_norm(field, s0)
    else:
        raise ConfigError("'data.normalize' must be 'mass' or 'hs'")
    return SpectralField(grid, field.coeffs * scale)


def resolve_config(config: ExperimentConfig, seed: int | None = None) -> ExperimentConfig:
    """Resolve 'auto' parameters and fold in a seed override.

    alpha = "auto" becomes -4s + epsilon; M = "auto" becomes the bootstrap cap
    clamped to the grid band.  The resolved config is self-contained: running
    it again reproduces the report.
    """
    cfg = ExperimentConfig(
        config.experiment,
        dict(config.equation),
        dict(config.grid),
        dict(config.params),
        dict(config.data),
        dict(config.options),
        dict(config.output),
        config.schema_version,
    )
    if seed is not None:
        cfg.data["seed"] = int(seed)
    cfg.data.setdefault("seed", 0)

    s = float(cfg.params["s"])
    eps = float(cfg.params["epsilon"])
    if cfg.params["alpha"] == "auto":
        cfg.params["alpha"] = window_exponent(s, eps)
    if cfg.params["M"] == "auto":
        grid = cfg.torus_grid()
        rng = np.random.default_rng(int(cfg.data["seed"]))
        u0 = build_initial_field(cfg, grid, rng)
        norm = sobolev_norm(u0, s)
        if math.isfinite(norm):
            from .experiments import bootstrap_params

            cap, _ = bootstrap_params(norm, s)
        else:
            cap = grid.max_mode
        cfg.params["M"] = int(min(cap, grid.max_mode))
    return cfg
