"""Plain-text experiment configuration with dotted keys.

Format: one ``key = value`` per line, ``#`` comments, blank lines ignored.
Values may be numbers, strings, or multiples of pi written like ``8pi`` or
``8*pi``.  Unknown keys are rejected; absent keys fall back to defaults.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .experiments import CensusConfig, ExperimentConfig, GridConfig, SolverConfig
from .initial_data import InitialDataParams

__all__ = ["ConfigError", "parse_config", "default_config_text"]

_MODES = ("reconnection", "global-bounds", "lemma-checks")

_KEYS = {
    "grid.L", "grid.n",
    "data.M", "data.rho", "data.N", "data.alpha", "data.T", "data.eta",
    "solver.dt", "solver.cadence",
    "census.radius",
    "mode", "out_dir",
}

_PI_RE = re.compile(r"^([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*\*?\s*pi$")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}" if line else message)
        self.line = line
        self.col = col


def _parse_number(text: str, line: int) -> float:
    text = text.strip()
    m = _PI_RE.match(text)
    if m:
        return float(m.group(1)) * np.pi
    if text == "pi":
        return float(np.pi)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", line) from None


def parse_config(path) -> ExperimentConfig:
    """Parse and validate a configuration file into an ExperimentConfig."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"configuration file not found: {path}")
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", lineno, 1)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, 1)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno, 1)
        raw[key] = (value, lineno)

    def grab(key: str):
        return raw.pop(key, (None, 0))

    gridc = GridConfig()
    val, ln = grab("grid.L")
    if val is not None:
        gridc.L = _parse_number(val, ln)
        if not gridc.L > 0:
            raise ConfigError("grid.L must be positive", ln)
    val, ln = grab("grid.n")
    if val is not None:
        num = _parse_number(val, ln)
        if num != int(num):
            raise ConfigError("grid.n must be an integer", ln)
        gridc.n = int(num)
        if gridc.n % 2 != 0 or gridc.n < 8:
            raise ConfigError("grid.n must be even and >= 8", ln)

    data_kwargs = {}
    data_lines = {}
    for key, attr in (
        ("data.M", "M"), ("data.rho", "rho"), ("data.N", "N"),
        ("data.alpha", "alpha"), ("data.T", "T"), ("data.eta", "eta"),
    ):
        val, ln = grab(key)
        if val is not None:
            data_kwargs[attr] = _parse_number(val, ln)
            data_lines[attr] = ln
    try:
        data = InitialDataParams(**data_kwargs)
    except ValueError as exc:
        # Attribute the violation to the closest offending line when known.
        ln = 0
        msg = str(exc)
        if "alpha" in msg:
            ln = data_lines.get("alpha", 0)
        elif "frequency" in msg or "N" in msg:
            ln = data_lines.get("N", 0)
        raise ConfigError(msg, ln) from None

    solverc = SolverConfig()
    val, ln = grab("solver.dt")
    if val is not None:
        lowered = val.lower()
        if lowered == "cfl":
            solverc.dt = None
        elif lowered.startswith("cfl:"):
            solverc.dt = None
            solverc.cfl_safety = _parse_number(lowered[4:], ln)
            if not (0.0 < solverc.cfl_safety <= 1.0):
                raise ConfigError("CFL safety factor must lie in (0, 1]", ln)
        else:
            solverc.dt = _parse_number(val, ln)
            if not solverc.dt > 0:
                raise ConfigError("solver.dt must be positive", ln)
    val, ln = grab("solver.cadence")
    if val is not None:
        solverc.cadence = _parse_number(val, ln)
        if not solverc.cadence > 0:
            raise ConfigError("solver.cadence must be positive", ln)

    censusc = CensusConfig()
    val, ln = grab("census.radius")
    if val is not None:
        censusc.radius = _parse_number(val, ln)
        if not censusc.radius > 0:
            raise ConfigError("census.radius must be positive", ln)

    mode = "reconnection"
    val, ln = grab("mode")
    if val is not None:
        if val not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {val!r}", ln)
        mode = val
    out_dir = "out"
    val, ln = grab("out_dir")
    if val is not None:
        out_dir = val

    config = ExperimentConfig(
        grid=gridc, data=data, solver=solverc, census=censusc, mode=mode, out_dir=out_dir
    )
    # Cross-field periodicity constraints (grid-dependent invariants).
    try:
        data.validate_grid(config.grid.build())
    except ValueError as exc:
        raise ConfigError(str(exc), data_lines.get("N", 0)) from None
    return config


def default_config_text() -> str:
    """A fully commented configuration with every key at its default."""
    return """\
# experiment configuration (defaults shown)
grid.L = 8pi
grid.n = 128

data.M = 1.0
data.rho = 1e-3
data.N = 8
data.alpha = 2.0
data.T = 0.1
data.eta = 1.0

solver.dt = cfl        # 'cfl', 'cfl:<safety>', or a fixed step
solver.cadence = 0.01  # observer tick spacing (default T/10)

census.radius = pi     # default L/8

mode = reconnection    # reconnection | global-bounds | lemma-checks
out_dir = out
"""
