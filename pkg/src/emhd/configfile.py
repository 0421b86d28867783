"""Flat key = value run configuration files.

Exactly these keys are recognized: n, mu, d_i, dt, t_end, integrator, init,
seed, q_lo, q_hi, snapshot_every, cfl_safety, out_dir.  Blank lines and
'#' comments are ignored.  The resolved (defaults-applied) configuration has
a canonical text rendering whose SHA-256 digest identifies the run.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .solver import ConfigError, SolverConfig

_KEYS = (
    "n",
    "mu",
    "d_i",
    "dt",
    "t_end",
    "integrator",
    "init",
    "seed",
    "q_lo",
    "q_hi",
    "snapshot_every",
    "cfl_safety",
    "out_dir",
)
_INT_KEYS = {"n", "seed", "q_lo", "q_hi", "snapshot_every"}
_FLOAT_KEYS = {"mu", "d_i", "dt", "t_end", "cfl_safety"}


def parse_config_text(text: str) -> SolverConfig:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw)
            else:
                values[key] = raw
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for key {key!r}: {raw!r}") from exc
    return SolverConfig(**values)


def load_config(path) -> SolverConfig:
    return parse_config_text(Path(path).read_text())


def resolved_text(cfg: SolverConfig) -> str:
    """Canonical defaults-applied rendering (17 significant digits)."""
    parts = []
    for key in _KEYS:
        val = getattr(cfg, key)
        if key in _FLOAT_KEYS:
            parts.append(f"{key} = {format(float(val), '.17g')}")
        else:
            parts.append(f"{key} = {val}")
    return "\n".join(parts) + "\n"


def config_hash(cfg: SolverConfig) -> str:
    return hashlib.sha256(resolved_text(cfg).encode()).hexdigest()
