"""Run configuration: flat key = value files plus command-line overrides.

A config file holds one ``key = value`` pair per line; blank lines and lines
starting with ``#`` are ignored.  Command-line overrides win over file
values, which win over defaults.  Unknown keys are hard errors so typos
cannot silently fall back to defaults.

Device quantities may be given either directly (e_ch, n_g, gamma, beta) or
through raw circuit values (c_g/c_j, v_g, phi_c, eta); defaults apply only
to quantities with neither form present, and giving both forms of the same
quantity is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .dynamics import PropagatorKind
from .fock import TruncationConfig
from .model import DeviceParams


class ConfigError(Exception):
    """Invalid configuration input; maps to exit code 2 in the CLI."""


_DEVICE_DEFAULTS = {"e_ch": 0.25, "e_j": 0.01, "n_g": 0.5, "gamma": 0.2, "beta": 0.3 + 0.0j}


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as a complex number") from None


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as a number") from None


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as an integer") from None


_PARSERS = {
    "e_ch": _parse_float,
    "e_j": _parse_float,
    "n_g": _parse_float,
    "gamma": _parse_float,
    "beta": _parse_complex,
    "c_g": _parse_float,
    "c_j": _parse_float,
    "v_g": _parse_float,
    "phi_c": _parse_float,
    "eta": _parse_complex,
    "n_levels": _parse_int,
    "leakage_fraction": _parse_float,
    "t_start": _parse_float,
    "t_stop": _parse_float,
    "t_steps": _parse_int,
    "kind": str,
    "x_min": _parse_float,
    "x_max": _parse_float,
    "p_min": _parse_float,
    "p_max": _parse_float,
    "n_x": _parse_int,
    "n_p": _parse_int,
    "out": str,
    "seed": _parse_int,
    "mu_star": _parse_float,
    "jc_threshold": _parse_float,
    "projector_rank": _parse_int,
}


@dataclass
class RunConfig:
    """Everything a subcommand needs, with device fields left optional.

    Device fields stay None until explicitly given so that raw and direct
    forms cannot conflict through defaults; :meth:`device_params` fills the
    documented defaults for quantities with no source at all.
    """

    e_ch: float | None = None
    e_j: float | None = None
    n_g: float | None = None
    gamma: float | None = None
    beta: complex | None = None
    c_g: float | None = None
    c_j: float | None = None
    v_g: float | None = None
    phi_c: float | None = None
    eta: complex | None = None
    n_levels: int = 64
    leakage_fraction: float = 0.1
    t_start: float = 0.0
    t_stop: float = 2.0
    t_steps: int = 9
    kind: str = "analytic"
    x_min: float = -4.0
    x_max: float = 4.0
    p_min: float = -4.0
    p_max: float = 4.0
    n_x: int = 121
    n_p: int = 121
    out: str = "out"
    seed: int = 0
    mu_star: float = 1.0
    jc_threshold: float = 10.0
    projector_rank: int = 32

    def device_params(self) -> DeviceParams:
        """Resolve device quantities, applying defaults where nothing was given."""
        kwargs = {
            "e_ch": self.e_ch, "e_j": self.e_j, "n_g": self.n_g,
            "gamma": self.gamma, "beta": self.beta,
            "c_g": self.c_g, "c_j": self.c_j, "v_g": self.v_g,
            "phi_c": self.phi_c, "eta": self.eta,
        }
        if kwargs["e_ch"] is None and kwargs["c_g"] is None and kwargs["c_j"] is None:
            kwargs["e_ch"] = _DEVICE_DEFAULTS["e_ch"]
        if kwargs["e_j"] is None:
            kwargs["e_j"] = _DEVICE_DEFAULTS["e_j"]
        if kwargs["n_g"] is None and kwargs["v_g"] is None:
            kwargs["n_g"] = _DEVICE_DEFAULTS["n_g"]
        if kwargs["gamma"] is None and kwargs["phi_c"] is None:
            kwargs["gamma"] = _DEVICE_DEFAULTS["gamma"]
        if kwargs["beta"] is None and kwargs["eta"] is None:
            kwargs["beta"] = _DEVICE_DEFAULTS["beta"]
        try:
            return DeviceParams(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def truncation(self, n_levels: int | None = None) -> TruncationConfig:
        try:
            return TruncationConfig(
                n_levels=self.n_levels if n_levels is None else n_levels,
                leakage_fraction=self.leakage_fraction,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def propagator_kind(self) -> PropagatorKind:
        try:
            return PropagatorKind.from_string(self.kind)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def time_grid(self) -> np.ndarray:
        if self.t_steps < 1:
            raise ConfigError(f"t_steps must be >= 1, got {self.t_steps}")
        if self.t_start < 0.0 or self.t_stop < self.t_start:
            raise ConfigError(
                f"need 0 <= t_start <= t_stop, got {self.t_start}..{self.t_stop}"
            )
        return np.linspace(self.t_start, self.t_stop, self.t_steps)

    def validate(self) -> None:
        """Fail fast on values no subcommand could use."""
        self.truncation()
        self.propagator_kind()
        self.time_grid()
        self.device_params()
        if self.n_x < 2 or self.n_p < 2:
            raise ConfigError("Wigner grid needs n_x >= 2 and n_p >= 2")
        if not (self.x_min < self.x_max and self.p_min < self.p_max):
            raise ConfigError("Wigner grid bounds must be ordered")
        if self.projector_rank < 1 or self.projector_rank > self.n_levels:
            raise ConfigError(
                f"projector_rank must lie in 1..n_levels, got {self.projector_rank}"
            )
        if self.mu_star <= 0.0:
            raise ConfigError(f"mu_star must be positive, got {self.mu_star}")
        if self.jc_threshold <= 0.0:
            raise ConfigError(f"jc_threshold must be positive, got {self.jc_threshold}")

    def resolved_items(self) -> list[tuple[str, str]]:
        """(key, value) pairs of every field, in declaration order, for reports."""
        items = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, complex):
                text = format(value.real, ".17g") if value.imag == 0.0 \
                    else f"{format(value.real, '.17g')}{value.imag:+.17g}j"
            elif isinstance(value, float):
                text = format(value, ".17g")
            else:
                text = str(value)
            items.append((f.name, text))
        return items


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat key = value file into a string dict.

    Later assignments to the same key win.  Raises :class:`ConfigError` on
    missing files, malformed lines and unknown keys.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def build_run_config(file_values: dict[str, str] | None = None,
                     overrides: dict[str, object] | None = None) -> RunConfig:
    """Assemble a validated RunConfig from file values and typed overrides."""
    cfg = RunConfig()
    for key, raw in (file_values or {}).items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(cfg, key, _PARSERS[key](raw))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _PARSERS:
            raise ConfigError(f"unknown override key {key!r}")
        setattr(cfg, key, value)
    cfg.validate()
    return cfg
