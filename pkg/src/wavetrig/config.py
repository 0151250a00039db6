"""Run configuration: a JSON-serializable dataclass tree covering domain,
damping gain, initial data, integration, design knobs, and run mode."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .grid import Grid, Interval, Rectangle, build_grid

__all__ = ["DesignSpec", "RunConfig", "load_config", "save_config"]

C_OMEGA_SOURCES = ("discrete", "dirichlet-closed-form", "wirtinger", "user")
ETA0_VARIANTS = ("v0", "reduced")
MODE_NAMES = ("event-triggered", "continuous-damping", "periodic", "uncontrolled")


@dataclass
class DesignSpec:
    s_gamma0: float = 0.5
    s_gamma1: float = 0.5
    theta_margin: float = 1.5
    comega_source: str = "discrete"
    comega_value: float | None = None
    eta0_variant: str = "v0"

    def __post_init__(self):
        if self.comega_source not in C_OMEGA_SOURCES:
            raise ConfigurationError(
                f"comega_source must be one of {C_OMEGA_SOURCES}, got {self.comega_source!r}"
            )
        if self.eta0_variant not in ETA0_VARIANTS:
            raise ConfigurationError(
                f"eta0_variant must be one of {ETA0_VARIANTS}, got {self.eta0_variant!r}"
            )
        if self.comega_source == "user" and self.comega_value is None:
            raise ConfigurationError("comega_source 'user' needs comega_value")


@dataclass
class RunConfig:
    domain: dict = field(default_factory=lambda: {"kind": "interval", "length": 1.0, "n": 199})
    alpha: float = 1.0
    z0: dict = field(default_factory=lambda: {"kind": "sine", "k": 1})
    z1: dict = field(default_factory=lambda: {"kind": "zero"})
    dt: float | None = None
    cfl_fraction: float = 0.5
    t_end: float = 10.0
    design: DesignSpec = field(default_factory=DesignSpec)
    mode: str = "event-triggered"
    period: float | None = None
    certificate_path: str | None = None
    out: str = "runs/run"

    def __post_init__(self):
        if isinstance(self.design, dict):
            self.design = DesignSpec(**self.design)
        if self.mode not in MODE_NAMES:
            raise ConfigurationError(f"mode must be one of {MODE_NAMES}, got {self.mode!r}")

    def build_grid(self) -> Grid:
        d = dict(self.domain)
        kind = d.pop("kind", "interval")
        try:
            if kind == "interval":
                return build_grid(Interval(length=float(d["length"]), n=int(d["n"])))
            if kind == "rectangle":
                return build_grid(
                    Rectangle(a=float(d["a"]), b=float(d["b"]), nx=int(d["nx"]), ny=int(d["ny"]))
                )
        except KeyError as exc:
            raise ConfigurationError(f"domain spec missing key {exc}") from exc
        raise ConfigurationError(f"unknown domain kind {kind!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {p} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


def save_config(cfg: RunConfig, path: str | Path):
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
