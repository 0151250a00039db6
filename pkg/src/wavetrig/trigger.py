"""The event-triggering mechanism: velocity deviation since the last
sample, the decaying threshold floor eta0, the firing predicate, the event
log, and dwell-time diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from . import grid as _grid
from .errors import ConfigurationError, PreconditionError, ShapeError

if TYPE_CHECKING:  # only for annotations; avoids an import cycle
    from .design import StabilityCertificate
    from .dynamics import WaveState

__all__ = [
    "TriggerParams",
    "EventLog",
    "DwellStats",
    "deviation",
    "eta0",
    "trigger_value",
    "predicate_from_norms",
    "initial_threshold_scale",
    "zeno_report",
]


@dataclass(frozen=True)
class TriggerParams:
    """Parameters of the firing rule

        ||e_k||^2 - gamma0 ||z||^2 - gamma1 ||v||^2 - eta0(t) >= 0

    with eta0(t) = eta0_scale * exp(-theta t).
    """

    gamma0: float
    gamma1: float
    theta: float
    eta0_scale: float

    def __post_init__(self):
        for name in ("gamma0", "gamma1", "theta", "eta0_scale"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"trigger parameter {name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_certificate(cls, cert: "StabilityCertificate", eta0_scale: float) -> "TriggerParams":
        # theta > beta/c2 is what makes the threshold decay slower than the
        # certified Lyapunov rate; the designer guarantees it, re-check here.
        if not cert.theta > cert.beta / cert.c2:
            raise ConfigurationError(
                f"theta = {cert.theta} does not exceed beta/c2 = {cert.beta / cert.c2}"
            )
        return cls(gamma0=cert.gamma0, gamma1=cert.gamma1, theta=cert.theta, eta0_scale=eta0_scale)


@dataclass
class EventLog:
    """Append-only record of sampling events.

    The run seeds it with the unconditional event at t = 0; every later
    entry stores the pre-refresh predicate, deviation norm and threshold
    floor at the firing step.
    """

    times: list[float] = field(default_factory=list)
    ks: list[int] = field(default_factory=list)
    predicate_values: list[float] = field(default_factory=list)
    norm_e_sq_values: list[float] = field(default_factory=list)
    eta0_values: list[float] = field(default_factory=list)

    def append(self, k: int, t: float, predicate: float, norm_e_sq: float, eta0_value: float):
        self.times.append(t)
        self.ks.append(k)
        self.predicate_values.append(predicate)
        self.norm_e_sq_values.append(norm_e_sq)
        self.eta0_values.append(eta0_value)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dwell_times(self) -> np.ndarray:
        return np.diff(np.asarray(self.times))


@dataclass(frozen=True)
class DwellStats:
    """Dwell-time summary of a completed run."""

    event_count: int
    min_dwell: float
    mean_dwell: float
    max_dwell: float
    histogram_edges: tuple[float, ...]
    histogram_counts: tuple[int, ...]
    floor_violations: int
    floor_ok: bool
    quantization_dt: float | None

    def to_dict(self) -> dict:
        return {
            "event_count": self.event_count,
            "min_dwell": self.min_dwell,
            "mean_dwell": self.mean_dwell,
            "max_dwell": self.max_dwell,
            "histogram_edges": list(self.histogram_edges),
            "histogram_counts": list(self.histogram_counts),
            "floor_violations": self.floor_violations,
            "floor_ok": self.floor_ok,
            "quantization_dt": self.quantization_dt,
        }


def deviation(state: "WaveState") -> _grid.Field:
    """Velocity deviation e_k = v - held since the last sample."""
    if state.v.grid != state.held.grid:
        raise ShapeError("state fields live on different grids")
    return _grid.Field(state.v.values - state.held.values, state.v.grid)


def eta0(t: float, params: TriggerParams) -> float:
    """Threshold floor eta0_scale * exp(-theta t); strictly positive and
    strictly decreasing."""
    if t < 0:
        raise PreconditionError(f"time must be nonnegative, got {t}")
    return params.eta0_scale * math.exp(-params.theta * t)


def predicate_from_norms(
    norm_e_sq: float, norm_z_sq: float, norm_v_sq: float, eta0_value: float, params: TriggerParams
) -> float:
    """Firing predicate from precomputed squared norms; fires iff >= 0."""
    return norm_e_sq - params.gamma0 * norm_z_sq - params.gamma1 * norm_v_sq - eta0_value


def trigger_value(state: "WaveState", params: TriggerParams, g: _grid.Grid) -> float:
    """Firing predicate at the given state (squared norms throughout)."""
    e = deviation(state)
    return predicate_from_norms(
        _grid.l2_norm_sq(e, g),
        _grid.l2_norm_sq(state.z, g),
        _grid.l2_norm_sq(state.v, g),
        eta0(state.t, params),
        params,
    )


def initial_threshold_scale(
    z0: _grid.Field,
    z1: _grid.Field,
    epsilon: float,
    alpha: float,
    g: _grid.Grid,
    variant: str = "v0",
) -> float:
    """eta0_scale from the initial data.

    ``v0`` is the full initial Lyapunov value; ``reduced`` omits its
    (eps*alpha/2)*||z0||^2 term.  Both are kept because they genuinely
    differ whenever z0 is nonzero; ``v0`` is the default.
    """
    base = (
        0.5 * _grid.l2_norm_sq(z1, g)
        + 0.5 * _grid.h1_seminorm_sq(z0, g)
        + epsilon * _grid.inner_product(z0, z1, g)
    )
    if variant == "v0":
        return base + 0.5 * epsilon * alpha * _grid.l2_norm_sq(z0, g)
    if variant == "reduced":
        return base
    raise ConfigurationError(f"unknown eta0 variant {variant!r} (use 'v0' or 'reduced')")


def zeno_report(log: EventLog, horizon: float, dt: float | None = None) -> DwellStats:
    """Dwell-time statistics and the deviation floor check.

    At every event after the initial one the firing predicate was
    nonnegative, which forces ||e_k||^2 >= eta0 there; ``floor_violations``
    counts events where that fails beyond rounding.  Event times are
    quantized to step boundaries (recorded in ``quantization_dt``).
    """
    if len(log) == 0:
        raise ConfigurationError("empty event log: degenerate run")
    times = np.asarray(log.times)
    if times[0] != 0.0 or (len(times) > 1 and not (np.diff(times) > 0).all()):
        raise ConfigurationError("event log must start at t = 0 with strictly increasing times")
    dwells = np.diff(times)
    if dwells.size == 0:
        min_d = mean_d = max_d = horizon
        edges: tuple[float, ...] = ()
        counts: tuple[int, ...] = ()
    else:
        min_d = float(dwells.min())
        mean_d = float(dwells.mean())
        max_d = float(dwells.max())
        # periodic runs have (up to rounding) constant dwell; 10 bins would
        # collapse to zero width there
        bins = 10 if max_d - min_d > 1e-9 * max_d else 1
        hist, bin_edges = np.histogram(dwells, bins=bins)
        edges = tuple(float(x) for x in bin_edges)
        counts = tuple(int(x) for x in hist)
    floor_violations = 0
    for ne, et in zip(log.norm_e_sq_values[1:], log.eta0_values[1:]):
        if ne < et * (1.0 - 1e-12):
            floor_violations += 1
    return DwellStats(
        event_count=len(log),
        min_dwell=min_d,
        mean_dwell=mean_d,
        max_dwell=max_d,
        histogram_edges=edges,
        histogram_counts=counts,
        floor_violations=floor_violations,
        floor_ok=floor_violations == 0,
        quantization_dt=dt,
    )
