"""Leapfrog (velocity Verlet) time integration of the closed-loop wave
equation with sample-and-hold velocity feedback.

The forcing -alpha * held is exactly piecewise constant: the held sample
changes only at events, events are resolved at step boundaries, and the
integrator never interpolates the forcing, so the hold introduces no
scheme-level error at event instants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid as _grid
from . import trigger as _trigger
from .design import StabilityCertificate
from .errors import BlowUpError, ConfigurationError, DegenerateInitialDataError
from .lyapunov import RunRecord

__all__ = [
    "WaveState",
    "IntegratorConfig",
    "MODES",
    "cfl_max_dt",
    "step",
    "refresh_sample",
    "simulate",
]

MODES = ("event-triggered", "continuous-damping", "periodic", "uncontrolled")

# Initial data whose Lyapunov value is this fraction of the domain volume or
# less is refused: the trigger threshold would be identically ~0.
DEGENERATE_REL = 1e-14


@dataclass
class WaveState:
    """State of the hybrid system: position z, velocity v, the held velocity
    sample driving the control, the sample index k and its time t_k."""

    t: float
    z: _grid.Field
    v: _grid.Field
    held: _grid.Field
    k: int
    t_k: float

    def __post_init__(self):
        if not (self.z.grid == self.v.grid == self.held.grid):
            raise ConfigurationError("state fields live on different grids")
        if self.t < self.t_k or self.t_k < 0 or self.k < 0:
            raise ConfigurationError(f"inconsistent state times t={self.t}, t_k={self.t_k}, k={self.k}")


@dataclass(frozen=True)
class IntegratorConfig:
    """Time step selection: explicit dt, or a fraction of the CFL limit."""

    t_end: float
    dt: float | None = None
    cfl_fraction: float = 0.5

    def __post_init__(self):
        if not self.t_end > 0:
            raise ConfigurationError(f"horizon must be positive, got {self.t_end}")
        if not 0 < self.cfl_fraction <= 1:
            raise ConfigurationError(f"cfl_fraction must lie in (0, 1], got {self.cfl_fraction}")
        if self.dt is not None and not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")

    def resolve_dt(self, g: _grid.Grid) -> float:
        limit = self.cfl_fraction * cfl_max_dt(g)
        if self.dt is None:
            return limit
        if self.dt > limit * (1.0 + 1e-12):
            raise ConfigurationError(
                f"dt = {self.dt} exceeds cfl_fraction * cfl_max_dt = {limit}"
            )
        return self.dt


def cfl_max_dt(g: _grid.Grid) -> float:
    """Stability limit 2/sqrt(lam_max) from the stencil bound
    lam_max <= 4/dx^2 (+ 4/dy^2)."""
    bound = sum(4.0 / (h * h) for h in g.spacings)
    return 2.0 / math.sqrt(bound)


def step(s: WaveState, dt: float, alpha: float) -> WaveState:
    """One velocity-Verlet step with the forcing -alpha * held frozen.

    Accepts negative dt (the scheme is time reversible); |dt| must respect
    the CFL limit.  Raises BlowUpError on non-finite output.
    """
    g = s.z.grid
    if abs(dt) > cfl_max_dt(g) * (1.0 + 1e-12):
        raise ConfigurationError(f"|dt| = {abs(dt)} exceeds the CFL limit {cfl_max_dt(g)}")
    if alpha < 0:
        raise ConfigurationError(f"damping gain must be nonnegative, got {alpha}")
    with np.errstate(over="ignore", invalid="ignore"):  # blow-up is detected below
        forcing = -alpha * s.held.values
        v_half = s.v.values + 0.5 * dt * (g._laplacian_values(s.z.values) + forcing)
        z_new = s.z.values + dt * v_half
        v_new = v_half + 0.5 * dt * (g._laplacian_values(z_new) + forcing)
    if not (np.isfinite(z_new).all() and np.isfinite(v_new).all()):
        raise BlowUpError(f"non-finite state after step from t = {s.t}", time=s.t)
    return WaveState(
        t=s.t + dt,
        z=_grid.Field(z_new, g, validate=False),
        v=_grid.Field(v_new, g, validate=False),
        held=s.held,
        k=s.k,
        t_k=s.t_k,
    )


def refresh_sample(s: WaveState, t_event: float) -> WaveState:
    """Sample the current velocity into the hold; increments k.

    Events are resolved at step boundaries, so t_event must be the state's
    current time.  The deviation is exactly zero afterwards.
    """
    if t_event != s.t:
        raise ConfigurationError(f"event time {t_event} is not the state time {s.t}")
    return WaveState(t=s.t, z=s.z, v=s.v, held=s.v.copy(), k=s.k + 1, t_k=t_event)


def simulate(
    z0: _grid.Field,
    z1: _grid.Field,
    alpha: float,
    g: _grid.Grid,
    config: IntegratorConfig,
    trigger_params: _trigger.TriggerParams | None = None,
    certificate: StabilityCertificate | None = None,
    mode: str = "event-triggered",
    period: float | None = None,
    hooks: tuple = (),
) -> RunRecord:
    """Run the closed loop to the horizon and record per-step series.

    An unconditional event fires at t = 0 (k = 0, held := z1).  After every
    step the update policy of ``mode`` is evaluated on the post-step state
    and the hold is refreshed when it fires; recorded step values are the
    pre-refresh ones.  ``hooks`` are called as hook(step_index, state) after
    each step.

    The Lyapunov column uses the certificate's cross-weight when one is
    given, else it degenerates to the energy.  Uncontrolled runs force
    alpha = 0 and record NaN deviation/threshold/predicate columns.
    """
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode {mode!r}, expected one of {MODES}")
    if mode == "event-triggered" and trigger_params is None:
        raise ConfigurationError("event-triggered mode needs trigger parameters")
    if mode == "periodic":
        if period is None or not period > 0:
            raise ConfigurationError(f"periodic mode needs a positive period, got {period}")

    uncontrolled = mode == "uncontrolled"
    a = 0.0 if uncontrolled else float(alpha)
    eps = certificate.epsilon if certificate is not None else 0.0
    dt = config.resolve_dt(g)
    n_steps = max(1, int(math.ceil(config.t_end / dt - 1e-9)))

    nz = _grid.l2_norm_sq(z0, g)
    nv = _grid.l2_norm_sq(z1, g)
    ngz = _grid.h1_seminorm_sq(z0, g)
    cross = _grid.inner_product(z0, z1, g)
    e0 = 0.5 * (nv + ngz)
    v0 = e0 + 0.5 * eps * a * nz + eps * cross
    if v0 <= DEGENERATE_REL * g.volume:
        raise DegenerateInitialDataError(
            f"initial Lyapunov value {v0} is degenerate; the threshold floor would vanish"
        )

    state = WaveState(t=0.0, z=z0.copy(), v=z1.copy(), held=z1.copy(), k=0, t_k=0.0)

    m = n_steps + 1
    cols = {
        name: np.empty(m)
        for name in ("t", "E", "V", "nz", "nv", "ngz", "ne", "eta", "pred")
    }
    ev = np.zeros(m, dtype=bool)
    events = None if uncontrolled else _trigger.EventLog()

    def fill(i, t, nz, nv, ngz, ne, eta_t, pred):
        cols["t"][i] = t
        cols["nz"][i] = nz
        cols["nv"][i] = nv
        cols["ngz"][i] = ngz
        cols["ne"][i] = ne
        cols["eta"][i] = eta_t
        cols["pred"][i] = pred
        e = 0.5 * (nv + ngz)
        cols["E"][i] = e
        cols["V"][i] = e + 0.5 * eps * a * nz + eps * cross_val

    cross_val = cross
    if trigger_params is not None:
        eta_now = _trigger.eta0(0.0, trigger_params)
        pred_now = _trigger.predicate_from_norms(0.0, nz, nv, eta_now, trigger_params)
    else:
        eta_now = pred_now = float("nan")
    fill(0, 0.0, nz, nv, ngz, 0.0 if not uncontrolled else float("nan"), eta_now, pred_now)
    ev[0] = not uncontrolled
    if events is not None:
        events.append(0, 0.0, pred_now, 0.0, eta_now)

    w = g.weight
    for i in range(1, m):
        try:
            state = step(state, dt, a)
        except BlowUpError as exc:
            raise BlowUpError(f"blow-up at step {i} (t = {i * dt})", step=i, time=i * dt) from exc
        state.t = i * dt  # keep the time grid exactly uniform
        zv, vv = state.z.values, state.v.values
        nz = w * float(np.dot(zv, zv))
        nv = w * float(np.dot(vv, vv))
        ngz = _grid.h1_seminorm_sq(state.z, g)
        cross_val = w * float(np.dot(zv, vv))
        if uncontrolled:
            ne = eta_t = pred = float("nan")
            fire = False
        else:
            dev = vv - state.held.values
            ne = w * float(np.dot(dev, dev))
            if trigger_params is not None:
                eta_t = _trigger.eta0(state.t, trigger_params)
                pred = _trigger.predicate_from_norms(ne, nz, nv, eta_t, trigger_params)
            else:
                eta_t = pred = float("nan")
            if mode == "event-triggered":
                fire = pred >= 0.0
            elif mode == "continuous-damping":
                fire = True
            else:  # periodic
                fire = state.t - state.t_k >= period * (1.0 - 1e-12)
        fill(i, state.t, nz, nv, ngz, ne, eta_t, pred)
        ev[i] = fire
        if fire:
            state = refresh_sample(state, state.t)
            events.append(state.k, state.t, pred, ne, eta_t)
        for hook in hooks:
            hook(i, state)

    return RunRecord(
        t=cols["t"],
        energy=cols["E"],
        lyapunov=cols["V"],
        norm_z_sq=cols["nz"],
        norm_v_sq=cols["nv"],
        norm_gradz_sq=cols["ngz"],
        norm_e_sq=cols["ne"],
        eta0=cols["eta"],
        trigger_value=cols["pred"],
        event=ev,
        events=events,
        certificate=certificate,
        trigger=trigger_params,
        mode=mode,
        dt=dt,
        meta={
            "alpha": a,
            "n_steps": n_steps,
            "t_end": config.t_end,
            "period": period,
            "grid": {"counts": list(g.counts), "spacings": list(g.spacings)},
        },
    )
