"""Energy and Lyapunov functionals, the per-run time series record, and the
certificate checkers that validate a recorded trajectory against the
guarantees of its certificate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from . import grid as _grid
from .design import StabilityCertificate, vdot_bound_rhs
from .errors import ConfigurationError
from .trigger import EventLog, TriggerParams

if TYPE_CHECKING:
    from .dynamics import WaveState

__all__ = [
    "RunRecord",
    "CheckReport",
    "energy",
    "lyapunov_v",
    "check_equivalence",
    "check_vdot",
    "check_envelope",
    "check_trigger_invariant",
]


def energy(state: "WaveState", g: _grid.Grid) -> float:
    """Wave energy: half the squared velocity norm plus half the squared
    gradient norm."""
    return 0.5 * (_grid.l2_norm_sq(state.v, g) + _grid.h1_seminorm_sq(state.z, g))


def lyapunov_v(state: "WaveState", epsilon: float, alpha: float, g: _grid.Grid) -> float:
    """Energy augmented with the weighted position norm and cross term:
    E + (eps*alpha/2)||z||^2 + eps<z, v>."""
    return (
        energy(state, g)
        + 0.5 * epsilon * alpha * _grid.l2_norm_sq(state.z, g)
        + epsilon * _grid.inner_product(state.z, state.v, g)
    )


@dataclass
class RunRecord:
    """Per-step time series of a completed simulation.

    All arrays share one length; ``t`` is uniform with spacing ``dt``.  The
    deviation/threshold/predicate columns hold NaN for uncontrolled runs.
    Values at an event step are the pre-refresh ones, so the predicate
    column is the value that caused the firing.
    """

    t: np.ndarray
    energy: np.ndarray
    lyapunov: np.ndarray
    norm_z_sq: np.ndarray
    norm_v_sq: np.ndarray
    norm_gradz_sq: np.ndarray
    norm_e_sq: np.ndarray
    eta0: np.ndarray
    trigger_value: np.ndarray
    event: np.ndarray
    events: EventLog | None
    certificate: StabilityCertificate | None
    trigger: TriggerParams | None
    mode: str
    dt: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.t.size
        series = (
            self.energy, self.lyapunov, self.norm_z_sq, self.norm_v_sq,
            self.norm_gradz_sq, self.norm_e_sq, self.eta0, self.trigger_value, self.event,
        )
        if any(s.size != n for s in series):
            raise ConfigurationError("run record series have mismatched lengths")
        for arr in (self.t, *series):
            arr.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return self.t.size - 1

    def event_indices(self) -> np.ndarray:
        return np.flatnonzero(self.event)


@dataclass
class CheckReport:
    """Outcome of one certificate check over a run record."""

    name: str
    passed: bool
    n_checked: int
    n_violations: int
    worst: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "n_checked": int(self.n_checked),
            "n_violations": int(self.n_violations),
            "worst": float(self.worst),
            "details": self.details,
        }


def _require_certificate(record: RunRecord) -> StabilityCertificate:
    if record.certificate is None:
        raise ConfigurationError("run record carries no certificate")
    if record.t.size < 2:
        raise ConfigurationError("degenerate run: series too short to check")
    return record.certificate


def check_equivalence(record: RunRecord, rel_tol: float = 1e-9) -> CheckReport:
    """Sandwich check c1*E <= V <= c2*E at every step.

    Valid at the discrete level only when the certificate's Poincare
    constant is valid for the discrete norms, which is why certificates
    default to the discrete constant; violations are findings, not errors.
    """
    cert = _require_certificate(record)
    e, v = record.energy, record.lyapunov
    tiny = np.finfo(float).tiny
    lower = cert.c1 * e
    upper = cert.c2 * e
    rel_low = (lower - v) / np.maximum(lower, tiny)
    rel_up = (v - upper) / np.maximum(upper, tiny)
    worst = float(np.max(np.maximum(rel_low, rel_up)))
    violations = int(np.count_nonzero((rel_low > rel_tol) | (rel_up > rel_tol)))
    return CheckReport(
        name="equivalence",
        passed=violations == 0,
        n_checked=e.size,
        n_violations=violations,
        worst=worst,
        details={
            "rel_tol": rel_tol,
            "worst_lower_rel": float(rel_low.max()),
            "worst_upper_rel": float(rel_up.max()),
            "c1": cert.c1,
            "c2": cert.c2,
        },
    )


def check_vdot(record: RunRecord, c_tol: float = 10.0) -> CheckReport:
    """Differential inequality check dV/dt <= -beta*E + (alpha/2)(1+alpha*eps)*eta0.

    dV/dt is approximated by centered differences on the recorded series,
    which cross-validates the integrator and the certificate arithmetic
    independently of how V was produced.  Steps within one index of an
    event are skipped: the held sample jumps there and the difference
    quotient straddles the jump.  Tolerance is c_tol * dt^2 * max|V|.
    """
    cert = _require_certificate(record)
    v, e, eta = record.lyapunov, record.energy, record.eta0
    n = v.size
    dt = record.dt
    if np.isnan(eta).any():
        raise ConfigurationError("vdot check needs the threshold series (controlled run)")
    vdot = (v[2:] - v[:-2]) / (2.0 * dt)  # index i+1 in the full series
    rhs = vdot_bound_rhs(cert, e[1:-1], eta[1:-1])  # broadcasts over the series
    usable = np.ones(n - 2, dtype=bool)
    for j in record.event_indices():
        for i in (j - 1, j, j + 1):
            if 1 <= i <= n - 2:
                usable[i - 1] = False
    tol = c_tol * dt * dt * float(np.max(np.abs(v)))
    margin = vdot - rhs
    checked = int(np.count_nonzero(usable))
    violations = int(np.count_nonzero(margin[usable] > tol))
    worst = float(margin[usable].max()) if checked else float("-inf")
    return CheckReport(
        name="vdot",
        passed=violations == 0,
        n_checked=checked,
        n_violations=violations,
        worst=worst,
        details={"c_tol": c_tol, "tolerance": tol, "excluded_steps": int(np.count_nonzero(~usable))},
    )


def check_envelope(record: RunRecord, rel_tol: float = 1e-9, strict_v: bool = False) -> CheckReport:
    """Decay envelope check E(t) <= overshoot * exp(-decay_rate * t) * E(0).

    Also fits the empirical decay rate to ln E over the second half of the
    horizon (skipping the overshoot transient); a valid certificate is
    conservative, so the fitted rate is expected to be at least the
    certified one.  With ``strict_v`` the sharper two-exponential bound on
    V, (1+mu) V(0) exp(-decay_rate t) - mu V(0) exp(-theta t), is checked
    as well and reported in the details.
    """
    cert = _require_certificate(record)
    t, e = record.t, record.energy
    e0 = e[0]
    envelope = cert.overshoot * np.exp(-cert.decay_rate * t) * e0
    excess = e - envelope * (1.0 + rel_tol)
    violations = int(np.count_nonzero(excess > 0))
    worst = float(np.max(e / np.maximum(envelope, np.finfo(float).tiny)))
    second_half = t >= 0.5 * t[-1]
    positive = e > 0
    fit_mask = second_half & positive
    if np.count_nonzero(fit_mask) >= 2:
        slope = np.polyfit(t[fit_mask], np.log(e[fit_mask]), 1)[0]
        delta_emp = -float(slope)
    else:
        delta_emp = float("nan")
    details = {
        "rel_tol": rel_tol,
        "overshoot": cert.overshoot,
        "decay_rate": cert.decay_rate,
        "delta_emp": delta_emp,
        "delta_ratio": delta_emp / cert.decay_rate,
    }
    if strict_v:
        v0 = record.lyapunov[0]
        v_env = v0 * ((1.0 + cert.mu) * np.exp(-cert.decay_rate * t) - cert.mu * np.exp(-cert.theta * t))
        v_violations = int(np.count_nonzero(record.lyapunov > v_env * (1.0 + rel_tol)))
        details["strict_v_violations"] = v_violations
        details["strict_v_worst"] = float(np.max(record.lyapunov / np.maximum(v_env, np.finfo(float).tiny)))
    return CheckReport(
        name="envelope",
        passed=violations == 0,
        n_checked=e.size,
        n_violations=violations,
        worst=worst,
        details=details,
    )


def check_trigger_invariant(record: RunRecord) -> CheckReport:
    """Inter-event invariant of the firing rule over the whole record.

    At every non-event step the predicate must be strictly negative (the
    deviation stayed inside its allowance); at every event step after the
    unconditional one at t = 0 it must be nonnegative.  Event flags and
    predicate signs must agree exactly, since events are resolved at step
    boundaries from this very predicate.
    """
    if record.mode != "event-triggered":
        raise ConfigurationError("trigger invariant applies to event-triggered runs only")
    pred = record.trigger_value
    ev = record.event.astype(bool)
    fired_without_flag = (~ev) & (pred >= 0)
    flagged_without_fire = ev & (pred < 0)
    flagged_without_fire[0] = False  # t = 0 event is unconditional
    violations = int(np.count_nonzero(fired_without_flag) + np.count_nonzero(flagged_without_fire))
    worst = float(pred[~ev].max()) if (~ev).any() else float("-inf")
    return CheckReport(
        name="trigger-invariant",
        passed=violations == 0,
        n_checked=pred.size,
        n_violations=violations,
        worst=worst,
        details={"n_events": int(np.count_nonzero(ev))},
    )
