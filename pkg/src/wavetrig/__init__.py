"""Event-triggered damping control of the linear wave equation.

A leapfrog field solver with sample-and-hold velocity feedback, an event
trigger that refreshes the sample only when the measured deviation outgrows
a state-dependent allowance, a designer that turns the damping gain and the
domain's Poincare constant into a certified exponential-decay guarantee,
and checkers that validate that guarantee on recorded trajectories.
"""

from .design import DesignInput, StabilityCertificate, build_certificate, epsilon_interval, gamma_bounds, margins, vdot_bound_rhs
from .dynamics import IntegratorConfig, WaveState, cfl_max_dt, refresh_sample, simulate, step
from .grid import (
    Field,
    Grid,
    Interval,
    Rectangle,
    apply_laplacian,
    build_grid,
    discrete_poincare_constant,
    h1_seminorm_sq,
    inner_product,
    l2_norm_sq,
    poincare_constant,
)
from .lyapunov import (
    CheckReport,
    RunRecord,
    check_envelope,
    check_equivalence,
    check_trigger_invariant,
    check_vdot,
    energy,
    lyapunov_v,
)
from .trigger import (
    DwellStats,
    EventLog,
    TriggerParams,
    deviation,
    eta0,
    initial_threshold_scale,
    trigger_value,
    zeno_report,
)

__version__ = "0.1.0"

__all__ = [
    "DesignInput", "StabilityCertificate", "build_certificate", "epsilon_interval",
    "gamma_bounds", "margins", "vdot_bound_rhs",
    "IntegratorConfig", "WaveState", "cfl_max_dt", "refresh_sample", "simulate", "step",
    "Field", "Grid", "Interval", "Rectangle", "apply_laplacian", "build_grid",
    "discrete_poincare_constant", "h1_seminorm_sq", "inner_product", "l2_norm_sq",
    "poincare_constant",
    "CheckReport", "RunRecord", "check_envelope", "check_equivalence",
    "check_trigger_invariant", "check_vdot", "energy", "lyapunov_v",
    "DwellStats", "EventLog", "TriggerParams", "deviation", "eta0",
    "initial_threshold_scale", "trigger_value", "zeno_report",
]
