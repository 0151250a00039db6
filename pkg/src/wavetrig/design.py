"""Certificate design: from the damping gain and the domain's Poincare
constant to trigger weights, a Lyapunov cross-weight, decay margins, and the
certified overshoot/rate pair.

The pipeline is pure arithmetic.  Feasibility of the cross-weight interval
is always decided by comparing its two endpoints directly; the two known
closed-form expansions of that comparison disagree in the gamma0
coefficient, so both are recorded in the diagnostics but neither is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from .errors import DesignFailureError, InfeasibleDomainError, PreconditionError

__all__ = [
    "DesignInput",
    "StabilityCertificate",
    "gamma_bounds",
    "epsilon_interval",
    "margins",
    "build_certificate",
    "vdot_bound_rhs",
    "SQRT2",
]

SQRT2 = math.sqrt(2.0)

# A first-try interval can be degenerate to the last bit (it is exactly a
# point for alpha = 1 with half-of-supremum weights), so feasibility demands
# a minimal relative width rather than a strict float comparison.
_MIN_REL_WIDTH = 1e-12

_SHRINK_BUDGET = 60


@dataclass(frozen=True)
class DesignInput:
    """Inputs of the design pipeline.

    ``s_gamma0``/``s_gamma1`` place the trigger weights that fraction of the
    way into their admissible open intervals; ``theta_margin > 1`` scales the
    threshold decay rate above its strict lower bound (smaller margins
    inflate the overshoot).
    """

    alpha: float
    c_omega: float
    c_omega_source: str = "user"
    s_gamma0: float = 0.5
    s_gamma1: float = 0.5
    theta_margin: float = 1.5

    def __post_init__(self):
        if not self.alpha > 0:
            raise PreconditionError(f"damping gain must be positive, got {self.alpha}")
        if not self.c_omega > 0:
            raise PreconditionError(f"Poincare constant must be positive, got {self.c_omega}")
        if not (0 < self.s_gamma0 < 1 and 0 < self.s_gamma1 < 1):
            raise PreconditionError("safety fractions must lie in (0, 1)")
        if not self.theta_margin > 1:
            raise PreconditionError("theta_margin must exceed 1")


@dataclass(frozen=True)
class StabilityCertificate:
    """Full output of the design pipeline.

    Guarantees, for the closed loop run with these trigger parameters:
    ``c1*E <= V <= c2*E`` along trajectories, ``dV/dt <= -beta*E +
    (alpha/2)(1+alpha*eps)*eta0``, and the energy envelope
    ``E(t) <= overshoot * exp(-decay_rate * t) * E(0)``.
    """

    alpha: float
    c_omega: float
    c_omega_source: str
    gamma0: float
    gamma1: float
    epsilon: float
    nu0: float
    nu1: float
    beta: float
    c1: float
    c2: float
    theta: float
    mu: float
    overshoot: float
    decay_rate: float
    s_gamma0: float
    s_gamma1: float
    theta_margin: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        checks = [
            self.c_omega < SQRT2,
            0 < self.epsilon < 1.0 / self.c_omega,
            self.nu0 > 0,
            self.nu1 > 0,
            self.beta == min(self.nu0, self.nu1),
            0 < self.c1 < 1 < self.c2,
            self.theta > self.beta / self.c2,
            self.mu > 0,
            self.decay_rate > 0,
            self.overshoot > 1,
        ]
        if not all(checks):
            raise DesignFailureError(f"certificate invariants violated: {self}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "StabilityCertificate":
        return cls(**d)


def gamma_bounds(alpha: float, c_omega: float) -> tuple[float, float]:
    """Strict upper bounds for the trigger weights (gamma0_sup, gamma1_sup).

    The split at ``alpha = 2`` reflects which of the two interval endpoints
    binds; below it the position weight must also clear the
    ``2*(2 - alpha^2)`` factor and the velocity weight is capped at 1/2.
    """
    if not alpha > 0:
        raise PreconditionError(f"damping gain must be positive, got {alpha}")
    if not 0 < c_omega < SQRT2:
        raise InfeasibleDomainError(
            f"certificate requires C_Omega < sqrt(2); got C_Omega = {c_omega}"
        )
    csq = c_omega * c_omega
    if alpha < 2:
        g0 = (2.0 - csq) / (csq * max(alpha * alpha + alpha * c_omega, 2.0 * (2.0 - alpha * alpha)))
        g1 = 0.5
    else:
        g0 = (2.0 - csq) / (alpha * alpha * csq + alpha * csq * c_omega)
        g1 = 1.0
    return g0, g1


def epsilon_interval(alpha: float, c_omega: float, gamma0: float, gamma1: float) -> tuple[float, float]:
    """Open interval of admissible Lyapunov cross-weights.

    ``lo`` makes the position margin nu0 vanish; the uncapped ``hi`` makes
    the velocity margin nu1 vanish; the cap 1/C_Omega keeps the lower
    equivalence constant c1 positive.  Returns (lo, hi); the caller decides
    emptiness (lo >= hi signals that the weights must shrink).
    """
    csq = c_omega * c_omega
    den = 2.0 - csq * (1.0 + alpha * alpha * gamma0)
    if den <= 0:
        raise PreconditionError(
            f"position weight {gamma0} too large: 2 - C^2(1 + alpha^2 gamma0) = {den} <= 0"
        )
    lo = alpha * gamma0 * csq / den
    hi = min(alpha * (1.0 - gamma1) / (2.0 + alpha * alpha * gamma1), 1.0 / c_omega)
    return lo, hi


def margins(alpha: float, c_omega: float, gamma0: float, gamma1: float, eps: float) -> tuple[float, float, float]:
    """Decay margins (nu0, nu1) and their minimum beta.

    Negative values are returned unchanged; they flag an infeasible
    cross-weight rather than raising.
    """
    csq = c_omega * c_omega
    nu0 = 2.0 * eps - alpha * gamma0 * csq - eps * csq * (1.0 + alpha * alpha * gamma0)
    nu1 = 2.0 * alpha - 2.0 * eps - alpha * (gamma1 + 1.0) - alpha * alpha * eps * gamma1
    return nu0, nu1, min(nu0, nu1)


def _interval_feasible(lo: float, hi: float) -> bool:
    return bool(hi - lo > _MIN_REL_WIDTH * max(hi, abs(lo)))


def _expanded_feasibility(alpha: float, csq: float, gamma0: float, gamma1: float) -> dict:
    # Two closed-form expansions of lo < hi that circulate for this
    # inequality; they differ in the gamma0 coefficient ((a^2-2) vs
    # -(a^2+2)).  Recorded for comparison only.
    common = 2.0 - csq + (csq - 2.0) * gamma1
    return {
        "gamma0_coeff_alpha_sq_minus_2": (alpha * alpha - 2.0) * csq * gamma0 + common,
        "gamma0_coeff_minus_alpha_sq_plus_2": -(alpha * alpha + 2.0) * csq * gamma0 + common,
    }


def build_certificate(inp: DesignInput) -> StabilityCertificate:
    """Run the full design pipeline.

    Weights start at the requested fraction of their suprema and are halved
    geometrically whenever the cross-weight interval comes up empty; the
    cross-weight is the interval midpoint, which keeps both margins away
    from their zero boundaries without solving an optimization problem.
    """
    alpha, c = inp.alpha, inp.c_omega
    g0_sup, g1_sup = gamma_bounds(alpha, c)  # raises if C_Omega >= sqrt(2)
    gamma0 = inp.s_gamma0 * g0_sup
    gamma1 = inp.s_gamma1 * g1_sup
    trace = []
    for shrink in range(_SHRINK_BUDGET):
        lo, hi = epsilon_interval(alpha, c, gamma0, gamma1)
        feasible = _interval_feasible(lo, hi)
        trace.append({"gamma0": gamma0, "gamma1": gamma1, "lo": lo, "hi": hi, "feasible": feasible})
        if feasible:
            break
        gamma0 *= 0.5
        gamma1 *= 0.5
    else:
        raise DesignFailureError(
            f"no feasible cross-weight interval after {_SHRINK_BUDGET} shrinks "
            f"(alpha={alpha}, C_Omega={c}); trace tail: {trace[-3:]}"
        )

    eps = 0.5 * (lo + hi)
    nu0, nu1, beta = margins(alpha, c, gamma0, gamma1, eps)
    if not (nu0 > 0 and nu1 > 0):
        raise DesignFailureError(
            f"margins not positive at interval midpoint: nu0={nu0}, nu1={nu1} "
            f"(alpha={alpha}, C_Omega={c}, gamma0={gamma0}, gamma1={gamma1}, eps={eps})"
        )
    c1 = 1.0 - eps * c
    c2 = 1.0 + eps * c + eps * alpha * c * c
    theta = inp.theta_margin * beta / c2
    mu = alpha * (1.0 + eps) / (2.0 * (theta - beta / c2))
    overshoot = (c2 / c1) * (1.0 + mu)
    decay_rate = beta / c2
    hi_uncapped = alpha * (1.0 - gamma1) / (2.0 + alpha * alpha * gamma1)
    diagnostics = {
        "interval_lo": lo,
        "interval_hi": hi,
        "interval_hi_uncapped": hi_uncapped,
        "shrink_iterations": shrink,
        "gamma0_sup": g0_sup,
        "gamma1_sup": g1_sup,
        "feasibility_expansions": _expanded_feasibility(alpha, c * c, gamma0, gamma1),
        "trace": trace,
    }
    return StabilityCertificate(
        alpha=alpha,
        c_omega=c,
        c_omega_source=inp.c_omega_source,
        gamma0=gamma0,
        gamma1=gamma1,
        epsilon=eps,
        nu0=nu0,
        nu1=nu1,
        beta=beta,
        c1=c1,
        c2=c2,
        theta=theta,
        mu=mu,
        overshoot=overshoot,
        decay_rate=decay_rate,
        s_gamma0=inp.s_gamma0,
        s_gamma1=inp.s_gamma1,
        theta_margin=inp.theta_margin,
        diagnostics=diagnostics,
    )


def vdot_bound_rhs(cert: StabilityCertificate, energy: float, eta0_value: float) -> float:
    """Certified upper bound on dV/dt at a state with the given energy and
    trigger threshold value."""
    return -cert.beta * energy + 0.5 * cert.alpha * (1.0 + cert.alpha * cert.epsilon) * eta0_value
