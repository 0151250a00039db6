import numpy as np
import pytest

import wavetrig as wt
from wavetrig.grid import Field
from wavetrig.initial import sine_mode


@pytest.fixture(scope="session")
def grid199():
    return wt.build_grid(wt.Interval(1.0, 199))


@pytest.fixture(scope="session")
def a1_certificate(grid199):
    c = wt.discrete_poincare_constant(grid199)
    return wt.build_certificate(
        wt.DesignInput(alpha=1.0, c_omega=c, c_omega_source="discrete",
                       s_gamma0=0.5, s_gamma1=0.5, theta_margin=1.5)
    )


@pytest.fixture(scope="session")
def a1_record(grid199, a1_certificate):
    """The flagship run: unit interval, n=199, alpha=1, dt=dx/2, t_end=40."""
    z0 = sine_mode(grid199, 1)
    z1 = Field(np.zeros(grid199.num_interior), grid199)
    scale = wt.initial_threshold_scale(z0, z1, a1_certificate.epsilon, 1.0, grid199, "v0")
    params = wt.TriggerParams.from_certificate(a1_certificate, scale)
    integ = wt.IntegratorConfig(t_end=40.0, dt=0.5 * grid199.spacings[0])
    return wt.simulate(z0, z1, 1.0, grid199, integ, params, a1_certificate, mode="event-triggered")
