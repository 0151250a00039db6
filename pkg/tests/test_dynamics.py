import numpy as np
import pytest

import wavetrig as wt
from wavetrig.errors import BlowUpError, ConfigurationError, DegenerateInitialDataError
from wavetrig.grid import Field
from wavetrig.initial import sine_mode


def zero_field(g):
    return Field(np.zeros(g.num_interior), g)


def standing_wave_state(g):
    return wt.WaveState(t=0.0, z=sine_mode(g, 1), v=zero_field(g), held=zero_field(g), k=0, t_k=0.0)


# ----------------------------------------------------------------------- CFL

def test_cfl_interval():
    g = wt.build_grid(wt.Interval(1.0, 99))
    assert wt.cfl_max_dt(g) == pytest.approx(0.01)


def test_cfl_square():
    g = wt.build_grid(wt.Rectangle(1.0, 1.0, 99, 99))
    assert wt.cfl_max_dt(g) == pytest.approx(0.01 / np.sqrt(2))


def test_cfl_positive_for_any_grid():
    for shape in (wt.Interval(3.0, 7), wt.Rectangle(2.0, 0.5, 5, 11)):
        assert wt.cfl_max_dt(wt.build_grid(shape)) > 0


def test_integrator_config_validation():
    g = wt.build_grid(wt.Interval(1.0, 99))
    cfg = wt.IntegratorConfig(t_end=1.0, cfl_fraction=0.5)
    assert cfg.resolve_dt(g) == pytest.approx(0.005)
    assert wt.IntegratorConfig(t_end=1.0, dt=0.004, cfl_fraction=0.5).resolve_dt(g) == 0.004
    with pytest.raises(ConfigurationError):
        wt.IntegratorConfig(t_end=1.0, dt=0.008, cfl_fraction=0.5).resolve_dt(g)
    with pytest.raises(ConfigurationError):
        wt.IntegratorConfig(t_end=0.0)
    with pytest.raises(ConfigurationError):
        wt.IntegratorConfig(t_end=1.0, cfl_fraction=1.5)


# ---------------------------------------------------------------------- step

def test_equilibrium_stays_zero():
    g = wt.build_grid(wt.Interval(1.0, 49))
    s = wt.WaveState(t=0.0, z=zero_field(g), v=zero_field(g), held=zero_field(g), k=0, t_k=0.0)
    for _ in range(10):
        s = wt.step(s, 0.005, 1.0)
    assert np.all(s.z.values == 0.0) and np.all(s.v.values == 0.0)


def test_step_time_reversible():
    g = wt.build_grid(wt.Interval(1.0, 99))
    s0 = wt.WaveState(t=0.0, z=sine_mode(g, 1), v=sine_mode(g, 3), held=zero_field(g), k=0, t_k=0.0)
    dt = 0.5 * g.spacings[0]
    s = s0
    for _ in range(2):
        s = wt.step(s, dt, 0.0)
    for _ in range(2):
        s = wt.step(s, -dt, 0.0)
    np.testing.assert_allclose(s.z.values, s0.z.values, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(s.v.values, s0.v.values, rtol=1e-12, atol=1e-15)


def test_step_keeps_hold_by_reference():
    g = wt.build_grid(wt.Interval(1.0, 49))
    s = standing_wave_state(g)
    s2 = wt.step(s, 0.005, 1.0)
    assert s2.held is s.held
    assert (s2.k, s2.t_k) == (s.k, s.t_k)


def test_step_rejects_dt_above_cfl():
    g = wt.build_grid(wt.Interval(1.0, 49))
    with pytest.raises(ConfigurationError):
        wt.step(standing_wave_state(g), 2 * wt.cfl_max_dt(g), 0.0)


def test_step_rejects_negative_alpha():
    g = wt.build_grid(wt.Interval(1.0, 49))
    with pytest.raises(ConfigurationError):
        wt.step(standing_wave_state(g), 0.005, -1.0)


def test_energy_near_conserved_without_control():
    # undriven standing wave over t in [0, 10]: drift < 1e-3 relative
    g = wt.build_grid(wt.Interval(1.0, 199))
    integ = wt.IntegratorConfig(t_end=10.0, dt=0.5 * g.spacings[0])
    rec = wt.simulate(sine_mode(g, 1), zero_field(g), 0.0, g, integ, mode="uncontrolled")
    drift = np.max(np.abs(rec.energy - rec.energy[0])) / rec.energy[0]
    assert drift < 1e-3
    assert rec.energy[0] == pytest.approx(np.pi ** 2 / 4, rel=1e-3)


def test_zero_gain_conserves_energy_even_with_trigger_active():
    # alpha = 0 under the event policy: events may fire but carry no
    # control influence, so the run stays conservative
    g = wt.build_grid(wt.Interval(1.0, 199))
    params = wt.TriggerParams(gamma0=0.1, gamma1=0.1, theta=0.3, eta0_scale=0.5)
    integ = wt.IntegratorConfig(t_end=10.0, dt=0.5 * g.spacings[0])
    rec = wt.simulate(sine_mode(g, 1), zero_field(g), 0.0, g, integ, params, mode="event-triggered")
    drift = np.max(np.abs(rec.energy - rec.energy[0])) / rec.energy[0]
    assert drift < 1e-3


# -------------------------------------------------------------- convergence

def _standing_wave_errors(times_half):
    """Max-norm state error against the exact standing wave at t = 1."""
    errors = []
    for n in (49, 99, 199):
        g = wt.build_grid(wt.Interval(1.0, n))
        dt = 0.5 * g.spacings[0]
        steps = int(round(1.0 / dt))
        s = standing_wave_state(g)
        for _ in range(steps):
            s = wt.step(s, dt, 0.0)
        t = steps * dt
        x = g.coords()
        z_exact = np.cos(np.pi * t) * np.sin(np.pi * x)
        v_exact = -np.pi * np.sin(np.pi * t) * np.sin(np.pi * x)
        err_z = np.max(np.abs(s.z.values - z_exact))
        err_v = np.max(np.abs(s.v.values - v_exact))
        errors.append(max(err_z, err_v) if not times_half else err_z)
    return errors


def test_second_order_convergence_of_state():
    errors = _standing_wave_errors(times_half=False)
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.2 <= coarse / fine <= 4.8


def test_position_superconverges_at_phase_null():
    # t = 1 is an extremum of cos(pi t): the leading phase error cancels in
    # the position and the observed drop factor is 16, not 4; pin it so a
    # regression to generic second-order behavior is visible
    errors = _standing_wave_errors(times_half=True)
    for coarse, fine in zip(errors, errors[1:]):
        assert 12.8 <= coarse / fine <= 19.2


# ------------------------------------------------------------ refresh_sample

def test_refresh_semantics():
    g = wt.build_grid(wt.Interval(1.0, 49))
    v = sine_mode(g, 1)
    s = wt.WaveState(t=2.0, z=sine_mode(g, 2), v=v, held=zero_field(g), k=3, t_k=1.0)
    assert not np.array_equal(s.held.values, s.v.values)
    s2 = wt.refresh_sample(s, 2.0)
    np.testing.assert_array_equal(s2.held.values, v.values)
    assert (s2.k, s2.t_k) == (4, 2.0)
    assert (s2.t, s2.z, s2.v) == (s.t, s.z, s.v)
    s3 = wt.refresh_sample(s2, 2.0)  # idempotent on held/t_k, increments k
    np.testing.assert_array_equal(s3.held.values, s2.held.values)
    assert (s3.k, s3.t_k) == (5, 2.0)


def test_refresh_requires_current_time():
    g = wt.build_grid(wt.Interval(1.0, 49))
    s = standing_wave_state(g)
    with pytest.raises(ConfigurationError):
        wt.refresh_sample(s, 0.5)


# ------------------------------------------------------------------ simulate

@pytest.fixture(scope="module")
def small_setup():
    g = wt.build_grid(wt.Interval(1.0, 49))
    c = wt.discrete_poincare_constant(g)
    cert = wt.build_certificate(wt.DesignInput(alpha=1.0, c_omega=c, c_omega_source="discrete"))
    z0, z1 = sine_mode(g, 1), zero_field(g)
    scale = wt.initial_threshold_scale(z0, z1, cert.epsilon, 1.0, g, "v0")
    params = wt.TriggerParams.from_certificate(cert, scale)
    integ = wt.IntegratorConfig(t_end=8.0, dt=0.5 * g.spacings[0])
    return g, cert, params, z0, z1, integ


def test_simulate_refuses_zero_initial_data(small_setup):
    g, cert, params, _, z1, integ = small_setup
    with pytest.raises(DegenerateInitialDataError):
        wt.simulate(zero_field(g), zero_field(g), 1.0, g, integ, params, cert)


def test_simulate_is_deterministic(small_setup):
    g, cert, params, z0, z1, integ = small_setup
    a = wt.simulate(z0, z1, 1.0, g, integ, params, cert)
    b = wt.simulate(z0, z1, 1.0, g, integ, params, cert)
    for name in ("t", "energy", "lyapunov", "norm_e_sq", "eta0", "trigger_value"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    assert a.events.times == b.events.times


def test_simulate_event_bookkeeping(small_setup):
    g, cert, params, z0, z1, integ = small_setup
    rec = wt.simulate(z0, z1, 1.0, g, integ, params, cert)
    assert rec.event[0]
    assert rec.events.times[0] == 0.0
    idx = rec.event_indices()
    # predicate nonnegative at every fired step except the seed event
    assert (rec.trigger_value[idx[1:]] >= 0).all()
    # strictly negative strictly between events
    mask = np.ones(rec.t.size, dtype=bool)
    mask[idx] = False
    assert (rec.trigger_value[mask] < 0).all()
    assert len(rec.events) == idx.size
    assert len(rec.events) < rec.n_steps


def test_simulate_hold_is_bit_identical_between_events(small_setup):
    g, cert, params, z0, z1, integ = small_setup
    snapshots = []
    rec = wt.simulate(
        z0, z1, 1.0, g, integ, params, cert,
        hooks=(lambda i, s: snapshots.append((i, s.k, s.held.values)),)
    )
    by_k = {}
    for i, k, held in snapshots:
        if k in by_k:
            assert held is by_k[k], "hold must not be reallocated between events"
        else:
            by_k[k] = held


def test_simulate_periodic_mode(small_setup):
    g, cert, params, z0, z1, integ = small_setup
    rec = wt.simulate(z0, z1, 1.0, g, integ, params, cert, mode="periodic", period=0.5)
    dwells = np.diff(rec.events.times)
    assert np.allclose(dwells, 0.5, atol=rec.dt)
    with pytest.raises(ConfigurationError):
        wt.simulate(z0, z1, 1.0, g, integ, params, cert, mode="periodic")


def test_simulate_uncontrolled_has_no_events(small_setup):
    g, cert, params, z0, z1, integ = small_setup
    rec = wt.simulate(z0, z1, 1.0, g, integ, mode="uncontrolled")
    assert rec.events is None
    assert not rec.event.any()
    assert np.isnan(rec.norm_e_sq[1:]).all()


def test_simulate_continuous_updates_every_step(small_setup):
    g, cert, params, z0, z1, integ = small_setup
    rec = wt.simulate(z0, z1, 1.0, g, integ, params, cert, mode="continuous-damping")
    assert len(rec.events) == rec.n_steps + 1
    # damping removes energy monotonically up to the scheme's dt^2 wiggle
    assert np.diff(rec.energy).max() <= rec.dt ** 2 * rec.energy[0]


def test_simulate_rejects_event_mode_without_params(small_setup):
    g, cert, params, z0, z1, integ = small_setup
    with pytest.raises(ConfigurationError):
        wt.simulate(z0, z1, 1.0, g, integ, mode="event-triggered")


def test_simulate_blowup_reports_step_index(small_setup):
    # sample-and-hold damping far beyond 2/dt is unstable and must be
    # reported as a blow-up with the failing step, not as NaN output
    g, cert, params, z0, z1, integ = small_setup
    with pytest.raises(BlowUpError) as err:
        wt.simulate(z0, z1, 5000.0, g, integ, mode="continuous-damping")
    assert err.value.step is not None and err.value.step > 0


def test_wavestate_validation():
    g = wt.build_grid(wt.Interval(1.0, 49))
    other = wt.build_grid(wt.Interval(2.0, 49))
    with pytest.raises(ConfigurationError):
        wt.WaveState(t=0.0, z=sine_mode(g, 1), v=sine_mode(other, 1), held=zero_field(g), k=0, t_k=0.0)
    with pytest.raises(ConfigurationError):
        wt.WaveState(t=1.0, z=sine_mode(g, 1), v=zero_field(g), held=zero_field(g), k=0, t_k=2.0)
