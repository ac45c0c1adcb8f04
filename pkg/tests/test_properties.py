"""Invariants checked over generated inputs."""

import math

import numpy as np
import pytest
import yaml
from hypothesis import HealthCheck, assume, example, given, settings
from hypothesis import strategies as st

from micropolar import diagnostics as dg
from micropolar.config import RunConfig, load_config
from micropolar.oracles import curve_state_quad, forward_pattern
from micropolar.profiles import BurgersProfile, burgers_deriv, burgers_eval, burgers_gaps
from micropolar.riemann import rarefaction_state, solve_pattern
from micropolar.solver import Grid, SimState, Solver
from micropolar.thermo import (
    Family,
    GasParams,
    ThermoState,
    char_speed,
    char_speed_entropy_form,
    entropy,
    pressure,
    pressure_from_entropy,
)

pos = st.floats(0.05, 20.0, allow_nan=False)
gammas = st.floats(1.05, 3.0)
gas = st.builds(GasParams, R=st.floats(0.1, 10.0), gamma=gammas, kappa=st.floats(0.1, 5.0),
                A=st.floats(0.1, 5.0), B=st.floats(0.1, 5.0))
families = st.sampled_from(list(Family))
fast = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])


@fast
@given(gas, pos, pos)
def test_pressure_entropy_roundtrip(p, v, theta):
    s = entropy(p, v, theta)
    assert pressure_from_entropy(p, v, s) == pytest.approx(pressure(p, v, theta), rel=1e-12)


@fast
@given(gas, pos, pos, families)
def test_char_speed_forms(p, v, theta, fam):
    s = entropy(p, v, theta)
    a = char_speed(p, v, theta, fam)
    assert char_speed_entropy_form(p, v, s, fam) == pytest.approx(a, rel=1e-12)
    assert np.sign(a) == fam.sign


@fast
@given(gas, pos, pos, st.floats(-2, 2), families, st.floats(0.5, 2.0))
def test_rarefaction_curve_matches_quadrature(p, v, theta, u, fam, ratio):
    a = ThermoState(v, u, theta)
    s = rarefaction_state(p, a, fam, v * ratio)
    q = curve_state_quad(p, a, fam, v * ratio)
    scale = abs(float(char_speed(p, v, theta, fam))) * v
    assert s.u == pytest.approx(q.u, abs=1e-9 * max(1.0, scale))
    assert s.theta == pytest.approx(q.theta, rel=1e-10)
    assert entropy(p, s.v, s.theta) == pytest.approx(entropy(p, v, theta), abs=1e-10 * max(1.0, abs(entropy(p, v, theta))))


@fast
@given(st.floats(-3, 3), st.floats(0.0, 3.0), st.floats(0, 100), st.floats(-200, 200))
@example(0.845685971541666, 0.845685971541666, 0.0, -19.0)  # tanh tail rounding below w_l
def test_burgers_bounds_and_monotone(w_l, jump, t, x):
    assume(jump > 1e-3)
    prof = BurgersProfile(w_l, w_l + jump)
    w = float(burgers_eval(prof, t, np.array([x]))[0])
    assert w_l <= w <= w_l + jump
    lo, hi = burgers_gaps(prof, np.array([t]), np.array([x]))
    assert lo[0] >= 0 and hi[0] >= 0
    assert burgers_deriv(prof, t, np.array([x]))[0] >= 0
    # characteristic through (t, x) starts at x - w t with w = w0(x0)
    x0 = x - w * t
    assert w == pytest.approx(prof.initial(x0), abs=1e-9 * (1 + t))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(-0.5, 0.5), st.floats(0.5, 2.0), st.floats(1.0, 1.1), st.floats(0.92, 1.08),
       st.floats(1.0, 1.1))
def test_pattern_roundtrip(v, u, theta, exp_l, contact, exp_r):
    p = GasParams()
    fp = forward_pattern(p, ThermoState(v, u, theta), v * exp_l, contact, expansion_right=exp_r)
    pat = solve_pattern(p, fp.end)
    for got, want in ((pat.mid_left, fp.mid_left), (pat.mid_right, fp.mid_right)):
        assert (got.v, got.u, got.theta) == pytest.approx((want.v, want.u, want.theta), abs=1e-8)
    assert pat.mid_left.u == pat.mid_right.u
    p_l = pressure(p, pat.mid_left.v, pat.mid_left.theta)
    p_r = pressure(p, pat.mid_right.v, pat.mid_right.theta)
    assert abs(p_l - p_r) <= 1e-10 * pat.p_mid


class _Bc:
    def __init__(self, left, right):
        self.left, self.right = left, right

    def state_at(self, t, x):
        x = np.asarray(x, dtype=float)
        return tuple(np.where(x < 0, a, b) for a, b in zip(self.left, self.right))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["linear", "minmod", "constant"]))
def test_conservation_telescopes(seed, kind):
    rng = np.random.default_rng(seed)
    p = GasParams()
    n = 64
    g = Grid(10.0, n)
    v = rng.uniform(0.8, 1.5, n)
    u = rng.uniform(-0.2, 0.2, n)
    th = rng.uniform(0.8, 1.5, n)
    w = rng.uniform(-0.2, 0.2, n)
    bc = _Bc((1.0, 0.1, 1.0, 0.0), (1.2, -0.1, 1.1, 0.0))
    s = SimState(0.0, v, u, th, w, p, g)
    solver = Solver(p, g, bc, reconstruction=kind)
    k = solver.rhs(s)
    assert abs(np.sum(k.dv) * g.dx - k.mass_inflow) <= 1e-12
    assert abs(np.sum(k.du) * g.dx - k.momentum_inflow) <= 1e-12
    dt = 0.1 * solver.stable_dt(s)
    new, inflow = solver.step(s, dt)
    assert abs(np.sum(new.v - v) * g.dx - inflow["mass_inflow"]) <= 1e-12
    assert abs(np.sum(new.u - u) * g.dx - inflow["momentum_inflow"]) <= 1e-12


@fast
@given(st.lists(st.floats(-5, 5), min_size=8, max_size=8), st.floats(0.1, 4.0))
def test_norm_ordering(coefs, width):
    x = np.linspace(-10, 10, 801)
    f = sum(c * np.exp(-width * (x - k + 4) ** 2) for k, c in enumerate(coefs))
    n = dg.field_norms(f, x)
    assert 0.0 <= n["l2"] <= n["h1"] <= n["h2"]
    assert n["linf"] >= 0.0


@fast
@given(st.floats(-3.0, 0.0), st.floats(-5.0, 5.0), st.integers(3, 12))
def test_fit_decay_recovers_power(slope, logc, k):
    t = np.geomspace(1, 100, k)
    fit = dg.fit_decay(t, math.exp(logc) * (1 + t) ** slope)
    assert fit.slope == pytest.approx(slope, abs=1e-9)
    assert fit.intercept == pytest.approx(logc, abs=1e-9)


@fast
@given(st.floats(0.05, 20.0), st.floats(0.0, 50.0))
def test_kernel_identity(alpha, t):
    w = dg.KernelWeight(alpha)
    x = np.linspace(-5, 5, 41) / math.sqrt(alpha)
    h = 1e-4 * (1 + t)
    gt = (w.g(t + h, x) - w.g(t - h, x)) / (2 * h)
    np.testing.assert_allclose(4 * alpha * gt, w.h_x(t, x), atol=1e-6)
    np.testing.assert_allclose(4 * alpha * w.g_t(t, x), w.h_x(t, x), atol=1e-14)
    assert np.all(w.g(t, x) <= w.g_sup * (1 + 1e-15))


@fast
@given(st.floats(1e-3, 1e3))
def test_entropy_phi_nonnegative(s):
    assert dg.entropy_phi(s) >= 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(16, 2**14), st.floats(1.0, 500.0), st.floats(1e-4, 0.5), st.floats(0.05, 1.0),
       st.booleans(), st.sampled_from(["linear", "minmod", "constant"]))
def test_config_roundtrip(n, L, amp, safety, omega, kind):
    cfg = load_config(None, [f"grid.n={n}", f"grid.L={L!r}", f"perturbation.amplitude={amp!r}",
                             f"time.safety={safety!r}", f"perturbation.fields.omega={str(omega).lower()}",
                             f"grid.reconstruction={kind}"])
    again = RunConfig.model_validate(yaml.safe_load(cfg.to_yaml()))
    assert again == cfg
