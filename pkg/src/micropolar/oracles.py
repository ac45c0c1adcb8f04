"""Independent reference computations used to verify the main modules.

None of these share code paths with the objects they check: rarefaction
curves are integrated by adaptive quadrature instead of the closed form,
Burgers solutions come from a finite-volume solver instead of
characteristics, and manufactured forcings are derived symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy as sp
from scipy import integrate

from .riemann import EndStates
from .thermo import Family, GasParams, ThermoState, char_speed_entropy_form, entropy, pressure


def curve_state_quad(params: GasParams, anchor: ThermoState, family: Family, v: float) -> ThermoState:
    """Rarefaction-curve state at volume v, integrating lambda(eta, s) numerically."""
    s = float(entropy(params, anchor.v, anchor.theta))
    integral, _ = integrate.quad(
        lambda eta: float(char_speed_entropy_form(params, eta, s, family)), anchor.v, v, epsabs=1e-14, epsrel=1e-13
    )
    # theta from the entropy relation solved for theta
    theta = params.B / params.R * math.exp((params.gamma - 1.0) / params.R * (s - params.R * math.log(v)))
    return ThermoState(v=v, u=anchor.u - integral, theta=theta)


@dataclass(frozen=True)
class ForwardPattern:
    end: EndStates
    mid_left: ThermoState
    mid_right: ThermoState
    p_mid: float


def forward_pattern(params: GasParams, left: ThermoState, v_mid_left: float, contact_ratio: float,
                    v_right: float | None = None, expansion_right: float | None = None) -> ForwardPattern:
    """Walk R_- from ``left`` to v_mid_left, jump across a contact with theta ratio
    ``contact_ratio`` at equal pressure, then walk R_+ back to v_right.

    The right end state is given either directly or as v_+^m / v_+ = ``expansion_right``.
    """
    mid_l = curve_state_quad(params, left, Family.MINUS, v_mid_left)
    p_m = float(pressure(params, mid_l.v, mid_l.theta))
    theta_r = contact_ratio * mid_l.theta
    mid_r = ThermoState(v=params.R * theta_r / p_m, u=mid_l.u, theta=theta_r)
    if v_right is None:
        v_right = mid_r.v / expansion_right
    right = curve_state_quad(params, mid_r, Family.PLUS, v_right)
    return ForwardPattern(EndStates(left, right), mid_l, mid_r, p_m)


def random_patterns(params: GasParams, count: int, delta_max: float = 0.2, seed: int = 0):
    """Forward-constructed patterns with total strength |theta_+ - theta_-| <= delta_max."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        left = ThermoState(v=rng.uniform(0.5, 2.0), u=rng.uniform(-0.5, 0.5), theta=rng.uniform(0.5, 2.0))
        fp = forward_pattern(params, left, left.v * rng.uniform(1.0, 1.1), rng.uniform(0.9, 1.1),
                             expansion_right=rng.uniform(1.0, 1.1))
        if fp.end.delta <= delta_max:
            out.append(fp)
    return out


# ---------------------------------------------------------------- Burgers


def _tanh_cell_average(profile, x_lo, x_hi):
    # average of the tanh data over each cell through the log-cosh antiderivative
    def logcosh(z):
        z = np.abs(z)
        return z + np.log1p(np.exp(-2.0 * z)) - math.log(2.0)

    mean = 0.5 * (profile.w_r + profile.w_l)
    half = 0.5 * (profile.w_r - profile.w_l)
    return mean + half * (logcosh(x_hi) - logcosh(x_lo)) / (x_hi - x_lo)


def _godunov_flux(a, b):
    # exact Riemann flux for f(w) = w^2 / 2
    fa, fb = 0.5 * a * a, 0.5 * b * b
    return np.where(a <= b, np.where(a > 0, fa, np.where(b < 0, fb, 0.0)), np.maximum(fa, fb))


def burgers_fv(profile, times, x_range: float = 30.0, dx: float = 0.01, cfl: float = 0.4):
    """Finite-volume Burgers solve (Godunov flux, minmod MUSCL, SSP-RK2).

    Returns (x, {t: cell averages}) on the cells whose centres lie in [-x_range, x_range].
    The domain is padded so that no information from its ends reaches the window.
    """
    times = sorted(times)
    smax = max(abs(profile.w_l), abs(profile.w_r), 1e-12)
    pad = smax * times[-1] + 15.0
    half = x_range + pad
    n = int(round(2 * half / dx))
    edges = -half + dx * np.arange(n + 1)
    x = 0.5 * (edges[1:] + edges[:-1])
    w = _tanh_cell_average(profile, edges[:-1], edges[1:])

    def rhs(q):
        ext = np.concatenate([[q[0], q[0]], q, [q[-1], q[-1]]])
        fwd = ext[2:] - ext[1:-1]
        bwd = ext[1:-1] - ext[:-2]
        slope = np.where(fwd * bwd > 0, np.sign(fwd) * np.minimum(np.abs(fwd), np.abs(bwd)), 0.0)
        c = ext[1:-1]
        left = c[:-1] + 0.5 * slope[:-1]
        right = c[1:] - 0.5 * slope[1:]
        flux = _godunov_flux(left, right)
        return -(flux[1:] - flux[:-1]) / dx

    out = {}
    t = 0.0
    if times[0] == 0.0:
        out[0.0] = w.copy()
    dt_max = cfl * dx / smax
    for target in times:
        while t < target - 1e-12:
            dt = min(dt_max, target - t)
            w1 = w + dt * rhs(w)
            w = 0.5 * (w + w1 + dt * rhs(w1))
            t += dt
        out[target] = w.copy()
    keep = np.abs(x) <= x_range
    return x[keep], {k: val[keep] for k, val in out.items()}


# ---------------------------------------------------------------- manufactured solutions


class Manufactured:
    """Smooth exact solution with the forcing that makes it solve the full system.

    The forcing is derived symbolically and compiled to numpy.
    """

    def __init__(self, params: GasParams, expressions=None):
        t, x = sp.symbols("t x", real=True)
        if expressions is None:
            expressions = (
                sp.Rational(3, 2) + sp.Rational(1, 5) * sp.sin(x - t / 2),
                sp.Rational(3, 10) * sp.cos(x + 3 * t / 10),
                sp.Rational(6, 5) + sp.Rational(1, 5) * sp.cos(x - 2 * t / 5),
                sp.Rational(3, 10) * sp.sin(x + t / 5),
            )
        v, u, th, w = expressions
        R, g, kappa, A = (sp.nsimplify(val) for val in (params.R, params.gamma, params.kappa, params.A))
        p = R * th / v
        cv = R / (g - 1)
        f_v = sp.diff(v, t) - sp.diff(u, x)
        f_u = sp.diff(u, t) + sp.diff(p, x)
        f_th = sp.diff(th, t) - (-p * sp.diff(u, x) + sp.diff(kappa * sp.diff(th, x) / v, x)
                                  + sp.diff(w, x) ** 2 / v + v * w**2) / cv
        f_w = sp.diff(w, t) - A * (sp.diff(sp.diff(w, x) / v, x) - v * w)
        self.params = params
        self._exact = sp.lambdify((t, x), [v, u, th, w], "numpy")
        self._forcing = sp.lambdify((t, x), [f_v, f_u, f_th, f_w], "numpy", cse=True)

    @staticmethod
    def _broadcast(vals, x):
        return tuple(np.broadcast_to(np.asarray(a, dtype=float), np.shape(x)).copy() for a in vals)

    def state_at(self, t, x):
        return self._broadcast(self._exact(t, np.asarray(x, dtype=float)), x)

    def forcing(self, t, x):
        return self._broadcast(self._forcing(t, np.asarray(x, dtype=float)), x)
