"""Smooth solution of the inviscid Burgers equation with tanh initial data.

    w_t + w w_x = 0,   w(0, x) = (w_r + w_l)/2 + (w_r - w_l)/2 tanh x

For w_l <= w_r characteristics never cross and w(t, x) is the unique root of
w = w0(x - w t) in [w_l, w_r].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit


def sech2(x):
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


@dataclass(frozen=True)
class BurgersProfile:
    w_l: float
    w_r: float

    def __post_init__(self):
        if self.w_r < self.w_l:
            raise ValueError(f"need w_l <= w_r, got w_l={self.w_l!r}, w_r={self.w_r!r}")

    @property
    def jump(self) -> float:
        return self.w_r - self.w_l

    def initial(self, x):
        # clipped so that roundoff in the far tails cannot leave [w_l, w_r]
        return np.clip(0.5 * (self.w_r + self.w_l) + 0.5 * self.jump * np.tanh(x), self.w_l, self.w_r)

    def initial_deriv(self, x):
        return 0.5 * self.jump * sech2(x)

    def initial_deriv2(self, x):
        return -self.jump * np.tanh(x) * sech2(x)

    def foot(self, t, x):
        """Foot x0 = x - w t of the characteristic through (t, x), with w there."""
        w = burgers_eval(self, t, x)
        return x - w * t, w


def burgers_eval(profile: BurgersProfile, t, x):
    """w(t, x) by bisection on [w_l, w_r] followed by two Newton polish steps."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    if profile.jump == 0.0:
        return np.full(np.broadcast(t, x).shape, profile.w_l)
    t, x = np.broadcast_arrays(t, x)
    if not np.any(t):
        return profile.initial(x)

    if x.size <= 8:
        return np.reshape([_eval_scalar(profile, ti, xi) for ti, xi in zip(t.ravel(), x.ravel())], x.shape)

    # x0 = x - w t lies in [x - w_r t, x - w_l t] and w0 is increasing
    lo = np.maximum(profile.initial(x - profile.w_r * t), profile.w_l)
    hi = np.minimum(profile.initial(x - profile.w_l * t), profile.w_r)
    width = 1e-12 * profile.jump
    # G(w) = w - w0(x - w t) is increasing; G(w_l) <= 0 <= G(w_r)
    while np.max(hi - lo) > width:
        mid = 0.5 * (lo + hi)
        g = mid - profile.initial(x - mid * t)
        neg = g < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    w = 0.5 * (lo + hi)
    for _ in range(2):
        x0 = x - w * t
        g = w - profile.initial(x0)
        w = w - g / (1.0 + t * profile.initial_deriv(x0))
    w = np.clip(w, profile.w_l, profile.w_r)
    return w


def _eval_scalar(profile, t, x):
    # same algorithm as the vectorised path; numpy overhead dominates for a handful of points
    wl, wr = profile.w_l, profile.w_r
    mean, half = 0.5 * (wr + wl), 0.5 * (wr - wl)
    lo = max(mean + half * math.tanh(x - wr * t), wl)
    hi = min(mean + half * math.tanh(x - wl * t), wr)
    width = 1e-12 * (wr - wl)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid - (mean + half * math.tanh(x - mid * t)) < 0:
            lo = mid
        else:
            hi = mid
    w = 0.5 * (lo + hi)
    for _ in range(2):
        x0 = x - w * t
        g = w - (mean + half * math.tanh(x0))
        e = math.exp(-2.0 * abs(x0))
        w -= g / (1.0 + t * half * 4.0 * e / (1.0 + e) ** 2)
    return min(max(w, wl), wr)


def burgers_derivs(profile: BurgersProfile, t, x):
    """(w, w_x, w_xx) at (t, x).

    With f = w0'(x0): w_x = f / (1 + t f) and w_xx = w0''(x0) / (1 + t f)^3.
    """
    w = burgers_eval(profile, t, x)
    x0 = np.asarray(x, dtype=float) - w * t
    f = profile.initial_deriv(x0)
    denom = 1.0 + t * f
    return w, f / denom, profile.initial_deriv2(x0) / denom**3


def burgers_deriv(profile: BurgersProfile, t, x):
    return burgers_derivs(profile, t, x)[1]


def burgers_gaps(profile: BurgersProfile, t, x):
    """(w - w_l, w_r - w) computed from the characteristic foot, free of cancellation."""
    w = burgers_eval(profile, t, x)
    x0 = np.asarray(x, dtype=float) - w * t
    return profile.jump * expit(2.0 * x0), profile.jump * expit(-2.0 * x0)
