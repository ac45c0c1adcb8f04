"""Self-similar solution of the nonlinear diffusion equation

    Theta_t = a kappa (Theta_x / Theta)_x,   Theta(t, +-inf) = theta_+-.

With xi = x / sqrt(1 + t) the profile solves the two-point problem

    a kappa (Theta' / Theta)' + (xi / 2) Theta' = 0,   Theta(-inf) = theta_-, Theta(inf) = theta_+,

truncated to [-Xi, Xi] and solved by Newton relaxation on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import solve_banded
from scipy.special import erf

from ..thermo import GasParams


class BVPError(RuntimeError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def diffusion_coefficient(params: GasParams, p: float) -> float:
    """a kappa with a = p (gamma - 1) / (gamma R^2)."""
    return params.kappa * p * (params.gamma - 1.0) / (params.gamma * params.R**2)


def default_half_width(a_kappa: float) -> float:
    return 12.0 * math.sqrt(2.0 * a_kappa)


@dataclass(frozen=True, eq=False)
class SelfSimilarProfile:
    theta_minus: float
    theta_plus: float
    a_kappa: float
    xi: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    residual: float
    iterations: int

    def __post_init__(self):
        # Theta'' from the ODE so that the Hermite interpolant of Theta' is consistent with it
        y, y1 = self.values, self.derivs
        z = y1 / y
        z1 = -self.xi * y * z / (2.0 * self.a_kappa)
        y2 = y1 * z + y * z1
        object.__setattr__(self, "_spline", CubicHermiteSpline(self.xi, y, y1, extrapolate=False))
        object.__setattr__(self, "_dspline", CubicHermiteSpline(self.xi, y1, y2, extrapolate=False))

    @property
    def half_width(self) -> float:
        return float(self.xi[-1])

    @property
    def delta(self) -> float:
        return abs(self.theta_plus - self.theta_minus)

    def __call__(self, xi):
        return self.jet(xi)[0]

    def jet(self, xi):
        """Theta and its xi-derivatives up to third order, plus z = (ln Theta)' and z', z''.

        Only Theta and Theta' are interpolated; higher derivatives follow from
        the ODE, z' = -xi Theta z / (2 a kappa).
        """
        xi = np.asarray(xi, dtype=float)
        inside = np.abs(xi) <= self.half_width
        xc = np.clip(xi, -self.half_width, self.half_width)
        y = np.where(inside, self._spline(xc), np.where(xi < 0, self.theta_minus, self.theta_plus))
        y1 = np.where(inside, self._dspline(xc), 0.0)
        d2 = 2.0 * self.a_kappa
        z = y1 / y
        z1 = -xi * y * z / d2
        z2 = -(y * z + xi * y1 * z + xi * y * z1) / d2
        y2 = y1 * z + y * z1
        y3 = y2 * z + 2.0 * y1 * z1 + y * z2
        return y, y1, y2, y3, z, z1, z2

    def ode_residual(self):
        """Discrete residual of the relaxation scheme on the stored grid."""
        return _residual(self.values, self.xi, self.a_kappa)[1:-1]


def _residual(theta, xi, a_kappa):
    h = xi[1] - xi[0]
    ln = np.log(theta)
    res = np.zeros_like(theta)
    res[1:-1] = a_kappa * (ln[2:] - 2.0 * ln[1:-1] + ln[:-2]) / h**2 + xi[1:-1] * (theta[2:] - theta[:-2]) / (4.0 * h)
    return res


def _jacobian_bands(theta, xi, a_kappa):
    h = xi[1] - xi[0]
    xi_i = xi[1:-1]
    lower = a_kappa / (h**2 * theta[:-2]) - xi_i / (4.0 * h)
    diag = -2.0 * a_kappa / (h**2 * theta[1:-1])
    upper = a_kappa / (h**2 * theta[2:]) + xi_i / (4.0 * h)
    m = len(xi_i)
    ab = np.zeros((3, m))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return ab


def solve_selfsimilar(
    params: GasParams,
    theta_minus: float,
    theta_plus: float,
    p: float,
    Xi: float | None = None,
    n: int = 4001,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> SelfSimilarProfile:
    """Solve the truncated similarity problem for far-field temperatures theta_-+ at pressure p."""
    if not (theta_minus > 0 and theta_plus > 0):
        raise ValueError("far-field temperatures must be positive")
    if n < 5:
        raise ValueError("need at least 5 grid points")
    a_kappa = diffusion_coefficient(params, p)
    if Xi is None:
        Xi = default_half_width(a_kappa)
    delta = abs(theta_plus - theta_minus)
    tail = math.exp(-Xi**2 * min(theta_minus, theta_plus, 1.0) / (4.0 * a_kappa)) * delta
    if tail >= tol:
        raise BVPError(f"truncation half-width Xi={Xi:.4g} too small for tolerance {tol:.1e}", tail)

    xi = np.linspace(-Xi, Xi, n)
    theta = theta_minus + (theta_plus - theta_minus) * 0.5 * (1.0 + erf(xi / math.sqrt(4.0 * a_kappa)))
    theta[0], theta[-1] = theta_minus, theta_plus
    res = _residual(theta, xi, a_kappa)
    norm = float(np.max(np.abs(res)))
    it = 0
    while norm > tol:
        if it >= max_iter:
            raise BVPError("Newton relaxation did not converge", norm)
        it += 1
        step = solve_banded((1, 1), _jacobian_bands(theta, xi, a_kappa), -res[1:-1])
        lam = 1.0
        while True:
            trial = theta.copy()
            trial[1:-1] += lam * step
            if np.all(trial > 0):
                trial_res = _residual(trial, xi, a_kappa)
                trial_norm = float(np.max(np.abs(trial_res)))
                if trial_norm < norm:
                    break
            lam *= 0.5
            if lam < 1e-10:
                raise BVPError("damped Newton step failed to reduce the residual", norm)
        theta, res, norm = trial, trial_res, trial_norm

    h = xi[1] - xi[0]
    ln = np.log(theta)
    z = np.empty_like(theta)
    z[1:-1] = (ln[2:] - ln[:-2]) / (2.0 * h)
    z[0] = (-3.0 * ln[0] + 4.0 * ln[1] - ln[2]) / (2.0 * h)
    z[-1] = (3.0 * ln[-1] - 4.0 * ln[-2] + ln[-3]) / (2.0 * h)
    return SelfSimilarProfile(
        theta_minus=float(theta_minus),
        theta_plus=float(theta_plus),
        a_kappa=a_kappa,
        xi=xi,
        values=theta,
        derivs=theta * z,
        residual=norm,
        iterations=it,
    )


def fit_tail_decay(profile: SelfSimilarProfile, lo: float = 1e-12, hi: float = 1e-3):
    """Fit |Theta - theta_+-| ~ C delta exp(-c0 xi^2) on both tails; returns (c0, C).

    c0 is the smaller of the two tail rates.
    """
    delta = profile.delta
    if delta == 0.0:
        return float("inf"), 0.0
    rates, consts = [], []
    for sign, far in ((-1.0, profile.theta_minus), (1.0, profile.theta_plus)):
        gap = np.abs(profile.values - far) / delta
        sel = (sign * profile.xi > 0) & (gap > lo) & (gap < hi)
        if np.count_nonzero(sel) < 4:
            raise BVPError("not enough tail points to fit the Gaussian decay")
        slope, intercept = np.polyfit(profile.xi[sel] ** 2, np.log(gap[sel]), 1)
        rates.append(-slope)
        consts.append(math.exp(intercept))
    return float(min(rates)), float(max(consts))
