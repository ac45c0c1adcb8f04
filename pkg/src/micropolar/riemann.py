"""Wave-curve algebra of the Lagrangian Euler system.

Only the rarefaction / contact / rarefaction pattern is handled: the left
state is joined to a middle state by a 1-rarefaction, the two middle states
share velocity and pressure across a contact, and a 3-rarefaction joins the
right middle state to the right state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .thermo import Family, GasParams, ThermoState, char_speed, isentrope_constant, pressure


class PatternMismatchError(ValueError):
    """The end states are not joined by two rarefactions and a contact."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class Region(str, Enum):
    OMEGA_MINUS = "Omega_minus"
    OMEGA_C = "Omega_c"
    OMEGA_PLUS = "Omega_plus"


@dataclass(frozen=True)
class EndStates:
    left: ThermoState
    right: ThermoState
    omega_far: tuple[float, float] = (0.0, 0.0)

    @property
    def delta(self) -> float:
        return abs(self.right.theta - self.left.theta)

    def satisfies_contact(self, params: GasParams, tol: float = 1e-10) -> bool:
        """u_- = u_+ and p_- = p_+ (the end states form a single contact)."""
        p_l = pressure(params, self.left.v, self.left.theta)
        p_r = pressure(params, self.right.v, self.right.theta)
        return abs(self.left.u - self.right.u) <= tol and abs(p_l - p_r) <= tol * max(p_l, p_r)

    def to_dict(self) -> dict:
        return {"left": self.left.to_dict(), "right": self.right.to_dict(), "omega_far": list(self.omega_far)}


@dataclass(frozen=True)
class WavePattern:
    params: GasParams
    end: EndStates
    mid_left: ThermoState
    mid_right: ThermoState
    p_mid: float
    residual: float = 0.0
    iterations: int = 0
    strengths: tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))

    @property
    def u_mid(self) -> float:
        return self.mid_left.u

    @property
    def delta(self) -> float:
        return self.end.delta

    @property
    def strength_ratio(self) -> float | None:
        """Largest middle-state deviation divided by |theta_+ - theta_-|."""
        if self.delta == 0.0:
            return None
        l, r = self.end.left, self.end.right
        dev_l = abs(self.mid_left.v - l.v) + abs(self.u_mid - l.u) + abs(self.mid_left.theta - l.theta)
        dev_r = abs(self.mid_right.v - r.v) + abs(self.u_mid - r.u) + abs(self.mid_right.theta - r.theta)
        return max(dev_l, dev_r) / self.delta

    def mid_speeds(self) -> tuple[float, float]:
        """lambda_-(v_-^m, s_-) and lambda_+(v_+^m, s_+)."""
        return (
            float(char_speed(self.params, self.mid_left.v, self.mid_left.theta, Family.MINUS)),
            float(char_speed(self.params, self.mid_right.v, self.mid_right.theta, Family.PLUS)),
        )

    def to_dict(self) -> dict:
        return {
            "left": self.end.left.to_dict(),
            "right": self.end.right.to_dict(),
            "mid_left": self.mid_left.to_dict(),
            "mid_right": self.mid_right.to_dict(),
            "u_mid": self.u_mid,
            "p_mid": self.p_mid,
            "delta": self.delta,
            "strengths": {
                "rarefaction_minus": self.strengths[0],
                "contact": self.strengths[1],
                "rarefaction_plus": self.strengths[2],
            },
            "strength_ratio": self.strength_ratio,
            "residual": self.residual,
            "iterations": self.iterations,
        }


def rarefaction_state(params: GasParams, anchor: ThermoState, family: Family | str, v: float) -> ThermoState:
    """State at specific volume ``v`` on the rarefaction curve of ``family`` through ``anchor``.

    The curve keeps the anchor's entropy and u = u_a - int_{v_a}^{v} lambda(eta, s_a) d eta,
    integrated in closed form since lambda is a power of eta.
    """
    if not v > 0:
        raise ValueError(f"specific volume must be positive, got {v!r}")
    family = Family(family)
    g = params.gamma
    k = 0.5 * (g - 1.0)
    K = isentrope_constant(params, anchor.v, anchor.theta)
    integral = family.sign * K / k * (anchor.v ** (-k) - v ** (-k))
    return ThermoState(
        v=float(v),
        u=float(anchor.u - integral),
        theta=float(anchor.theta * (anchor.v / v) ** (g - 1.0)),
    )


def _mid_states(params, end, x):
    mid_l = rarefaction_state(params, end.left, Family.MINUS, x[0])
    mid_r = rarefaction_state(params, end.right, Family.PLUS, x[1])
    return mid_l, mid_r


def _contact_residual(params, end, x, p_scale):
    mid_l, mid_r = _mid_states(params, end, x)
    return np.array([
        mid_l.u - mid_r.u,
        (pressure(params, mid_l.v, mid_l.theta) - pressure(params, mid_r.v, mid_r.theta)) / p_scale,
    ])


def solve_pattern(
    params: GasParams,
    end: EndStates,
    tol: float = 1e-12,
    max_iter: int = 60,
    delta_cap: float | None = None,
) -> WavePattern:
    """Find the middle states of the R_- C R_+ pattern joining ``end.left`` to ``end.right``.

    Newton iteration on (v_-^m, v_+^m) with a finite-difference Jacobian and
    step halving; the residual is the velocity and relative pressure jump
    across the contact.
    """
    if delta_cap is not None and end.delta > delta_cap:
        raise PatternMismatchError(
            f"pattern mismatch: |theta_+ - theta_-| = {end.delta:.6g} exceeds the admissible cap {delta_cap:.6g}"
        )
    p_scale = float(pressure(params, end.left.v, end.left.theta))
    x = np.array([end.left.v, end.right.v], dtype=float)
    res = _contact_residual(params, end, x, p_scale)
    norm = np.max(np.abs(res))
    it = 0
    while norm > tol:
        if it >= max_iter:
            raise ConvergenceError("middle-state iteration did not converge", norm)
        it += 1
        jac = np.empty((2, 2))
        for j in range(2):
            h = 1e-7 * x[j]
            xp, xm = x.copy(), x.copy()
            xp[j] += h
            xm[j] -= h
            jac[:, j] = (_contact_residual(params, end, xp, p_scale) - _contact_residual(params, end, xm, p_scale)) / (2 * h)
        try:
            dx = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in middle-state iteration", norm) from exc
        if np.max(np.abs(dx) / x) < 1e-15 and norm < 1e3 * tol:
            break  # round-off floor
        lam = 1.0
        while True:
            trial = x + lam * dx
            if np.all(trial > 0):
                trial_res = _contact_residual(params, end, trial, p_scale)
                trial_norm = np.max(np.abs(trial_res))
                if trial_norm < norm or lam < 1e-6:
                    break
            lam *= 0.5
            if lam < 1e-12:
                raise ConvergenceError("step halving failed in middle-state iteration", norm)
        x, res, norm = trial, trial_res, trial_norm

    # rarefaction branches need v^m >= v_+-; anything else calls for a shock
    slack = 1e-9
    if x[0] < end.left.v * (1 - slack) or x[1] < end.right.v * (1 - slack):
        raise PatternMismatchError(
            "pattern mismatch: the right state is not reachable by two rarefactions and a contact "
            f"(v_-^m/v_- = {x[0] / end.left.v:.6g}, v_+^m/v_+ = {x[1] / end.right.v:.6g})"
        )
    x = np.maximum(x, [end.left.v, end.right.v])
    mid_l, mid_r = _mid_states(params, end, x)
    p_mid = float(pressure(params, mid_l.v, mid_l.theta))
    strengths = (
        abs(mid_l.u - end.left.u),
        abs(mid_r.theta - mid_l.theta),
        abs(end.right.u - mid_r.u),
    )
    return WavePattern(
        params=params,
        end=end,
        mid_left=mid_l,
        mid_right=ThermoState(v=mid_r.v, u=mid_l.u, theta=mid_r.theta),
        p_mid=p_mid,
        residual=float(norm),
        iterations=it,
        strengths=strengths,
    )


def classify_domain(point: tuple[float, float], pattern: WavePattern) -> Region:
    """Region of (t, x): Omega_-: 2x < lambda_-^m t, Omega_+: 2x > lambda_+^m t, else Omega_c (closed)."""
    t, x = point
    lam_m, lam_p = pattern.mid_speeds()
    if 2 * x < lam_m * t:
        return Region.OMEGA_MINUS
    if 2 * x > lam_p * t:
        return Region.OMEGA_PLUS
    return Region.OMEGA_C


def region_masks(t: float, x: np.ndarray, pattern: WavePattern) -> dict[Region, np.ndarray]:
    lam_m, lam_p = pattern.mid_speeds()
    x = np.asarray(x, dtype=float)
    minus = 2 * x < lam_m * t
    plus = 2 * x > lam_p * t
    return {Region.OMEGA_MINUS: minus, Region.OMEGA_C: ~(minus | plus), Region.OMEGA_PLUS: plus}

