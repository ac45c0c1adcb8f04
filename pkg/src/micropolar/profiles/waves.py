"""Space-time wave profiles: viscous contact, smooth rarefactions and their superposition.

Every profile evaluates to a :class:`ProfileValues` bundle holding (V, U, Theta)
together with analytic first and second x-derivatives and first t-derivatives.
The microrotation component of all profiles is identically zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from ..riemann import EndStates, WavePattern
from ..thermo import Family, GasParams, ThermoState, char_speed, entropy, isentrope_constant, pressure
from .burgers import BurgersProfile, burgers_derivs, burgers_eval
from .selfsimilar import SelfSimilarProfile, solve_selfsimilar


@dataclass
class ProfileValues:
    V: np.ndarray
    U: np.ndarray
    Theta: np.ndarray
    V_x: np.ndarray
    U_x: np.ndarray
    Theta_x: np.ndarray
    V_xx: np.ndarray
    U_xx: np.ndarray
    Theta_xx: np.ndarray
    V_t: np.ndarray
    U_t: np.ndarray
    Theta_t: np.ndarray

    @classmethod
    def constant(cls, shape, v, u, theta):
        zero = np.zeros(shape)
        return cls(np.full(shape, float(v)), np.full(shape, float(u)), np.full(shape, float(theta)),
                   *(zero.copy() for _ in range(9)))

    def pressure(self, params: GasParams):
        return params.R * self.Theta / self.V

    def pressure_x(self, params: GasParams):
        return params.R * (self.Theta_x * self.V - self.Theta * self.V_x) / self.V**2


class ProfileField:
    """An evaluable space-time profile (V, U, Theta, W = 0)."""

    kind = "profile"

    def __init__(self, params: GasParams):
        self.params = params

    def evaluate(self, t: float, x) -> ProfileValues:
        raise NotImplementedError

    def state_at(self, t: float, x):
        """(V, U, Theta, W) arrays, the form used for solver boundary data."""
        vals = self.evaluate(t, x)
        return vals.V, vals.U, vals.Theta, np.zeros_like(vals.V)


class ContactWave(ProfileField):
    """Viscous contact wave built on the self-similar temperature profile.

    V = R Theta / p,  U = u + kappa (gamma - 1) / (gamma R) Theta_x / Theta,
    Theta(t, x) = Theta(x / sqrt(1 + t)).
    """

    kind = "contact"

    def __init__(self, params: GasParams, p: float, u: float, profile: SelfSimilarProfile):
        super().__init__(params)
        self.p = float(p)
        self.u = float(u)
        self.profile = profile
        self.coef = params.kappa * (params.gamma - 1.0) / (params.gamma * params.R)

    def evaluate(self, t, x):
        x = np.asarray(x, dtype=float)
        s = math.sqrt(1.0 + t)
        xi = x / s
        y, y1, y2, _, z, z1, z2 = self.profile.jet(xi)
        R, p, c = self.params.R, self.p, self.coef
        theta_x = y1 / s
        theta_xx = y2 / s**2
        theta_t = -0.5 * xi * y1 / (1.0 + t)
        return ProfileValues(
            V=R * y / p,
            U=self.u + c * z / s,
            Theta=y,
            V_x=R * theta_x / p,
            U_x=c * z1 / s**2,
            Theta_x=theta_x,
            V_xx=R * theta_xx / p,
            U_xx=c * z2 / s**3,
            Theta_xx=theta_xx,
            V_t=R * theta_t / p,
            U_t=-0.5 * c * (xi * z1 + z) / s**3,
            Theta_t=theta_t,
        )

    def state_at(self, t, x):
        x = np.asarray(x, dtype=float)
        s = math.sqrt(1.0 + t)
        y, _, _, _, z, _, _ = self.profile.jet(x / s)
        return self.params.R * y / self.p, self.u + self.coef * z / s, y, np.zeros_like(y)


class RarefactionWave(ProfileField):
    """Smooth approximate rarefaction: lambda(V, s_anchor) = w(t + 1, x) with w a Burgers solution."""

    def __init__(self, params: GasParams, anchor: ThermoState, family: Family, burgers: BurgersProfile):
        super().__init__(params)
        self.anchor = anchor
        self.family = Family(family)
        self.burgers = burgers
        self.K = float(isentrope_constant(params, anchor.v, anchor.theta))
        self.kind = f"rarefaction_{self.family.value}"

    def _values(self, w):
        if np.any(self.family.sign * w <= 0):
            raise RuntimeError("Burgers value left the characteristic-speed range of the rarefaction curve")
        g = self.params.gamma
        k = 0.5 * (g - 1.0)
        a = self.anchor
        V = (self.K / np.abs(w)) ** (2.0 / (g + 1.0))
        U = a.u - self.family.sign * self.K / k * (a.v ** (-k) - V ** (-k))
        return V, U, a.theta * (a.v / V) ** (g - 1.0)

    def state_at(self, t, x):
        w = burgers_eval(self.burgers, t + 1.0, np.asarray(x, dtype=float))
        V, U, Theta = self._values(w)
        return V, U, Theta, np.zeros_like(V)

    def evaluate(self, t, x):
        x = np.asarray(x, dtype=float)
        g = self.params.gamma
        q = 2.0 / (g + 1.0)
        w, wx, wxx = burgers_derivs(self.burgers, t + 1.0, x)
        V, U, Theta = self._values(w)
        V_x = -q * V * wx / w
        V_xx = -q * (V_x * wx / w + V * wxx / w - V * wx**2 / w**2)
        V_t = q * V * wx
        Theta_x = (1.0 - g) * Theta * V_x / V
        return ProfileValues(
            V=V,
            U=U,
            Theta=Theta,
            V_x=V_x,
            U_x=-w * V_x,
            Theta_x=Theta_x,
            V_xx=V_xx,
            U_xx=-wx * V_x - w * V_xx,
            Theta_xx=(1.0 - g) * (Theta_x * V_x / V + Theta * V_xx / V - Theta * V_x**2 / V**2),
            V_t=V_t,
            U_t=-w * V_t,
            Theta_t=(1.0 - g) * Theta * V_t / V,
        )


class CompositeWave(ProfileField):
    """Rarefaction + contact + rarefaction minus the doubly counted middle states."""

    kind = "composite"

    def __init__(self, params: GasParams, pattern: WavePattern, contact: ContactWave,
                 rar_minus: RarefactionWave, rar_plus: RarefactionWave):
        super().__init__(params)
        self.pattern = pattern
        self.contact = contact
        self.rar_minus = rar_minus
        self.rar_plus = rar_plus
        ml, mr = pattern.mid_left, pattern.mid_right
        self.offset = (ml.v + mr.v, 2.0 * pattern.u_mid, ml.theta + mr.theta)

    def components(self, t, x) -> dict[str, ProfileValues]:
        return {
            "rarefaction_minus": self.rar_minus.evaluate(t, x),
            "contact": self.contact.evaluate(t, x),
            "rarefaction_plus": self.rar_plus.evaluate(t, x),
        }

    def evaluate(self, t, x):
        return superpose(self.components(t, x).values(), self.offset)

    def state_at(self, t, x):
        parts = [w.state_at(t, x) for w in (self.rar_minus, self.contact, self.rar_plus)]
        V, U, Theta = (sum(p[i] for p in parts) - off for i, off in enumerate(self.offset))
        return V, U, Theta, np.zeros_like(V)


def superpose(parts, offset) -> ProfileValues:
    parts = list(parts)
    total = {f.name: sum(getattr(p, f.name) for p in parts) for f in fields(ProfileValues)}
    total["V"] = total["V"] - offset[0]
    total["U"] = total["U"] - offset[1]
    total["Theta"] = total["Theta"] - offset[2]
    return ProfileValues(**total)


def contact_wave(params: GasParams, source: EndStates | WavePattern, profile: SelfSimilarProfile | None = None,
                 *, tol: float = 1e-8, **bvp) -> ContactWave:
    """Contact wave for end states joined by a contact, or for the middle states of a pattern."""
    if isinstance(source, WavePattern):
        left, right, u0, p = source.mid_left, source.mid_right, source.u_mid, source.p_mid
    else:
        if any(source.omega_far):
            raise ValueError("profiles need zero far-field microrotation")
        if not source.satisfies_contact(params, tol):
            raise ValueError("end states do not satisfy u_- = u_+ and p_- = p_+")
        left, right, u0 = source.left, source.right, source.left.u
        p = float(pressure(params, right.v, right.theta))
    if profile is None:
        profile = solve_selfsimilar(params, left.theta, right.theta, p, **bvp)
    return ContactWave(params, p, u0, profile)


def smooth_rarefaction(params: GasParams, anchor: ThermoState, mid: ThermoState, family: Family | str,
                       tol: float = 1e-9) -> RarefactionWave:
    """Smooth rarefaction joining ``anchor`` (an end state) and ``mid`` (the adjacent middle state)."""
    family = Family(family)
    if mid.v < anchor.v * (1 - tol):
        raise ValueError("middle state is not on the rarefaction branch (needs v_mid >= v_end)")
    s_a = entropy(params, anchor.v, anchor.theta)
    s_m = entropy(params, mid.v, mid.theta)
    if abs(s_a - s_m) > tol * max(1.0, abs(s_a)):
        raise ValueError("middle state does not share the anchor's entropy")
    lam_a = float(char_speed(params, anchor.v, anchor.theta, family))
    lam_m = float(char_speed(params, mid.v, mid.theta, family))
    if family is Family.MINUS:
        burgers = BurgersProfile(w_l=lam_a, w_r=max(lam_m, lam_a))
    else:
        burgers = BurgersProfile(w_l=min(lam_m, lam_a), w_r=lam_a)
    return RarefactionWave(params, anchor, family, burgers)


def composite(params: GasParams, pattern: WavePattern, contact: ContactWave,
              rar_minus: RarefactionWave, rar_plus: RarefactionWave) -> CompositeWave:
    return CompositeWave(params, pattern, contact, rar_minus, rar_plus)


def build_composite(params: GasParams, pattern: WavePattern, **bvp) -> CompositeWave:
    """Construct all three component waves of ``pattern`` and superpose them."""
    if any(pattern.end.omega_far):
        raise ValueError("profiles need zero far-field microrotation")
    contact = contact_wave(params, pattern, **bvp)
    rar_minus = smooth_rarefaction(params, pattern.end.left, pattern.mid_left, Family.MINUS)
    rar_plus = smooth_rarefaction(params, pattern.end.right, pattern.mid_right, Family.PLUS)
    return composite(params, pattern, contact, rar_minus, rar_plus)
