"""Measurement machinery: perturbation norms, remainder fields, heat-kernel weights,
relative-entropy energy and decay-rate fits."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import erf

from .profiles.waves import CompositeWave, ProfileValues
from .riemann import Region, WavePattern, region_masks

FIELDS = ("phi", "psi", "zeta", "omega")


def trapezoid(f, x):
    return float(np.trapezoid(f, x))


def midpoint(f, dx):
    return float(np.sum(f) * dx)


def perturbation(state, composite: CompositeWave, x=None) -> dict[str, np.ndarray]:
    """(phi, psi, zeta, omega) = (v - V, u - U, theta - Theta, omega) at the state's time."""
    x = state.x if x is None else x
    V, U, Theta, _ = composite.state_at(state.t, x)
    return {"phi": state.v - V, "psi": state.u - U, "zeta": state.theta - Theta, "omega": np.array(state.omega)}


def field_norms(f, x) -> dict[str, float]:
    """L-infinity, L2, H1 and H2 norms; trapezoid quadrature and second-order central differences."""
    dx = x[1] - x[0]
    fx = np.gradient(f, dx, edge_order=2)
    fxx = np.gradient(fx, dx, edge_order=2)
    l2sq = trapezoid(f**2, x)
    d1 = trapezoid(fx**2, x)
    d2 = trapezoid(fxx**2, x)
    return {
        "linf": float(np.max(np.abs(f))) if f.size else 0.0,
        "l2": math.sqrt(l2sq),
        "h1": math.sqrt(l2sq + d1),
        "h2": math.sqrt(l2sq + d1 + d2),
        "dx_l2": math.sqrt(d1),
    }


def sobolev_gap(f, x) -> float:
    """(||f||_inf - ||f||^(1/2) ||f_x||^(1/2)) / ||f||_inf; non-positive for functions vanishing at the ends."""
    n = field_norms(f, x)
    if n["linf"] == 0.0:
        return 0.0
    return (n["linf"] - math.sqrt(n["l2"] * n["dx_l2"])) / n["linf"]


# ---------------------------------------------------------------- remainders


@dataclass
class ResidualFields:
    R1: np.ndarray
    R2: np.ndarray
    R1_1: np.ndarray
    Uc_t: np.ndarray
    R2_1: np.ndarray
    R2_2: np.ndarray

    def R1_from_parts(self):
        return self.R1_1 - self.Uc_t

    def R2_from_parts(self):
        return self.R2_1 + self.R2_2


def residual_fields(composite: CompositeWave, t: float, x) -> ResidualFields:
    """Momentum and energy defects of the composite wave.

    With the defects defined through
        U_t + P_x = -R1,   R/(gamma-1) Theta_t + P U_x = (kappa Theta_x / V)_x - R2,
    R1 and R2 are evaluated directly from the composite's derivatives.  The
    decomposition pieces are assembled separately from the component waves:
    R1 = R1_1 - U^c_t with R1_1 = -(P - P_- - P_+)_x written out term by term,
    and R2 = R2_1 + R2_2.
    """
    params = composite.params
    x = np.asarray(x, dtype=float)
    comp = composite.components(t, x)
    rm, c, rp = comp["rarefaction_minus"], comp["contact"], comp["rarefaction_plus"]
    tot = composite.evaluate(t, x)
    R, kappa = params.R, params.kappa
    V, Th = tot.V, tot.Theta
    P = tot.pressure(params)

    R1 = -(tot.U_t + tot.pressure_x(params))
    R2 = kappa * (tot.Theta_xx / V - tot.Theta_x * tot.V_x / V**2) - params.cv * tot.Theta_t - P * tot.U_x

    R1_1 = R * (
        rm.Theta_x * (1 / rm.V - 1 / V)
        + rp.Theta_x * (1 / rp.V - 1 / V)
        + c.Theta_x * (1 / c.V - 1 / V)
        + rm.V_x * (Th / V**2 - rm.Theta / rm.V**2)
        + rp.V_x * (Th / V**2 - rp.Theta / rp.V**2)
        + c.V_x * (Th / V**2 - c.Theta / c.V**2)
    )
    p_m = composite.pattern.p_mid
    R2_1 = (p_m - P) * c.U_x + (rm.pressure(params) - P) * rm.U_x + (rp.pressure(params) - P) * rp.U_x
    R2_2 = kappa * (
        tot.Theta_xx / V - tot.Theta_x * tot.V_x / V**2 - (c.Theta_xx / c.V - c.Theta_x * c.V_x / c.V**2)
    )
    return ResidualFields(R1=R1, R2=R2, R1_1=R1_1, Uc_t=c.U_t, R2_1=R2_1, R2_2=R2_2)


def residual_norms(composite: CompositeWave, t: float, x) -> dict[str, float]:
    res = residual_fields(composite, t, x)
    return {
        "R1_linf": float(np.max(np.abs(res.R1))),
        "R1_l1": trapezoid(np.abs(res.R1), x),
        "R1_l2": math.sqrt(trapezoid(res.R1**2, x)),
        "R2_linf": float(np.max(np.abs(res.R2))),
        "R2_l1": trapezoid(np.abs(res.R2), x),
    }


# ---------------------------------------------------------------- heat kernel


@dataclass(frozen=True)
class KernelWeight:
    """h = (1+t)^(-1/2) exp(-alpha x^2 / (1+t)) and g(t, x) = int_{-inf}^x h(t, y) dy."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    def h(self, t, x):
        return np.exp(-self.alpha * np.square(x) / (1.0 + t)) / np.sqrt(1.0 + t)

    def h_x(self, t, x):
        return -2.0 * self.alpha * np.asarray(x) / (1.0 + t) * self.h(t, x)

    def g(self, t, x):
        return 0.5 * math.sqrt(math.pi / self.alpha) * (1.0 + erf(np.asarray(x) * np.sqrt(self.alpha / (1.0 + t))))

    def g_t(self, t, x):
        return -0.5 * np.asarray(x) / (1.0 + t) * self.h(t, x)

    @property
    def g_sup(self) -> float:
        return math.sqrt(math.pi / self.alpha)

    def weighted_integral(self, t, x, fields) -> float:
        """int (sum of squared fields) h^2 dx."""
        total = sum(np.square(f) for f in fields)
        return trapezoid(total * self.h(t, x) ** 2, x)


def kernel_check(weight: KernelWeight, t_samples, quad_tol: float = 1e-12, n_points: int = 100,
                 seed: int = 0, x_range: float = 10.0) -> dict:
    """Check sup_x g = sqrt(pi / alpha) by quadrature of h and 4 alpha g_t = h_x by differencing g in t."""
    sup_errors = []
    for t in t_samples:
        val, err = integrate.quad(lambda y: float(weight.h(t, y)), -np.inf, np.inf, epsabs=0.0, epsrel=quad_tol)
        if err > 1e3 * quad_tol * abs(val):
            raise RuntimeError(f"quadrature of the heat kernel did not converge (t={t}, error {err:.2e})")
        sup_errors.append(abs(val - weight.g_sup) / weight.g_sup)

    rng = np.random.default_rng(seed)
    ts = rng.uniform(0.0, 10.0, n_points)
    xs = rng.uniform(-x_range, x_range, n_points) / math.sqrt(weight.alpha)
    step = 1e-3
    # fourth-order central difference of g in t
    gt = (-weight.g(ts + 2 * step, xs) + 8 * weight.g(ts + step, xs) - 8 * weight.g(ts - step, xs)
          + weight.g(ts - 2 * step, xs)) / (12 * step)
    identity = np.max(np.abs(4 * weight.alpha * gt - weight.h_x(ts, xs)))
    return {
        "alpha": weight.alpha,
        "g_sup_exact": weight.g_sup,
        "g_sup_rel_error": float(max(sup_errors)),
        "identity_max_error": float(identity),
    }


# ---------------------------------------------------------------- entropy energy


def entropy_phi(s):
    """Phi(s) = s - 1 - ln s."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("Phi needs a positive argument")
    return s - 1.0 - np.log(s)


def entropy_energy(state, composite: CompositeWave) -> float:
    """int [Theta Phi(v/V) + psi^2/2 + Theta Phi(theta/Theta) + omega^2/2] dx."""
    V, U, Theta, _ = composite.state_at(state.t, state.x)
    if np.any(state.v <= 0) or np.any(state.theta <= 0):
        raise ValueError("entropy energy needs positive v and theta")
    density = (Theta * entropy_phi(state.v / V) + 0.5 * (state.u - U) ** 2
               + Theta * entropy_phi(state.theta / Theta) + 0.5 * np.square(state.omega))
    return trapezoid(density, state.x)


def omega_dissipation(state) -> float:
    """A int (omega_x^2 / v + v omega^2) dx."""
    x = state.x
    wx = np.gradient(state.omega, x[1] - x[0], edge_order=2)
    return state.params.A * trapezoid(wx**2 / state.v + state.v * state.omega**2, x)


# ---------------------------------------------------------------- fits


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r2: float


def fit_decay(t, values) -> DecayFit:
    """Least-squares fit of log(value) against log(1 + t)."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.size < 2 or t.size != values.size:
        raise ValueError("need matching t and values with at least 2 samples")
    if np.any(values <= 0):
        raise ValueError("decay fit needs positive values")
    return _linfit(np.log1p(t), np.log(values))


def fit_exponential(t, values) -> DecayFit:
    """Least-squares fit of log(value) against t; the slope is the exponential rate."""
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise ValueError("exponential fit needs positive values")
    return _linfit(np.asarray(t, dtype=float), np.log(values))


def _linfit(xs, ys) -> DecayFit:
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(float(slope), float(intercept), r2)


def region_norms(f, x, pattern: WavePattern, t: float) -> dict[str, dict[str, float]]:
    dx = x[1] - x[0]
    out = {}
    for region, mask in region_masks(t, x, pattern).items():
        sel = f[mask]
        out[region.value] = {
            "sup": float(np.max(np.abs(sel))) if sel.size else 0.0,
            "l2": math.sqrt(float(np.sum(sel**2)) * dx),
        }
    return out


def region_sup(f, x, pattern: WavePattern, t: float, region: Region) -> float:
    return region_norms(f, x, pattern, t)[region.value]["sup"]


# ---------------------------------------------------------------- norm report


@dataclass
class NormReport:
    t: float
    norms: dict[str, dict[str, float]]
    linf: float
    l2: float
    h1: float
    h2: float
    weighted: float
    entropy_energy: float
    omega_l2: float
    omega_dissipation: float
    mass_defect: float = 0.0
    momentum_defect: float = 0.0
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        row = {
            "t": self.t, "linf": self.linf, "l2": self.l2, "h1": self.h1, "h2": self.h2,
            "weighted": self.weighted, "entropy_energy": self.entropy_energy,
            "omega_l2": self.omega_l2, "omega_dissipation": self.omega_dissipation,
            "mass_defect": self.mass_defect, "momentum_defect": self.momentum_defect,
        }
        for name in FIELDS:
            row[f"{name}_linf"] = self.norms[name]["linf"]
            row[f"{name}_l2"] = self.norms[name]["l2"]
        return row

    def to_dict(self) -> dict:
        return asdict(self)


def norm_report(state, composite: CompositeWave, weight: KernelWeight, mass_defect=0.0, momentum_defect=0.0) -> NormReport:
    pert = perturbation(state, composite)
    x = state.x
    per = {name: field_norms(f, x) for name, f in pert.items()}
    return NormReport(
        t=float(state.t),
        norms=per,
        linf=max(n["linf"] for n in per.values()),
        l2=math.sqrt(sum(n["l2"] ** 2 for n in per.values())),
        h1=math.sqrt(sum(n["h1"] ** 2 for n in per.values())),
        h2=math.sqrt(sum(n["h2"] ** 2 for n in per.values())),
        weighted=weight.weighted_integral(state.t, x, (pert["phi"], pert["psi"], pert["zeta"])),
        entropy_energy=entropy_energy(state, composite),
        omega_l2=per["omega"]["l2"],
        omega_dissipation=omega_dissipation(state),
        mass_defect=float(mass_defect),
        momentum_defect=float(momentum_defect),
    )


__all__ = [
    "DecayFit", "KernelWeight", "NormReport", "ProfileValues", "ResidualFields",
    "entropy_energy", "entropy_phi", "field_norms", "fit_decay", "fit_exponential", "kernel_check",
    "midpoint", "norm_report", "omega_dissipation", "perturbation", "region_norms", "region_sup",
    "residual_fields", "residual_norms", "sobolev_gap", "trapezoid",
]
