"""Method-of-lines solver for the inviscid micropolar system in Lagrangian coordinates.

    v_t = u_x,   u_t + p_x = 0,
    R/(gamma-1) theta_t = -p u_x + (kappa theta_x / v)_x + omega_x^2 / v + v omega^2,
    omega_t = A [(omega_x / v)_x - v omega].

Cell-centred grid on [-L, L] with two ghost cells per side filled from a
boundary field (time-dependent Dirichlet).  The (v, u) subsystem uses a
Rusanov flux on linearly reconstructed face states; diffusion terms are
second-order central differences.  Time stepping is three-stage SSP Runge-Kutta.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import KernelWeight, norm_report, perturbation, sobolev_gap
from .profiles import build_composite, fit_tail_decay
from .riemann import solve_pattern
from .thermo import GasParams

log = logging.getLogger(__name__)

NG = 2
RECONSTRUCTIONS = ("linear", "minmod", "constant")

# test-only fault injection: when set, the cell right of the central face sees that
# face's mass flux with the wrong sign, so the update stops telescoping
_FLUX_FAULT = False


def set_flux_fault(enabled: bool) -> None:
    global _FLUX_FAULT
    _FLUX_FAULT = bool(enabled)


class PositivityError(RuntimeError):
    def __init__(self, message, snapshot: "SimState | None" = None):
        super().__init__(message)
        self.snapshot = snapshot


@dataclass(frozen=True)
class Grid:
    L: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise ValueError("need at least 16 cells")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def x(self) -> np.ndarray:
        return -self.L + (np.arange(self.n) + 0.5) * self.dx

    def ghost_x(self) -> np.ndarray:
        dx = self.dx
        left = -self.L - (np.arange(NG, 0, -1) - 0.5) * dx
        right = self.L + (np.arange(NG) + 0.5) * dx
        return np.concatenate([left, right])


@dataclass
class SimState:
    t: float
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    params: GasParams
    grid: Grid

    @property
    def x(self):
        return self.grid.x

    def arrays(self):
        return self.v, self.u, self.theta, self.omega

    def copy(self) -> "SimState":
        return replace(self, v=self.v.copy(), u=self.u.copy(), theta=self.theta.copy(), omega=self.omega.copy())

    def check_positive(self, where: str = "") -> None:
        bad = ~(np.isfinite(self.v) & np.isfinite(self.u) & np.isfinite(self.theta) & np.isfinite(self.omega))
        if np.any(bad):
            raise PositivityError(f"non-finite values at t={self.t:.6g}{where}", self)
        if np.any(self.v <= 0) or np.any(self.theta <= 0):
            i = int(np.argmin(np.minimum(self.v, self.theta)))
            raise PositivityError(
                f"positivity lost at t={self.t:.6g}{where}: x={self.x[i]:.6g}, v={self.v[i]:.6g}, theta={self.theta[i]:.6g}",
                self,
            )


@dataclass
class Tendencies:
    dv: np.ndarray
    du: np.ndarray
    dtheta: np.ndarray
    domega: np.ndarray
    mass_flux: tuple[float, float]
    momentum_flux: tuple[float, float]

    @property
    def mass_inflow(self) -> float:
        """Rate of change of int v dx carried through the two boundary faces."""
        return self.mass_flux[0] - self.mass_flux[1]

    @property
    def momentum_inflow(self) -> float:
        return self.momentum_flux[0] - self.momentum_flux[1]


def _slopes(q, kind):
    # slopes for extended cells 1 .. n+2
    if kind == "constant":
        return np.zeros(q.size - 2)
    fwd = q[2:] - q[1:-1]
    bwd = q[1:-1] - q[:-2]
    if kind == "linear":
        return 0.5 * (fwd + bwd)
    if kind == "minmod":
        return np.where(fwd * bwd > 0, np.sign(fwd) * np.minimum(np.abs(fwd), np.abs(bwd)), 0.0)
    raise ValueError(f"unknown reconstruction {kind!r}")


def _faces(q, kind):
    """Left and right face values at the n+1 faces between extended cells 1..n+2."""
    s = _slopes(q, kind)
    qc = q[1:-1]
    return qc[:-1] + 0.5 * s[:-1], qc[1:] - 0.5 * s[1:]


class Solver:
    """Spatial operator and time stepper bound to a grid and a boundary field.

    ``boundary`` needs ``state_at(t, x) -> (v, u, theta, omega)``; ``forcing``,
    if given, is called as ``forcing(t, x)`` and returns four source arrays.
    """

    def __init__(self, params: GasParams, grid: Grid, boundary, forcing=None,
                 reconstruction: str = "linear", safety: float = 0.4):
        if reconstruction not in RECONSTRUCTIONS:
            raise ValueError(f"reconstruction must be one of {RECONSTRUCTIONS}")
        if not 0 < safety <= 1:
            raise ValueError("safety factor must lie in (0, 1]")
        self.params = params
        self.grid = grid
        self.boundary = boundary
        self.forcing = forcing
        self.reconstruction = reconstruction
        self.safety = safety
        self._gx = grid.ghost_x()

    def extend(self, state: SimState):
        gv, gu, gth, gw = (np.asarray(a, dtype=float) for a in self.boundary.state_at(state.t, self._gx))
        return tuple(np.concatenate([g[:NG], a, g[NG:]]) for g, a in zip((gv, gu, gth, gw), state.arrays()))

    def rhs(self, state: SimState) -> Tendencies:
        prm = self.params
        dx = self.grid.dx
        v, u, th, w = self.extend(state)
        c = np.sqrt(prm.gamma * prm.R * th) / v

        kind = self.reconstruction
        vL, vR = _faces(v, kind)
        uL, uR = _faces(u, kind)
        tL, tR = _faces(th, kind)
        if np.any(vL <= 0) or np.any(vR <= 0) or np.any(tL <= 0) or np.any(tR <= 0):
            raise PositivityError(f"reconstructed face state lost positivity at t={state.t:.6g}", state)
        pL, pR = prm.R * tL / vL, prm.R * tR / vR
        a = np.maximum(c[1:-2], c[2:-1])
        Fv = -0.5 * (uL + uR) - 0.5 * a * (vR - vL)
        Fu = 0.5 * (pL + pR) - 0.5 * a * (uR - uL)

        Fv_in, Fv_out = Fv[:-1], Fv[1:]
        if _FLUX_FAULT:
            Fv_in = Fv_in.copy()
            Fv_in[Fv_in.size // 2] *= -1.0
        dv = -(Fv_out - Fv_in) / dx
        du = -(Fu[1:] - Fu[:-1]) / dx

        ux = dv.copy()
        inv_v = 0.5 * (1.0 / v[1:-2] + 1.0 / v[2:-1])
        q_th = prm.kappa * (th[2:-1] - th[1:-2]) / dx * inv_v
        q_w = (w[2:-1] - w[1:-2]) / dx * inv_v
        vi, wi, ti = v[NG:-NG], w[NG:-NG], th[NG:-NG]
        wx = (w[NG + 1:-NG + 1] - w[NG - 1:-NG - 1]) / (2.0 * dx)
        p = prm.R * ti / vi
        dth = (-p * ux + (q_th[1:] - q_th[:-1]) / dx + wx**2 / vi + vi * wi**2) / prm.cv
        dw = prm.A * ((q_w[1:] - q_w[:-1]) / dx - vi * wi)

        if self.forcing is not None:
            fv, fu, fth, fw = self.forcing(state.t, self.grid.x)
            dv, du, dth, dw = dv + fv, du + fu, dth + fth, dw + fw
        return Tendencies(dv, du, dth, dw, mass_flux=(float(Fv[0]), float(Fv[-1])),
                          momentum_flux=(float(Fu[0]), float(Fu[-1])))

    def stable_dt_bounds(self, state: SimState) -> tuple[float, float]:
        prm = self.params
        dx = self.grid.dx
        speed = np.max(np.abs(state.u) + np.sqrt(prm.gamma * prm.R * state.theta) / state.v)
        hyper = dx / speed
        diff = max(prm.kappa * (prm.gamma - 1.0) / prm.R, prm.A)
        para = dx**2 * float(np.min(state.v)) / (2.0 * diff)
        return self.safety * hyper, self.safety * para

    def stable_dt(self, state: SimState) -> float:
        return min(self.stable_dt_bounds(state))

    def _stage(self, base: SimState, arrays, t) -> SimState:
        s = replace(base, t=t, v=arrays[0], u=arrays[1], theta=arrays[2], omega=arrays[3])
        s.check_positive(" (Runge-Kutta stage)")
        return s

    def step(self, state: SimState, dt: float) -> tuple[SimState, dict]:
        """One SSP-RK3 step; also returns the boundary inflow of mass and momentum over the step."""
        if not dt > 0:
            raise ValueError("dt must be positive")
        q0 = state.arrays()
        k1 = self.rhs(state)
        q1 = [a + dt * d for a, d in zip(q0, _tend(k1))]
        s1 = self._stage(state, q1, state.t + dt)
        k2 = self.rhs(s1)
        q2 = [0.75 * a + 0.25 * (b + dt * d) for a, b, d in zip(q0, q1, _tend(k2))]
        s2 = self._stage(state, q2, state.t + 0.5 * dt)
        k3 = self.rhs(s2)
        q3 = [a / 3.0 + 2.0 / 3.0 * (b + dt * d) for a, b, d in zip(q0, q2, _tend(k3))]
        out = self._stage(state, q3, state.t + dt)
        weights = (1 / 6, 1 / 6, 2 / 3)
        flux = {
            "mass_inflow": dt * sum(wt * k.mass_inflow for wt, k in zip(weights, (k1, k2, k3))),
            "momentum_inflow": dt * sum(wt * k.momentum_inflow for wt, k in zip(weights, (k1, k2, k3))),
        }
        return out, flux

    def omega_dissipation_rate(self, state: SimState) -> float:
        """Discrete A sum[(omega_x)^2 / v at faces + v omega^2] dx matching the operator in ``rhs``."""
        dx = self.grid.dx
        v, _, _, w = self.extend(state)
        inv_v = 0.5 * (1.0 / v[NG - 1:-NG] + 1.0 / v[NG:-NG + 1])
        dw = (w[NG:-NG + 1] - w[NG - 1:-NG]) / dx
        vi, wi = v[NG:-NG], w[NG:-NG]
        return self.params.A * (float(np.sum(dw**2 * inv_v)) + float(np.sum(vi * wi**2))) * dx


def _tend(k: Tendencies):
    return k.dv, k.du, k.dtheta, k.domega


def omega_energy(state: SimState) -> float:
    return 0.5 * float(np.sum(state.omega**2)) * state.grid.dx


def conservation_defects(before: SimState, after: SimState, inflow: dict) -> tuple[float, float]:
    """|change of int v dx - boundary inflow| and the same for u."""
    dx = before.grid.dx
    dm = float(np.sum(after.v - before.v)) * dx - inflow["mass_inflow"]
    dp = float(np.sum(after.u - before.u)) * dx - inflow["momentum_inflow"]
    return abs(dm), abs(dp)


def initial_state(params: GasParams, grid: Grid, field_, amplitude: float = 0.0, width: float = 1.0,
                  center: float = 0.0, toggles: dict | None = None) -> SimState:
    """Profile at t = 0 plus amplitude * exp(-((x - center) / width)^2) in each enabled component."""
    toggles = {"phi": True, "psi": True, "zeta": True, "omega": True} | dict(toggles or {})
    x = grid.x
    v, u, th, w = (np.array(a, dtype=float) for a in field_.state_at(0.0, x))
    bump = amplitude * np.exp(-(((x - center) / width) ** 2))
    for key, arr in (("phi", v), ("psi", u), ("zeta", th), ("omega", w)):
        if toggles[key]:
            arr += bump
    state = SimState(0.0, v, u, th, w, params, grid)
    state.check_positive(" (initial data)")
    return state


@dataclass
class Integration:
    """Outcome of ``integrate``: final state, sampled states and per-step ledgers."""

    state: SimState
    samples: list = field(default_factory=list)
    steps: int = 0
    max_mass_defect: float = 0.0
    max_momentum_defect: float = 0.0
    max_omega_energy_increase: float = 0.0
    bounds: dict = field(default_factory=dict)

    def track(self, state: SimState) -> None:
        b = self.bounds
        b["v_min"] = min(b.get("v_min", math.inf), float(state.v.min()))
        b["v_max"] = max(b.get("v_max", -math.inf), float(state.v.max()))
        b["theta_min"] = min(b.get("theta_min", math.inf), float(state.theta.min()))
        b["theta_max"] = max(b.get("theta_max", -math.inf), float(state.theta.max()))


def integrate(solver: Solver, state: SimState, T: float, sample_times=(), callback=None,
              check_omega: bool = True, keep_samples: bool = True) -> Integration:
    """Advance to time T, landing exactly on each of ``sample_times``.

    ``callback(state, ledger)`` runs at every sample time with the running ledger.
    """
    targets = sorted({float(t) for t in sample_times if state.t < t <= T} | {float(T)})
    result = Integration(state=state)
    result.track(state)
    for target in targets:
        while state.t < target - 1e-12 * max(1.0, target):
            dt = min(solver.stable_dt(state), target - state.t)
            e0 = omega_energy(state) if check_omega else 0.0
            new, inflow = solver.step(state, dt)
            if target - new.t < 1e-12 * max(1.0, target):
                new.t = target
            dm, dp = conservation_defects(state, new, inflow)
            result.max_mass_defect = max(result.max_mass_defect, dm)
            result.max_momentum_defect = max(result.max_momentum_defect, dp)
            if check_omega:
                result.max_omega_energy_increase = max(result.max_omega_energy_increase, omega_energy(new) - e0)
            result.steps += 1
            result.track(new)
            state = new
        result.state = state
        if keep_samples:
            result.samples.append(state)
        if callback is not None:
            callback(state, result)
    result.state = state
    return result


def cadence_times(T: float, cadence: float | None) -> list[float]:
    if not cadence or cadence <= 0:
        return [T]
    k = int(math.floor(T / cadence + 1e-9))
    times = [cadence * i for i in range(1, k + 1)]
    if not times or times[-1] < T:
        times.append(T)
    return times


# ---------------------------------------------------------------- configured runs


class BoundaryToleranceError(RuntimeError):
    """The composite profile is not yet at its far-field values at the domain ends."""


@dataclass
class RunResult:
    pattern: object
    composite: object
    reports: list
    snapshots: list
    summary: dict
    final: SimState


def boundary_deviation(composite, pattern, L: float, t: float) -> float:
    V, U, Th, _ = composite.state_at(t, np.array([-L, L]))
    l, r = pattern.end.left, pattern.end.right
    return float(max(abs(V[0] - l.v), abs(U[0] - l.u), abs(Th[0] - l.theta),
                     abs(V[1] - r.v), abs(U[1] - r.u), abs(Th[1] - r.theta)))


def kernel_alpha(config, composite) -> float:
    if config.diagnostics.alpha is not None:
        return config.diagnostics.alpha
    if composite.contact.profile.delta == 0.0:
        return 1.0
    return fit_tail_decay(composite.contact.profile)[0]


def run(config, snapshot_sink=None, progress=None) -> RunResult:
    """Evolve perturbed composite-wave data as configured.

    ``snapshot_sink(state, composite)`` receives each snapshot; ``progress(report)``
    each NormReport.
    """
    params = config.gas.to_params()
    end = config.end_states.to_end_states()
    pattern = solve_pattern(params, end, tol=config.profiles.pattern_tol, delta_cap=config.end_states.delta_cap)
    comp = build_composite(params, pattern, **config.bvp_options())
    grid = Grid(config.grid.L, config.grid.n)
    T = config.time.T_final
    dev = max(boundary_deviation(comp, pattern, grid.L, t) for t in (0.0, T))
    if dev > config.profiles.boundary_tol:
        raise BoundaryToleranceError(
            f"composite wave deviates from its far fields by {dev:.3e} at x = +-{grid.L:g} "
            f"(tolerance {config.profiles.boundary_tol:.1e}); enlarge grid.L or shorten time.T_final"
        )
    weight = KernelWeight(kernel_alpha(config, comp))
    pert = config.perturbation
    state = initial_state(params, grid, comp, pert.amplitude, pert.width, pert.center, pert.fields.model_dump())
    solver = Solver(params, grid, comp, reconstruction=config.grid.reconstruction, safety=config.time.safety)

    diag_times = cadence_times(T, config.time.diagnostic_cadence)
    snap_times = cadence_times(T, config.time.snapshot_cadence)
    reports = [norm_report(state, comp, weight)]
    snapshots = [0.0]
    sobolev = [max(sobolev_gap(f, grid.x) for f in perturbation(state, comp).values())]
    if snapshot_sink is not None:
        snapshot_sink(state, comp)
    if progress is not None:
        progress(reports[0])

    def on_sample(s, ledger):
        if s.t in diag_times:
            rep = norm_report(s, comp, weight, ledger.max_mass_defect, ledger.max_momentum_defect)
            reports.append(rep)
            sobolev.append(max(sobolev_gap(f, grid.x) for f in perturbation(s, comp).values()))
            if progress is not None:
                progress(rep)
        if s.t in snap_times:
            snapshots.append(s.t)
            if snapshot_sink is not None:
                snapshot_sink(s, comp)

    ledger = integrate(solver, state, T, sorted(set(diag_times) | set(snap_times)), on_sample, keep_samples=False)
    first, last = reports[0], reports[-1]
    omega_series = [(r.t, r.omega_l2) for r in reports if r.t >= 1.0]
    omega_monotone = all(b[1] <= a[1] * (1 + 1e-12) + 1e-300 for a, b in zip(omega_series, omega_series[1:]))
    summary = {
        "pattern": pattern.to_dict(),
        "alpha": weight.alpha,
        "steps": ledger.steps,
        "t_final": ledger.state.t,
        "bounds": ledger.bounds,
        "boundary_deviation": dev,
        "initial_norms": first.row(),
        "final_norms": last.row(),
        "sup_ratio": last.linf / first.linf if first.linf > 0 else None,
        "omega_l2_nonincreasing_after_t1": omega_monotone,
        "max_mass_defect": ledger.max_mass_defect,
        "max_momentum_defect": ledger.max_momentum_defect,
        "max_omega_energy_increase": ledger.max_omega_energy_increase,
        "max_sobolev_gap": max(sobolev),
        "config": config.model_dump(mode="json"),
    }
    log.info("run finished: %d steps, sup ratio %s", ledger.steps, summary["sup_ratio"])
    return RunResult(pattern, comp, reports, snapshots, summary, ledger.state)
