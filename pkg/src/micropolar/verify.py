"""Acceptance checks: each returns a CheckResult with the measured quantities."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics as dg
from .oracles import Manufactured, burgers_fv, curve_state_quad, random_patterns
from .profiles import (
    BurgersProfile,
    build_composite,
    burgers_derivs,
    burgers_eval,
    burgers_gaps,
    fit_tail_decay,
    solve_selfsimilar,
)
from .riemann import ConvergenceError, PatternMismatchError, Region, rarefaction_state, region_masks, solve_pattern
from .solver import Grid, SimState, Solver, integrate, initial_state, omega_energy, run
from .thermo import Family, char_speed, pressure


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    runtime: float = 0.0
    message: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f" - {self.message}" if self.message else ""
        return f"[{status}] {self.name} ({self.runtime:.1f} s){msg}"

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "runtime": self.runtime,
                "message": self.message, "detail": self.detail}


def _in_window(value, window) -> bool:
    lo, hi = window
    return (lo is None or value >= lo) and (hi is None or value <= hi)


def _fit_times(config):
    d = config.diagnostics
    return np.geomspace(d.fit_t_min, d.fit_t_max, d.fit_samples)


# ---------------------------------------------------------------- checks


def check_pattern(config) -> CheckResult:
    """The configured end states form an admissible R_- C R_+ pattern below the strength cap."""
    params = config.gas.to_params()
    try:
        pat = solve_pattern(params, config.end_states.to_end_states(), tol=config.profiles.pattern_tol,
                            delta_cap=config.end_states.delta_cap)
    except (PatternMismatchError, ConvergenceError) as exc:
        return CheckResult("pattern", False, {"error": str(exc)}, message=str(exc))
    return CheckResult("pattern", True, pat.to_dict(), message=f"delta = {pat.delta:.6g}")


def check_kernel(config) -> CheckResult:
    worst_sup = worst_id = 0.0
    rows = {}
    for alpha in (0.25, 1.0, 4.0):
        rep = dg.kernel_check(dg.KernelWeight(alpha), t_samples=(0.0, 1.0, 10.0, 100.0))
        rows[str(alpha)] = rep
        worst_sup = max(worst_sup, rep["g_sup_rel_error"])
        worst_id = max(worst_id, rep["identity_max_error"])
    ok = worst_sup <= 1e-6 and worst_id <= 1e-8
    return CheckResult("kernel", ok, {"alphas": rows, "sup_rel_error": worst_sup, "identity_error": worst_id},
                       message=f"sup g rel err {worst_sup:.1e}, identity err {worst_id:.1e}")


def check_burgers(config) -> CheckResult:
    prof = BurgersProfile(-1.0, 1.0)
    times = (0.0, 2.0, 5.0, 10.0, 20.0)
    x, ref = burgers_fv(prof, times, x_range=30.0, dx=0.01)
    oracle_err = max(float(np.max(np.abs(ref[t] - burgers_eval(prof, t, x)))) for t in times)

    rng = np.random.default_rng(1)
    ts = rng.uniform(0.0, 20.0, 10_000)
    xs = rng.uniform(-30.0, 30.0, 10_000)
    _, wx, _ = burgers_derivs(prof, ts, xs)
    gap_l, gap_r = burgers_gaps(prof, ts, xs)
    bounds_ok = bool(np.all(gap_l > 0) and np.all(gap_r > 0) and np.all(wx > 0))
    # monotone in x along sampled time lines
    mono_ok = True
    for t in rng.uniform(0.0, 20.0, 10):
        w = burgers_eval(prof, t, np.sort(rng.uniform(-30.0, 30.0, 1000)))
        mono_ok &= bool(np.all(np.diff(w) >= 0))

    tfit = np.geomspace(1.0, 100.0, 9)
    sups = []
    for t in tfit:
        xg = np.linspace(prof.w_l * t - 10.0, prof.w_r * t + 10.0, 20001)
        sups.append(float(np.max(burgers_derivs(prof, t, xg)[1])))
    fit = dg.fit_decay(tfit, sups)
    ok = oracle_err <= 1e-3 and bounds_ok and mono_ok and -1.15 <= fit.slope <= -0.85
    return CheckResult("burgers", ok, {"oracle_sup_error": oracle_err, "strict_bounds": bounds_ok,
                                       "monotone": mono_ok, "wx_sup_slope": fit.slope},
                       message=f"oracle err {oracle_err:.1e}, sup w_x slope {fit.slope:.3f}")


def check_selfsimilar(config) -> CheckResult:
    params = config.gas.to_params()
    pat = solve_pattern(params, config.end_states.to_end_states(), tol=config.profiles.pattern_tol)
    theta_m, theta_p = pat.mid_left.theta, pat.mid_right.theta
    if theta_m == theta_p:
        theta_m, theta_p = 1.0, 1.1
    prof = solve_selfsimilar(params, theta_m, theta_p, pat.p_mid, Xi=config.profiles.Xi,
                             n=config.profiles.bvp_n, tol=config.profiles.bvp_tol)
    bvp_res = float(np.max(np.abs(prof.ode_residual())))
    sign = np.sign(theta_p - theta_m)
    # tails are flat to roundoff, so monotone up to a tolerance relative to the jump
    floor = -1e-12 * abs(theta_p - theta_m)
    monotone = bool(np.all(sign * prof.derivs >= floor) and np.all(sign * np.diff(prof.values) >= floor)
                    and sign * prof.derivs[prof.derivs.size // 2] > 0)

    # residual of Theta_t = a kappa (Theta_x / Theta)_x by centred differences of the interpolant
    h = 1e-3
    pde_res = 0.0
    for t in (0.25, 1.0, 5.0, 20.0):
        s = math.sqrt(1.0 + t)
        x = np.linspace(-0.6 * prof.half_width * s, 0.6 * prof.half_width * s, 801)

        def theta(tt, xx):
            return prof(xx / math.sqrt(1.0 + tt))

        def log_slope(xx):
            y, y1 = prof.jet(xx / s)[:2]
            return y1 / (s * y)

        th_t = (theta(t + h, x) - theta(t - h, x)) / (2 * h)
        flux_x = (log_slope(x + h) - log_slope(x - h)) / (2 * h)
        pde_res = max(pde_res, float(np.max(np.abs(th_t - prof.a_kappa * flux_x))))
    c0, C = fit_tail_decay(prof)
    ok = bvp_res <= 1e-8 and monotone and pde_res <= 1e-6 and c0 > 0
    return CheckResult("selfsimilar", ok, {"bvp_residual": bvp_res, "monotone": monotone, "pde_residual": pde_res,
                                           "c0": c0, "C": C, "iterations": prof.iterations},
                       message=f"BVP res {bvp_res:.1e}, PDE res {pde_res:.1e}, c0 {c0:.3f}")


def check_riemann(config) -> CheckResult:
    params = config.gas.to_params()
    worst_mid = worst_p = worst_u = worst_curve = 0.0
    for fp in random_patterns(params, 50, delta_max=0.2, seed=7):
        pat = solve_pattern(params, fp.end)
        for got, want in ((pat.mid_left, fp.mid_left), (pat.mid_right, fp.mid_right)):
            worst_mid = max(worst_mid, abs(got.v - want.v), abs(got.u - want.u), abs(got.theta - want.theta))
        p_l = float(pressure(params, pat.mid_left.v, pat.mid_left.theta))
        p_r = float(pressure(params, pat.mid_right.v, pat.mid_right.theta))
        worst_p = max(worst_p, abs(p_l - p_r) / pat.p_mid)
        u_r = rarefaction_state(params, fp.end.right, Family.PLUS, pat.mid_right.v).u
        worst_u = max(worst_u, abs(pat.mid_left.u - u_r))
        quad = curve_state_quad(params, fp.end.left, Family.MINUS, pat.mid_left.v)
        worst_curve = max(worst_curve, abs(quad.u - pat.mid_left.u))
    ok = worst_mid <= 1e-8 and worst_p <= 1e-10 and worst_u <= 1e-10
    return CheckResult("riemann", ok, {"mid_error": worst_mid, "pressure_mismatch": worst_p,
                                       "velocity_mismatch": worst_u, "curve_quadrature_error": worst_curve},
                       message=f"mid err {worst_mid:.1e}, p mismatch {worst_p:.1e}, u mismatch {worst_u:.1e}")


def residual_series(config):
    """Remainder norms of the residual-test composite at the fit times."""
    params = config.gas.to_params()
    end = config.diagnostics.residual_end_states.to_end_states()
    pat = solve_pattern(params, end, tol=config.profiles.pattern_tol)
    comp = build_composite(params, pat, **config.bvp_options())
    speed = max(abs(float(char_speed(params, s.v, s.theta, Family.PLUS))) for s in (end.left, end.right))
    width = comp.contact.profile.half_width
    ts = _fit_times(config)
    rows, split = [], 0.0
    for t in ts:
        L = speed * (1.0 + t) + width * math.sqrt(1.0 + t) + 30.0
        x = np.arange(-L, L + 0.5 * config.diagnostics.residual_dx, config.diagnostics.residual_dx)
        res = dg.residual_fields(comp, t, x)
        split = max(split, float(np.max(np.abs(res.R1 - res.R1_from_parts()))),
                    float(np.max(np.abs(res.R2 - res.R2_from_parts()))))
        rows.append(dg.residual_norms(comp, t, x))
    return ts, rows, split, pat


def check_residuals(config) -> CheckResult:
    ts, rows, split, pat = residual_series(config)
    slopes, ok = {}, split <= 1e-8
    for name, window in config.diagnostics.windows.items():
        fit = dg.fit_decay(ts, [r[name] for r in rows])
        slopes[name] = {"slope": fit.slope, "r2": fit.r2, "window": list(window),
                        "passed": _in_window(fit.slope, window)}
        ok &= slopes[name]["passed"]
    msg = ", ".join(f"{k} {v['slope']:.3f}" for k, v in slopes.items())
    return CheckResult("residuals", ok, {"slopes": slopes, "decomposition_error": split, "delta": pat.delta,
                                         "end_states": pat.end.to_dict()}, message=msg)


def _conservation_run(config, n=1024, T=5.0):
    params = config.gas.to_params()
    pat = solve_pattern(params, config.end_states.to_end_states(), tol=config.profiles.pattern_tol)
    comp = build_composite(params, pat, **config.bvp_options())
    grid = Grid(config.grid.L, n)
    state = initial_state(params, grid, comp, config.perturbation.amplitude or 1e-2)
    solver = Solver(params, grid, comp, reconstruction=config.grid.reconstruction, safety=config.time.safety)
    return integrate(solver, state, T, keep_samples=False)


def omega_energy_defects(params, n=256, L=10.0, dt0=None, halvings=3):
    """|Delta E_omega + dt D| for one step at successively halved dt, v frozen at a smooth profile."""

    class Still:
        def state_at(self, t, x):
            x = np.asarray(x, dtype=float)
            return 1.0 + 0.2 * np.exp(-x**2), np.zeros_like(x), np.ones_like(x), np.zeros_like(x)

    grid = Grid(L, n)
    x = grid.x
    base = Still().state_at(0.0, x)
    state = SimState(0.0, base[0], base[1], base[2], 0.5 * np.exp(-x**2), params, grid)
    solver = Solver(params, grid, Still())
    dt = dt0 or solver.stable_dt(state)
    e0 = omega_energy(state)
    rate = solver.omega_dissipation_rate(state)
    out = []
    for k in range(halvings + 1):
        h = dt / 2**k
        new, _ = solver.step(state, h)
        out.append((h, abs(omega_energy(new) - e0 + h * rate)))
    return out


def manufactured_errors(config):
    params = config.gas.to_params()
    mcfg = config.diagnostics.manufactured
    mms = Manufactured(params)
    errs = []
    for n in mcfg.n_list:
        grid = Grid(mcfg.L, n)
        state = SimState(0.0, *mms.state_at(0.0, grid.x), params, grid)
        solver = Solver(params, grid, mms, forcing=mms.forcing, reconstruction=config.grid.reconstruction,
                        safety=config.time.safety)
        out = integrate(solver, state, mcfg.T_final, check_omega=False, keep_samples=False)
        exact = mms.state_at(out.state.t, grid.x)
        errs.append(math.sqrt(sum(float(np.sum((a - b) ** 2)) for a, b in zip(out.state.arrays(), exact)) * grid.dx))
    orders = [math.log(a / b) / math.log(n2 / n1)
              for a, b, n1, n2 in zip(errs, errs[1:], mcfg.n_list, mcfg.n_list[1:])]
    return errs, orders


def constant_state_drift(params, T=10.0, n=512, L=50.0):
    class Const:
        def state_at(self, t, x):
            x = np.asarray(x, dtype=float)
            return np.full(x.shape, 2.0), np.full(x.shape, 0.1), np.full(x.shape, 1.5), np.zeros(x.shape)

    grid = Grid(L, n)
    state = SimState(0.0, *Const().state_at(0.0, grid.x), params, grid)
    out = integrate(Solver(params, grid, Const()), state, T, keep_samples=False)
    ref = Const().state_at(T, grid.x)
    return max(float(np.max(np.abs(a - b))) for a, b in zip(out.state.arrays(), ref))


def check_solver(config) -> CheckResult:
    params = config.gas.to_params()
    ledger = _conservation_run(config)
    cons = max(ledger.max_mass_defect, ledger.max_momentum_defect)
    defects = omega_energy_defects(params)
    ratios = [a[1] / b[1] for a, b in zip(defects, defects[1:]) if b[1] > 0]
    # O(dt^2): halving dt divides the defect by about 4
    omega_ok = bool(ratios) and all(r > 3.0 for r in ratios)
    drift = constant_state_drift(params)
    errs, orders = manufactured_errors(config)
    ok = cons <= 1e-12 and omega_ok and drift <= 1e-10 and min(orders) >= config.diagnostics.manufactured.min_order
    return CheckResult("solver", ok, {
        "conservation_defect": cons, "omega_energy_defects": defects, "omega_defect_ratios": ratios,
        "constant_state_drift": drift, "manufactured_errors": errs, "orders": orders,
    }, message=f"orders {', '.join(f'{o:.3f}' for o in orders)}, conservation {cons:.1e}, drift {drift:.1e}")


def check_stability(config) -> CheckResult:
    res = run(config)
    s = res.summary
    ok = s["sup_ratio"] is not None and s["sup_ratio"] < 0.5 and s["omega_l2_nonincreasing_after_t1"]
    detail = {k: v for k, v in s.items() if k != "config"}
    return CheckResult("stability", ok, detail,
                       message=f"sup ratio {s['sup_ratio']:.3f}, omega L2 non-increasing: {s['omega_l2_nonincreasing_after_t1']}")


def localization_series(config, times=None, dx=0.01):
    params = config.gas.to_params()
    pat = solve_pattern(params, config.end_states.to_end_states(), tol=config.profiles.pattern_tol)
    comp = build_composite(params, pat, **config.bvp_options())
    times = np.linspace(1.0, 20.0, 8) if times is None else np.asarray(times)
    speed = max(abs(v) for v in pat.mid_speeds())
    rows = []
    for t in times:
        L = 2.0 * speed * (1.0 + t) + 20.0
        x = np.arange(-L, L + 0.5 * dx, dx)
        masks = region_masks(t, x, pat)
        parts = comp.components(t, x)
        mc = masks[Region.OMEGA_C]
        side = masks[Region.OMEGA_MINUS] | masks[Region.OMEGA_PLUS]
        rows.append({
            "t": float(t),
            "rar_minus_in_c": float(np.max(np.abs(parts["rarefaction_minus"].V_x[mc]))),
            "rar_plus_in_c": float(np.max(np.abs(parts["rarefaction_plus"].V_x[mc]))),
            "contact_in_sides": float(np.max(np.abs(parts["contact"].Theta_x[side]))),
        })
    return rows


def check_localization(config) -> CheckResult:
    rows = localization_series(config)
    ts = [r["t"] for r in rows]
    rates, ok = {}, True
    for key in ("rar_minus_in_c", "rar_plus_in_c", "contact_in_sides"):
        vals = [r[key] for r in rows]
        if min(vals) <= 0:
            rates[key] = None
            ok = False
            continue
        rates[key] = dg.fit_exponential(ts, vals).slope
        ok &= rates[key] < 0
    msg = ", ".join(f"{k} {v:.3f}" if v is not None else f"{k} n/a" for k, v in rates.items())
    return CheckResult("localization", ok, {"rates": rates, "series": rows}, message=msg)


CHECKS = {
    "pattern": check_pattern,
    "kernel": check_kernel,
    "burgers": check_burgers,
    "selfsimilar": check_selfsimilar,
    "riemann": check_riemann,
    "residuals": check_residuals,
    "solver": check_solver,
    "stability": check_stability,
    "localization": check_localization,
}


def run_check(name: str, config) -> CheckResult:
    start = time.perf_counter()
    try:
        result = CHECKS[name](config)
    except Exception as exc:  # a crashing check is a failed check, reported with its error
        result = CheckResult(name, False, {"error": f"{type(exc).__name__}: {exc}"}, message=f"{type(exc).__name__}: {exc}")
    result.runtime = time.perf_counter() - start
    return result


def run_checks(config, names=None, report=None) -> list[CheckResult]:
    names = list(CHECKS) if not names else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    results = []
    for name in names:
        res = run_check(name, config)
        results.append(res)
        if report is not None:
            report(res)
    return results


def verdict(results) -> dict:
    return {"passed": all(r.passed for r in results), "checks": [r.to_dict() for r in results]}
