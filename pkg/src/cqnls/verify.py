"""Named verification suites over the library invariants.

Each suite runs at the default resolution and returns a list of Check
records; the CLI prints one line per check and exits nonzero if any fail.
Suites deliberately reuse the library caches, so repeated checks share
ground states and operators within one process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import EvolutionConfig, Mode, build_virial_weight, evolve, make_preset, virial_monitor
from .errors import ConfigurationError, NoSolutionError
from .fields import RadialField
from .functionals import j_quotient, report
from .grid import Grading, default_grid
from .ground_state import (
    build_s_state,
    cached_shoot,
    constant_from_s,
    select_omega_for_alpha,
    sharp_constant,
)
from .operator import cached_operator
from .scaling import ScalingKind, ScalingLaw, apply_scaling, law_factors, transform_report
from .threshold import build_threshold_curve, classify, compute_d, default_omega_grid, trace_branch

SUITES = ("hardy", "scaling", "pohozaev", "sharp-constant", "threshold",
          "conservation", "virial", "all")


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    budget: float
    passed: bool
    note: str = ""


def _leq(name: str, measured: float, budget: float, note: str = "") -> Check:
    return Check(name, float(measured), float(budget), bool(measured <= budget), note)


def _true(name: str, condition: bool, note: str = "") -> Check:
    return Check(name, float(bool(condition)), 1.0, bool(condition), note)


def suite_hardy(seed: int = 0) -> list[Check]:
    checks = []
    for grading in (Grading.UNIFORM, Grading.GRADED):
        grid = default_grid(grading)
        for a in (-0.24, -0.2, -0.1, 0.0, 1.0):
            op = cached_operator(a, grid)
            lam0 = float(op.eigenvalues(k=1)[0])
            checks.append(_leq(f"hardy.min_eig[{grading.value},a={a}]", -lam0, 1e-8))
    grid = default_grid(Grading.UNIFORM)
    lam0 = float(cached_operator(0.0, grid).eigenvalues(k=1)[0])
    budget = (math.pi / grid.r_max) ** 2 * 1.01
    checks.append(_leq("hardy.lambda1_free", lam0, budget))
    return checks


def suite_scaling(seed: int = 0) -> list[Check]:
    grid = default_grid(Grading.UNIFORM)
    op = cached_operator(0.0, grid)
    f = RadialField(grid, np.exp(-(grid.nodes**2)))
    rep = report(op, f)
    checks = []
    s2 = ScalingLaw(ScalingKind.MASS_PRESERVING, (2.0,))
    scaled = apply_scaling(f, s2)
    rep2 = report(op, scaled)
    checks.append(_leq("scaling.mass_preserved", abs(rep2.mass / rep.mass - 1.0), 1e-4))
    checks.append(_leq("scaling.l6_factor_64", abs(rep2.l6_6 / (64.0 * rep.l6_6) - 1.0), 1e-3))
    checks.append(_leq("scaling.h1_factor_4", abs(rep2.h1a_sq / (4.0 * rep.h1a_sq) - 1.0), 1e-3))
    ident = apply_scaling(f, ScalingLaw(ScalingKind.L4_TILTING, (1.0,)))
    checks.append(_leq("scaling.identity", float(np.max(np.abs(ident.values - f.values))), 1e-12))
    fac = law_factors(ScalingLaw(ScalingKind.TWO_PARAMETER, (0.5, 2.0)))
    exact = transform_report(rep, ScalingLaw(ScalingKind.TWO_PARAMETER, (0.5, 2.0)))
    checks.append(_leq("scaling.report_transform",
                       abs(exact.mass - rep.mass * fac["mass"]), 1e-14))
    return checks


def suite_pohozaev(seed: int = 0) -> list[Check]:
    checks = []
    for a in (-0.2, -0.1, 0.0):
        grid = default_grid(Grading.GRADED if a < 0 else Grading.UNIFORM)
        for omega in (0.02, 0.05, 0.1, 0.15):
            st = cached_shoot(a, omega, grid)
            p1, p2 = st.pohozaev_residuals
            checks.append(_leq(f"pohozaev.pho11[a={a},w={omega}]", abs(p1), 1e-6))
            checks.append(_leq(f"pohozaev.pho22[a={a},w={omega}]", abs(p2), 1e-6))
            r4 = abs(st.report.l4_4 / (4.0 * omega * st.report.mass) - 1.0)
            checks.append(_leq(f"pohozaev.l4_eq_4wM[a={a},w={omega}]", r4, 1e-5))
            checks.append(_leq(f"pohozaev.eq_residual[a={a},w={omega}]",
                               st.equation_residual, 1e-5))
    try:
        cached_shoot(0.0, 0.2, default_grid(Grading.UNIFORM))
        rejected = False
    except NoSolutionError:
        rejected = True
    checks.append(_true("pohozaev.omega_0.2_rejected", rejected))
    return checks


def _random_smooth_fields(grid, rng, count):
    r = grid.nodes
    for _ in range(count):
        sigma = rng.uniform(0.6, 3.0)
        amp = rng.uniform(0.1, 1.5)
        mod = 1.0 + rng.uniform(-0.4, 0.4) * np.cos(rng.uniform(0.5, 2.0) * r) * np.exp(-r / 4.0)
        yield RadialField(grid, amp * np.exp(-((r / sigma) ** 2)) * np.abs(mod))


def suite_sharp_constant(seed: int = 0) -> list[Check]:
    checks = []
    rng = np.random.default_rng(seed)
    for a in (-0.1, 0.0):
        grid = default_grid(Grading.GRADED if a < 0 else Grading.UNIFORM)
        closed = sharp_constant(a, 1.0, "closed-form", grid)
        direct = sharp_constant(a, 1.0, "direct-minimization", grid, seed=seed)
        rel = abs(direct.value / closed.value - 1.0)
        checks.append(_leq(f"sharp.crossval[a={a}]", rel, 1e-3))
        op = cached_operator(a, grid)
        worst = 0.0
        for f in _random_smooth_fields(grid, rng, 100):
            rep = report(op, f)
            rhs = (closed.value * math.sqrt(rep.mass)
                   * rep.h1a_sq ** 0.75 * rep.l6_6 ** 0.25)
            worst = max(worst, rep.l4_4 / rhs)
        checks.append(_leq(f"sharp.gn_holds[a={a}]", worst, 1.0 + 1e-6))
        q1 = select_omega_for_alpha(a, 1.0, grid)
        gap = abs(j_quotient(op, q1.profile, 1.0) * closed.value - 1.0)
        checks.append(_leq(f"sharp.equality_gap[a={a}]", gap, 1e-4))
    # a > 0 delegates to the free constant
    free = sharp_constant(0.0, 1.0, "closed-form")
    pos = sharp_constant(0.5, 1.0, "closed-form")
    checks.append(_leq("sharp.positive_delegates", abs(pos.value - free.value), 0.0))
    return checks


def suite_threshold(seed: int = 0) -> list[Check]:
    checks = []
    grid0 = default_grid(Grading.UNIFORM)
    branch0 = trace_branch(0.0, default_omega_grid(24, 0.02, 0.18), grid0)
    checks.append(_true("threshold.branch_points", len(branch0) >= 20,
                        f"{len(branch0)}/24"))
    worst_v = max(abs(p.virial) / p.h1a_sq for p in branch0)
    checks.append(_leq("threshold.branch_virial", worst_v, 1e-5))
    curve0 = build_threshold_curve(0.0, branch0, grid0)
    finite = [(s.m, s.e) for s in curve0.samples if s.m <= curve0.mass_q]
    diffs = np.diff([e for _, e in finite])
    checks.append(_leq("threshold.strict_decrease", float(np.max(diffs)), -1e-6))
    checks.append(_leq("threshold.e_at_mass_q", abs(curve0.evaluate(curve0.mass_q)), 1e-4))
    checks.append(_true("threshold.inf_below_mass_s",
                        math.isinf(curve0.evaluate(0.5 * curve0.mass_s))))
    d_mid = compute_d(0.0, 0.5 * curve0.mass_q, grid0, seed=seed)
    checks.append(_leq("threshold.d_at_half_mass", abs(d_mid), 1e-4))
    d_hi = compute_d(0.0, 1.2 * curve0.mass_q, grid0, seed=seed)
    checks.append(_leq("threshold.d_above_mass", d_hi, -1e-4))
    grid_m = default_grid(Grading.GRADED)
    branch_m = trace_branch(-0.1, default_omega_grid(24, 0.02, 0.18), grid_m)
    curve_m = build_threshold_curve(-0.1, branch_m, grid_m)
    masses = np.linspace(curve_m.mass_s, curve_m.mass_q, 16)
    ok = sum(1 for m in masses if curve_m.evaluate(m) <= curve0.evaluate(m) + 1e-4)
    strict = sum(1 for m in masses if curve_m.evaluate(m) < curve0.evaluate(m) - 1e-12)
    checks.append(_true("threshold.inclusion", ok == 16, f"{ok}/16"))
    checks.append(_true("threshold.inclusion_strict", strict >= 12, f"{strict}/16"))
    verdicts_ok = True
    rng = np.random.default_rng(seed)
    for _ in range(50):
        m = rng.uniform(0.0, 1.2 * curve0.mass_q)
        e = rng.uniform(-0.5, 2.0)
        va = classify(curve_m, m, e).verdict
        v0 = classify(curve0, m, e).verdict
        if va == "inside-K_a" and v0 == "outside-K_a":
            verdicts_ok = False
    checks.append(_true("threshold.K_inclusion_random", verdicts_ok))
    return checks


def suite_conservation(seed: int = 0) -> list[Check]:
    checks = []
    grid = default_grid(Grading.UNIFORM)
    u0 = make_preset("gaussian", grid, 0.0, (0.5,))
    drifts = {}
    for a in (-0.1, 0.0, 1.0):
        cfg = EvolutionConfig(a=a, dt=1e-3, t_end=5.0, virial_R=10.0)
        tr = evolve(cfg, u0)
        mdrift = float(np.max(np.abs(tr.mass_series / tr.mass_series[0] - 1.0)))
        edrift = float(np.max(np.abs(tr.energy_series - tr.energy_series[0])))
        checks.append(_leq(f"conservation.mass[a={a}]", mdrift, 1e-8))
        checks.append(_leq(f"conservation.energy[a={a}]", edrift, 1e-5))
        drifts[a] = edrift
        if a >= 0:
            bound = tr.energy_series + 0.375 * tr.mass_series + 1e-8 - 0.5 * tr.h1_plain_series
            checks.append(_leq(f"conservation.kinetic_bound[a={a}]", float(-np.min(bound)), 0.0))
    cfg_half = EvolutionConfig(a=0.0, dt=5e-4, t_end=5.0, virial_R=10.0)
    tr_half = evolve(cfg_half, u0)
    e_half = float(np.max(np.abs(tr_half.energy_series - tr_half.energy_series[0])))
    improvement = drifts[0.0] / max(e_half, 1e-300)
    checks.append(Check("conservation.halving_factor", improvement, 3.0,
                        improvement >= 3.0, "factor must be >= 3"))
    # time reversal
    cfg = EvolutionConfig(a=0.0, dt=1e-3, t_end=1.0, virial_R=10.0)
    fwd = evolve(cfg, u0)
    back = evolve(cfg, RadialField(grid, np.conj(fwd.final_state.values)))
    err = math.sqrt(float(np.sum(grid.weights
                                 * np.abs(np.conj(back.final_state.values) - u0.values) ** 2)))
    checks.append(_leq("conservation.time_reversal", err, 1e-6))
    return checks


def suite_virial(seed: int = 0) -> list[Check]:
    checks = []
    grid = default_grid(Grading.UNIFORM)
    op = cached_operator(0.0, grid)
    w = build_virial_weight(grid, 10.0)
    rho = np.linspace(0.0, 3.0, 4001)
    from .dynamics import _psi_table

    psi, d1, d2, d3, d4 = _psi_table(rho)
    checks.append(_leq("virial.psi_below_rho2", float(np.max(psi - rho**2)), 1e-12))
    checks.append(_leq("virial.psi_second_deriv", float(np.max(d2)), 2.0 + 1e-12))
    checks.append(_leq("virial.psi_fourth_deriv", float(np.max(d4)), 4.0 * (1.0 + 1e-6)))
    checks.append(_true("virial.slope_vanishes", bool(np.all(d1[rho >= 2.0] == 0.0))))
    inner = grid.nodes <= w.R
    checks.append(_leq("virial.phi_inner_identity",
                       float(np.max(np.abs(w.phi[inner] - grid.nodes[inner] ** 2))), 1e-12))
    u = RadialField(grid, 0.8 * np.exp(-(grid.nodes**2)))
    rep = report(op, u)
    _, idot, iddot = virial_monitor(op, u, w)
    checks.append(_leq("virial.idot_real_field", abs(idot), 1e-12))
    checks.append(_leq("virial.iddot_equals_8V",
                       abs(iddot / (8.0 * rep.virial) - 1.0), 1e-4))
    cfg = EvolutionConfig(a=0.0, dt=1e-3, t_end=2.0, virial_R=10.0, checkpoint_every=20)
    tr = evolve(cfg, u)
    tt = tr.times
    fd = (tr.i_series[2:] - 2.0 * tr.i_series[1:-1] + tr.i_series[:-2]) / (tt[1] - tt[0]) ** 2
    resid = float(np.max(np.abs(fd - tr.iddot_series[1:-1])))
    dt_check = tt[1] - tt[0]
    scale = float(np.max(np.abs(tr.iddot_series))) or 1.0
    c_measured = resid / dt_check**2
    checks.append(Check("virial.fd_matches_iddot", resid, scale * dt_check**2 * 10 + 1e-3,
                        resid <= scale * dt_check**2 * 10 + 1e-3,
                        f"C~{c_measured:.3g}"))
    return checks


def run_suite(name: str, seed: int = 0) -> list[Check]:
    table = {
        "hardy": suite_hardy,
        "scaling": suite_scaling,
        "pohozaev": suite_pohozaev,
        "sharp-constant": suite_sharp_constant,
        "threshold": suite_threshold,
        "conservation": suite_conservation,
        "virial": suite_virial,
    }
    if name == "all":
        out = []
        for key in ("hardy", "scaling", "pohozaev", "sharp-constant", "threshold",
                    "conservation", "virial"):
            out.extend(table[key](seed))
        return out
    if name not in table:
        raise ConfigurationError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return table[name](seed)
