"""Command-line surface.

Subcommands: ground-state, sharp-constant, branch, threshold, plane, evolve,
verify, report.  Every command writes its outputs plus an adjacent
``.manifest`` file; all randomness flows from --seed, so identical
invocations reproduce outputs byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import EvolutionConfig, Mode, evolve, make_preset, scattering_diagnostics
from .errors import CQNLSError, ConfigurationError
from .fields import RadialField, read_field, write_field
from .functionals import report as functional_report
from .functionals import write_report_csv
from .grid import Grading, build_grid, DEFAULT_N, DEFAULT_RMAX
from .ground_state import build_s_state, select_omega_for_alpha, sharp_constant, shoot
from .manifest import RunManifest, atomic_write_text, manifest_path_for
from .operator import cached_operator
from .plane import emit_plane
from .threshold import ThresholdCurve, build_threshold_curve, default_omega_grid, trace_branch
from .verify import SUITES, run_suite


def _grid_from_args(args):
    grading = Grading.GRADED if getattr(args, "graded", False) else Grading.UNIFORM
    return build_grid(args.grid_n, args.grid_rmax, grading)


def _add_grid_options(p):
    p.add_argument("--grid", default=f"{DEFAULT_N},{DEFAULT_RMAX}",
                   help="n,rmax[,graded] node count and radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="key=value file of flag defaults")


def _parse_grid_flag(args):
    parts = [p.strip() for p in str(args.grid).split(",")]
    if len(parts) < 2:
        raise ConfigurationError("--grid expects n,rmax[,graded]")
    args.grid_n = int(parts[0])
    args.grid_rmax = float(parts[1])
    args.graded = len(parts) > 2 and parts[2] in ("graded", "graded-near-origin")


def _apply_config_file(args):
    if not getattr(args, "config", None):
        return
    for raw in Path(args.config).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, val)


def _finish(manifest: RunManifest, out: str | None):
    if out:
        manifest.write(manifest_path_for(out))
    else:
        sys.stdout.write(manifest.render())
    return 0 if manifest.all_passed else 1


def cmd_ground_state(args) -> int:
    grid = _grid_from_args(args)
    man = RunManifest("ground-state", {"a": args.a, "omega": args.omega,
                                       "alpha": args.alpha, "seed": args.seed},
                      grid.fingerprint())
    if (args.omega is None) == (args.alpha is None):
        raise ConfigurationError("give exactly one of --omega or --alpha")
    if args.omega is not None:
        state = shoot(args.a, args.omega, grid)
    else:
        state = select_omega_for_alpha(args.a, args.alpha, grid)
    man.check("pohozaev_1", abs(state.pohozaev_residuals[0]) <= 1e-6,
              f"{state.pohozaev_residuals[0]:.2e}")
    man.check("pohozaev_2", abs(state.pohozaev_residuals[1]) <= 1e-6,
              f"{state.pohozaev_residuals[1]:.2e}")
    man.check("equation_residual", state.equation_residual <= 1e-5,
              f"{state.equation_residual:.2e}")
    if args.out:
        rep = state.report
        write_field(args.out, state.profile, {
            "a": state.a, "omega": state.omega, "alpha": state.alpha,
            "pohozaev_1": state.pohozaev_residuals[0],
            "pohozaev_2": state.pohozaev_residuals[1],
            "report": rep.csv_row(),
        })
        man.outputs.append(args.out)
    print(f"omega={state.omega!r} mass={state.report.mass!r} "
          f"energy={state.report.energy!r}")
    return _finish(man, args.out)


def cmd_sharp_constant(args) -> int:
    grid = _grid_from_args(args)
    man = RunManifest("sharp-constant", {"a": args.a, "alpha": args.alpha,
                                         "method": args.method, "seed": args.seed},
                      grid.fingerprint())
    result = sharp_constant(args.a, args.alpha, args.method, grid, seed=args.seed)
    print(f"C[alpha={args.alpha},a={args.a}] = {result.value!r} ({result.method})")
    man.parameters["value"] = repr(result.value)
    return _finish(man, args.out)


def cmd_branch(args) -> int:
    grid = _grid_from_args(args)
    man = RunManifest("branch", {"a": args.a, "n_omega": args.n_omega, "seed": args.seed},
                      grid.fingerprint())
    omegas = default_omega_grid(args.n_omega, args.omega_min, args.omega_max)
    points = trace_branch(args.a, omegas, grid)
    man.check("branch_nonempty", len(points) > 0, f"{len(points)} points")
    lines = ["# columns=m,e,omega,source"]
    for p in points:
        lines.append(f"{p.mass!r},{p.energy!r},{p.omega!r},branch")
    if args.out:
        atomic_write_text(args.out, "\n".join(lines) + "\n")
        man.outputs.append(args.out)
    else:
        print("\n".join(lines))
    return _finish(man, args.out)


def cmd_threshold(args) -> int:
    grid = _grid_from_args(args)
    man = RunManifest("threshold", {"a": args.a, "seed": args.seed}, grid.fingerprint())
    omegas = default_omega_grid(args.n_omega, args.omega_min, args.omega_max)
    branch = trace_branch(args.a, omegas, grid)
    curve = build_threshold_curve(args.a, branch, grid)
    man.check("monotone", not curve.monotonicity_flags,
              f"{len(curve.monotonicity_flags)} repairs")
    if args.out:
        atomic_write_text(args.out, curve.to_csv())
        man.outputs.append(args.out)
    else:
        print(curve.to_csv(), end="")
    return _finish(man, args.out)


def cmd_plane(args) -> int:
    grid = _grid_from_args(args)
    man = RunManifest("plane", {"a": args.a, "seed": args.seed}, grid.fingerprint())
    if args.curve:
        curve = ThresholdCurve.from_csv(Path(args.curve).read_text(encoding="utf-8"))
    else:
        branch = trace_branch(args.a, default_omega_grid(args.n_omega), grid)
        curve = build_threshold_curve(args.a, branch, grid)
    overlays = []
    if args.overlay_branch:
        overlays = [(p.mass, p.energy, f"w={p.omega:.3g}") for p in curve.branch]
    emit_plane(args.a, curve, overlays, path=args.out)
    if args.out:
        man.outputs.append(args.out)
    return _finish(man, args.out)


def cmd_evolve(args) -> int:
    grid = _grid_from_args(args)
    man = RunManifest("evolve", {
        "a": args.a, "init": args.init, "dt": args.dt, "t_end": args.t_end,
        "virial_R": args.virial_R, "mode": args.mode, "seed": args.seed,
    }, grid.fingerprint())
    if Path(args.init).exists():
        u0, _ = read_field(args.init, grid)
    else:
        name, _, rest = args.init.partition(":")
        params = tuple(float(x) for x in rest.split(",")) if rest else ()
        u0 = make_preset(name, grid, args.a, params)
    cfg = EvolutionConfig(a=args.a, dt=args.dt, t_end=args.t_end,
                          virial_R=args.virial_R, mode=args.mode,
                          checkpoint_every=args.checkpoint_every)
    trace = evolve(cfg, u0)
    verdict = scattering_diagnostics(trace)
    mdrift = float(np.max(np.abs(trace.mass_series / trace.mass_series[0] - 1.0))) \
        if trace.mass_series[0] else 0.0
    man.check("mass_conservation", mdrift <= 1e-8 * max(1.0, trace.t_end), f"{mdrift:.2e}")
    man.check("not_boundary_polluted", not trace.boundary_polluted)
    man.parameters["verdict"] = verdict.verdict
    if args.out:
        atomic_write_text(args.out, trace.to_csv())
        man.outputs.append(args.out)
    print(f"verdict={verdict.verdict} ({verdict.reason})")
    return _finish(man, args.out)


def cmd_verify(args) -> int:
    man = RunManifest("verify", {"suite": args.suite, "seed": args.seed})
    checks = run_suite(args.suite, args.seed)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        note = f" {c.note}" if c.note else ""
        print(f"{status} {c.name} measured={c.measured:.6g} budget={c.budget:.6g}{note}")
        man.check(c.name, c.passed, f"{c.measured:.6g} vs {c.budget:.6g}")
    n_fail = sum(1 for c in checks if not c.passed)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    if args.out:
        man.write(manifest_path_for(args.out))
        atomic_write_text(args.out, "".join(
            f"{c.name},{int(c.passed)},{c.measured!r},{c.budget!r}\n" for c in checks))
    return 0 if n_fail == 0 else 1


def cmd_report(args) -> int:
    grid = _grid_from_args(args)
    man = RunManifest("report", {"a": args.a, "field": args.field}, grid.fingerprint())
    fld, _ = read_field(args.field, grid)
    op = cached_operator(args.a, grid)
    rep = functional_report(op, fld)
    print(rep.csv_row())
    if args.out:
        write_report_csv(args.out, rep, {"source": args.field})
        man.outputs.append(args.out)
    return _finish(man, args.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cqnls", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground-state", help="shoot a stationary profile")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out", default=None)
    _add_grid_options(p)
    p.set_defaults(fn=cmd_ground_state)

    p = sub.add_parser("sharp-constant", help="sharp interpolation constant")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--method", default="closed-form",
                   choices=["closed-form", "direct-minimization"])
    p.add_argument("--out", default=None)
    _add_grid_options(p)
    p.set_defaults(fn=cmd_sharp_constant)

    p = sub.add_parser("branch", help="trace the soliton branch")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n-omega", type=int, default=32, dest="n_omega")
    p.add_argument("--omega-min", type=float, default=0.02, dest="omega_min")
    p.add_argument("--omega-max", type=float, default=0.18, dest="omega_max")
    p.add_argument("--out", default=None)
    _add_grid_options(p)
    p.set_defaults(fn=cmd_branch)

    p = sub.add_parser("threshold", help="assemble the threshold curve")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n-omega", type=int, default=32, dest="n_omega")
    p.add_argument("--omega-min", type=float, default=0.02, dest="omega_min")
    p.add_argument("--omega-max", type=float, default=0.18, dest="omega_max")
    p.add_argument("--out", default=None)
    _add_grid_options(p)
    p.set_defaults(fn=cmd_threshold)

    p = sub.add_parser("plane", help="render the mass-energy plane as SVG")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--curve", default=None, help="existing curve CSV to render")
    p.add_argument("--n-omega", type=int, default=24, dest="n_omega")
    p.add_argument("--overlay-branch", action="store_true", dest="overlay_branch")
    p.add_argument("--out", default=None)
    _add_grid_options(p)
    p.set_defaults(fn=cmd_plane)

    p = sub.add_parser("evolve", help="integrate the time-dependent equation")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--init", required=True,
                   help="preset (gaussian:A, soliton:w, soliton-perturbed:w,eps) or field file")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=10.0, dest="t_end")
    p.add_argument("--virial-R", type=float, default=10.0, dest="virial_R")
    p.add_argument("--mode", default="cubic-quintic", choices=[m.value for m in Mode])
    p.add_argument("--checkpoint-every", type=int, default=50, dest="checkpoint_every")
    p.add_argument("--out", default=None)
    _add_grid_options(p)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("verify", help="run a named invariant suite")
    p.add_argument("suite", choices=list(SUITES))
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("report", help="functional report of a stored field")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--out", default=None)
    _add_grid_options(p)
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if hasattr(args, "config"):
            _apply_config_file(args)
        if hasattr(args, "grid"):
            _parse_grid_flag(args)
        return args.fn(args)
    except CQNLSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
