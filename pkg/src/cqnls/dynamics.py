"""Radial time evolution by Strang splitting, with virial and scattering probes.

One step is exact-nonlinear-phase / exact-linear-propagator / exact-
nonlinear-phase: the phase factor multiplies by e^{i (dt/2)(|u|^2 - |u|^4)}
(sign per mode) and preserves |u| pointwise, the linear step is the unitary
spectral propagator, so the discrete mass is conserved to rounding and the
energy drift is second order in dt.

The localized virial weight is phi(x) = R^2 psi(|x|/R) with

    psi(rho) = rho^2                        on [0, 1]
    psi(rho) = 1 + (2/5)(1 - (2 - rho)^5)   on [1, 2]
    psi(rho) = 7/5                          beyond 2,

a piecewise-polynomial profile whose slope decreases monotonically to zero
at rho = 2 and whose fourth derivative never exceeds the 4/R^2 budget (it
is nonpositive on the transition).  The quadratic cap cannot join a
decreasing slope with full C^2 smoothness, so the junction at rho = 1 keeps
continuity of psi and psi' only; all tabulated derivative bounds hold at
every node.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InstabilityError
from .fields import RadialField
from .functionals import FunctionalReport, report
from .grid import RadialGrid
from .operator import DiscreteOperator, cached_operator

MAX_DT = 1e-2
_BOUNDARY_MASS_FRACTION = 1e-8


class Mode(str, enum.Enum):
    CUBIC_QUINTIC = "cubic-quintic"
    QUINTIC_ONLY = "quintic-only"
    LINEAR_ONLY = "linear-only"


@dataclass(frozen=True)
class EvolutionConfig:
    a: float
    dt: float
    t_end: float
    virial_R: float
    mode: Mode = Mode.CUBIC_QUINTIC
    checkpoint_every: int = 50

    def __post_init__(self):
        if not (0 < self.dt <= MAX_DT):
            raise ConfigurationError(f"dt must lie in (0, {MAX_DT}], got {self.dt}")
        if self.t_end <= 0:
            raise ConfigurationError("t_end must be positive")
        if self.checkpoint_every < 1:
            raise ConfigurationError("checkpoint_every must be >= 1")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass(frozen=True)
class VirialWeight:
    """Tabulated localization weight and its radial derivatives."""

    R: float
    grid: RadialGrid
    phi: np.ndarray = field(repr=False)
    dphi: np.ndarray = field(repr=False)
    d2phi: np.ndarray = field(repr=False)
    lap_phi: np.ndarray = field(repr=False)
    bilap_phi: np.ndarray = field(repr=False)

    def psi(self, rho):
        return _psi_table(np.asarray(rho, dtype=float))[0]


def _psi_table(rho: np.ndarray):
    """psi and its first four derivatives at rho >= 0."""
    inner = rho <= 1.0
    outer = rho >= 2.0
    mid = ~(inner | outer)
    t = 2.0 - rho  # decays from 1 to 0 across the transition
    psi = np.where(inner, rho**2, np.where(outer, 1.4, 1.0 + 0.4 * (1.0 - t**5)))
    d1 = np.where(inner, 2.0 * rho, np.where(outer, 0.0, 2.0 * t**4))
    d2 = np.where(inner, 2.0, np.where(outer, 0.0, -8.0 * t**3))
    d3 = np.where(mid, 24.0 * t**2, 0.0)
    d4 = np.where(mid, -48.0 * t, 0.0)
    return psi, d1, d2, d3, d4


def build_virial_weight(grid: RadialGrid, R: float) -> VirialWeight:
    """Tabulate phi = R^2 psi(r/R) and its derivatives on the grid."""
    if not (0 < R <= grid.r_max / 2):
        raise ConfigurationError(f"virial radius must lie in (0, r_max/2], got {R}")
    r = grid.nodes
    rho = r / R
    psi, d1, d2, d3, d4 = _psi_table(rho)
    phi = R**2 * psi
    dphi = R * d1
    d2phi = d2
    d3phi = d3 / R
    d4phi = d4 / R**2
    lap = d2phi + 2.0 * dphi / r
    bilap = d4phi + 4.0 * d3phi / r
    for arr in (phi, dphi, d2phi, lap, bilap):
        arr.setflags(write=False)
    return VirialWeight(R=float(R), grid=grid, phi=phi, dphi=dphi, d2phi=d2phi,
                        lap_phi=lap, bilap_phi=bilap)


def virial_monitor(op: DiscreteOperator, u: RadialField, w: VirialWeight):
    """(I, I', I'') of the localized variance I = integral(phi |u|^2).

    I'' uses the radial second-derivative identity, including the
    inverse-square potential term and the bi-Laplacian correction; when the
    weight cap lies beyond the support of u it reduces to 8 V_a(u).
    """
    if u.grid != op.grid or w.grid != op.grid:
        raise ConfigurationError("field, weight, and operator grids must match")
    r = op.grid.nodes
    wq = op.grid.weights
    vals = u.values
    absq = np.abs(vals) ** 2
    du = np.gradient(vals, r)
    i_val = float(np.sum(wq * w.phi * absq))
    idot = 2.0 * float(np.sum(wq * w.dphi * np.imag(du * np.conj(vals))))
    iddot = float(
        np.sum(
            wq
            * (
                4.0 * w.d2phi * np.abs(du) ** 2
                + w.lap_phi * ((4.0 / 3.0) * absq**3 - absq**2)
                - w.bilap_phi * absq
                + 4.0 * op.spec.a * (w.dphi / r) * absq / r**2
            )
        )
    )
    return i_val, idot, iddot


def _phase_exponent(absq: np.ndarray, mode: Mode) -> np.ndarray:
    if mode is Mode.CUBIC_QUINTIC:
        return absq - absq**2
    if mode is Mode.QUINTIC_ONLY:
        return -(absq**2)
    return np.zeros_like(absq)


def step(op: DiscreteOperator, u: RadialField, dt: float, mode: Mode | str = Mode.CUBIC_QUINTIC):
    """One Strang step: half nonlinear phase, full linear step, half phase."""
    mode = Mode(mode)
    absq = np.abs(u.values) ** 2
    vals = u.values * np.exp(1j * (dt / 2.0) * _phase_exponent(absq, mode))
    out = op.propagate(RadialField(u.grid, vals), dt)
    absq = np.abs(out.values) ** 2
    out.values *= np.exp(1j * (dt / 2.0) * _phase_exponent(absq, mode))
    if not np.all(np.isfinite(out.values)):
        raise InstabilityError("time step produced non-finite samples", partial_trace=u)
    return out


@dataclass
class EvolutionTrace:
    """Checkpoint series of conserved quantities and scattering diagnostics."""

    config: EvolutionConfig
    times: np.ndarray
    mass_series: np.ndarray
    energy_series: np.ndarray
    virial_series: np.ndarray
    i_series: np.ndarray
    idot_series: np.ndarray
    iddot_series: np.ndarray
    l4_series: np.ndarray
    l10_density_series: np.ndarray
    scatter_gap_series: np.ndarray
    modulus_drift_series: np.ndarray
    h1_plain_series: np.ndarray
    boundary_polluted: bool
    final_state: RadialField

    CSV_HEADER = "t,mass,energy,virial,I,Idot,Iddot,l4,l10d,scatter_gap"

    def to_csv(self) -> str:
        lines = [f"# a={self.config.a}", f"# dt={self.config.dt!r}",
                 f"# mode={self.config.mode.value}",
                 f"# boundary_polluted={self.boundary_polluted}",
                 "# columns=" + self.CSV_HEADER]
        cols = zip(self.times, self.mass_series, self.energy_series, self.virial_series,
                   self.i_series, self.idot_series, self.iddot_series,
                   self.l4_series, self.l10_density_series, self.scatter_gap_series)
        for row in cols:
            lines.append(",".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"

    @property
    def t_end(self) -> float:
        return float(self.times[-1])


def evolve(config: EvolutionConfig, u0: RadialField) -> EvolutionTrace:
    """Integrate to t_end, recording checkpoint diagnostics.

    On numerical blow-up an InstabilityError carrying the partial trace is
    raised.  A boundary-pollution flag is set once the mass beyond
    0.8 r_max exceeds 1e-8 of the total.
    """
    u0.require_finite("initial state")
    grid = u0.grid
    if config.virial_R > grid.r_max / 2:
        raise ConfigurationError("virial_R exceeds r_max/2 for this grid")
    op = cached_operator(config.a, grid)
    weight = build_virial_weight(grid, config.virial_R)
    plain_op = cached_operator(0.0, grid) if config.a != 0.0 else op

    n_steps = int(round(config.t_end / config.dt))
    k = config.checkpoint_every
    evals, _ = op.eigensystem()
    U = op._unitary()
    z = op._sqmu * grid.nodes
    phase_half = np.exp(-1j * config.dt * evals)
    outer = grid.nodes > 0.8 * grid.r_max
    w = grid.weights

    rows = []
    polluted = False
    u = u0.values.astype(np.complex128).copy()
    q0_abs = np.abs(u0.values)
    norm0 = math.sqrt(float(np.sum(w * q0_abs**2)))
    prev_checkpoint = u.copy()
    prev_t = 0.0

    def record(t, u_now, gap):
        fld = RadialField(grid, u_now)
        rep = report(op, fld)
        iv, idv, iddv = virial_monitor(op, fld, weight)
        absq = np.abs(u_now) ** 2
        l10 = float(np.sum(w * absq**5))
        drift = math.sqrt(float(np.sum(w * (np.abs(u_now) - q0_abs) ** 2))) / max(norm0, 1e-300)
        h1p = plain_op.quadratic_form(fld)
        rows.append((t, rep.mass, rep.energy, rep.virial, iv, idv, iddv,
                     rep.l4_4, l10, gap, drift, h1p))

    record(0.0, u, 0.0)
    exponent = lambda aq: _phase_exponent(aq, config.mode)
    try:
        done = 0
        while done < n_steps:
            burst = min(k, n_steps - done)
            for _ in range(burst):
                u *= np.exp(1j * (config.dt / 2.0) * exponent(np.abs(u) ** 2))
                s = z * u
                coeff = U.T @ s
                coeff *= phase_half
                s = U @ coeff
                u = s / z
                u *= np.exp(1j * (config.dt / 2.0) * exponent(np.abs(u) ** 2))
            done += burst
            t = done * config.dt
            if not np.all(np.isfinite(u)):
                raise InstabilityError(
                    f"evolution became non-finite at t={t}",
                    partial_trace=_assemble_trace(config, grid, rows, polluted,
                                                  RadialField(grid, prev_checkpoint)),
                )
            # free-flow gap against the previous checkpoint
            lin = op.propagate(RadialField(grid, prev_checkpoint), t - prev_t)
            diff = RadialField(grid, u - lin.values)
            gap = math.sqrt(max(report(op, diff).h1a_sq + float(np.sum(w * np.abs(diff.values) ** 2)), 0.0))
            record(t, u, gap)
            mass_now = rows[-1][1]
            if float(np.sum(w[outer] * np.abs(u[outer]) ** 2)) > _BOUNDARY_MASS_FRACTION * mass_now:
                polluted = True
            prev_checkpoint = u.copy()
            prev_t = t
    except InstabilityError:
        raise
    return _assemble_trace(config, grid, rows, polluted, RadialField(grid, u))


def _assemble_trace(config, grid, rows, polluted, final_state) -> EvolutionTrace:
    cols = list(zip(*rows)) if rows else [[]] * 12
    arr = [np.asarray(c, dtype=float) for c in cols]
    return EvolutionTrace(
        config=config,
        times=arr[0],
        mass_series=arr[1],
        energy_series=arr[2],
        virial_series=arr[3],
        i_series=arr[4],
        idot_series=arr[5],
        iddot_series=arr[6],
        l4_series=arr[7],
        l10_density_series=arr[8],
        scatter_gap_series=arr[9],
        modulus_drift_series=arr[10],
        h1_plain_series=arr[11],
        boundary_polluted=polluted,
        final_state=final_state,
    )


@dataclass(frozen=True)
class ScatteringVerdict:
    verdict: str  # scatter-like | soliton-like | inconclusive
    reason: str
    l4_decay_factor: float
    late_gap: float
    modulus_drift: float


def scattering_diagnostics(trace: EvolutionTrace) -> ScatteringVerdict:
    """Heuristic verdict from L^4 decay, free-flow gap, and |u| stationarity.

    The thresholds (tenfold L^4 decay, late gap below 1e-3) are artifact
    conventions for flagging behavior, not proved dichotomies.
    """
    if trace.t_end < 20.0:
        return ScatteringVerdict("inconclusive", "trace shorter than t=20",
                                 0.0, math.inf, 0.0)
    l4 = trace.l4_series
    peak = float(np.max(l4))
    if peak == 0.0:
        return ScatteringVerdict("scatter-like", "zero field", math.inf, 0.0, 0.0)
    tail_start = np.searchsorted(trace.times, 0.75 * trace.t_end)
    late_gap = float(np.max(trace.scatter_gap_series[tail_start:]))
    decay = peak / float(l4[-1]) if l4[-1] > 0 else math.inf
    drift = float(np.max(trace.modulus_drift_series))
    tail = l4[tail_start:]
    tail_monotone = bool(np.all(np.diff(tail) <= 1e-12 + 0.05 * tail[:-1])) if len(tail) > 1 else True
    if drift <= 1e-3 and decay < 2.0:
        return ScatteringVerdict("soliton-like", "stationary modulus and flat L4",
                                 decay, late_gap, drift)
    if decay >= 10.0 and late_gap <= 1e-3 and tail_monotone:
        return ScatteringVerdict("scatter-like", "L4 decayed 10x with small free-flow gap",
                                 decay, late_gap, drift)
    return ScatteringVerdict("inconclusive", "no criterion matched", decay, late_gap, drift)


def make_preset(name: str, grid: RadialGrid, a: float, params: tuple[float, ...]) -> RadialField:
    """Initial data presets: gaussian(A), soliton(omega), soliton-perturbed(omega, eps)."""
    r = grid.nodes
    if name == "gaussian":
        (amp,) = params
        return RadialField(grid, amp * np.exp(-(r**2)))
    if name in ("soliton", "soliton-perturbed"):
        from .ground_state import cached_shoot

        omega = params[0]
        state = cached_shoot(a, omega, grid)
        vals = state.profile.values.copy()
        if name == "soliton-perturbed":
            eps = params[1]
            vals = vals * (1.0 + eps * np.exp(-(r**2)))
        return RadialField(grid, vals)
    raise ConfigurationError(f"unknown preset {name!r}")
