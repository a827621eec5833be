"""Soliton branch, threshold curve, mass-energy regions, and classification.

Every stationary profile satisfies V = 0 exactly (a consequence of its two
integral identities), so the branch omega -> (M, E) supplies admissible
points for the constrained threshold problem at every frequency.  The
branch alone does not reach masses below roughly 0.79 M(Q_1): the missing
left edge [M(S), ...] is covered by the virial-neutral rescaling family
rho Q_1(b x) with b^2 = 2 rho^2 - rho^4, whose mass is minimized exactly at
the S state.  The curve is the lower envelope of both candidate families;
each sample records its provenance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, CoverageError, SolverError
from .fields import RadialField
from .functionals import FunctionalReport
from .grid import Grading, RadialGrid, default_grid
from .ground_state import GroundState, S_MASS_RATIO, cached_shoot, select_omega_for_alpha
from .operator import cached_operator
from .scaling import ScalingKind, ScalingLaw, apply_scaling

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class BranchPoint:
    """One soliton on the branch: its frequency and certified scalars."""

    omega: float
    mass: float
    energy: float
    virial: float
    h1a_sq: float


@dataclass(frozen=True)
class CurveSample:
    m: float
    e: float
    omega: float  # frequency of the contributing soliton; nan for rescalings
    source: str   # "branch", "rescaled-q1", or "optimizer"


@dataclass
class ThresholdCurve:
    """Sampled threshold energy m -> E_a(m) with provenance.

    The curve is +infinity below mass_s, equals the sampled envelope on
    [mass_s, mass_q], and continues into negative energies beyond mass_q
    where it coincides with the unconstrained infimum.
    """

    a: float
    mass_s: float
    mass_q: float
    samples: list[CurveSample]
    branch: list[BranchPoint] = field(default_factory=list)
    monotonicity_flags: list[float] = field(default_factory=list)

    def __post_init__(self):
        self._ms = np.array([s.m for s in self.samples])
        self._es = np.array([s.e for s in self.samples])

    def evaluate(self, m: float) -> float:
        """E_a(m): +inf below mass_s, interpolated envelope beyond."""
        if m < self.mass_s:
            return math.inf
        if m <= self._ms[-1]:
            return float(np.interp(m, self._ms, self._es))
        return float(self._es[-1])

    def in_omega(self, m: float, e: float) -> bool:
        """Membership in Omega_a = {mass >= M(S), energy >= E_a(mass)}."""
        return m >= self.mass_s and e >= self.evaluate(m)

    def distance_to_omega(self, m: float, e: float) -> float:
        """Euclidean distance from (m, e) to the sampled region Omega_a."""
        if self.in_omega(m, e):
            return 0.0
        # piecewise-linear boundary segments, extended flat past the last sample
        xs = np.concatenate([self._ms, [self._ms[-1] + 10.0 * (self.mass_q + 1.0)]])
        ys = np.concatenate([self._es, [self._es[-1]]])
        px, py = m, e
        ax, ay = xs[:-1], ys[:-1]
        bx, by = xs[1:], ys[1:]
        dx, dy = bx - ax, by - ay
        seg2 = dx**2 + dy**2
        t = np.clip(((px - ax) * dx + (py - ay) * dy) / np.where(seg2 == 0, 1, seg2), 0.0, 1.0)
        cx, cy = ax + t * dx, ay + t * dy
        d_seg = float(np.min(np.hypot(px - cx, py - cy)))
        # vertical edge of Omega_a at mass_s, rising to +infinity
        e_left = float(self._es[0])
        d_edge = math.hypot(self.mass_s - m, max(e_left - e, 0.0))
        return min(d_seg, d_edge)

    def to_csv(self) -> str:
        lines = [f"# a={self.a}", f"# mass_s={self.mass_s!r}", f"# mass_q={self.mass_q!r}",
                 "# columns=m,e,omega,source"]
        for s in self.samples:
            lines.append(f"{s.m!r},{s.e!r},{s.omega!r},{s.source}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ThresholdCurve":
        a = mass_s = mass_q = None
        samples = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("a="):
                    a = float(body[2:])
                elif body.startswith("mass_s="):
                    mass_s = float(body.split("=", 1)[1])
                elif body.startswith("mass_q="):
                    mass_q = float(body.split("=", 1)[1])
                continue
            m_, e_, w_, src = line.split(",")
            samples.append(CurveSample(float(m_), float(e_), float(w_), src))
        if a is None or mass_s is None or mass_q is None or not samples:
            raise ConfigurationError("curve file is missing header or samples")
        return cls(a=a, mass_s=mass_s, mass_q=mass_q, samples=samples)


@dataclass(frozen=True)
class RegionQuery:
    m: float
    e: float
    verdict: str  # inside-K_a | outside-K_a | in-Omega_a | boundary-tolerance


def trace_branch(a: float, omega_grid, grid: RadialGrid | None = None) -> list[BranchPoint]:
    """Shoot each frequency (at coupling min(a, 0)) and collect branch points.

    Failures are logged and skipped, not fatal; an empty frequency grid is a
    configuration error.
    """
    omegas = list(omega_grid)
    if not omegas:
        raise ConfigurationError("omega grid is empty")
    if grid is None:
        grid = default_grid(Grading.GRADED if a < 0 else Grading.UNIFORM)
    ac = min(a, 0.0)
    points = []
    for w in omegas:
        try:
            st = cached_shoot(ac, float(w), grid)
        except Exception as exc:  # noqa: BLE001 - recorded, not fatal
            logger.warning("branch point omega=%g failed: %s", w, exc)
            continue
        rep = st.report
        points.append(
            BranchPoint(
                omega=float(w),
                mass=rep.mass,
                energy=rep.energy,
                virial=rep.virial,
                h1a_sq=rep.h1a_sq,
            )
        )
    return points


def _family_arcs(q1: GroundState, rho_lo=0.30, rho_hi=1.38, n=600):
    """(m, e) along the virial-neutral rescalings rho Q_1(b x), b^2 = 2rho^2 - rho^4."""
    h1 = q1.report.h1a_sq
    m1 = q1.report.mass
    # rho = 1/sqrt(2) is the exact mass minimum (the S state); include it so
    # the arcs reach down to mass_s itself
    rho = np.unique(np.concatenate([np.linspace(rho_lo, rho_hi, n), [1.0 / math.sqrt(2.0), 1.0]]))
    b = np.sqrt(2.0 * rho**2 - rho**4)
    m = (rho**2 / b**3) * m1
    e = h1 * (rho**2 / (2.0 * b) - (2.0 / 3.0) * rho**4 / b**3 + rho**6 / (6.0 * b**3))
    return m, e


def default_omega_grid(n: int = 32, lo: float = 0.02, hi: float = 0.18):
    return np.geomspace(lo, hi, n)


def build_threshold_curve(
    a: float,
    branch: list[BranchPoint],
    grid: RadialGrid | None = None,
    n_samples: int = 161,
    extend_factor: float = 1.3,
) -> ThresholdCurve:
    """Assemble the threshold curve from branch points and rescaling arcs.

    The envelope is evaluated on a mass grid spanning [M(S), extend_factor *
    M(Q_1)]; decreasing monotonicity on [M(S), M(Q_1)] is enforced by a
    running minimum with any violation magnitudes recorded in
    ``monotonicity_flags``.
    """
    if not branch:
        raise ConfigurationError("branch is empty")
    if grid is None:
        grid = default_grid(Grading.GRADED if a < 0 else Grading.UNIFORM)
    ac = min(a, 0.0)
    q1 = select_omega_for_alpha(ac, 1.0, grid)
    mass_q = q1.report.mass
    mass_s = S_MASS_RATIO * mass_q

    segments = []  # (m0, e0, m1, e1, omega, source)
    pts = sorted(branch, key=lambda p: p.omega)
    for p0, p1 in zip(pts[:-1], pts[1:]):
        segments.append((p0.mass, p0.energy, p1.mass, p1.energy, p0.omega, "branch"))
    fm, fe = _family_arcs(q1)
    for i in range(len(fm) - 1):
        segments.append((fm[i], fe[i], fm[i + 1], fe[i + 1], math.nan, "rescaled-q1"))

    m_grid = np.linspace(mass_s, extend_factor * mass_q, n_samples)
    m_grid = np.unique(np.concatenate([m_grid, [mass_s, mass_q]]))

    samples: list[CurveSample] = []
    gaps = []
    for m in m_grid:
        best_e, best_w, best_src = math.inf, math.nan, ""
        for m0, e0, m1, e1, w, src in segments:
            lo, hi = (m0, m1) if m0 <= m1 else (m1, m0)
            if lo - 1e-12 <= m <= hi + 1e-12:
                t = 0.0 if hi == lo else (m - m0) / (m1 - m0)
                ev = e0 + t * (e1 - e0)
                if ev < best_e:
                    best_e, best_w, best_src = ev, w, src
        if math.isinf(best_e):
            gaps.append(float(m))
            continue
        if abs(m - mass_q) < 1e-12 * max(1.0, mass_q):
            # exact anchor: the optimizer itself sits at (M(Q_1), 0)
            samples.append(CurveSample(float(m), 0.0, q1.omega, "optimizer"))
        else:
            samples.append(CurveSample(float(m), float(best_e), float(best_w), best_src))
    if gaps:
        raise CoverageError(
            "branch and rescaling arcs do not cover the mass window",
            diagnostics={"gaps": gaps, "mass_s": mass_s, "mass_q": mass_q},
        )

    # enforce decrease by running minimum; record violation magnitudes
    flags = []
    emin = math.inf
    cleaned = []
    for s in samples:
        if s.e > emin + 1e-12:
            flags.append(s.e - emin)
            cleaned.append(CurveSample(s.m, emin, s.omega, s.source))
        else:
            emin = min(emin, s.e)
            cleaned.append(s)
    if flags:
        logger.warning("threshold curve: %d monotonicity repairs, worst %.3e",
                       len(flags), max(flags))
    curve = ThresholdCurve(
        a=a, mass_s=mass_s, mass_q=mass_q, samples=cleaned, branch=pts,
        monotonicity_flags=flags,
    )
    e_left = curve.evaluate(mass_s)
    e_s_exact = q1.report.h1a_sq / (9.0 * math.sqrt(3.0))
    if e_left > e_s_exact + 1e-6 * max(1.0, abs(e_s_exact)):
        raise CoverageError(
            "curve exceeds the S-state energy at its left endpoint",
            diagnostics={"e_left": e_left, "E(S)": e_s_exact},
        )
    return curve


def classify(curve: ThresholdCurve, m: float, e: float) -> RegionQuery:
    """Deterministic region verdict for a mass-energy point."""
    near = BOUNDARY_TOL
    ecurve = curve.evaluate(m)
    on_boundary = (
        abs(m) <= near
        or abs(m - curve.mass_q) <= near
        or (0.0 < m < curve.mass_q and abs(e) <= near)
        or (math.isfinite(ecurve) and abs(e - ecurve) <= near)
    )
    if on_boundary:
        return RegionQuery(m, e, "boundary-tolerance")
    if curve.in_omega(m, e):
        return RegionQuery(m, e, "in-Omega_a")
    if 0.0 < m < curve.mass_q and 0.0 < e < ecurve:
        return RegionQuery(m, e, "inside-K_a")
    return RegionQuery(m, e, "outside-K_a")


def _spread_infimum(rep: FunctionalReport, s_lo=1e-4, s_hi=4.0, n=800) -> float:
    """Exact infimum of E over the mass-preserving dilations of one state."""
    s = np.geomspace(s_lo, s_hi, n)
    e = 0.5 * s**2 * rep.h1a_sq - 0.25 * s**3 * rep.l4_4 + s**6 * rep.l6_6 / 6.0
    return float(np.min(e))


def compute_d(a: float, m: float, grid: RadialGrid | None = None, seed: int = 0) -> float:
    """Unconstrained infimum of E_{a and 0} at fixed mass m.

    Combines a projected (mass-renormalized) gradient flow from several
    seeds with the exact energies available along mass-preserving dilations
    of every iterate and along the widening rescalings of the alpha = 1
    optimizer; returns the best value found.
    """
    if m < 0:
        raise ConfigurationError(f"mass must be nonnegative, got {m}")
    if m == 0.0:
        return 0.0
    if grid is None:
        grid = default_grid(Grading.GRADED if a < 0 else Grading.UNIFORM)
    ac = min(a, 0.0)
    op = cached_operator(ac, grid)
    r = grid.nodes
    w = grid.weights
    rng = np.random.default_rng(seed)

    candidates = []
    q1 = select_omega_for_alpha(ac, 1.0, grid)
    mq = q1.report.mass
    if m > mq:
        s = math.sqrt(m / mq)
        candidates.append(-(s - 1.0) / 4.0 * q1.report.l4_4)  # widening witness

    def flow(f0: np.ndarray, iters=800) -> float:
        f = np.abs(f0) + 1e-30
        f *= math.sqrt(m / float(np.sum(w * f**2)))
        eta = 1e-2
        best = math.inf

        def energy_and_grad(fv):
            fld = RadialField(grid, fv)
            h1 = op.quadratic_form(fld)
            l4 = float(np.sum(w * fv**4))
            l6 = float(np.sum(w * fv**6))
            en = 0.5 * h1 - 0.25 * l4 + l6 / 6.0
            gr = op.apply(fld).values.real - fv**3 + fv**5
            return en, gr, FunctionalReport.from_integrals(m, h1, l4, l6, ac)

        en, gr, rep = energy_and_grad(f)
        for _ in range(iters):
            candidates.append(_spread_infimum(rep))
            step = f - eta * gr
            step = np.abs(step)
            step *= math.sqrt(m / float(np.sum(w * step**2)))
            en_new, gr_new, rep_new = energy_and_grad(step)
            if en_new <= en:
                f, en, gr, rep = step, en_new, gr_new, rep_new
                eta = min(eta * 1.2, 0.2)
            else:
                eta *= 0.5
                if eta < 1e-8:
                    break
            best = min(best, en)
        return best

    sigmas = [2.0, 5.0]
    for sigma in sigmas:
        g = np.exp(-((r / sigma) ** 2)) * (1.0 + 0.05 * rng.standard_normal())
        candidates.append(flow(g))
    if m > 0.25 * mq:
        s = math.sqrt(m / mq)
        tilted = apply_scaling(q1.profile, ScalingLaw(ScalingKind.L4_TILTING, (s,)))
        candidates.append(flow(tilted.values.real, iters=400))
    return float(min(candidates))
