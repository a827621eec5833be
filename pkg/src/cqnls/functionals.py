"""Scalar functionals: mass, energy, virial, Lebesgue norms, and quotients.

Energy and virial are assembled from the five primitive integrals, so the
defining identities

    E_a = h1a/2 - l4/4 + l6/6        V_a = h1a + l6 - (3/4) l4

hold to rounding by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, StructuralError, UndefinedQuotientError
from .fields import RadialField
from .operator import DiscreteOperator


@dataclass(frozen=True)
class FunctionalReport:
    """The six scalars of a field under a given coupling."""

    mass: float
    energy: float
    virial: float
    h1a_sq: float
    l4_4: float
    l6_6: float
    a: float = 0.0  # coupling the report was evaluated under

    @classmethod
    def from_integrals(cls, mass, h1a_sq, l4_4, l6_6, a) -> "FunctionalReport":
        energy = 0.5 * h1a_sq - 0.25 * l4_4 + l6_6 / 6.0
        virial = h1a_sq + l6_6 - 0.75 * l4_4
        return cls(
            mass=float(mass),
            energy=float(energy),
            virial=float(virial),
            h1a_sq=float(h1a_sq),
            l4_4=float(l4_4),
            l6_6=float(l6_6),
            a=float(a),
        )

    def csv_row(self) -> str:
        return ",".join(
            repr(float(x))
            for x in (self.mass, self.energy, self.virial, self.h1a_sq, self.l4_4, self.l6_6)
        )


def report(op: DiscreteOperator, f: RadialField) -> FunctionalReport:
    """All six scalars in one pass; h1a_sq through the operator quadratic form."""
    f.require_finite("report input")
    absq = np.abs(f.values) ** 2
    w = f.grid.weights
    mass = float(np.sum(w * absq))
    l4 = float(np.sum(w * absq**2))
    l6 = float(np.sum(w * absq**3))
    h1 = op.quadratic_form(f)
    return FunctionalReport.from_integrals(mass, h1, l4, l6, op.spec.a)


def j_quotient(op: DiscreteOperator, f: RadialField, alpha: float) -> float:
    """The scale-invariant quotient whose infimum is the inverse sharp constant.

    J = ||f||_2 * ||f||_{H^1_a}^{3/(1+alpha)} * ||f||_6^{3 alpha/(1+alpha)} / ||f||_4^4
    """
    rep = report(op, f)
    if rep.mass == 0.0:
        raise UndefinedQuotientError("quotient undefined at the zero field")
    p = 1.0 / (1.0 + alpha)
    return (
        math.sqrt(rep.mass)
        * rep.h1a_sq ** (1.5 * p)
        * rep.l6_6 ** (0.5 * alpha * p)
        / rep.l4_4
    )


def f_functional(rep: FunctionalReport, curve) -> float:
    """Induction functional: E + (M+E)/dist((M,E), Omega_a), infinite inside Omega_a.

    The distance is Euclidean in the (mass, energy) plane, measured against
    the piecewise-linear region above the sampled threshold curve.
    """
    if abs(rep.a - curve.a) > 1e-12:
        raise StructuralError(f"curve coupling a={curve.a} does not match report a={rep.a}")
    m, e = rep.mass, rep.energy
    if m == 0.0 and rep.h1a_sq == 0.0:
        return 0.0
    if curve.in_omega(m, e):
        return math.inf
    d = curve.distance_to_omega(m, e)
    return e + (m + e) / d


def write_report_csv(path: str | Path, rep: FunctionalReport, metadata: dict | None = None) -> None:
    lines = [f"# {k}={v}" for k, v in {**(metadata or {}), "a": rep.a}.items()]
    lines.append("# columns=mass,energy,virial,h1a_sq,l4_4,l6_6")
    lines.append(rep.csv_row())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_report_csv(path: str | Path) -> FunctionalReport:
    a = 0.0
    row = None
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line.startswith("#"):
            if line[1:].strip().startswith("a="):
                a = float(line.split("=", 1)[1])
            continue
        if line:
            row = [float(x) for x in line.split(",")]
    if row is None or len(row) != 6:
        raise DataError("report file lacks a six-column data row")
    return FunctionalReport(*row, a=a)
