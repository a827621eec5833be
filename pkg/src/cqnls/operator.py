"""The operator L_a = -Laplacian + a/|x|^2 reduced to the radial line.

The substitution v = r*u turns the three-dimensional radial operator into
-v'' + (a/r^2) v on (0, r_max) with v(0) = 0 and a homogeneous Dirichlet
condition one spacing beyond the last node.  A piecewise-linear stiffness
matrix together with the lumped cell measure of the grid yields a symmetric
tridiagonal representation whose quadratic form evaluates the Sobolev
seminorm ||u||_{H^1_a}^2 and whose eigenbasis drives the exact linear
propagator e^{-i tau L_a}.

The inverse-square potential is integrated with the flat line weights of
the grid so that the quadratic form reproduces a*integral(|u|^2/r^2 dx)
accurately even for fields finite at the origin; the two weight families
differ only in the cell touching r = 0, so the pointwise action of the
operator is consistent at every node except the first.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, StructuralError
from .fields import RadialField
from .grid import RadialGrid


@dataclass(frozen=True)
class OperatorSpec:
    """Coupling constant with its indicial data.

    rho = 1/2 - sqrt(1/4 + a) and beta = -rho give the origin behavior
    u ~ r^beta of the distinguished (Friedrichs) branch; q0 is the critical
    Lebesgue exponent, infinite for a >= 0 and 3/rho for a < 0.
    """

    a: float
    rho: float = field(init=False)
    beta: float = field(init=False)
    q0: float = field(init=False)

    def __post_init__(self):
        if not (self.a > -0.25):
            raise DomainError(f"subcritical coupling required: a > -1/4, got a={self.a}")
        rho = 0.5 - math.sqrt(0.25 + self.a)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "beta", -rho)
        object.__setattr__(self, "q0", math.inf if self.a >= 0 else 3.0 / rho)


class DiscreteOperator:
    """Symmetric tridiagonal discretization of L_a on a radial grid."""

    def __init__(self, spec: OperatorSpec, grid: RadialGrid):
        self.spec = spec
        self.grid = grid
        r = grid.nodes
        h = np.diff(r)
        # spacing to the origin anchor and to the Dirichlet ghost node
        hg = np.concatenate(([r[0]], h, [h[-1]]))
        self._stiff_diag = 1.0 / hg[:-1] + 1.0 / hg[1:]
        self._stiff_off = -1.0 / h
        self._mu = grid.cell_measure
        self._pot = spec.a * grid.line_weights / r**2  # weak-form potential weights
        self._sqmu = np.sqrt(self._mu)
        # symmetric tridiagonal matrix acting on s = sqrt(mu) * v
        self._diag = self._stiff_diag / self._mu + self._pot / self._mu
        self._off = self._stiff_off / np.sqrt(self._mu[:-1] * self._mu[1:])
        for arr in (self._stiff_diag, self._stiff_off, self._diag, self._off):
            arr.setflags(write=False)
        self._eig_lock = threading.Lock()
        self._eigensystem = None
        self._unitary_complex = None

    # --- matrix exposure -------------------------------------------------

    @property
    def matrix_diagonal(self) -> np.ndarray:
        """Main diagonal of the symmetric tridiagonal matrix."""
        return self._diag

    @property
    def matrix_offdiagonal(self) -> np.ndarray:
        """Off diagonal of the symmetric tridiagonal matrix."""
        return self._off

    def eigensystem(self):
        """Eigenvalues and orthonormal eigenvectors, computed once and cached."""
        if self._eigensystem is None:
            with self._eig_lock:
                if self._eigensystem is None:
                    evals, evecs = eigh_tridiagonal(self._diag, self._off)
                    evals.setflags(write=False)
                    evecs.setflags(write=False)
                    self._eigensystem = (evals, evecs)
        return self._eigensystem

    def eigenvalues(self, k: int | None = None) -> np.ndarray:
        if k is not None and self._eigensystem is None:
            return eigh_tridiagonal(
                self._diag, self._off, select="i", select_range=(0, k - 1), eigvals_only=True
            )
        return self.eigensystem()[0][:k] if k else self.eigensystem()[0]

    def _unitary(self) -> np.ndarray:
        # complex, Fortran-ordered copy of the eigenvector matrix; avoids a
        # real-to-complex promotion on every propagator application
        if self._unitary_complex is None:
            with self._eig_lock:
                if self._unitary_complex is None:
                    _, evecs = self.eigensystem()
                    self._unitary_complex = np.asfortranarray(evecs.astype(np.complex128))
        return self._unitary_complex

    # --- action ----------------------------------------------------------

    def _require_same_grid(self, f: RadialField) -> None:
        if not f.same_grid(self.grid):
            raise StructuralError("field grid does not match operator grid")

    def _apply_reduced(self, v: np.ndarray) -> np.ndarray:
        """Apply the reduced operator to a v = r*u vector."""
        out = self._stiff_diag * v
        out[:-1] += self._stiff_off * v[1:]
        out[1:] += self._stiff_off * v[:-1]
        out += self._pot * v
        return out / self._mu

    def apply(self, f: RadialField) -> RadialField:
        """Return L_a f in the u variable."""
        self._require_same_grid(f)
        r = self.grid.nodes
        return RadialField(self.grid, self._apply_reduced(r * f.values) / r)

    def quadratic_form(self, f: RadialField) -> float:
        """<L_a f, f> = ||f||_{H^1_a}^2 over the discrete measure."""
        self._require_same_grid(f)
        v = self.grid.nodes * f.values
        sd, so = self._stiff_diag, self._stiff_off
        quad = np.sum(sd * np.abs(v) ** 2) + 2.0 * np.sum(so * np.real(v[1:] * np.conj(v[:-1])))
        quad += np.sum(self._pot * np.abs(v) ** 2)
        return 4.0 * np.pi * float(quad)

    def propagate(self, f: RadialField, tau: float) -> RadialField:
        """Apply e^{-i tau L_a} through the cached eigenbasis (exactly unitary)."""
        self._require_same_grid(f)
        evals, _ = self.eigensystem()
        U = self._unitary()
        s = self._sqmu * (self.grid.nodes * f.values)
        coeff = U.T @ s
        coeff *= np.exp(-1j * tau * evals)
        s = U @ coeff
        return RadialField(self.grid, s / (self._sqmu * self.grid.nodes))


def build_operator(a: float, grid: RadialGrid) -> DiscreteOperator:
    """Discretize L_a on the grid; rejects a <= -1/4."""
    return DiscreteOperator(OperatorSpec(a), grid)


def apply_operator(op: DiscreteOperator, f: RadialField) -> RadialField:
    return op.apply(f)


def linear_propagate(op: DiscreteOperator, f: RadialField, tau: float) -> RadialField:
    return op.propagate(f, tau)


_operator_cache: dict[tuple, DiscreteOperator] = {}
_cache_lock = threading.Lock()


def cached_operator(a: float, grid: RadialGrid) -> DiscreteOperator:
    """Shared immutable operator instances, keyed by coupling and grid."""
    key = (float(a), grid.fingerprint())
    with _cache_lock:
        op = _operator_cache.get(key)
        if op is None:
            op = build_operator(a, grid)
            _operator_cache[key] = op
    return op
