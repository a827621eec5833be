import numpy as np
import pytest

import cqnls
from cqnls.errors import DomainError, StructuralError


def test_spec_indicial_data():
    spec = cqnls.OperatorSpec(-0.1)
    assert spec.rho == pytest.approx(0.5 - np.sqrt(0.15))
    assert spec.beta == pytest.approx(np.sqrt(0.15) - 0.5)
    assert spec.q0 == pytest.approx(3.0 / spec.rho)
    assert cqnls.OperatorSpec(0.0).beta == 0.0
    assert cqnls.OperatorSpec(1.0).q0 == np.inf
    assert cqnls.OperatorSpec(1.0).beta > 0
    assert cqnls.OperatorSpec(-0.2).beta < 0


def test_rejects_supercritical_coupling(uniform_grid):
    with pytest.raises(DomainError, match="subcritical"):
        cqnls.build_operator(-0.3, uniform_grid)
    with pytest.raises(DomainError):
        cqnls.OperatorSpec(-0.25)


def test_apply_zero_field(op_free, uniform_grid):
    z = cqnls.RadialField.zeros(uniform_grid)
    out = cqnls.apply_operator(op_free, z)
    assert np.all(out.values == 0)


def test_apply_matches_laplacian_of_gaussian():
    """-Laplacian e^{-r^2} = (6 - 4 r^2) e^{-r^2}; checked pointwise away from
    the first node (potential weights) and the Dirichlet boundary."""
    g = cqnls.build_grid(4096, 40.0)
    op = cqnls.build_operator(0.0, g)
    f = cqnls.RadialField.from_callable(g, lambda r: np.exp(-(r**2)))
    out = cqnls.apply_operator(op, f).values.real
    exact = (6.0 - 4.0 * g.nodes**2) * np.exp(-(g.nodes**2))
    interior = slice(3, -3)
    assert np.max(np.abs(out[interior] - exact[interior])) < 1e-3

    op1 = cqnls.build_operator(1.0, g)
    out1 = cqnls.apply_operator(op1, f).values.real
    exact1 = exact + np.exp(-(g.nodes**2)) / g.nodes**2
    assert np.max(np.abs(out1[interior] - exact1[interior])) < 1e-3


def test_quadratic_form_symmetry(op_free, uniform_grid):
    rng = np.random.default_rng(7)
    r = uniform_grid.nodes
    f = cqnls.RadialField(uniform_grid, rng.standard_normal(len(r)) * np.exp(-r / 4))
    h = cqnls.RadialField(uniform_grid, rng.standard_normal(len(r)) * np.exp(-r / 3))
    w = uniform_grid.weights
    lf = cqnls.apply_operator(op_free, f).values
    lh = cqnls.apply_operator(op_free, h).values
    lhs = np.sum(w * lf * np.conj(h.values))
    rhs = np.conj(np.sum(w * lh * np.conj(f.values)))
    scale = max(abs(lhs), 1.0)
    assert abs(lhs - rhs) / scale < 1e-12


@pytest.mark.parametrize("a", [-0.24, -0.2, -0.1, 0.0, 1.0])
@pytest.mark.parametrize("grading", [cqnls.Grading.UNIFORM, cqnls.Grading.GRADED])
def test_discrete_hardy_positivity(a, grading):
    op = cqnls.cached_operator(a, cqnls.default_grid(grading))
    lam0 = op.eigenvalues(k=1)[0]
    assert lam0 >= -1e-8


def test_free_ground_eigenvalue(op_free):
    lam0 = op_free.eigenvalues(k=1)[0]
    bound = (np.pi / 40.0) ** 2
    assert 0.0 <= lam0 <= bound * 1.01


def test_propagate_identity_and_unitarity(op_free, uniform_grid, gauss_field):
    out = cqnls.linear_propagate(op_free, gauss_field, 0.0)
    assert np.allclose(out.values, gauss_field.values, rtol=0, atol=1e-14)
    rng = np.random.default_rng(3)
    f = cqnls.RadialField(
        uniform_grid,
        (rng.standard_normal(uniform_grid.n_points)
         + 1j * rng.standard_normal(uniform_grid.n_points)) * np.exp(-uniform_grid.nodes / 5),
    )
    moved = cqnls.linear_propagate(op_free, f, 0.37)
    assert abs(moved.l2_norm() / f.l2_norm() - 1.0) < 1e-12


def test_propagate_eigenvector_phase(op_free, uniform_grid):
    evals, evecs = op_free.eigensystem()
    s = evecs[:, 0]
    u = s / (np.sqrt(uniform_grid.cell_measure) * uniform_grid.nodes)
    f = cqnls.RadialField(uniform_grid, u)
    out = cqnls.linear_propagate(op_free, f, 1.0)
    expected = u * np.exp(-1j * evals[0])
    assert np.max(np.abs(out.values - expected)) < 1e-10 * np.max(np.abs(u))


def test_propagator_group_law(op_free, gauss_field):
    one = cqnls.linear_propagate(op_free, cqnls.linear_propagate(op_free, gauss_field, 0.3), 0.7)
    two = cqnls.linear_propagate(op_free, gauss_field, 1.0)
    assert np.max(np.abs(one.values - two.values)) < 1e-10


def test_grid_mismatch_rejected(op_free):
    other = cqnls.build_grid(128, 10.0)
    f = cqnls.RadialField.zeros(other)
    with pytest.raises(StructuralError):
        cqnls.apply_operator(op_free, f)


def test_eigensystem_cached_identity(op_free):
    e1 = op_free.eigensystem()
    e2 = op_free.eigensystem()
    assert e1[0] is e2[0] and e1[1] is e2[1]
