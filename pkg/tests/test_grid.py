import numpy as np
import pytest

import cqnls
from cqnls.errors import ConfigurationError


def test_uniform_grid_basic():
    g = cqnls.build_grid(1024, 40.0)
    assert g.nodes[0] > 0
    assert np.all(np.diff(g.nodes) > 0)
    assert g.nodes[-1] == pytest.approx(40.0, abs=0)
    assert np.all(g.weights > 0)
    spacing = np.diff(g.nodes)
    assert spacing.max() == pytest.approx(40.0 / 1024, rel=1e-12)


def test_uniform_volume_exactness():
    """Quadrature of g == 1 must give the ball volume to 1e-6 relative."""
    g = cqnls.build_grid(1024, 40.0)
    vol = g.integrate(np.ones(g.n_points))
    exact = 4.0 / 3.0 * np.pi * 40.0**3
    assert abs(vol - exact) / exact < 1e-6


def test_minimal_grid():
    g = cqnls.build_grid(16, 1.0)
    assert g.n_points == 16
    assert g.nodes[-1] == 1.0


def test_rejects_bad_parameters():
    with pytest.raises(ConfigurationError):
        cqnls.build_grid(15, 40.0)
    with pytest.raises(ConfigurationError):
        cqnls.build_grid(64, 0.0)
    with pytest.raises(ConfigurationError):
        cqnls.build_grid(64, -1.0)


def test_graded_gaussian_quadrature():
    """integral of exp(-2|x|^2) = (pi/2)^{3/2}, to 1e-8 on the graded grid."""
    g = cqnls.build_grid(2048, 40.0, "graded-near-origin")
    val = g.integrate(np.exp(-2.0 * g.nodes**2))
    exact = (np.pi / 2.0) ** 1.5
    assert abs(val - exact) / exact < 1e-8


def test_graded_clusters_three_decades():
    g = cqnls.build_grid(2048, 40.0, cqnls.Grading.GRADED)
    assert g.nodes[0] < 2e-5
    decades = np.log10(g.nodes[-1] / g.nodes[0])
    assert decades > 6
    inner = np.sum(g.nodes <= 1000 * g.nodes[0])
    assert inner >= 20  # enough nodes for an origin-exponent fit


@pytest.mark.parametrize("grading", [cqnls.Grading.UNIFORM, cqnls.Grading.GRADED])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_polynomial_moments(grading, k):
    """r^k against 4 pi r^2 dr matches the closed form to 1e-6 on default grids."""
    g = cqnls.default_grid(grading)
    val = g.integrate(g.nodes**k)
    exact = 4.0 * np.pi * g.r_max ** (k + 3) / (k + 3)
    assert abs(val - exact) / exact < 1e-6


def test_weights_match_cell_measure():
    g = cqnls.build_grid(256, 10.0)
    assert np.allclose(g.weights, 4 * np.pi * g.nodes**2 * g.cell_measure, rtol=1e-14)
    # line weights differ from the cell measure only in the first cell
    assert np.allclose(g.line_weights[1:], g.cell_measure[1:], rtol=0, atol=0)
    assert g.line_weights[0] > g.cell_measure[0]


def test_fingerprint_deterministic():
    a = cqnls.build_grid(128, 20.0)
    b = cqnls.build_grid(128, 20.0)
    assert a.fingerprint() == b.fingerprint()
    c = cqnls.build_grid(128, 20.0, cqnls.Grading.GRADED)
    assert c.fingerprint() != a.fingerprint()
