import numpy as np
import pytest

import cqnls

ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {name}: {status}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def uniform_grid():
    return cqnls.default_grid(cqnls.Grading.UNIFORM)


@pytest.fixture(scope="session")
def graded_grid():
    return cqnls.default_grid(cqnls.Grading.GRADED)


@pytest.fixture(scope="session")
def op_free(uniform_grid):
    return cqnls.cached_operator(0.0, uniform_grid)


@pytest.fixture(scope="session")
def gauss_field(uniform_grid):
    return cqnls.RadialField.from_callable(uniform_grid, lambda r: np.exp(-(r**2)))


@pytest.fixture(scope="session")
def q1_free(uniform_grid):
    """alpha = 1 optimizer at a = 0 on the default uniform grid."""
    return cqnls.select_omega_for_alpha(0.0, 1.0, uniform_grid)


@pytest.fixture(scope="session")
def q1_neg(graded_grid):
    """alpha = 1 optimizer at a = -0.1 on the default graded grid."""
    return cqnls.select_omega_for_alpha(-0.1, 1.0, graded_grid)


@pytest.fixture(scope="session")
def s_free(q1_free):
    return cqnls.build_s_state(q1_free)


@pytest.fixture(scope="session")
def branch_free(uniform_grid):
    return cqnls.trace_branch(0.0, np.geomspace(0.02, 0.18, 24), uniform_grid)


@pytest.fixture(scope="session")
def curve_free(uniform_grid, branch_free):
    return cqnls.build_threshold_curve(0.0, branch_free, uniform_grid)


@pytest.fixture(scope="session")
def curve_neg(graded_grid):
    branch = cqnls.trace_branch(-0.1, np.geomspace(0.02, 0.18, 24), graded_grid)
    return cqnls.build_threshold_curve(-0.1, branch, graded_grid)
