import pytest

from affine_semigroup.affine_core import SystemParams
from affine_semigroup.stationary_solver import solve_stationary


@pytest.fixture(scope="session")
def p_half_3_2():
    return SystemParams.create("1/2", "3/2")


@pytest.fixture(scope="session")
def p_half_5_4():
    return SystemParams.create("1/2", "5/4")


@pytest.fixture(scope="session")
def mu_main(p_half_5_4):
    """Stationary law for (a, b, p) = (1/2, 5/4, 0.6) on the default grid."""
    return solve_stationary(0.6, p_half_5_4)


@pytest.fixture(scope="session")
def mu_heavy(p_half_3_2):
    """Stationary law for (1/2, 3/2, 1/2); its mean is infinite."""
    return solve_stationary(0.5, p_half_3_2)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", {})
    if not results:
        return
    from affine_semigroup.verify import table
    terminalreporter.section("acceptance criteria")
    for line in table([results[k] for k in sorted(results)]).splitlines():
        terminalreporter.write_line(line)
