import pytest
from hypothesis import HealthCheck, settings

from rankone.model_space import damek_ricci_space, hyperbolic_space
from rankone.spectral_measure import build_plancherel

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def h3():
    return hyperbolic_space(3)


@pytest.fixture(scope="session")
def h5():
    return hyperbolic_space(5)


@pytest.fixture(scope="session")
def dr11():
    return damek_ricci_space(1, 1)


@pytest.fixture(scope="session")
def pdata3(h3):
    return build_plancherel(h3)


@pytest.fixture(scope="session")
def pdata5(h5):
    return build_plancherel(h5)


@pytest.fixture(scope="session")
def pdata_dr(dr11):
    return build_plancherel(dr11)


ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
