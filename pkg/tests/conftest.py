import pytest
from hypothesis import HealthCheck, settings

from fgadyn.freegroup import Automorphism, invert

settings.register_profile("default", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

IMAGES = {
    "Phi": ["ad", "a", "b", "c"],
    "Psi": ["ac", "a", "b", "db"],
    "Phi1": ["ac", "a", "b", "dc", "ec"],
    "Phi2": ["ad", "a", "b", "c", "e"],
    "twist": ["a", "ba"],
}


def aut(name):
    return invert(Automorphism.from_strings(IMAGES[name])).inverse


@pytest.fixture(scope="session")
def auts():
    return {k: aut(k) for k in IMAGES}


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
