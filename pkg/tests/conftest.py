import sys

import warnings

import pytest

from radial_bem.geometry import discretize_flower, discretize_square
from radial_bem.quadrature import gauss_legendre, global_quadrature


@pytest.fixture(autouse=True)
def _quiet_conditioning():
    # Gaussian systems at K >= 128 are flagged as badly conditioned by design
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="block system is badly conditioned")
        warnings.filterwarnings("ignore", message="iterative refinement")
        yield


@pytest.fixture(scope="session")
def square8():
    return discretize_square(8)


@pytest.fixture(scope="session")
def flower16():
    return discretize_flower(16)


@pytest.fixture(scope="session")
def rule16():
    return gauss_legendre(16)


@pytest.fixture(scope="session")
def gq_square16(rule16):
    return global_quadrature(discretize_square(16), rule16)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        ok, detail = results[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
