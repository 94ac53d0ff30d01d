import numpy as np
import pytest

from palzone.model import ArrayGeometry, FrequencyPlan, MediumParams, QuadratureSpec


@pytest.fixture
def medium():
    return MediumParams()


@pytest.fixture
def lossless():
    return MediumParams(alpha_override=0.0)


@pytest.fixture
def small_quad():
    # desk-scale domain with a coarse grid, enough for algebraic identities
    return QuadratureSpec(-0.1, 0.1, 0.001, 0.2, 0.01, 0.01, near_band=0.01, near_refine=2)


@pytest.fixture
def plan_2k():
    return FrequencyPlan(40e3, 2e3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian_psd(rng, n, rank=None):
    a = rng.standard_normal((n, rank or n)) + 1j * rng.standard_normal((n, rank or n))
    return a @ a.conj().T


def random_unit(rng, n, size=None):
    shape = (n,) if size is None else (size, n)
    v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def two_element():
    return ArrayGeometry.uniform(2, 0.01)


# one line per acceptance criterion, printed after the run
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
