import numpy as np
import pytest
from hypothesis import strategies as st

from resonant_pu.params import derive_params
from resonant_pu.weyl import WeylOp

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def p21():
    return derive_params(2.0, 1.0, 1)


@pytest.fixture
def p21m():
    return derive_params(2.0, 1.0, -1)


@st.composite
def model_params(draw, eta=None):
    """Parameters following the package sampling convention."""
    Omega = draw(st.floats(-2.0, 2.0))
    delta = draw(st.floats(0.1, 10.0))
    nu2 = Omega + delta
    if abs(nu2 + Omega) < 0.05:
        nu2 += 0.1
    e = draw(st.sampled_from([1, -1])) if eta is None else eta
    return derive_params(nu2, Omega, e)


coeffs = st.floats(-2.0, 2.0, allow_nan=False).filter(lambda v: abs(v) > 1e-3)


@st.composite
def weyl_ops(draw, max_degree=3, max_terms=5):
    idx = st.tuples(*[st.integers(0, max_degree)] * 4).filter(lambda k: sum(k) <= max_degree)
    terms = draw(st.dictionaries(idx, coeffs, min_size=1, max_size=max_terms))
    return WeylOp(terms)


def random_op(rng: np.random.Generator, max_degree: int = 4, n_terms: int = 4) -> WeylOp:
    terms = {}
    while len(terms) < n_terms:
        k = tuple(int(v) for v in rng.integers(0, max_degree + 1, size=4))
        if sum(k) <= max_degree:
            terms[k] = float(rng.uniform(-2, 2))
    return WeylOp(terms)
