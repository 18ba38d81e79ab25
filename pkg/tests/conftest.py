from fractions import Fraction
from itertools import combinations
from math import prod

import numpy as np
import pytest
from hypothesis import strategies as st

from ngtrace.exact import Spectrum


def esp_by_expansion(values):
    """Coefficients of prod(x - v) expanded term by term, sign-corrected to e_k."""
    poly = [Fraction(1)]
    for v in values:
        nxt = poly + [Fraction(0)]
        for i, c in enumerate(poly):
            nxt[i + 1] -= c * v
        poly = nxt
    return [c * (-1) ** k for k, c in enumerate(poly)]


def esp_by_subsets(values, k):
    return sum((prod(c) for c in combinations(values, k)), Fraction(0))


@st.composite
def spectra(draw, min_rank=1, max_rank=8, max_weight=50):
    r = draw(st.integers(min_rank, max_rank))
    weights = draw(st.lists(st.integers(1, max_weight), min_size=r, max_size=r))
    return Spectrum.from_weights(weights)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# filled by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
