import numpy as np
import pytest
from hypothesis import strategies as st

from subord_lab.series import TruncatedSeries


def rel_err(a, b) -> float:
    """Max coefficient difference relative to max(1, max |b|)."""
    a = np.asarray(getattr(a, "coeffs", a))
    b = np.asarray(getattr(b, "coeffs", b))
    n = min(len(a), len(b))
    return float(np.max(np.abs(a[:n] - b[:n])) / max(1.0, np.max(np.abs(b[:n]))))


def random_series(rng, order, decay=1.0, c0=None, c0_min=0.0):
    """Coefficients uniform in the unit disk times ``decay**k``."""
    r = np.sqrt(rng.uniform(size=order + 1))
    c = r * np.exp(2j * np.pi * rng.uniform(size=order + 1)) * decay ** np.arange(order + 1)
    if c0 is not None:
        c[0] = c0
    elif c0_min:
        c[0] = rng.uniform(c0_min, c0_min + 0.5) * np.exp(2j * np.pi * rng.uniform())
    return TruncatedSeries(c, order)


def dominant_series(rng, order):
    """Constant term exceeds the sum of the others, so no zeros on the closed disk."""
    return random_series(rng, order, decay=0.5, c0_min=1.5)


@st.composite
def series_strategy(draw, min_order=1, max_order=64, decay=None, dominant=False, c0=None):
    order = draw(st.integers(min_order, max_order))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    if dominant:
        return dominant_series(rng, order)
    d = draw(st.floats(0.2, 1.0)) if decay is None else decay
    return random_series(rng, order, decay=d, c0=c0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
