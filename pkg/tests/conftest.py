import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from psat_bounds.expr_core import MonotoneExpression, example_expression  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def expressions(draw, max_n: int = 10, max_clauses: int = 6):
    n = draw(st.integers(2, max_n))
    events = st.integers(1, n)
    clauses = draw(
        st.lists(st.frozensets(events, min_size=1, max_size=min(n, 4)), min_size=1, max_size=max_clauses)
    )
    return MonotoneExpression(n, clauses)


@pytest.fixture
def example():
    return example_expression()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
