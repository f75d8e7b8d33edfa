import pytest
from hypothesis import settings, strategies as st

from ipcf import typecheck
from ipcf.gen import sample
from ipcf.typecheck import Ctx

settings.register_profile("ipcf", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("ipcf")


@pytest.fixture(autouse=True)
def _free_variable_theorem(monkeypatch):
    # every successful check also asserts fv ⊆ Δ ∪ Γ and bfv ⊆ Δ
    monkeypatch.setattr(typecheck, "CHECK_INVARIANTS", True)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def judgements(draw, max_size=25, **kw):
    """A well-typed (ctx, ty, term) from the seeded generator."""
    return sample(draw(seeds), max_size, **kw)


@st.composite
def closed_terms(draw, max_size=25, **kw):
    _, ty, m = sample(draw(seeds), max_size, ctx=Ctx(), **kw)
    return ty, m


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
