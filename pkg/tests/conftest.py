import itertools
import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pinchlab.catalog import GRAPH, UNARY
from pinchlab.structures import RelStructure, Signature

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

MIXED = Signature("mixed", (("R", 2), ("U", 1)))


@st.composite
def structures(draw, signature=GRAPH, min_size=0, max_size=4):
    n = draw(st.integers(min_size, max_size))
    tabs = []
    for _, arity in signature.relations:
        cands = list(itertools.product(range(n), repeat=arity))
        tabs.append(draw(st.lists(st.sampled_from(cands), unique=True, max_size=len(cands))) if cands else [])
    return RelStructure(signature, n, tabs)


def any_signature_structures(max_size=3):
    return st.sampled_from([GRAPH, UNARY, MIXED]).flatmap(lambda sig: structures(sig, max_size=max_size))


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in criterion order."""
    rows = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance.py::test_c" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                rows.append((name, outcome.upper()[:4], rep.duration))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict, secs in sorted(rows):
        terminalreporter.write_line(f"{verdict:4}  {name}  ({secs:.2f}s)")
