from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from soficlab.groups import GroupElement, GroupSpec
from soficlab.ring import GroupRingElement

Z = GroupSpec.lattice(1)
Z2 = GroupSpec.lattice(2)
F2 = GroupSpec.free(2)


def _reduced_words(rank: int, max_len: int):
    letters = [g for g in range(-rank, rank + 1) if g]

    def build(raw):
        out: list[int] = []
        for g in raw:
            if out and out[-1] == -g:
                out.pop()
            else:
                out.append(g)
        return tuple(out)

    return st.lists(st.sampled_from(letters), max_size=max_len).map(build)


def elements(spec: GroupSpec, max_len: int = 3):
    if spec.kind == "free":
        return _reduced_words(spec.rank, max_len).map(lambda w: GroupElement(spec, w))
    return st.tuples(*[st.integers(-max_len, max_len)] * spec.rank).map(lambda w: GroupElement(spec, w))


def ring_elements(spec: GroupSpec, max_terms: int = 4, coeff: int = 3):
    return st.lists(st.tuples(elements(spec, 2), st.integers(-coeff, coeff)), max_size=max_terms).map(
        lambda items: GroupRingElement.from_items(spec, items, exact=True))


specs = st.sampled_from([Z, Z2, F2])


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
