import numpy as np
import pytest
from hypothesis import strategies as st

from thurston.construction import ThurstonRep
from thurston.words import Word, reduce

letters = st.lists(st.sampled_from("aAbB"), max_size=30)
words = letters.map(lambda s: reduce(s))
short_words = st.lists(st.sampled_from("aAbB"), max_size=12).map(lambda s: reduce(s))


@pytest.fixture(scope="session")
def rep4():
    return ThurstonRep.from_mu(4.0)


@pytest.fixture(scope="session")
def rep9():
    return ThurstonRep.from_mu(9.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def letter_reduce(text):
    """Stack-based free reduction on letters; independent of the syllable code."""
    out = []
    for ch in text:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def letter_cyclic_reduce(text):
    """Strip mutually inverse end letters; returns (core, stripped prefix)."""
    s = letter_reduce(text)
    i = 0
    while len(s) - 2 * i >= 2 and s[i] == s[len(s) - 1 - i].swapcase():
        i += 1
    return s[i : len(s) - i], s[:i]


ACCEPTANCE_RESULTS = {}


def record_acceptance(number, title, ok, detail=""):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_RESULTS[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[number])
