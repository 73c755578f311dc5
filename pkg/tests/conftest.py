import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ctrlimprov.automata import Alphabet, Dfa, product, universal_dfa  # noqa: E402

BINARY = Alphabet(["0", "1"])
AB = Alphabet(["a", "b"])


def running_improv():
    """Length-3 binary words without two adjacent 1s."""
    delta = {
        (0, "0"): 1, (0, "1"): 2,
        (1, "0"): 3, (1, "1"): 4,
        (2, "0"): 3,
        (3, "0"): 5, (3, "1"): 5,
        (4, "0"): 5,
    }
    return Dfa(BINARY, 6, 0, {5}, delta)


def running_admiss():
    """Hamming distance at most 1 from 001; state = position * 2 + mismatches."""
    ref = "001"
    delta = {}
    for pos in range(3):
        for dist in range(2):
            for c in "01":
                nd = dist + (c != ref[pos])
                if nd <= 1:
                    delta[(pos * 2 + dist, c)] = (pos + 1) * 2 + nd
    return Dfa(BINARY, 8, 0, {6, 7}, delta)


def a_star_b():
    return Dfa(AB, 2, 0, {1}, {(0, "a"): 0, (0, "b"): 1})


def chain_dfa(k, alphabet=BINARY, all_accepting=False):
    delta = {(i, "0"): i + 1 for i in range(k)}
    acc = set(range(k + 1)) if all_accepting else {k}
    return Dfa(alphabet, k + 1, 0, acc, delta)


@pytest.fixture
def improv_run():
    return running_improv()


@pytest.fixture
def admiss_run():
    return running_admiss()


@pytest.fixture
def product_run():
    return product(running_improv(), running_admiss())


@pytest.fixture
def sigma_star():
    return universal_dfa(BINARY)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
