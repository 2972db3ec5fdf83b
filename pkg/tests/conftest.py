import functools

import numpy as np
import pytest

from gcrit.oracle import critical_g
from gcrit.potential import (PotentialShape, from_table, make_exponential,
                             make_r_exponential, make_square_well)

_ACCEPTANCE = pytest.StashKey[list]()


def yukawa():
    return PotentialShape(lambda r: np.exp(-np.asarray(r, dtype=float)) / np.asarray(r, dtype=float),
                          "Yukawa", origin_exponent=-1.0)


def tabulated_gaussian():
    r = np.linspace(0.0, 6.0, 61)
    return from_table(np.column_stack([r, np.exp(-r * r)]), "gauss-table")


BUILTINS = {"sw": make_square_well(), "exp": make_exponential(), "pe": make_r_exponential()}
TEST_SHAPES = {**BUILTINS, "yukawa": yukawa(), "gauss": tabulated_gaussian()}


@functools.lru_cache(maxsize=None)
def oracle_gc(name: str, ell: int) -> float:
    return critical_g(TEST_SHAPES[name], ell)


@pytest.fixture
def shapes():
    return TEST_SHAPES


@pytest.fixture
def gc():
    return oracle_gc


@pytest.fixture
def acceptance_report(request):
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number: int, ok: bool, detail: str):
        lines.append((number, f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}"))
        print(lines[-1][1])
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
