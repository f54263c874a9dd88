import math

import numpy as np
import pytest

from contextuality.system import CyclicSystem, marginals

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def closed_form_cnt2(system: CyclicSystem) -> float:
    """Known closed form for cyclic systems, independent of any LP:
    max(0, s_odd(bunch expectations) - sum|connection expectation gaps| - (n - 2)) / 4.
    """
    n = system.rank
    t = system.tables()
    m = marginals(system)
    e = 4 * t[:, 3] - 2 * m[0::2] - 2 * m[1::2] + 1
    gaps = 2 * np.abs(m[0::2] - np.roll(m[1::2], 1))
    terms = sorted(abs(v) for v in e)
    s_odd = math.fsum(terms)
    if sum(1 for v in e if v < 0) % 2 == 0:
        s_odd -= 2 * terms[0]
    return max(0.0, (s_odd - gaps.sum() - (n - 2)) / 4)


def contextual_system(rank: int, rng: np.random.Generator, consistent: bool,
                      margin: float = 1e-4) -> CyclicSystem:
    """Random system near a PR-box-like sign pattern, rejected until contextual."""
    while True:
        signs = rng.choice([-1, 1], size=rank)
        if np.prod(signs) == 1:
            signs[rng.integers(rank)] *= -1
        base = rng.uniform(0.3, 0.7, size=rank)
        first = base.copy()
        second = np.roll(base, -1)
        if not consistent:
            first = np.clip(first + rng.uniform(-0.05, 0.05, rank), 0, 1)
            second = np.clip(second + rng.uniform(-0.05, 0.05, rank), 0, 1)
        e = signs * rng.uniform(0.7, 1.0, size=rank)
        p11 = (e + 2 * first + 2 * second - 1) / 4
        p11 = np.clip(p11, np.maximum(0, first + second - 1), np.minimum(first, second))
        tables = [(1 - a - b + c, b - c, a - c, c) for a, b, c in zip(first, second, p11)]
        system = CyclicSystem.from_tables(tables)
        if closed_form_cnt2(system) > margin:
            return system


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
