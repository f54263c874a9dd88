"""Multimaximal couplings of connections and consistification."""

from __future__ import annotations

from .system import BunchTable, CyclicSystem, marginals

CouplingTable = BunchTable


def multimaximal_pair(p_a: float, p_b: float) -> CouplingTable:
    """Joint distribution of two binaries maximizing Pr(A = B).

    ``p_a`` and ``p_b`` are the probabilities of value 1; the table is
    oriented with ``A`` first.
    """
    for p in (p_a, p_b):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p!r} outside [0, 1]")
    p11 = min(p_a, p_b)
    p00 = min(1.0 - p_a, 1.0 - p_b)
    return CouplingTable(p00, p_b - p11, p_a - p11, p11)


def connection_couplings(system: CyclicSystem) -> list[CouplingTable]:
    """Coupling of ``(R_j^j, R_j^{j-1})`` for every content ``j``."""
    m = marginals(system)
    n = system.rank
    return [multimaximal_pair(m[2 * j], m[2 * ((j - 1) % n) + 1]) for j in range(n)]


def consistify(system: CyclicSystem) -> CyclicSystem:
    """Consistently connected rank-2n system with the same contextuality.

    The new ring of contexts is ``c_1, q_2, c_2, q_3, ..., c_n, q_1`` over
    contents ``q_11, q_12, q_22, q_23, ..., q_nn, q_n1``.  Context ``q_{i+1}``
    carries the multimaximal coupling of ``(R_{i+1}^i, R_{i+1}^{i+1})``.
    """
    m = marginals(system)
    n = system.rank
    bunches = []
    for i, bunch in enumerate(system.bunches):
        nxt = (i + 1) % n
        bunches.append(bunch)
        bunches.append(multimaximal_pair(m[2 * i + 1], m[2 * nxt]))
    labels = None
    if system.labels and "contexts" in system.labels:
        ctx = system.labels["contexts"]
        labels = {"contexts": [name for i in range(n)
                               for name in (ctx[i], f"q{(i + 1) % n + 1}")]}
    return CyclicSystem(tuple(bunches), labels)
