"""Full and reduced description vectors of a cyclic system.

Quadruples are ordered ``(0,0), (1,0), (0,1), (1,1)`` over
``(first, second)``; variable pairs are ordered ``(value 0, value 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import connection_couplings
from .system import CyclicSystem, marginals


def _quad(t) -> tuple[float, float, float, float]:
    return (t.p00, t.p10, t.p01, t.p11)


@dataclass(frozen=True)
class FullDescription:
    l_full: np.ndarray
    b_full: np.ndarray
    c_full: np.ndarray

    @property
    def p(self) -> np.ndarray:
        """Concatenation of the three vectors (12n entries)."""
        return np.concatenate([self.l_full, self.b_full, self.c_full])


@dataclass(frozen=True)
class ReducedDescription:
    l: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.b)

    @property
    def p(self) -> np.ndarray:
        return np.concatenate([self.l, self.b, self.c])

    def connection_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Per content ``j``: marginals of ``(R_j^j, R_j^{j-1})``."""
        return self.l[0::2], np.roll(self.l[1::2], 1)


@dataclass(frozen=True)
class ExpectationVectors:
    phi_l: np.ndarray
    phi_b: np.ndarray
    phi_c: np.ndarray


def full_description(system: CyclicSystem) -> FullDescription:
    m = marginals(system)
    l_full = np.column_stack([1.0 - m, m]).ravel()
    b_full = np.array([_quad(b) for b in system.bunches]).ravel()
    c_full = np.array([_quad(c) for c in connection_couplings(system)]).ravel()
    return FullDescription(l_full, b_full, c_full)


def reduced_description(system: CyclicSystem) -> ReducedDescription:
    l = marginals(system)
    b = system.tables()[:, 3].copy()
    c = np.array([c.p11 for c in connection_couplings(system)])
    return ReducedDescription(l, b, c)


def expectation_transform(reduced: ReducedDescription) -> ExpectationVectors:
    l, b, c = reduced.l, reduced.b, reduced.c
    own, prev = reduced.connection_pairs()
    phi_l = 2 * l - 1
    phi_b = 4 * b - 2 * l[0::2] - 2 * l[1::2] + 1
    phi_c = 4 * c - 2 * own - 2 * prev + 1
    return ExpectationVectors(phi_l, phi_b, phi_c)


def inverse_expectation_transform(e: ExpectationVectors) -> ReducedDescription:
    l = (e.phi_l + 1) / 2
    b = (e.phi_b + 2 * l[0::2] + 2 * l[1::2] - 1) / 4
    own, prev = l[0::2], np.roll(l[1::2], 1)
    c = (e.phi_c + 2 * own + 2 * prev - 1) / 4
    return ReducedDescription(l, b, c)


def bunch_probability(phi_b: np.ndarray, l: np.ndarray) -> np.ndarray:
    """Map bunch-product expectations back to ``Pr(both = 1)`` given marginals."""
    return (np.asarray(phi_b) + 2 * l[0::2] + 2 * l[1::2] - 1) / 4


def quadruples_from_reduced(first: np.ndarray, second: np.ndarray,
                            both: np.ndarray) -> np.ndarray:
    """Rebuild ``(n, 4)`` quadruples in full-vector order from reduced values."""
    return np.column_stack([1 - first - second + both, first - both,
                            second - both, both])


def vector_labels(n: int) -> dict[str, list[str]]:
    """Human-readable labels for every vector component."""
    var = []
    for i in range(1, n + 1):
        var += [f"R{i}^{i}", f"R{i % n + 1}^{i}"]
    pairs = ["00", "10", "01", "11"]
    l_full = [f"Pr({v}={a})" for v in var for a in "01"]
    b_full, c_full, b, c = [], [], [], []
    for i in range(1, n + 1):
        x, y = f"R{i}^{i}", f"R{i % n + 1}^{i}"
        b_full += [f"Pr({x}={r[0]},{y}={r[1]})" for r in pairs]
        b.append(f"Pr({x}=1,{y}=1)")
        prev = (i - 2) % n + 1
        tx, ty = f"T{i}^{i}", f"T{i}^{prev}"
        c_full += [f"Pr({tx}={r[0]},{ty}={r[1]})" for r in pairs]
        c.append(f"Pr({tx}=1,{ty}=1)")
    return {
        "l_full": l_full, "b_full": b_full, "c_full": c_full,
        "l": [f"Pr({v}=1)" for v in var], "b": b, "c": c,
    }
