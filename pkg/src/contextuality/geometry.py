"""Expectation-space geometry of cyclic systems.

Coordinates are bunch-product expectations ``e_{i,i+1}``.  The n-cube
``[-1, 1]^n`` holds every conceivable point; the demicube is the hull of
its even vertices (product of coordinates +1); for consistently connected
systems the noncontextuality polytope is the demicube cut by the box of
Frechet-admissible products.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import lp
from .measures import feasibility_problem, noncontextual_design
from .system import CyclicSystem, check, is_consistently_connected
from .vectorize import bunch_probability, expectation_transform, reduced_description

BISECTION_TOL = 1e-10
BISECTION_MAX_ITER = 60
GEOMETRY_TOL = 1e-9


def parity(signs) -> int:
    """Product of a +-1 vector."""
    return -1 if sum(1 for s in signs if s < 0) % 2 else 1


def odd_sign_vectors(n: int):
    for signs in itertools.product((1, -1), repeat=n):
        if parity(signs) == -1:
            yield signs


def bell_s1_exhaustive(x) -> float:
    """Max of ``sum(lam * x)`` over all sign vectors with product -1."""
    x = [float(v) for v in x]
    return max(math.fsum(s * v for s, v in zip(signs, x))
               for signs in odd_sign_vectors(len(x)))


def bell_s1(x) -> float:
    """Closed form of :func:`bell_s1_exhaustive`.

    With an odd number of negative coordinates the signs of ``x`` are
    already odd and the maximum is ``sum |x|``; otherwise the smallest
    ``|x_i|`` is flipped.  Zeros count as positive.
    """
    x = [float(v) for v in x]
    terms = [abs(v) for v in x]
    if sum(1 for v in x if v < 0) % 2 == 0:
        k = min(range(len(x)), key=lambda i: terms[i])
        terms[k] = -terms[k]
    return math.fsum(terms)


def optimal_odd_vertex(x) -> tuple[int, ...]:
    """Sign vector attaining :func:`bell_s1`."""
    signs = [1 if v >= 0 else -1 for v in x]
    if parity(signs) == 1:
        k = min(range(len(x)), key=lambda i: abs(x[i]))
        signs[k] = -signs[k]
    return tuple(signs)


def demicube_contains(x, n: int | None = None, tol: float = GEOMETRY_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    n = len(x) if n is None else n
    if len(x) != n:
        raise ValueError(f"expected {n} coordinates, got {len(x)}")
    return bool(np.all(np.abs(x) <= 1 + tol) and bell_s1(x) <= n - 2 + tol)


@dataclass(frozen=True)
class ExpBox:
    lo: np.ndarray
    hi: np.ndarray

    @property
    def empty(self) -> np.ndarray:
        """Per-coordinate flag for intervals with ``lo > hi``."""
        return self.lo > self.hi

    def contains(self, x, tol: float = GEOMETRY_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(size, len(self.lo)))


def ambient_box(system: CyclicSystem, tol: float = 1e-9) -> ExpBox:
    """Box of attainable bunch-product expectations given the marginals."""
    check(system)
    if not is_consistently_connected(system, tol):
        raise ValueError("ambient_box needs a consistently connected system; "
                         "consistify it first")
    e = expectation_transform(reduced_description(system)).phi_l
    first, second = e[0::2], e[1::2]
    return ExpBox(np.abs(first + second) - 1, 1 - np.abs(first - second))


class PolytopeMembership:
    """Repeated membership queries against one system's polytope."""

    def __init__(self, system: CyclicSystem, tol: float = lp.DEFAULT_TOL,
                 backend: str = "simplex"):
        check(system)
        self.red = reduced_description(system)
        self.tol = tol
        self.backend = backend

    def __call__(self, phi_b) -> bool:
        red = self.red
        b = bunch_probability(np.asarray(phi_b, dtype=float), red.l)
        des = noncontextual_design(len(red.b), red.l, b, red.c)
        sol = lp.solve(feasibility_problem(des, red.l, b, red.c), self.tol, self.backend)
        if sol.status == lp.INFEASIBLE:
            return False
        if not sol.ok:
            raise lp.SolverError(f"membership test: solver returned {sol.status}")
        return True


def polytope_contains(system: CyclicSystem, phi_b, tol: float = lp.DEFAULT_TOL,
                      backend: str = "simplex") -> bool:
    """Whether ``phi_b`` lies in the noncontextuality polytope of ``system``."""
    return PolytopeMembership(system, tol, backend)(phi_b)


class BisectionError(RuntimeError):
    """No admissible displacement restores noncontextuality."""


@dataclass
class OracleResult:
    value: float
    per_coordinate: list[float | None]
    lp_calls: int

    @property
    def best_coordinate(self) -> int:
        vals = [np.inf if v is None else v for v in self.per_coordinate]
        return int(np.argmin(vals))


def cnt2_geometric_oracle(system: CyclicSystem, tol: float = BISECTION_TOL,
                          max_iter: int = BISECTION_MAX_ITER,
                          lp_tol: float = lp.DEFAULT_TOL,
                          backend: str = "simplex") -> OracleResult:
    """CNT2 as the smallest one-coordinate displacement into the polytope.

    For each context ``i`` the bunch probability ``b_i`` is allowed to
    range over ``[b_i - t, b_i + t]`` with everything else fixed, and the
    least ``t`` admitting a noncontextual coupling is bisected using
    feasibility tests alone.  The relaxation is monotone in ``t``, which
    a point move is not (the admissible set along a coordinate may be a
    single point).  ``t`` is in probability units, i.e. a quarter of the
    expectation-space displacement.
    """
    check(system)
    red = reduced_description(system)
    n = system.rank
    calls = 0

    def feasible(des, i, t):
        nonlocal calls
        calls += 1
        prob = feasibility_problem(des, red.l, red.b, red.c, loose=i, slack=t)
        sol = lp.solve(prob, lp_tol, backend)
        if sol.status not in (lp.OPTIMAL, lp.INFEASIBLE):
            raise lp.SolverError(f"oracle feasibility: {sol.status}")
        return sol.ok

    per: list[float | None] = []
    for i in range(n):
        des = noncontextual_design(n, red.l, red.b, red.c, loose=i)
        if feasible(des, i, 0.0):
            return OracleResult(0.0, [0.0] * n, calls)
        lo, hi = 0.0, 0.5  # 0.5 in probability = 2 in expectation units
        if not feasible(des, i, hi):
            per.append(None)
            continue
        for _ in range(max_iter):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if feasible(des, i, mid):
                hi = mid
            else:
                lo = mid
        per.append(hi)
    found = [v for v in per if v is not None]
    if not found:
        raise BisectionError("no single-coordinate displacement reaches the polytope")
    return OracleResult(min(found), per, calls)
