"""Contextuality verdict and the CNT2 / CNTF measures.

All linear programs are posed over joint assignments of the ``2n``
coupling variables.  Before solving, columns that put mass on an event
whose probability is pinned to zero by an exact constraint are dropped;
every feasible point already vanishes there, so optima are unchanged
and consistently connected systems shrink from ``4**n`` to ``2**n``
columns.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .incidence import event_rows, full_events, reduced_row_index, support_columns
from .system import CyclicSystem, check, random_cyclic_system
from .vectorize import full_description, quadruples_from_reduced, reduced_description

log = logging.getLogger(__name__)

DECISION_TOL = 1e-7
IDENTITY_TOL = 1e-6
PRUNE_TOL = 1e-12


@dataclass
class _Design:
    """Constraint data for one rank-n system restricted to its support."""

    n: int
    columns: np.ndarray
    rows: np.ndarray  # full-event incidence over ``columns``
    p_full: np.ndarray

    def scatter(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros(4 ** self.n)
        out[self.columns] = values
        return out

    def reduced(self) -> np.ndarray:
        return self.rows[reduced_row_index(self.n)]

    def block(self, name: str) -> np.ndarray:
        red = self.reduced()
        n = self.n
        return {"l": red[:2 * n], "b": red[2 * n:3 * n], "c": red[3 * n:]}[name]


def full_vector(l: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """12n full description from reduced ``(l, b, c)``."""
    l, b, c = map(np.asarray, (l, b, c))
    l_full = np.column_stack([1 - l, l]).ravel()
    b_full = quadruples_from_reduced(l[0::2], l[1::2], b).ravel()
    c_full = quadruples_from_reduced(l[0::2], np.roll(l[1::2], 1), c).ravel()
    return np.concatenate([l_full, b_full, c_full])


def design(n: int, p_full: np.ndarray, exact_rows: np.ndarray | None = None,
           prune_tol: float = PRUNE_TOL) -> _Design:
    """Support-restricted incidence for description ``p_full``.

    ``exact_rows`` marks the full rows whose probabilities are hard
    constraints; only those may prune columns.
    """
    events = full_events(n)
    if exact_rows is None:
        exact_rows = np.ones(12 * n, dtype=bool)
    forbidden = [events[u] for u in range(12 * n)
                 if exact_rows[u] and p_full[u] <= prune_tol]
    cols = support_columns(n, forbidden)
    return _Design(n, cols, event_rows(n, cols, events).astype(float), np.asarray(p_full))


# -- measures ---------------------------------------------------------------

@dataclass
class Cnt2Result:
    value: float
    witness_x: np.ndarray
    witness_d: np.ndarray
    objective: float
    solution: lp.LpSolution


@dataclass
class CntfResult:
    value: float
    witness_z: np.ndarray
    solution: lp.LpSolution


def _require(sol: lp.LpSolution, what: str) -> lp.LpSolution:
    if not sol.ok:
        raise lp.SolverError(f"{what}: solver returned {sol.status}")
    return sol


def cnt2(system: CyclicSystem, pin: int | None = None, tol: float = lp.DEFAULT_TOL,
         backend: str = "simplex") -> Cnt2Result:
    """L1 distance of the bunch vector from the noncontextuality polytope.

    ``pin`` (0-based context index) forces every component of ``d`` other
    than ``pin`` to zero.
    """
    check(system)
    n = system.rank
    red = reduced_description(system)
    p_full = full_description(system).p
    exact = np.ones(12 * n, dtype=bool)
    exact[4 * n:8 * n] = False
    des = design(n, p_full, exact)
    k = des.columns.size
    Ml, Mb, Mc = des.block("l"), des.block("b"), des.block("c")
    eye = np.eye(n)
    A_eq = np.vstack([
        np.hstack([np.ones((1, k)), np.zeros((1, n))]),
        np.hstack([Ml, np.zeros((2 * n, n))]),
        np.hstack([Mc, np.zeros((n, n))]),
    ])
    b_eq = np.concatenate([[1.0], red.l, red.c])
    if pin is not None:
        if not 0 <= pin < n:
            raise ValueError(f"pin must be in [0, {n})")
        others = [j for j in range(n) if j != pin]
        A_eq = np.vstack([A_eq, np.hstack([np.zeros((n - 1, k)), eye[others]])])
        b_eq = np.concatenate([b_eq, np.zeros(n - 1)])
    A_le = np.vstack([np.hstack([-Mb, -eye]), np.hstack([Mb, -eye])])
    b_le = np.concatenate([-red.b, red.b])
    c = np.concatenate([np.zeros(k), np.ones(n)])
    sol = _require(lp.solve(lp.LpProblem(c, A_eq, b_eq, A_le, b_le), tol, backend), "CNT2")
    x = sol.x[:k]
    d = np.abs(red.b - Mb @ x)
    return Cnt2Result(float(d.sum()), des.scatter(x), d, sol.objective, sol)


def cntf(system: CyclicSystem, tol: float = lp.DEFAULT_TOL,
         backend: str = "simplex") -> CntfResult:
    """Contextual fraction: one minus the largest noncontextual sub-probability."""
    check(system)
    n = system.rank
    des = design(n, full_description(system).p)
    A = des.rows
    live = A.any(axis=1)
    k = des.columns.size
    A_le = np.vstack([A[live], np.ones((1, k))])
    b_le = np.concatenate([des.p_full[live], [1.0]])
    prob = lp.LpProblem(np.ones(k), A_le=A_le, b_le=b_le, sense="max")
    sol = _require(lp.solve(prob, tol, backend), "CNTF")
    z = sol.x
    return CntfResult(float(1.0 - z.sum()), des.scatter(z), sol)


def noncontextual_design(n: int, l, b, c, loose: int | None = None) -> _Design:
    exact = np.ones(12 * n, dtype=bool)
    if loose is not None:
        exact[4 * n + 4 * loose:4 * n + 4 * loose + 4] = False
    return design(n, full_vector(l, b, c), exact)


def feasibility_problem(des: _Design, l, b, c, loose: int | None = None,
                        slack: float = 0.0) -> lp.LpProblem:
    """Coupling problem ``M h = (l, b, c)``, ``1 h = 1``.

    With ``loose = i`` the ``i``-th bunch constraint is relaxed to
    ``|(M_b h)_i - b_i| <= slack``.
    """
    n = des.n
    k = des.columns.size
    Ml, Mb, Mc = des.block("l"), des.block("b"), des.block("c")
    keep = np.ones(n, dtype=bool)
    if loose is not None:
        keep[loose] = False
    A_eq = np.vstack([np.ones((1, k)), Ml, Mb[keep], Mc])
    b_eq = np.concatenate([[1.0], l, np.asarray(b)[keep], c])
    if loose is None:
        return lp.LpProblem(np.zeros(k), A_eq, b_eq)
    row = Mb[loose][None, :]
    A_le = np.vstack([row, -row])
    b_le = np.array([b[loose] + slack, -(b[loose] - slack)])
    return lp.LpProblem(np.zeros(k), A_eq, b_eq, A_le, b_le)


@dataclass
class Verdict:
    noncontextual: bool
    witness: np.ndarray | None
    solution: lp.LpSolution

    def __bool__(self) -> bool:
        return self.noncontextual


def is_noncontextual(system: CyclicSystem, tol: float = lp.DEFAULT_TOL,
                     backend: str = "simplex") -> Verdict:
    """Whether a coupling agrees with all bunches and connection couplings."""
    check(system)
    red = reduced_description(system)
    des = noncontextual_design(system.rank, red.l, red.b, red.c)
    sol = lp.solve(feasibility_problem(des, red.l, red.b, red.c), tol, backend)
    if sol.status == lp.INFEASIBLE:
        return Verdict(False, None, sol)
    _require(sol, "noncontextuality test")
    return Verdict(True, des.scatter(sol.x), sol)


# -- reports ----------------------------------------------------------------

@dataclass
class MeasureReport:
    contextual: bool
    cnt2: float
    cntf: float
    witness_x: np.ndarray
    witness_d: np.ndarray
    witness_z: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(self.cntf - 2 * self.cnt2)

    def to_dict(self, witnesses: bool = False) -> dict:
        d = {
            "contextual": self.contextual,
            "cnt2": self.cnt2,
            "cntf": self.cntf,
            "residual": self.residual,
            "tolerances": {"decision": DECISION_TOL, "identity": IDENTITY_TOL,
                           "lp": self.diagnostics.get("tol", lp.DEFAULT_TOL)},
            "solver": {k: self.diagnostics[k] for k in ("iterations", "status", "backend")
                       if k in self.diagnostics},
        }
        if witnesses:
            d["witness_x"] = self.witness_x.tolist()
            d["witness_d"] = self.witness_d.tolist()
            d["witness_z"] = self.witness_z.tolist()
        return d

    def to_json(self, witnesses: bool = False) -> str:
        return json.dumps(self.to_dict(witnesses), indent=2)


def analyze(system: CyclicSystem, tol: float = lp.DEFAULT_TOL,
            backend: str = "simplex") -> MeasureReport:
    r2 = cnt2(system, tol=tol, backend=backend)
    rf = cntf(system, tol=tol, backend=backend)
    return MeasureReport(
        contextual=r2.value > DECISION_TOL,
        cnt2=r2.value, cntf=rf.value,
        witness_x=r2.witness_x, witness_d=r2.witness_d, witness_z=rf.witness_z,
        diagnostics={
            "iterations": {"cnt2": r2.solution.iterations, "cntf": rf.solution.iterations},
            "status": {"cnt2": r2.solution.status, "cntf": rf.solution.status},
            "backend": backend, "tol": tol,
        },
    )


def trim_to_subprobability(system: CyclicSystem, x: np.ndarray) -> np.ndarray:
    """Scale a coupling ``x`` down until ``M_(.) z <= p_(.)`` holds.

    Each column is multiplied by the smallest ratio ``p_u / (M x)_u`` over
    the overshooting rows that contain it, which gives a feasible point of
    the contextual-fraction program.
    """
    n = system.rank
    cols = np.flatnonzero(x)
    rows = event_rows(n, cols, full_events(n)).astype(float)
    p = full_description(system).p
    mass = rows @ x[cols]
    ratio = np.ones_like(p)
    over = mass > p
    ratio[over] = p[over] / mass[over]
    factor = np.where(rows > 0, ratio[:, None], 1.0).min(axis=0)
    z = np.zeros_like(x)
    z[cols] = x[cols] * factor
    return z


# -- theorem verification ---------------------------------------------------

@dataclass
class Trial:
    rank: int
    index: int
    seed: int
    mode: str
    cnt2: float = float("nan")
    cntf: float = float("nan")
    noncontextual: bool | None = None
    error: str | None = None

    @property
    def residual(self) -> float:
        return abs(self.cntf - 2 * self.cnt2)

    @property
    def verdicts_agree(self) -> bool | None:
        if self.noncontextual is None:
            return None
        return (self.noncontextual == (self.cnt2 <= DECISION_TOL)
                == (self.cntf <= DECISION_TOL))


@dataclass
class IdentityReport:
    trials: list[Trial]
    tol: float
    seed: int
    seconds: float

    @property
    def max_residual(self) -> float:
        vals = [t.residual for t in self.trials if t.error is None]
        return max(vals, default=0.0)

    @property
    def failures(self) -> list[Trial]:
        return [t for t in self.trials if t.error is not None or t.residual > self.tol]

    @property
    def verdict_disagreements(self) -> list[Trial]:
        return [t for t in self.trials if t.verdicts_agree is False]

    def per_rank(self) -> dict[int, dict]:
        out: dict[int, dict] = {}
        for t in self.trials:
            r = out.setdefault(t.rank, {"trials": 0, "max_residual": 0.0,
                                        "contextual": 0, "failures": []})
            r["trials"] += 1
            if t.error is not None or t.residual > self.tol:
                r["failures"].append(t.seed)
            if t.error is None:
                r["max_residual"] = max(r["max_residual"], t.residual)
                r["contextual"] += int(t.cnt2 > DECISION_TOL)
        return out

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "tol": self.tol, "seconds": self.seconds,
            "max_residual": self.max_residual,
            "failures": [t.__dict__ for t in self.failures],
            "verdict_disagreements": [t.__dict__ for t in self.verdict_disagreements],
            "per_rank": {str(k): v for k, v in self.per_rank().items()},
        }


def trial_seeds(seed: int, rank: int, trials: int) -> list[int]:
    ss = np.random.SeedSequence([seed, rank])
    return [int(s) for s in ss.generate_state(trials, dtype=np.uint32)]


def run_trial(rank: int, index: int, seed: int, verdicts: bool = True,
              tol: float = lp.DEFAULT_TOL, backend: str = "simplex") -> Trial:
    mode = "arbitrary" if index % 2 == 0 else "consistent"
    t = Trial(rank, index, seed, mode)
    try:
        system = random_cyclic_system(rank, seed, mode)
        t.cnt2 = cnt2(system, tol=tol, backend=backend).value
        t.cntf = cntf(system, tol=tol, backend=backend).value
        if verdicts:
            t.noncontextual = is_noncontextual(system, tol, backend).noncontextual
    except lp.SolverError as exc:
        t.error = str(exc)
        log.warning("rank %d trial %d (seed %d): %s", rank, index, seed, exc)
    return t


def verify_identity(ranks, trials: int, seed: int = 0, tol: float = IDENTITY_TOL,
                    verdicts: bool = True, backend: str = "simplex") -> IdentityReport:
    """Measure both quantities on random systems and compare cntf with 2 * cnt2.

    Trials alternate arbitrary and consistently connected generation; the
    per-trial seed is recorded so any trial can be replayed with
    :func:`run_trial`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    start = time.perf_counter()
    out = []
    for rank in ranks:
        if rank < 2:
            raise ValueError("ranks must be >= 2")
        for i, s in enumerate(trial_seeds(seed, rank, trials)):
            out.append(run_trial(rank, i, s, verdicts, backend=backend))
    return IdentityReport(out, tol, seed, time.perf_counter() - start)
