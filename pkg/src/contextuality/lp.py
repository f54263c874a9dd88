"""Small dense linear programs.

Problems have the form::

    min/max  c @ u
    s.t.     A_eq @ u == b_eq
             A_le @ u <= b_le
             u >= 0

The default backend is a two-phase revised simplex with an explicit
basis inverse, Dantzig pricing, and a switch to Bland's rule after a run
of degenerate pivots.  ``backend="highs"`` routes through scipy's HiGHS
for cross-checking.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"


class SolverError(RuntimeError):
    """An LP could not be solved to a trustworthy status."""


@dataclass
class LpProblem:
    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_le: np.ndarray | None = None
    b_le: np.ndarray | None = None
    sense: str = "min"
    names: list[str] | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        nvar = self.c.shape[0]
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        self.A_eq, self.b_eq = self._block(self.A_eq, self.b_eq, nvar, "eq")
        self.A_le, self.b_le = self._block(self.A_le, self.b_le, nvar, "le")
        for arr in (self.c, self.A_eq, self.b_eq, self.A_le, self.b_le):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")

    @staticmethod
    def _block(A, b, nvar, tag):
        if A is None:
            return np.zeros((0, nvar)), np.zeros(0)
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if A.shape != (b.shape[0], nvar):
            raise ValueError(f"A_{tag} shape {A.shape} inconsistent with "
                             f"{b.shape[0]} rows x {nvar} variables")
        return A, b

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]

    def violation(self, u: np.ndarray) -> float:
        """Largest constraint violation of ``u``."""
        worst = max(0.0, float(-u.min(initial=0.0)))
        if len(self.b_eq):
            worst = max(worst, float(np.abs(self.A_eq @ u - self.b_eq).max()))
        if len(self.b_le):
            worst = max(worst, float((self.A_le @ u - self.b_le).max()))
        return worst


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective: float = float("nan")
    iterations: int = 0
    backend: str = "simplex"
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Revised simplex state over a standard-form system ``A u = b``."""

    refactor_every = 64
    degenerate_limit = 30

    def __init__(self, A, b, basis, tol, max_iter):
        self.A = A
        self.b = b
        self.basis = np.array(basis, dtype=np.int64)
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0
        self.refactor()

    def refactor(self):
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular basis") from exc
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-13] = 0.0
        self.since_refactor = 0

    def run(self, c, allowed):
        """Minimize ``c @ u`` over columns flagged in ``allowed``."""
        tol = self.tol
        degenerate = 0
        while True:
            if self.iterations >= self.max_iter:
                return NUMERICAL_FAILURE
            y = c[self.basis] @ self.Binv
            red = c - y @ self.A
            red[self.basis] = 0.0
            red[~allowed] = 0.0
            bland = degenerate > self.degenerate_limit
            if bland:
                cand = np.flatnonzero(red < -tol)
                if cand.size == 0:
                    return OPTIMAL
                q = int(cand[0])
            else:
                q = int(np.argmin(red))
                if red[q] >= -tol:
                    return OPTIMAL
            d = self.Binv @ self.A[:, q]
            rows = np.flatnonzero(d > tol)
            if rows.size == 0:
                return UNBOUNDED
            xB = np.maximum(self.xB[rows], 0.0)
            ratios = xB / d[rows]
            theta = ratios.min()
            ties = rows[ratios <= theta + 1e-12]
            if bland:
                p = int(ties[np.argmin(self.basis[ties])])
            else:
                p = int(ties[np.argmax(d[ties])])
            degenerate = degenerate + 1 if theta <= 1e-12 else 0
            self.pivot(p, q, d)
            self.iterations += 1

    def pivot(self, p, q, d):
        theta = max(self.xB[p], 0.0) / d[p]
        self.xB -= theta * d
        self.xB[p] = theta
        self.Binv[p] /= d[p]
        dd = d.copy()
        dd[p] = 0.0
        self.Binv -= np.outer(dd, self.Binv[p])
        self.basis[p] = q
        self.since_refactor += 1
        if self.since_refactor >= self.refactor_every:
            self.refactor()

    def solution(self, ncols):
        u = np.zeros(ncols)
        u[self.basis] = np.maximum(self.xB, 0.0)
        return u


def _standard_form(problem: LpProblem):
    """Rows ``[A_eq; A_le | I]`` with nonnegative right-hand sides."""
    n = problem.num_vars
    m_eq, m_le = len(problem.b_eq), len(problem.b_le)
    m = m_eq + m_le
    A = np.zeros((m, n + m_le))
    A[:m_eq, :n] = problem.A_eq
    A[m_eq:, :n] = problem.A_le
    A[m_eq:, n:] = np.eye(m_le)
    b = np.concatenate([problem.b_eq, problem.b_le])
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    return A, b, m_eq, flip


def _phase_one(A, b, m_eq, flip, tol, max_iter):
    """Return (tableau, status, infeasibility) with artificials removed."""
    m, ncols = A.shape
    basis = np.empty(m, dtype=np.int64)
    art_rows = []
    for r in range(m):
        if r >= m_eq and not flip[r]:
            basis[r] = ncols - (m - m_eq) + (r - m_eq)  # its slack
        else:
            art_rows.append(r)
    nart = len(art_rows)
    Aext = np.hstack([A, np.zeros((m, nart))])
    for t, r in enumerate(art_rows):
        Aext[r, ncols + t] = 1.0
        basis[r] = ncols + t
    tab = _Tableau(Aext, b, basis, tol, max_iter)
    if nart == 0:
        return tab, OPTIMAL, 0.0
    cost = np.zeros(ncols + nart)
    cost[ncols:] = 1.0
    allowed = np.ones(ncols + nart, dtype=bool)
    status = tab.run(cost, allowed)
    if status != OPTIMAL:
        return tab, NUMERICAL_FAILURE, float("nan")
    infeas = float(cost[tab.basis] @ np.maximum(tab.xB, 0.0))
    if infeas > tol:
        return tab, INFEASIBLE, infeas
    # pivot remaining (zero-level) artificials out, dropping redundant rows
    keep_rows = np.ones(m, dtype=bool)
    keep_pos = np.ones(m, dtype=bool)
    for r in range(m):
        if tab.basis[r] < ncols:
            continue
        alpha = tab.Binv[r] @ Aext[:, :ncols]
        alpha[tab.basis[tab.basis < ncols]] = 0.0
        j = int(np.argmax(np.abs(alpha)))
        if abs(alpha[j]) > 1e-9:
            d = tab.Binv @ Aext[:, j]
            tab.pivot(r, j, d)
        else:
            # the constraint owning this artificial is redundant; dropping it
            # together with its unit column keeps the basis nonsingular
            keep_rows[art_rows[tab.basis[r] - ncols]] = False
            keep_pos[r] = False
    basis = tab.basis[keep_pos]
    tab2 = _Tableau(A[keep_rows], b[keep_rows], basis, tol, max_iter)
    tab2.iterations = tab.iterations
    return tab2, OPTIMAL, infeas


def _solve_simplex(problem: LpProblem, tol: float, max_iter: int) -> LpSolution:
    A, b, m_eq, flip = _standard_form(problem)
    n = problem.num_vars
    sign = -1.0 if problem.sense == "max" else 1.0
    try:
        tab, status, infeas = _phase_one(A, b, m_eq, flip, tol, max_iter)
        if status != OPTIMAL:
            return LpSolution(status, iterations=tab.iterations,
                              info={"infeasibility": infeas})
        cost = np.zeros(A.shape[1])
        cost[:n] = sign * problem.c
        status = tab.run(cost, np.ones(A.shape[1], dtype=bool))
    except SolverError as exc:
        return LpSolution(NUMERICAL_FAILURE, info={"error": str(exc)})
    if status != OPTIMAL:
        return LpSolution(status, iterations=tab.iterations)
    u = tab.solution(A.shape[1])[:n]
    if problem.violation(u) > tol:
        tab.refactor()
        u = tab.solution(A.shape[1])[:n]
        if problem.violation(u) > tol:
            return LpSolution(NUMERICAL_FAILURE, u, float(problem.c @ u),
                              tab.iterations, info={"violation": problem.violation(u)})
    return LpSolution(OPTIMAL, u, float(problem.c @ u), tab.iterations)


def _solve_highs(problem: LpProblem, tol: float) -> LpSolution:
    from scipy.optimize import linprog

    sign = -1.0 if problem.sense == "max" else 1.0
    res = linprog(
        sign * problem.c,
        A_ub=problem.A_le if len(problem.b_le) else None,
        b_ub=problem.b_le if len(problem.b_le) else None,
        A_eq=problem.A_eq if len(problem.b_eq) else None,
        b_eq=problem.b_eq if len(problem.b_eq) else None,
        bounds=(0, None), method="highs",
        options={"primal_feasibility_tolerance": min(tol, 1e-7),
                 "dual_feasibility_tolerance": min(tol, 1e-7)},
    )
    status = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}.get(res.status, NUMERICAL_FAILURE)
    if status != OPTIMAL:
        return LpSolution(status, iterations=int(getattr(res, "nit", 0)), backend="highs")
    u = np.maximum(res.x, 0.0)
    if problem.violation(u) > tol:
        return LpSolution(NUMERICAL_FAILURE, u, float(problem.c @ u), int(res.nit),
                          "highs", {"violation": problem.violation(u)})
    return LpSolution(OPTIMAL, u, float(problem.c @ u), int(res.nit), "highs")


def solve(problem: LpProblem, tol: float = DEFAULT_TOL, backend: str = "simplex",
          max_iter: int = 50_000) -> LpSolution:
    """Solve ``problem``; an optimal status is re-checked against the constraints."""
    if backend not in ("simplex", "highs"):
        raise ValueError(f"unknown backend {backend!r}")
    if problem.num_vars == 0:
        # everything pruned away: only the right-hand sides decide
        u = np.zeros(0)
        status = OPTIMAL if problem.violation(u) <= tol else INFEASIBLE
        return LpSolution(status, u, 0.0, 0, backend)
    if backend == "simplex":
        return _solve_simplex(problem, tol, max_iter)
    return _solve_highs(problem, tol)


def feasible(A_eq: np.ndarray, b_eq: np.ndarray, tol: float = DEFAULT_TOL,
             backend: str = "simplex") -> LpSolution:
    """Phase-one search for ``h >= 0`` with ``A_eq h = b_eq``.

    Returns an :class:`LpSolution` with status ``optimal`` and witness
    ``x`` when feasible, ``infeasible`` otherwise.
    """
    A_eq = np.asarray(A_eq, dtype=float)
    return solve(LpProblem(np.zeros(A_eq.shape[1]), A_eq, b_eq), tol, backend)


def to_lp_format(problem: LpProblem) -> str:
    """CPLEX LP text for external verification."""
    names = problem.names or [f"u{j}" for j in range(problem.num_vars)]

    def expr(row):
        terms = [f"{'-' if a < 0 else '+'} {abs(a):.17g} {names[j]}"
                 for j, a in enumerate(row) if a != 0]
        return " ".join(terms) if terms else "0 " + names[0]

    out = io.StringIO()
    out.write("Minimize\n" if problem.sense == "min" else "Maximize\n")
    out.write(f" obj: {expr(problem.c)}\nSubject To\n")
    for r, (row, rhs) in enumerate(zip(problem.A_eq, problem.b_eq)):
        out.write(f" e{r}: {expr(row)} = {rhs:.17g}\n")
    for r, (row, rhs) in enumerate(zip(problem.A_le, problem.b_le)):
        out.write(f" l{r}: {expr(row)} <= {rhs:.17g}\n")
    out.write("End\n")
    return out.getvalue()
