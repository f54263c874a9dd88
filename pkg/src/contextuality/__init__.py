"""Contextuality analysis of cyclic systems of binary random variables."""

from .coupling import connection_couplings, consistify, multimaximal_pair
from .geometry import (ambient_box, bell_s1, cnt2_geometric_oracle, demicube_contains,
                       polytope_contains)
from .incidence import build_full, build_reduced, column_assignment
from .lp import LpProblem, LpSolution, SolverError, feasible, solve
from .measures import (MeasureReport, analyze, cnt2, cntf, is_noncontextual,
                       verify_identity)
from .system import (BunchTable, CyclicSystem, InvalidSystemError,
                     is_consistently_connected, load_system, marginals,
                     random_cyclic_system, snow_queen_fixture, validate)
from .vectorize import expectation_transform, full_description, reduced_description

__version__ = "0.1.0"
