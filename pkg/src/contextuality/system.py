"""Cyclic systems of binary random variables.

A cyclic system of rank ``n`` has contexts ``c_1..c_n`` and contents
``q_1..q_n``; context ``c_i`` jointly records the pair of contents
``(q_i, q_{i+1})`` (indices cyclic).  Each context is described by the
2x2 joint distribution of its two binary variables, a :class:`BunchTable`.

Variables are indexed context-major: ``R_1^1, R_2^1, R_2^2, R_3^2, ...,
R_n^n, R_1^n``, so variable ``2*i`` is the first member of bunch ``i``
and ``2*i + 1`` is its second member (0-based ``i``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

USER_TOL = 1e-6
GENERATED_TOL = 1e-12


class InvalidSystemError(ValueError):
    """Raised when a system or bunch table fails validation."""


@dataclass(frozen=True)
class BunchTable:
    """Joint distribution of the two variables of one context.

    ``p01`` is ``Pr(first = 0, second = 1)``.
    """

    p00: float
    p01: float
    p10: float
    p11: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    @property
    def first(self) -> float:
        """Pr(first variable = 1)."""
        return self.p10 + self.p11

    @property
    def second(self) -> float:
        """Pr(second variable = 1)."""
        return self.p01 + self.p11

    def violations(self, tol: float = USER_TOL) -> list[str]:
        out = []
        for name, p in zip(("p00", "p01", "p10", "p11"), self.as_tuple()):
            if not np.isfinite(p):
                out.append(f"{name} is not finite")
            elif p < -tol or p > 1 + tol:
                out.append(f"{name}={p!r} outside [0, 1]")
        total = sum(self.as_tuple())
        if abs(total - 1.0) > tol:
            out.append(f"sum {total!r} != 1")
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "BunchTable":
        keys = {"p00", "p01", "p10", "p11"}
        unknown = set(d) - keys
        if unknown:
            raise InvalidSystemError(f"unknown bunch fields: {sorted(unknown)}")
        missing = keys - set(d)
        if missing:
            raise InvalidSystemError(f"missing bunch fields: {sorted(missing)}")
        return cls(*(float(d[k]) for k in ("p00", "p01", "p10", "p11")))

    def to_dict(self) -> dict:
        return {"p00": self.p00, "p01": self.p01, "p10": self.p10, "p11": self.p11}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class CyclicSystem:
    bunches: tuple[BunchTable, ...]
    labels: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bunches", tuple(self.bunches))
        if len(self.bunches) < 2:
            raise InvalidSystemError("a cyclic system needs rank >= 2")

    @property
    def rank(self) -> int:
        return len(self.bunches)

    @classmethod
    def from_tables(cls, tables: Iterable[Sequence[float]], labels: dict | None = None):
        """Build from ``(p00, p01, p10, p11)`` rows."""
        return cls(tuple(BunchTable(*map(float, t)) for t in tables), labels)

    def tables(self) -> np.ndarray:
        """``(n, 4)`` array of ``(p00, p01, p10, p11)`` rows."""
        return np.array([b.as_tuple() for b in self.bunches], dtype=float)

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        d = {"rank": self.rank, "bunches": [b.to_dict() for b in self.bunches]}
        if self.labels:
            d["labels"] = self.labels
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CyclicSystem":
        unknown = set(d) - {"rank", "bunches", "labels"}
        if unknown:
            raise InvalidSystemError(f"unknown system fields: {sorted(unknown)}")
        if "bunches" not in d or "rank" not in d:
            raise InvalidSystemError("system needs 'rank' and 'bunches'")
        bunches = [BunchTable.from_dict(b) for b in d["bunches"]]
        if d["rank"] != len(bunches):
            raise InvalidSystemError(
                f"rank {d['rank']} does not match {len(bunches)} bunches")
        return cls(tuple(bunches), d.get("labels"))


def validate(system: CyclicSystem, tol: float = USER_TOL) -> ValidationReport:
    out = []
    for i, b in enumerate(system.bunches):
        out.extend(f"bunch c{i + 1}: {v}" for v in b.violations(tol))
    return ValidationReport(tuple(out))


def check(system: CyclicSystem, tol: float = USER_TOL) -> CyclicSystem:
    """Return ``system`` unchanged or raise :class:`InvalidSystemError`."""
    report = validate(system, tol)
    if not report.ok:
        raise InvalidSystemError("; ".join(report.violations))
    return system


def marginals(system: CyclicSystem) -> np.ndarray:
    """Pr(R_j^i = 1) for all 2n variables, context-major."""
    t = system.tables()
    out = np.empty(2 * system.rank)
    out[0::2] = t[:, 2] + t[:, 3]
    out[1::2] = t[:, 1] + t[:, 3]
    return out


def connection_marginals(system: CyclicSystem) -> tuple[np.ndarray, np.ndarray]:
    """Per content ``j``: (Pr(R_j^j = 1), Pr(R_j^{j-1} = 1))."""
    m = marginals(system)
    return m[0::2], np.roll(m[1::2], 1)


def is_consistently_connected(system: CyclicSystem, tol: float = USER_TOL) -> bool:
    own, prev = connection_marginals(system)
    return bool(np.all(np.abs(own - prev) <= tol))


def random_cyclic_system(rank: int, seed: int, mode: str = "arbitrary") -> CyclicSystem:
    """Deterministic random system.

    ``arbitrary`` draws each bunch uniformly from the 3-simplex.
    ``consistent`` draws one marginal per content, then each ``p11``
    uniformly from its Frechet interval.
    """
    if rank < 2:
        raise ValueError("rank must be >= 2")
    rng = np.random.default_rng(seed)
    if mode == "arbitrary":
        # normalized exponentials are uniform on the simplex
        e = rng.exponential(size=(rank, 4))
        return CyclicSystem.from_tables(e / e.sum(axis=1, keepdims=True))
    if mode == "consistent":
        p = rng.uniform(size=rank)
        tables = []
        for i in range(rank):
            a, b = p[i], p[(i + 1) % rank]
            lo, hi = max(0.0, a + b - 1.0), min(a, b)
            p11 = rng.uniform(lo, hi)
            p10, p01 = a - p11, b - p11
            tables.append((1.0 - p11 - p10 - p01, p01, p10, p11))
        return CyclicSystem.from_tables(tables)
    raise ValueError(f"unknown mode {mode!r}")


# -- fixtures -------------------------------------------------------------

def snow_queen_fixture() -> CyclicSystem:
    """The four-context character/characteristic choice experiment.

    The ``p01`` cell of c1 is .021 (rounded value .020 adjusted so the
    table sums to one).
    """
    return CyclicSystem.from_tables(
        [
            (0.843, 0.021, 0.029, 0.107),
            (0.769, 0.070, 0.011, 0.150),
            (0.135, 0.536, 0.320, 0.009),
            (0.797, 0.018, 0.035, 0.150),
        ],
        labels={
            "contents": ["Gerda/Troll", "Beautiful/Unattractive",
                         "Snow Queen/Old Finn woman", "Kind/Evil"],
            "contexts": ["c1", "c2", "c3", "c4"],
        },
    )


def uniform_fixture(rank: int = 4) -> CyclicSystem:
    return CyclicSystem.from_tables([(0.25, 0.25, 0.25, 0.25)] * rank)


def prbox_fixture(rank: int = 4) -> CyclicSystem:
    """Perfect correlations in all contexts but the last, which is anticorrelated."""
    corr, anti = (0.5, 0.0, 0.0, 0.5), (0.0, 0.5, 0.5, 0.0)
    return CyclicSystem.from_tables([corr] * (rank - 1) + [anti])


def figure1_fixture() -> CyclicSystem:
    """Rank-2 consistent system with marginal expectations -.2 (q1) and 0 (q2)
    and bunch-product expectations (.2, .6)."""
    p1, p2 = 0.4, 0.5
    tables = []
    for e, (a, b) in zip((0.2, 0.6), ((p1, p2), (p2, p1))):
        p11 = (e + 2 * a + 2 * b - 1) / 4
        tables.append((1 - a - b + p11, b - p11, a - p11, p11))
    return CyclicSystem.from_tables(tables)


FIXTURES = {
    "snow-queen": snow_queen_fixture,
    "uniform": uniform_fixture,
    "prbox": prbox_fixture,
    "figure-1": figure1_fixture,
}


def load_system(source: str | Path) -> CyclicSystem:
    """Load a fixture by name or a JSON system file."""
    if str(source) in FIXTURES:
        return FIXTURES[str(source)]()
    with open(source) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidSystemError(f"{source}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidSystemError(f"{source}: expected a JSON object")
    return CyclicSystem.from_dict(data)


def dump_system(system: CyclicSystem, path: str | Path | None = None) -> str:
    text = json.dumps(system.to_dict(), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
