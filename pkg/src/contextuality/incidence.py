"""Incidence matrices between description events and joint assignments.

Column ``v`` of a rank-``n`` matrix is one assignment of values to all
``2n`` coupling variables ``S_j^i`` (context-major order).  Columns run
lexicographically with value 1 before value 0, so column 0 sets every
variable to 1 and the last column sets every variable to 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DENSE_RANK = 10


class MemoryModeError(ValueError):
    """Requested rank exceeds the dense bit-matrix cap."""


Event = tuple[tuple[int, ...], tuple[int, ...]]


def _check_rank(n: int, max_rank: int) -> None:
    if n < 2:
        raise ValueError("rank must be >= 2")
    if n > max_rank:
        raise MemoryModeError(
            f"rank {n} needs 2^{2 * n} dense columns; cap is {max_rank}")


def column_assignment(n: int, v: int) -> np.ndarray:
    """Values (0/1) of the ``2n`` variables at column ``v``."""
    size = 4 ** n
    if not 0 <= v < size:
        raise ValueError(f"column {v} out of range for rank {n}")
    code = size - 1 - v
    shifts = np.arange(2 * n - 1, -1, -1)
    return ((code >> shifts) & 1).astype(np.uint8)


def assignments(n: int, columns: np.ndarray) -> np.ndarray:
    """``(2n, len(columns))`` matrix of variable values per column."""
    code = (4 ** n - 1) - np.asarray(columns, dtype=np.int64)
    shifts = np.arange(2 * n - 1, -1, -1, dtype=np.int64)
    return ((code[None, :] >> shifts[:, None]) & 1).astype(np.uint8)


def connection_vars(n: int, j: int) -> tuple[int, int]:
    """Indices of ``(S_j^j, S_j^{j-1})``."""
    return 2 * j, 2 * ((j - 1) % n) + 1


def full_events(n: int) -> list[Event]:
    """Events labelling the 12n rows of the full matrix."""
    quad = ((0, 0), (1, 0), (0, 1), (1, 1))
    ev: list[Event] = [((k,), (a,)) for k in range(2 * n) for a in (0, 1)]
    ev += [((2 * i, 2 * i + 1), q) for i in range(n) for q in quad]
    ev += [(connection_vars(n, j), q) for j in range(n) for q in quad]
    return ev


def reduced_row_index(n: int) -> np.ndarray:
    """Positions of the reduced rows (l, b, c blocks) within the full rows."""
    l = 2 * np.arange(2 * n) + 1
    b = 4 * n + 4 * np.arange(n) + 3
    c = 8 * n + 4 * np.arange(n) + 3
    return np.concatenate([l, b, c])


def event_rows(n: int, columns: np.ndarray, events: list[Event]) -> np.ndarray:
    vals = assignments(n, columns)
    out = np.ones((len(events), vals.shape[1]), dtype=bool)
    for u, (vars_, want) in enumerate(events):
        for k, a in zip(vars_, want):
            out[u] &= vals[k] == a
    return out


def _var_name(n: int, k: int) -> str:
    i = k // 2
    j = i if k % 2 == 0 else (i + 1) % n
    return f"S{j + 1}^{i + 1}"


def event_label(n: int, event: Event) -> str:
    vars_, want = event
    inner = ",".join(f"{_var_name(n, k)}={a}" for k, a in zip(vars_, want))
    return "{" + inner + "}"


@dataclass(frozen=True)
class IncidenceMatrix:
    n: int
    bits: np.ndarray
    row_labels: tuple[str, ...]
    blocks: dict

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def block(self, name: str) -> np.ndarray:
        return self.bits[self.blocks[name]]

    def as_float(self) -> np.ndarray:
        return self.bits.astype(float)

    def render(self) -> list[str]:
        """Rows as ``label<TAB>0101...`` strings."""
        rows = np.where(self.bits, ord("1"), ord("0")).astype(np.uint8)
        return [f"{lab}\t{r.tobytes().decode()}" for lab, r in zip(self.row_labels, rows)]


def build_full(n: int, max_rank: int = MAX_DENSE_RANK) -> IncidenceMatrix:
    _check_rank(n, max_rank)
    events = full_events(n)
    bits = event_rows(n, np.arange(4 ** n), events)
    return IncidenceMatrix(
        n, bits, tuple(event_label(n, e) for e in events),
        {"l": slice(0, 4 * n), "b": slice(4 * n, 8 * n), "c": slice(8 * n, 12 * n)})


def build_reduced(n: int, max_rank: int = MAX_DENSE_RANK) -> IncidenceMatrix:
    _check_rank(n, max_rank)
    events = full_events(n)
    idx = reduced_row_index(n)
    sel = [events[u] for u in idx]
    bits = event_rows(n, np.arange(4 ** n), sel)
    return IncidenceMatrix(
        n, bits, tuple(event_label(n, e) for e in sel),
        {"l": slice(0, 2 * n), "b": slice(2 * n, 3 * n), "c": slice(3 * n, 4 * n)})


def support_columns(n: int, forbidden: list[Event]) -> np.ndarray:
    """Columns (ascending) that avoid every forbidden event.

    Assignments are grown one variable at a time and filtered as soon as
    an event is decided, so the cost scales with the surviving support
    rather than with ``4**n``.
    """
    by_last: dict[int, list[Event]] = {}
    for vars_, want in forbidden:
        by_last.setdefault(max(vars_), []).append((vars_, want))
    vals = np.zeros((0, 1), dtype=np.uint8)
    for k in range(2 * n):
        count = vals.shape[1]
        vals = np.vstack([np.repeat(vals, 2, axis=1),
                          np.tile(np.array([1, 0], dtype=np.uint8), count)])
        if k in by_last:
            keep = np.ones(vals.shape[1], dtype=bool)
            for vars_, want in by_last[k]:
                hit = np.ones(vals.shape[1], dtype=bool)
                for var, a in zip(vars_, want):
                    hit &= vals[var] == a
                keep &= ~hit
            vals = vals[:, keep]
    weights = 2 ** np.arange(2 * n - 1, -1, -1, dtype=np.int64)
    code = weights @ vals.astype(np.int64)
    return (4 ** n - 1) - code
