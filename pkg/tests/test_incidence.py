from pathlib import Path

import numpy as np
import pytest

from contextuality.incidence import (MemoryModeError, assignments, build_full,
                                     build_reduced, column_assignment, full_events,
                                     support_columns)

DATA = Path(__file__).parent / "data"


def test_column_zero_all_ones():
    assert column_assignment(4, 0).tolist() == [1] * 8


def test_last_column_all_zeros():
    assert column_assignment(4, 255).tolist() == [0] * 8


def test_column_out_of_range():
    with pytest.raises(ValueError):
        column_assignment(4, 256)


def test_first_variable_upper_half():
    m = build_reduced(4)
    row = m.bits[0]
    assert row[:128].all() and not row[128:].any()


def test_rank4_matches_reference_table():
    expected = (DATA / "incidence_rank4_reduced.txt").read_text().splitlines()
    assert build_reduced(4).render() == expected


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_full_structure(n):
    m = build_full(n)
    assert m.shape == (12 * n, 4 ** n)
    ones = np.ones(4 ** n, dtype=int)
    for i in range(n):
        # each bunch and connection quadruple partitions the columns
        b = m.block("b")[4 * i:4 * i + 4].astype(int)
        c = m.block("c")[4 * i:4 * i + 4].astype(int)
        np.testing.assert_array_equal(b.sum(axis=0), ones)
        np.testing.assert_array_equal(c.sum(axis=0), ones)
    l = m.block("l").astype(int)
    for k in range(2 * n):
        # value-0 row is the complement of the value-1 row
        np.testing.assert_array_equal(l[2 * k], ones - l[2 * k + 1])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_reduced_conjunctions(n):
    m = build_reduced(n)
    Ml, Mb, Mc = m.block("l"), m.block("b"), m.block("c")
    for i in range(n):
        np.testing.assert_array_equal(Mb[i], Ml[2 * i] & Ml[2 * i + 1])
        prev = 2 * ((i - 1) % n) + 1
        np.testing.assert_array_equal(Mc[i], Ml[2 * i] & Ml[prev])


def test_rank2_counts():
    m = build_reduced(2)
    assert m.shape == (8, 16)
    counts = m.bits.sum(axis=1)
    assert counts[:4].tolist() == [8] * 4
    assert counts[4:].tolist() == [4] * 4


def test_full_rows_are_reduced_rows():
    full, red = build_full(3), build_reduced(3)
    idx = [full.row_labels.index(lab) for lab in red.row_labels]
    np.testing.assert_array_equal(full.bits[idx], red.bits)


def test_rank_cap():
    with pytest.raises(MemoryModeError):
        build_reduced(11)
    with pytest.raises(ValueError):
        build_full(1)


def test_assignments_match_column_assignment():
    cols = np.arange(64)
    vals = assignments(3, cols)
    for v in cols:
        np.testing.assert_array_equal(vals[:, v], column_assignment(3, v))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_support_columns_matches_filter(n):
    rng = np.random.default_rng(n)
    events = full_events(n)
    forbidden = [events[u] for u in rng.choice(len(events), size=n + 2, replace=False)]
    m = build_full(n)
    hit = np.zeros(4 ** n, dtype=bool)
    for ev in forbidden:
        hit |= m.bits[events.index(ev)]
    np.testing.assert_array_equal(support_columns(n, forbidden), np.flatnonzero(~hit))


def test_support_columns_no_events():
    np.testing.assert_array_equal(support_columns(3, []), np.arange(64))
