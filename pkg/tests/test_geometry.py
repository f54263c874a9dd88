import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import contextual_system
from contextuality import lp
from contextuality.geometry import (BisectionError, ambient_box, bell_s1,
                                    bell_s1_exhaustive, cnt2_geometric_oracle,
                                    demicube_contains, odd_sign_vectors, optimal_odd_vertex,
                                    polytope_contains)
from contextuality.measures import cnt2
from contextuality.system import (CyclicSystem, figure1_fixture, prbox_fixture,
                                  snow_queen_fixture, uniform_fixture)
from contextuality.vectorize import expectation_transform, reduced_description


@pytest.mark.parametrize("x,expected", [
    ((1, 1, 1, -1), 4), ((1, 1, 1, 1), 2), ((0, 0, 0, 0), 0), ((1, 1), 0), ((1, -1), 2)])
def test_bell_s1_examples(x, expected):
    assert bell_s1(x) == expected
    assert bell_s1_exhaustive(x) == expected


def test_odd_sign_vectors_count():
    vs = list(odd_sign_vectors(5))
    assert len(vs) == 16 and all(np.prod(v) == -1 for v in vs)


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=7))
@settings(max_examples=300)
def test_bell_s1_closed_form(x):
    assert bell_s1(x) == bell_s1_exhaustive(x)
    signs = optimal_odd_vertex(x)
    assert np.prod(signs) == -1
    assert abs(float(np.dot(signs, x)) - bell_s1(x)) < 1e-12


def test_demicube():
    assert demicube_contains([1, 1, 1, 1])
    assert not demicube_contains([1, 1, 1, -1])
    assert demicube_contains([0, 0, 0])
    assert not demicube_contains([1.1, 0, 0])
    assert demicube_contains([1, 1])
    assert not demicube_contains([0.5, -0.5])
    with pytest.raises(ValueError):
        demicube_contains([0, 0], n=3)


def test_ambient_box_figure1():
    box = ambient_box(figure1_fixture())
    np.testing.assert_allclose(box.lo, [-0.8, -0.8], atol=1e-12)
    np.testing.assert_allclose(box.hi, [0.8, 0.8], atol=1e-12)
    assert not box.empty.any()


def test_ambient_box_uniform():
    box = ambient_box(uniform_fixture(3))
    np.testing.assert_allclose(box.lo, -1)
    np.testing.assert_allclose(box.hi, 1)


def test_ambient_box_requires_consistency():
    with pytest.raises(ValueError):
        ambient_box(snow_queen_fixture())


def test_ambient_box_contains_actual():
    system = figure1_fixture()
    e = expectation_transform(reduced_description(system)).phi_b
    assert ambient_box(system).contains(e)


def test_membership_examples():
    system = uniform_fixture(2)
    assert polytope_contains(system, [1, 1])
    assert polytope_contains(system, [0, 0])
    assert not polytope_contains(system, [1, -1])
    assert not polytope_contains(figure1_fixture(), [0.6, 0.2])


@pytest.mark.parametrize("fixture,expected", [
    (snow_queen_fixture, 0.069), (prbox_fixture, 0.5), (figure1_fixture, 0.1),
    (uniform_fixture, 0.0)])
def test_oracle_fixtures(fixture, expected):
    res = cnt2_geometric_oracle(fixture())
    assert abs(res.value - expected) < 1e-8
    assert res.lp_calls > 0


def test_oracle_per_coordinate_equal_on_snow_queen():
    res = cnt2_geometric_oracle(snow_queen_fixture())
    assert all(abs(v - 0.069) < 1e-8 for v in res.per_coordinate)
    assert 0 <= res.best_coordinate < 4


@pytest.mark.parametrize("rank", [2, 3, 4])
def test_oracle_matches_lp(rank, rng):
    for consistent in (True, False):
        system = contextual_system(rank, rng, consistent)
        assert abs(cnt2_geometric_oracle(system).value - cnt2(system).value) < 1e-7


def test_oracle_two_point_system():
    system = CyclicSystem.from_tables([(0, 0.5, 0.5, 0), (0.5, 0, 0, 0.5)])
    assert abs(cnt2_geometric_oracle(system).value - cnt2(system).value) < 1e-8


def test_oracle_unreachable_raises(monkeypatch):
    monkeypatch.setattr(lp, "solve", lambda *a, **k: lp.LpSolution(lp.INFEASIBLE))
    with pytest.raises(BisectionError):
        cnt2_geometric_oracle(snow_queen_fixture())
