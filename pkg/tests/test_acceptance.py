"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline;
they are also collected into the terminal summary.
"""

import itertools
import time

import numpy as np
import pytest

from conftest import contextual_system, record
from contextuality.coupling import connection_couplings, consistify
from contextuality.geometry import (ambient_box, bell_s1, bell_s1_exhaustive,
                                    cnt2_geometric_oracle, demicube_contains,
                                    PolytopeMembership)
from contextuality.incidence import build_full, build_reduced
from contextuality.measures import (DECISION_TOL, analyze, cnt2, cntf,
                                    trial_seeds, trim_to_subprobability, verify_identity)
from contextuality.system import (is_consistently_connected, prbox_fixture,
                                  random_cyclic_system, snow_queen_fixture)
from pathlib import Path

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def theorem_corpus():
    return verify_identity(range(2, 7), trials=500, seed=0)


def test_c01_snow_queen():
    start = time.perf_counter()
    rep = analyze(snow_queen_fixture())
    secs = time.perf_counter() - start
    ok = abs(rep.cnt2 - 0.069) <= 5e-4 and abs(rep.cntf - 0.138) <= 5e-4 and secs < 1
    record("C1 snow queen", ok,
           f"cnt2={rep.cnt2:.6f} cntf={rep.cntf:.6f} runtime={secs:.3f}s")
    assert ok


def test_c02_coupling_tables():
    # (p00, p01, p10, p11) with T_j^j first and T_j^{j-1} second
    expected = [(.832, .032, .000, .136), (.839, .000, .033, .128),
                (.671, .000, .109, .220), (.455, .360, .000, .185)]
    got = [t.as_tuple() for t in connection_couplings(snow_queen_fixture())]
    err = float(np.abs(np.array(got) - np.array(expected)).max())
    ok = err <= 1e-12
    record("C2 connection couplings", ok, f"max entry error={err:.2e}")
    assert ok


def test_c03_incidence_rank4():
    expected = (DATA / "incidence_rank4_reduced.txt").read_text().splitlines()
    got = build_reduced(4).render()
    same = got == expected
    shape_ok = len(got) == 16 and all(len(r.split("\t")[1]) == 256 for r in got)
    ok = same and shape_ok
    record("C3 rank-4 reduced incidence", ok,
           f"rows={len(got)} identical={same}")
    assert ok


def test_c04_pinned_witness():
    system = snow_queen_fixture()
    n = system.rank
    x = cnt2(system, pin=1).witness_x
    z = trim_to_subprobability(system, x)
    M = build_full(n).as_float()
    rows = [4 * n + 4 + k for k in (3, 2, 1, 0)]  # bunch 2: 11, 01, 10, 00
    x_row = M[rows] @ x
    z_row = M[rows] @ z
    z_target = np.array([.081, .070, .011, .700])
    x_target = np.array([.081, .139, .080, .700])
    z_err = float(np.abs(z_row - z_target).max())
    x_err = float(np.abs(x_row - x_target).max())
    z_fraction = 1 - z.sum()
    ok = z_err <= 2e-3 and x_err <= 2e-3 and abs(z_fraction - cntf(system).value) < 1e-9
    record("C4 pinned witness", ok,
           f"x* row={np.round(x_row, 4).tolist()} z* row={np.round(z_row, 4).tolist()} "
           f"empirical=(.150, .070, .011, .769) z err={z_err:.1e} x err={x_err:.1e}")
    assert ok


def test_c05_theorem(theorem_corpus):
    rep = theorem_corpus
    contextual = sum(r["contextual"] for r in rep.per_rank().values())
    ok = rep.max_residual <= 1e-6 and not rep.failures and rep.seconds <= 600
    record("C5 cntf = 2 cnt2", ok,
           f"{len(rep.trials)} systems ranks 2-6, {contextual} contextual, "
           f"max residual={rep.max_residual:.2e}, runtime={rep.seconds:.1f}s")
    assert ok


def test_c06_verdicts(theorem_corpus):
    bad = theorem_corpus.verdict_disagreements
    ok = not bad and all(t.noncontextual is not None for t in theorem_corpus.trials)
    record("C6 verdict coherence", ok, f"disagreements={len(bad)}")
    assert ok


def test_c07_consistification(rng):
    worst, inconsistent, rank_bad, n_ctx = 0.0, 0, 0, 0
    for rank in range(2, 6):
        for i, seed in enumerate(trial_seeds(7, rank, 100)):
            if i % 4 == 3:
                system = contextual_system(rank, rng, consistent=False)
            else:
                system = random_cyclic_system(rank, seed, ("arbitrary", "consistent")[i % 2])
            out = consistify(system)
            rank_bad += out.rank != 2 * rank
            inconsistent += not is_consistently_connected(out, 1e-12)
            a, b = analyze(system), analyze(out)
            n_ctx += a.contextual
            worst = max(worst, abs(a.cnt2 - b.cnt2), abs(a.cntf - b.cntf))
    ok = worst <= 1e-6 and not inconsistent and not rank_bad
    record("C7 consistification", ok,
           f"400 systems ({n_ctx} contextual), max |delta|={worst:.2e}, "
           f"rank errors={rank_bad}, not consistent={inconsistent}")
    assert ok


def test_c08_oracle(rng):
    worst = 0.0
    for rank in range(2, 6):
        for i in range(100):
            system = contextual_system(rank, rng, consistent=bool(i % 2))
            worst = max(worst, abs(cnt2_geometric_oracle(system).value - cnt2(system).value))
    ok = worst <= 1e-6
    record("C8 geometric oracle", ok, f"400 contextual systems, max |delta|={worst:.2e}")
    assert ok


def _candidates(rng, box, n, size):
    third = size // 3
    even = np.array([v for v in itertools.product((-1, 1), repeat=n) if np.prod(v) == 1])
    w = rng.dirichlet(np.full(len(even), 0.3), size=size - 2 * third)
    hull = w @ even
    return np.vstack([box.sample(rng, third),
                      rng.uniform(-1, 1, size=(third, n)),
                      hull])


def test_c09_geometry(rng):
    disagree, inside, total = 0, 0, 0
    for rank in range(2, 5):
        for seed in trial_seeds(9, rank, 50):
            system = random_cyclic_system(rank, seed, "consistent")
            box = ambient_box(system)
            member = PolytopeMembership(system)
            for x in _candidates(rng, box, rank, 1000):
                lp_says = member(x)
                geo_says = demicube_contains(x) and box.contains(x)
                disagree += lp_says != geo_says
                inside += lp_says
                total += 1
    ok = disagree == 0
    record("C9 polytope = demicube & box", ok,
           f"{total} points, {inside} inside, disagreements={disagree}")
    assert ok


def test_c10_bell_functional():
    rng = np.random.default_rng(10)
    mismatches = 0
    for rank in range(2, 9):
        xs = rng.uniform(-1, 1, size=(10_000, rank))
        # a quarter on a coarse grid to exercise ties and zeros
        xs[::4] = np.round(xs[::4] * 2) / 2
        mismatches += sum(bell_s1(x) != bell_s1_exhaustive(x) for x in xs)
    ok = mismatches == 0
    record("C10 bell functional", ok, f"70000 vectors ranks 2-8, mismatches={mismatches}")
    assert ok


def test_c11_prbox():
    system = prbox_fixture()
    rep = analyze(system)
    oracle = cnt2_geometric_oracle(system).value
    ok = (abs(rep.cnt2 - 0.5) <= 1e-6 and abs(rep.cntf - 1) <= 1e-6
          and abs(oracle - 0.5) <= 1e-6 and abs(oracle - rep.cnt2) <= 1e-6
          and rep.cnt2 > DECISION_TOL)
    record("C11 PR box", ok, f"cnt2 lp={rep.cnt2:.9f} oracle={oracle:.9f} cntf={rep.cntf:.9f}")
    assert ok
