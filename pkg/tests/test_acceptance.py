"""End-to-end acceptance criteria, one test per criterion.

Each test checks its criterion at the stated tolerance and wall-clock
budget; the terminal summary prints one PASS/FAIL/SKIP line per criterion.
"""
import time
from math import comb

import numpy as np
import pytest

from ranklocus.chern import chern_of_complex_kernel, chern_of_twist, moduli_dimension
from ranklocus.complexes import h_map, koszul_differential, koszul_or_zero, strand_delta
from ranklocus.construct import (ChainSquare, _koszul_square, build_appendix_a, build_drezet_family,
                                 build_drezet_pairing, build_koszul_pair, build_steiner_pairing,
                                 build_steiner_square, eagon_northcott_terms, extract_matrix,
                                 import_and_extract, koszul_terms, predicted_mainthm,
                                 random_form_grid)
from ranklocus.errors import WindowViolation
from ranklocus.field import GF, rank
from ranklocus.linform import product_is_zero
from ranklocus.multilinear import ExtVector, contraction_matrix, maximal_rank_profile
from ranklocus.verify import reduce_mod, verify_chain_commutes, verify_exhaustive, verify_sampled

pytestmark = pytest.mark.acceptance


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


def constant(m, p, rank_):
    cert = verify_exhaustive(m, p, claimed_rank=rank_)
    assert cert.verdict == "constant", f"GF({p}): {cert.failure_count} points off rank {rank_}"
    return cert


@pytest.mark.criterion(1, "Koszul differentials, n = 3..5, exhaustive over GF(5) and GF(7)")
def test_criterion_01_koszul():
    with Budget(5):
        for n in (3, 4, 5):
            for i in range(n + 1):
                for p in (5, 7):
                    m = koszul_differential(n, i, GF(p))
                    assert m.shape == (comb(n + 1, i), comb(n + 1, i + 1))
                    constant(m, p, comb(n, i))


@pytest.mark.criterion(2, "Koszul pair on P^5, 14x14 rank 9 over GF(3) and GF(5)")
def test_criterion_02_koszul_pair_p5():
    with Budget(10):
        for p, points in ((3, 364), (5, 3906)):
            rep = build_koszul_pair(5, -4, 2, seed=0, field_=GF(p))
            assert rep.shape == (14, 14)
            assert constant(rep.matrix, p, 9).points_checked == points


@pytest.mark.criterion(3, "Koszul pair on P^7, 20x28 rank 14 over GF(3)")
def test_criterion_03_koszul_pair_p7():
    with Budget(30):
        rep = build_koszul_pair(7, -4, 1, seed=0, field_=GF(3))
        assert rep.shape == (20, 28)
        assert constant(rep.matrix, 3, 14).points_checked == 3280


@pytest.mark.criterion(4, "generic 3-form on k^9: rank 80, deficiency 4 at p=6 in every trial")
def test_criterion_04_ottaviani_weyman():
    with Budget(10):
        prof = maximal_rank_profile(8, 3, trials=10, seed=0, field=GF(32003))
        row = prof.at(6)
        assert (row.rows, row.cols) == (84, 84)
        assert row.trial_ranks == [80] * 10
        assert row.deficiency == 4


@pytest.mark.criterion(5, "five 3-forms on k^6: 15x25 rank 14 over GF(7), GF(11)")
def test_criterion_05_appendix_a():
    with Budget(30):
        for p, points in ((7, 400), (11, 1464)):
            fam = build_drezet_family(3, 3, 5, 2, seed=0, field_=GF(p))
            app = build_appendix_a(seed=0, field_=GF(p))
            assert fam.matrix == app.matrix
            assert app.shape == (15, 25)
            assert constant(app.matrix, p, 14).points_checked == points
            sq = app.square
            assert sq.h_mid.shape == (20, 45) and rank(sq.h_mid) == 20
            assert sq.h_top.shape == (30, 36) and rank(sq.h_top) == 30


@pytest.mark.criterion(6, "rank-7 pairing matrices: Steiner, quadrics on P^3, cubic on P^2")
def test_criterion_06_pairings():
    with Budget(20):
        st = build_steiner_pairing(3, 10, 3, seed=0, field_=GF(5))
        assert st.shape == (10, 10)
        constant(st.matrix, 5, 7)
        quad = build_drezet_pairing(3, 2, 7, seed=0, field_=GF(5))
        assert quad.shape == (12, 8)
        constant(quad.matrix, 5, 7)
        cubic = build_drezet_pairing(2, 3, 7, seed=0, field_=GF(7))
        assert cubic.shape == (9, 8)
        constant(cubic.matrix, 7, 7)


@pytest.mark.criterion(7, "Chern classes of the kernel of O^15 -> O(3) on P^3, moduli dimension 14")
def test_criterion_07_chern():
    with Budget(1):
        c = chern_of_complex_kernel([(0, 15), (3, 1)], 0, 3)
        assert c.coeffs == (1, -3, 9, -27)
        assert (c * chern_of_twist(3, 1, 3)).coeffs == (1, 0, 0, 0)
        assert moduli_dimension(0, 14, 15) == 14


def _koszul_window(rng, seed):
    n = int(rng.integers(2, 6))
    t, s, j = int(rng.integers(1, 4)), int(rng.integers(0, 4)), int(rng.integers(0, 4))
    i = int(rng.integers(-n - 1, -1))
    if j == 0:
        s = 0
    f = GF(32003)
    pred = predicted_mainthm(koszul_terms(n, t), koszul_terms(n, s), i, j)
    grid = random_form_grid(np.random.default_rng(seed), s, t, n + 1, j, f)
    return ("koszul", n, t, s, j, i), pred, _koszul_square(n, i, j, t, s, grid, f)


def _strand_window(rng, seed):
    n, d = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    s = int(rng.integers(1, 8))
    i = int(rng.integers(2, n + 1))
    f = GF(32003)
    pred = predicted_mainthm(eagon_northcott_terms(n, d), koszul_terms(n, s), -i, 0)
    grid = random_form_grid(np.random.default_rng(seed), s, 1, n + d, d, f)

    def h(k):
        return h_map(n, d, n + d, k, k, grid, k + d, f)

    sq = ChainSquare(d_top=strand_delta(n, d, i, i + d, f), d_bottom=strand_delta(n, d, i - 1, i - 1 + d, f),
                     e_top=koszul_or_zero(n, i, s, f), e_bottom=koszul_or_zero(n, i - 1, s, f),
                     h_top=h(i), h_mid=h(i - 1), h_bottom=h(i - 2))
    return ("strand", n, d, s, i), pred, sq


@pytest.mark.criterion(8, "prediction matches extraction on 200 random windows")
def test_criterion_08_formula_conformance():
    rng = np.random.default_rng(2024)
    checked, mismatches, draws = 0, [], 0
    with Budget(120):
        while checked < 200:
            draws += 1
            assert draws < 5000, "could not draw 200 windows meeting the surjectivity hypotheses"
            make = _strand_window if rng.random() < 0.25 else _koszul_window
            try:
                label, pred, sq = make(rng, draws)
            except WindowViolation:
                continue
            if rank(sq.h_top) != sq.h_top.rows or rank(sq.h_mid) != sq.h_mid.rows:
                continue
            rep = extract_matrix(sq, pred, seed=draws)
            checked += 1
            if rep.shape != pred.shape or rep.measured_generic_rank != pred.rank:
                mismatches.append((label, rep.shape, rep.measured_generic_rank, pred))
    assert not mismatches, mismatches[:5]


def _ladders_for_strands(n, g, s, seed):
    f = GF(32003)
    rng = np.random.default_rng(seed)
    grid = [[ExtVector.random(n + g, g, rng, f)] for _ in range(s)]
    for d in range(1, n + 1):
        p = d + g
        if d < n:
            assert product_is_zero(strand_delta(n, g, d, p, f), strand_delta(n, g, d + 1, p + 1, f))
        low = h_map(n, g, n + g, d - 1, d - 1, grid, p - 1, f)
        top = h_map(n, g, n + g, d, d, grid, p, f)
        lhs = strand_delta(n, g, d, p, f).mul_const_left(low)
        rhs = koszul_or_zero(n, d, s, f).mul_const_right(top)
        assert lhs == rhs, f"ladder fails at n={n}, g={g}, d={d}"


@pytest.mark.criterion(9, "sign and multiplicity conventions: differentials square to zero, ladders commute")
def test_criterion_09_conventions():
    with Budget(60):
        f = GF(32003)
        for n in range(1, 8):
            for i in range(n):
                assert product_is_zero(koszul_differential(n, i, f), koszul_differential(n, i + 1, f))
        # strand ladders behind criterion 5 and the quadric family
        _ladders_for_strands(3, 3, 5, 0)
        _ladders_for_strands(3, 2, 2, 1)
        # Koszul squares behind criteria 2, 3 and the Steiner square
        for rep in (build_koszul_pair(5, -4, 2, seed=0, field_=f), build_steiner_square(seed=0, field_=f)):
            assert verify_chain_commutes(rep.square) == (True, None)
        rng = np.random.default_rng(7)
        v = ExtVector.random(8, 1, rng, f)
        sq = _koszul_square(7, -4, 1, 1, 1, [[v]], f)
        assert verify_chain_commutes(sq) == (True, None)
        for p in range(3, 7):
            w = ExtVector.random(6, 2, rng, f)
            lhs = koszul_or_zero(5, p, 1, f).mul_const_left(contraction_matrix(w, p - 1))
            rhs = koszul_or_zero(5, p - 2, 1, f).mul_const_right(contraction_matrix(w, p))
            assert lhs == rhs


@pytest.mark.criterion(10, "Horrocks-Mumford import: 67x125 rank 65")
def test_criterion_10_horrocks_mumford(fixtures_dir):
    path = fixtures_dir / "horrocks_mumford.json"
    if not path.exists():
        pytest.skip("no Horrocks-Mumford resolution fixture shipped")
    with Budget(60):
        rep = import_and_extract(path, seed=0)
        assert rep.shape == (67, 125) and rep.measured_generic_rank == 65
        m = rep.matrix
        if not m.field.is_prime:
            m = reduce_mod(m, 32003)
        cert = verify_sampled(m, 32003, 100_000, seed=0, claimed_rank=65)
        assert cert.verdict == "constant"
        # the GF(3) check needs a fixture over the rationals (or over GF(3) itself)
        assert not rep.matrix.field.is_prime or rep.matrix.field.p == 3, \
            "fixture over a large prime cannot be reduced to GF(3)"
        constant(rep.matrix, 3, 65)
