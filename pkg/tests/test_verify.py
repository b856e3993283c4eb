import numpy as np
import pytest

import oracles
from ranklocus.complexes import koszul_differential
from ranklocus.construct import ChainSquare, build_koszul_pair
from ranklocus.errors import EnumerationTooLarge, WrongFieldForExhaustive
from ranklocus.field import GF, QQ, ConstMatrix
from ranklocus.linform import LinFormMatrix
from ranklocus.verify import (composite_is_zero, enumerate_points, kernel_cokernel_profile,
                              projective_point_count, reduce_mod, verify_chain_commutes,
                              verify_constant_rank, verify_exhaustive, verify_sampled)


@pytest.mark.parametrize("p,n", [(3, 1), (3, 3), (5, 2), (7, 3)])
def test_enumeration_matches_itertools(p, n):
    pts = enumerate_points(p, n)
    assert len(pts) == projective_point_count(p, n)
    assert {tuple(int(x) for x in pt) for pt in pts} == oracles.projective_points(p, n)


def test_row_of_variables_is_constant():
    for p in (3, 5, 7):
        cert = verify_constant_rank(koszul_differential(3, 0, GF(p)))
        assert cert.verdict == "constant" and cert.claimed_rank == 1


def test_diagonal_fails_at_coordinate_points():
    data = np.zeros((2, 2, 2), dtype=np.int64)
    data[0, 0, 0] = 1
    data[1, 1, 1] = 1
    cert = verify_exhaustive(LinFormMatrix(GF(5), data), 5)
    assert cert.verdict == "not_constant" and cert.claimed_rank == 2
    assert sorted(cert.failures) == [((0, 1), 1), ((1, 0), 1)]
    assert not cert.passed


def test_exhaustive_ranks_match_oracle():
    m = koszul_differential(2, 1, GF(5))
    cert = verify_exhaustive(m, 5)
    slices = [s.tolist() for s in m.data]
    ranks = {oracles.rank(oracles.evaluate(slices, pt, 5), 5) for pt in oracles.projective_points(5, 2)}
    assert ranks == {cert.claimed_rank} == {2}
    assert cert.points_checked == 31


def test_sampled_certificate():
    m = koszul_differential(3, 1, GF(32003))
    cert = verify_sampled(m, 32003, 500, seed=3)
    assert cert.verdict == "constant" and cert.trials == 500 and cert.seed == 3
    assert "Sampled" in cert.caveat
    doc = cert.to_json()
    assert doc["verdict"] == "constant" and doc["points_checked"] == 500


def test_certificate_caveat_and_json():
    cert = verify_exhaustive(koszul_differential(3, 1, GF(3)), 3)
    doc = cert.to_json()
    assert doc["mode"] == "exhaustive" and doc["prime"] == 3 and doc["shape"] == [4, 6]
    assert "algebraic closure" in doc["caveat"]


def test_enumeration_ceiling():
    with pytest.raises(EnumerationTooLarge):
        verify_exhaustive(koszul_differential(5, 1, GF(32003)), 32003)


def test_wrong_field():
    with pytest.raises(WrongFieldForExhaustive):
        verify_exhaustive(koszul_differential(2, 1, GF(5)), 7)


def test_rational_matrix_reduced_mod_p():
    k = koszul_differential(3, 1, GF(7))
    q = LinFormMatrix(QQ, np.vectorize(GF(7).lift, otypes=[object])(k.data))
    cert = verify_exhaustive(q, 5)
    assert cert.verdict == "constant" and cert.claimed_rank == 3
    assert reduce_mod(q, 5).field == GF(5)


def test_threads_env_does_not_change_result(monkeypatch):
    m = koszul_differential(3, 1, GF(7))
    monkeypatch.setenv("RANKLOCUS_THREADS", "1")
    one = verify_exhaustive(m, 7)
    monkeypatch.setenv("RANKLOCUS_THREADS", "4")
    four = verify_exhaustive(m, 7)
    assert one.to_json() == four.to_json()


def test_kernel_cokernel_examples():
    m = koszul_differential(3, 1, GF(5))
    prof = kernel_cokernel_profile(m, verify_exhaustive(m, 5))
    assert (prof.kernel, prof.cokernel) == (3, 1)
    rep = build_koszul_pair(5, -4, 2, seed=0, field_=GF(3))
    prof = kernel_cokernel_profile(rep.matrix, verify_exhaustive(rep.matrix, 3))
    assert (prof.kernel, prof.cokernel) == (5, 5)
    eye = np.zeros((2, 3, 3), dtype=np.int64)
    eye[0] = np.eye(3, dtype=np.int64)
    eye[1] = np.eye(3, dtype=np.int64)
    m = LinFormMatrix(GF(5), eye)
    prof = kernel_cokernel_profile(m, verify_sampled(m, 5, 20))
    assert (prof.kernel, prof.cokernel) == (0, 0)


def test_chain_commutes_examples():
    rep = build_koszul_pair(5, -4, 2, seed=0, field_=GF(32003))
    sq = rep.square
    assert verify_chain_commutes(sq) == (True, None)
    bad_mid = sq.h_mid.data.copy()
    bad_mid[0, 0] = (bad_mid[0, 0] + 1) % 32003
    broken = ChainSquare(sq.d_bottom, sq.e_bottom, ConstMatrix(sq.h_mid.field, bad_mid), sq.h_bottom,
                         sq.d_top, sq.e_top, sq.h_top)
    ok, where = verify_chain_commutes(broken)
    assert not ok and where[0] in ("top", "bottom") and where[1] is not None
    f = GF(7)
    zero = ChainSquare(LinFormMatrix.zeros(f, 2, 2, 2), LinFormMatrix.zeros(f, 2, 1, 1),
                       ConstMatrix.zeros(f, 1, 2), ConstMatrix.zeros(f, 1, 2),
                       LinFormMatrix.zeros(f, 2, 2, 2), LinFormMatrix.zeros(f, 2, 1, 1),
                       ConstMatrix.zeros(f, 1, 2))
    assert verify_chain_commutes(zero) == (True, None)


def test_chain_commutes_without_top_row():
    rep = build_koszul_pair(5, -4, 2, seed=0, field_=GF(32003))
    sq = rep.square
    lower = ChainSquare(sq.d_bottom, sq.e_bottom, sq.h_mid, sq.h_bottom)
    assert verify_chain_commutes(lower) == (True, None)


def test_composite_is_zero():
    f = GF(11)
    assert composite_is_zero(koszul_differential(3, 1, f), koszul_differential(3, 2, f))
