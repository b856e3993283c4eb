from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ranklocus.errors import DegreeUnderflow, RaggedGrid
from ranklocus.field import GF, ConstMatrix, rank
from ranklocus.multilinear import (LEFT, RIGHT, ExtVector, block_contraction_matrix, contract,
                                   contraction_matrix, indices_of, maximal_rank_profile, merge_sign,
                                   wedge, wedge_basis, wedge_dim)

F = GF(32003)


def basis(dim, idx):
    return ExtVector.basis(dim, idx, F)


def as_dict(v: ExtVector) -> dict:
    return {indices_of(m): F.lift(c) for m, c in v.terms.items()}


def test_wedge_examples():
    e01 = wedge(basis(4, [0]), basis(4, [1]))
    assert as_dict(e01) == {(0, 1): 1}
    assert wedge(e01, basis(4, [0])).is_zero()
    assert as_dict(wedge(basis(4, [0, 2]), basis(4, [1]))) == {(0, 1, 2): -1}


def test_contract_examples():
    u = basis(4, [0, 1, 2])
    form = basis(4, [1, 2])
    assert as_dict(contract(form, u, LEFT)) == {(0,): 1}
    assert as_dict(contract(form, u, RIGHT)) == {(0,): 1}
    for side in (LEFT, RIGHT):
        assert contract(basis(4, [2]), basis(4, [0, 1]), side).is_zero()


def test_contraction_matrix_examples():
    one = ExtVector(5, 0, {0: 1}, F)
    assert contraction_matrix(one, 2) == ConstMatrix.identity(F, 10)
    form = basis(4, [0, 2]) + basis(4, [1, 3])
    m = contraction_matrix(form, 3)
    assert m.shape == (4, 4) and rank(m) == 4
    with pytest.raises(DegreeUnderflow):
        contraction_matrix(form, 1)


def test_ottaviani_weyman_block():
    rng = np.random.default_rng(3)
    w = ExtVector.random(9, 3, rng, F)
    m = contraction_matrix(w, 6)
    assert m.shape == (84, 84)
    assert rank(m) == 80


def test_profile_examples():
    prof = maximal_rank_profile(3, 2, trials=2, seed=1)
    assert prof.maximal
    prof = maximal_rank_profile(3, 4, trials=1)
    assert [(r.p, r.rank) for r in prof.rows] == [(4, 1)]
    prof = maximal_rank_profile(8, 3, trials=2, seed=0)
    assert prof.at(6).deficiency == 4


def test_block_contraction_examples():
    rng = np.random.default_rng(11)
    grid = [[ExtVector.random(4, 2, rng, F)] for _ in range(5)]
    m = block_contraction_matrix(grid, 3, 1)
    assert m.shape == (20, 4) and rank(m) == 4
    single = grid[0][0]
    assert block_contraction_matrix([[single]], 3, 1) == contraction_matrix(single, 3)
    zero = [[ExtVector(4, 2, {}, F)] * 2] * 3
    assert block_contraction_matrix(zero, 3, 1).is_zero()
    with pytest.raises(RaggedGrid):
        block_contraction_matrix([[single], [single, single]], 3, 1)


def test_merge_sign_matches_bubble_sort():
    for a in range(1, 32):
        for b in range(1, 32):
            if a & b:
                continue
            seq = indices_of(a) + indices_of(b)
            assert merge_sign(a, b) == oracles.sort_sign(seq)[0]


def ext_elements(dim, degree):
    n = wedge_dim(dim, degree)
    return st.lists(st.integers(-3, 3), min_size=n, max_size=n).map(
        lambda cs: ExtVector.from_coefficients(dim, degree, cs, F))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_wedge_against_bubble_sort_oracle(data):
    dim = data.draw(st.integers(2, 6))
    p = data.draw(st.integers(0, dim))
    q = data.draw(st.integers(0, dim - p))
    u = data.draw(ext_elements(dim, p))
    v = data.draw(ext_elements(dim, q))
    want = oracles.wedge(as_dict(u), as_dict(v))
    got = as_dict(wedge(u, v))
    assert got == {k: F.lift(F.element(c)) for k, c in want.items() if F.element(c)}


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_graded_commutativity_and_associativity(data):
    dim = data.draw(st.integers(3, 6))
    p, q, r = (data.draw(st.integers(0, 2)) for _ in range(3))
    if p + q + r > dim:
        return
    u, v, w = data.draw(ext_elements(dim, p)), data.draw(ext_elements(dim, q)), data.draw(ext_elements(dim, r))
    assert wedge(wedge(u, v), w) == wedge(u, wedge(v, w))
    assert wedge(u, v) == wedge(v, u).scale((-1) ** (p * q))


@pytest.mark.parametrize("side", [LEFT, RIGHT])
@pytest.mark.parametrize("dim,q,p", [(4, 1, 2), (5, 2, 3), (6, 3, 5), (5, 2, 5)])
def test_contraction_matrix_against_oracle(side, dim, q, p):
    for form in combinations(range(dim), q):
        m = contraction_matrix(basis(dim, form), p, side)
        rows = [tuple(indices_of(x)) for x in wedge_basis(dim, p - q)]
        for col, u in enumerate(wedge_basis(dim, p)):
            sign, w = oracles.contract(form, indices_of(u), side)
            expect = [0] * len(rows)
            if sign:
                expect[rows.index(w)] = sign
            assert [F.lift(x) for x in m.data[:, col]] == expect


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_left_and_right_contraction_differ_by_sign(data):
    dim = data.draw(st.integers(2, 6))
    q = data.draw(st.integers(0, dim))
    p = data.draw(st.integers(q, dim))
    w = data.draw(ext_elements(dim, q))
    left = contraction_matrix(w, p, LEFT)
    right = contraction_matrix(w, p, RIGHT)
    assert left == right.scale((-1) ** (q * (p - q)))


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_right_contraction_is_adjoint_of_wedge(data):
    # <w ^ a, u> = <a, u contracted by w> on the right, for the standard pairing
    dim = data.draw(st.integers(2, 5))
    q = data.draw(st.integers(0, dim))
    k = data.draw(st.integers(0, dim - q))
    w = data.draw(ext_elements(dim, q))
    a = data.draw(ext_elements(dim, k))
    u = data.draw(ext_elements(dim, k + q))
    lhs = sum(x * y for x, y in zip(wedge(a, w).coefficients(), u.coefficients())) % F.p
    rhs = sum(x * y for x, y in zip(a.coefficients(), contract(w, u, RIGHT).coefficients())) % F.p
    assert lhs == rhs


def test_vector_contraction_never_surjective():
    # a single vector contracts wedge^k onto a space of rank C(N-1, k-1) only
    rng = np.random.default_rng(0)
    v = ExtVector.random(8, 1, rng, F)
    for k in range(1, 9):
        assert rank(contraction_matrix(v, k)) == wedge_dim(7, k - 1)
