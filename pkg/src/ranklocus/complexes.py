"""Koszul and Eagon-Northcott type differentials, and the comparison maps between them.

Notation: V has dimension n+1 with coordinates x_0..x_n, G has rank g with
basis g_0..g_{g-1}, F has rank f = n + g with basis f_0..f_{f-1}.  The map
F -> G is the banded matrix with entry x_{i-j} at (j, i), and x_m = 0 for m
outside [0, n].  Bases of S_d G* (x) wedge^p F are pairs (monomial, subset),
monomial-major, monomials in graded-lex order and subsets in lex order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import comb, prod

import numpy as np

from .errors import ConventionViolation, DegreeMismatch, DegreeUnderflow, IndexOutOfRange
from .field import DEFAULT_FIELD, ConstMatrix, FieldSpec, block
from .linform import LinFormMatrix, block_diag_linform
from .multilinear import (RIGHT, contraction_matrix, indices_of, mask_of, wedge_basis,
                          wedge_dim, wedge_index)


@lru_cache(maxsize=None)
def sym_basis(g: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Degree-d monomials in g variables as sorted index tuples (graded-lex)."""
    if d < 0:
        return ()
    return tuple(combinations_with_replacement(range(g), d))


@lru_cache(maxsize=None)
def sym_index(g: int, d: int) -> dict:
    return {m: k for k, m in enumerate(sym_basis(g, d))}


def sym_dim(g: int, d: int) -> int:
    return comb(g + d - 1, d) if d >= 0 else 0


@dataclass(frozen=True)
class StrandBasis:
    g: int
    f: int
    d: int
    p: int

    @property
    def size(self) -> int:
        return sym_dim(self.g, self.d) * wedge_dim(self.f, self.p)

    def elements(self):
        """(monomial tuple, subset tuple) in basis order."""
        return [(m, indices_of(s)) for m in sym_basis(self.g, self.d)
                for s in wedge_basis(self.f, self.p)]

    def index(self, monomial, subset) -> int:
        return (sym_index(self.g, self.d)[tuple(sorted(monomial))] * wedge_dim(self.f, self.p)
                + wedge_index(self.f, self.p)[mask_of(subset)])


def phi_matrix(n: int, g: int, field: FieldSpec = DEFAULT_FIELD) -> LinFormMatrix:
    """g x (n+g) banded matrix with x_{i-j} at (j, i)."""
    f = n + g
    out = np.zeros((n + 1, g, f), dtype=np.int64)
    for j in range(g):
        for i in range(f):
            if 0 <= i - j <= n:
                out[i - j, j, i] = 1
    return LinFormMatrix(field, out)


def koszul_differential(n: int, i: int, field: FieldSpec = DEFAULT_FIELD) -> LinFormMatrix:
    """wedge^{i+1} -> wedge^i on an (n+1)-dim space, e_J -> sum_t (-1)^t x_{j_t} e_{J - j_t}.

    Shape C(n+1, i) x C(n+1, i+1).
    """
    if not 0 <= i <= n:
        raise IndexOutOfRange(f"Koszul index {i} outside [0, {n}]")
    dim = n + 1
    rows = wedge_index(dim, i)
    src = wedge_basis(dim, i + 1)
    out = np.zeros((dim, len(rows), len(src)), dtype=np.int64)
    for col, m in enumerate(src):
        for t, j in enumerate(indices_of(m)):
            out[j, rows[m ^ (1 << j)], col] = -1 if t % 2 else 1
    return LinFormMatrix(field, out)


def koszul_or_zero(n: int, a: int, copies: int = 1, field: FieldSpec = DEFAULT_FIELD) -> LinFormMatrix:
    """Block-diagonal Koszul map wedge^a -> wedge^{a-1}, or a zero map with the right shape."""
    dim = n + 1
    rows = copies * wedge_dim(dim, a - 1)
    cols = copies * wedge_dim(dim, a)
    if 1 <= a <= dim and copies:
        return block_diag_linform([koszul_differential(n, a - 1, field)] * copies, field, dim)
    return LinFormMatrix.zeros(field, dim, rows, cols)


def _check_strand(n, g, d, p):
    if n < 0 or g < 1:
        raise IndexOutOfRange(f"need n >= 0 and g >= 1, got n={n}, g={g}")
    if d < 0:
        raise DegreeUnderflow(f"symmetric degree {d} is negative")
    if not 1 <= p <= n + g:
        raise IndexOutOfRange(f"exterior degree {p} outside [1, {n + g}]")


def strand_delta(n: int, g: int, d: int, p: int, field: FieldSpec = DEFAULT_FIELD) -> LinFormMatrix:
    """S_d G* (x) wedge^p F -> S_{d-1} G* (x) wedge^{p-1} F.

    m (x) f_J -> sum over factors g*_i of m of (m / g*_i) (x) sum_t (-1)^t x_{j_t - i} f_{J - j_t}.
    Repeated factors contribute once per occurrence.
    """
    _check_strand(n, g, d, p)
    if d < 1:
        raise DegreeUnderflow("symmetric degree must be at least 1")
    f = n + g
    src = StrandBasis(g, f, d, p)
    dst = StrandBasis(g, f, d - 1, p - 1)
    out = np.zeros((n + 1, dst.size, src.size), dtype=np.int64)
    col = 0
    for mono in sym_basis(g, d):
        for jm in wedge_basis(f, p):
            js = indices_of(jm)
            for i in set(mono):
                mult = mono.count(i)
                rest = list(mono)
                rest.remove(i)
                for t, j in enumerate(js):
                    v = j - i
                    if 0 <= v <= n:
                        row = dst.index(rest, js[:t] + js[t + 1:])
                        out[v, row, col] += -mult if t % 2 else mult
            col += 1
    return LinFormMatrix(field, out)


def strand_gamma(n: int, g: int, d: int, p: int, field: FieldSpec = DEFAULT_FIELD) -> LinFormMatrix:
    """S_d G (x) wedge^p F -> S_{d+1} G (x) wedge^{p-1} F.

    m (x) f_J -> sum_k m g_k (x) sum_t (-1)^t x_{j_t - k} f_{J - j_t}.
    """
    _check_strand(n, g, d, p)
    f = n + g
    src = StrandBasis(g, f, d, p)
    dst = StrandBasis(g, f, d + 1, p - 1)
    out = np.zeros((n + 1, dst.size, src.size), dtype=np.int64)
    col = 0
    for mono in sym_basis(g, d):
        for jm in wedge_basis(f, p):
            js = indices_of(jm)
            for k in range(g):
                bigger = tuple(sorted(mono + (k,)))
                for t, j in enumerate(js):
                    v = j - k
                    if 0 <= v <= n:
                        row = dst.index(bigger, js[:t] + js[t + 1:])
                        out[v, row, col] += -1 if t % 2 else 1
            col += 1
    return LinFormMatrix(field, out)


def pi_projection(g: int, d: int, b: int, field: FieldSpec = DEFAULT_FIELD) -> ConstMatrix:
    """S_d G* -> S_b G*, a monomial to the sum of its degree-b divisors.

    A divisor with exponents c of a monomial with exponents a is counted
    prod_l C(a_l, c_l) times, the number of ways to choose its factors.
    """
    if b > d:
        raise DegreeUnderflow(f"cannot project degree {d} to higher degree {b}")
    if b < 0:
        raise DegreeUnderflow("target degree is negative")
    rows = sym_basis(g, b)
    cols = sym_basis(g, d)
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for c, mono in enumerate(cols):
        a = [mono.count(l) for l in range(g)]
        for r, sub in enumerate(rows):
            e = [sub.count(l) for l in range(g)]
            if all(x <= y for x, y in zip(e, a)):
                out[r, c] = prod(comb(y, x) for x, y in zip(e, a))
    return ConstMatrix(field, out)


def bare_h(n: int, g: int, q: int, field: FieldSpec = DEFAULT_FIELD) -> ConstMatrix:
    """S_q G* (x) wedge^q F -> wedge^q V*.

    g*_{i_1}..g*_{i_q} (x) f_{j_1}^..^f_{j_q} -> sum over permutations s of the
    q factor positions of v*_{j_1 - i_s(1)} ^ .. ^ v*_{j_q - i_s(q)},
    with v*_m = 0 outside [0, n].
    """
    f = n + g
    dim = n + 1
    src = StrandBasis(g, f, q, q)
    rows = wedge_index(dim, q)
    out = np.zeros((wedge_dim(dim, q), src.size), dtype=np.int64)
    for col, (mono, js) in enumerate(src.elements()):
        for perm in permutations(range(q)):
            idx = [js[t] - mono[perm[t]] for t in range(q)]
            if any(v < 0 or v > n for v in idx) or len(set(idx)) < q:
                continue
            out[rows[mask_of(idx)], col] += _sort_sign(idx)
    return ConstMatrix(field, out)


def _sort_sign(seq) -> int:
    """Sign of the permutation sorting a sequence of distinct integers."""
    sign = 1
    s = list(seq)
    for a in range(len(s)):
        for b in range(a + 1, len(s)):
            if s[a] > s[b]:
                sign = -sign
    return sign


def h_map(n: int, g: int, f: int, d: int, q: int, omegas=None, p: int | None = None,
          field: FieldSpec | None = None) -> ConstMatrix:
    """Comparison map (S_d G* (x) wedge^p F)^t -> (wedge^q V*)^s.

    Each block is the bare map on S_q G* (x) wedge^q F after projecting
    S_d G* onto S_q G* and contracting wedge^p F on the right by the block's
    form of degree p - q.  `omegas` is an s x t grid of forms on F; without
    it, p must equal q and a single block is returned.
    """
    if f != n + g:
        raise ConventionViolation(f"rank of F must be n + g = {n + g}, got {f}")
    if d < q:
        raise DegreeMismatch(f"symmetric degree {d} is below the target degree {q}")
    if q < 0 or q > n + 1:
        raise IndexOutOfRange(f"target degree {q} outside [0, {n + 1}]")
    if omegas is not None:
        grid = [list(row) for row in omegas]
        forms = [w for row in grid for w in row]
        if forms and field is None:
            field = forms[0].field
    field = field or DEFAULT_FIELD
    sym = pi_projection(g, d, q, field).data
    bare = bare_h(n, g, q, field)
    if omegas is None:
        if p is not None and p != q:
            raise DegreeMismatch("a map between different exterior degrees needs forms")
        return bare @ ConstMatrix(field, np.kron(sym, np.eye(wedge_dim(f, q), dtype=np.int64)))
    if p is None:
        p = q + (forms[0].degree if forms else 0)
    for w in forms:
        if w.dim != f:
            raise ConventionViolation(f"forms must live on a space of dimension {f}")
        if w.degree != p - q:
            raise DegreeMismatch(f"form of degree {w.degree} cannot map degree {p} to {q}")
    blocks = []
    for row in grid:
        out_row = []
        for w in row:
            c = contraction_matrix(w, p, RIGHT).data
            out_row.append(bare @ ConstMatrix(field, np.kron(sym, c)))
        blocks.append(out_row)
    if not grid or not grid[0]:
        return ConstMatrix.zeros(field, len(grid) * wedge_dim(n + 1, q), 0)
    return block(blocks, field)


def strand_block(n: int, g: int, d: int, p: int, copies: int = 1,
                 field: FieldSpec = DEFAULT_FIELD) -> LinFormMatrix:
    """Block-diagonal copies of strand_delta(n, g, d, p)."""
    m = strand_delta(n, g, d, p, field)
    if copies == 1:
        return m
    return block_diag_linform([m] * copies, field, n + 1)
