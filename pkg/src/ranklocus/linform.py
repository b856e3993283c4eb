"""Matrices whose entries are linear forms in x_0..x_n, and homogeneous polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .errors import DegreeMismatch, DimensionMismatch, MinorTooLarge
from .field import DEFAULT_FIELD, ConstMatrix, FieldSpec, matmul, rank, rank_batch

MINOR_CEILING = 8


@dataclass(frozen=True)
class ProjPoint:
    """Point of P^n with coordinates normalised so the first nonzero one is 1."""

    coords: tuple
    field: FieldSpec = DEFAULT_FIELD

    def __post_init__(self):
        c = [self.field.element(x) for x in self.coords]
        lead = next((x for x in c if x != 0), None)
        if lead is None:
            raise ValueError("the zero vector is not a projective point")
        inv = self.field.inv(lead)
        c = [self.field.element(x * inv) for x in c]
        object.__setattr__(self, "coords", tuple(c))

    @property
    def n(self) -> int:
        return len(self.coords) - 1


class LinFormMatrix:
    """rows x cols matrix of linear forms, stored as n+1 constant slices.

    Slice k holds the coefficients of x_k.
    """

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        arr = field.asarray(data)
        if arr.ndim != 3:
            raise DimensionMismatch(f"expected (nvars, rows, cols), got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DimensionMismatch("need at least one variable")
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("LinFormMatrix is immutable")

    @classmethod
    def from_slices(cls, slices) -> "LinFormMatrix":
        slices = list(slices)
        field = slices[0].field
        shape = slices[0].shape
        for s in slices:
            if s.shape != shape or s.field != field:
                raise DimensionMismatch("slices must share shape and field")
        return cls(field, np.stack([s.data for s in slices]))

    @classmethod
    def zeros(cls, field, nvars, rows, cols):
        return cls(field, field.zeros((nvars, rows, cols)))

    @property
    def nvars(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.nvars - 1

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape[1:]

    def slice(self, k: int) -> ConstMatrix:
        return ConstMatrix(self.field, self.data[k])

    @property
    def slices(self) -> list[ConstMatrix]:
        return [self.slice(k) for k in range(self.nvars)]

    @property
    def T(self) -> "LinFormMatrix":
        return LinFormMatrix(self.field, self.data.transpose(0, 2, 1))

    def entry(self, i: int, j: int) -> list:
        """Coefficients (c_0..c_n) of the linear form at (i, j)."""
        return [self.data[k, i, j] for k in range(self.nvars)]

    def evaluate(self, point) -> ConstMatrix:
        coords = point.coords if isinstance(point, ProjPoint) else tuple(point)
        if len(coords) != self.nvars:
            raise DimensionMismatch(f"point has {len(coords)} coordinates, need {self.nvars}")
        out = self.field.zeros(self.shape)
        for k, x in enumerate(coords):
            x = self.field.element(x)
            if x != 0:
                out = self.field.reduce(out + self.data[k] * x)
        return ConstMatrix(self.field, out)

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at a (B, n+1) array of residues; prime fields only."""
        p = self.field.p
        pts = np.asarray(points, dtype=np.int64) % p
        bound = (p - 1) ** 2
        if bound * self.nvars < 2**63 - 1:
            return np.einsum("bk,krc->brc", pts, self.data) % p
        out = np.zeros((pts.shape[0],) + self.shape, dtype=np.int64)
        for k in range(self.nvars):
            out = (out + pts[:, k, None, None] * self.data[k][None]) % p
        return out

    def mul_const_left(self, a: ConstMatrix) -> "LinFormMatrix":
        if a.cols != self.rows:
            raise DimensionMismatch(f"cannot multiply {a.shape} by {self.shape}")
        return LinFormMatrix(self.field, np.stack([matmul(self.field, a.data, s) for s in self.data]))

    def mul_const_right(self, b: ConstMatrix) -> "LinFormMatrix":
        if self.cols != b.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {b.shape}")
        return LinFormMatrix(self.field, np.stack([matmul(self.field, s, b.data) for s in self.data]))

    def __add__(self, other):
        if not isinstance(other, LinFormMatrix):
            return NotImplemented
        if self.data.shape != other.data.shape or self.field != other.field:
            raise DimensionMismatch("shape or field mismatch")
        return LinFormMatrix(self.field, self.field.reduce(self.data + other.data))

    def __sub__(self, other):
        if not isinstance(other, LinFormMatrix):
            return NotImplemented
        if self.data.shape != other.data.shape or self.field != other.field:
            raise DimensionMismatch("shape or field mismatch")
        return LinFormMatrix(self.field, self.field.reduce(self.data - other.data))

    def __eq__(self, other):
        if not isinstance(other, LinFormMatrix):
            return NotImplemented
        return (self.field == other.field and self.data.shape == other.data.shape
                and bool(np.all(self.data == other.data)))

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def __repr__(self):
        return f"LinFormMatrix({self.field}, {self.rows}x{self.cols}, n={self.n})"


def block_diag_linform(mats, field: FieldSpec, nvars: int) -> LinFormMatrix:
    mats = list(mats)
    r = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    out = field.zeros((nvars, r, c))
    i = j = 0
    for m in mats:
        out[:, i:i + m.rows, j:j + m.cols] = m.data
        i += m.rows
        j += m.cols
    return LinFormMatrix(field, out)


def product(a: LinFormMatrix, b: LinFormMatrix) -> dict:
    """Product of two linear-form matrices as {(k, l): ConstMatrix}, k <= l.

    Entry (k, l) is the coefficient matrix of x_k x_l.
    """
    if a.cols != b.rows or a.nvars != b.nvars or a.field != b.field:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    f = a.field
    out = {}
    for k in range(a.nvars):
        for l in range(k, a.nvars):
            m = matmul(f, a.data[k], b.data[l])
            if l != k:
                m = f.reduce(m + matmul(f, a.data[l], b.data[k]))
            out[(k, l)] = ConstMatrix(f, m)
    return out


def product_is_zero(a: LinFormMatrix, b: LinFormMatrix) -> bool:
    return all(m.is_zero() for m in product(a, b).values())


def random_points(rng: np.random.Generator, field: FieldSpec, nvars: int, count: int,
                  bound: int = 1000) -> np.ndarray:
    """Random nonzero coordinate vectors (not normalised)."""
    if field.is_prime:
        pts = rng.integers(0, field.p, size=(count, nvars), dtype=np.int64)
    else:
        pts = rng.integers(-bound, bound + 1, size=(count, nvars), dtype=np.int64)
    zero = ~pts.any(axis=1)
    while zero.any():
        if field.is_prime:
            pts[zero] = rng.integers(0, field.p, size=(int(zero.sum()), nvars), dtype=np.int64)
        else:
            pts[zero] = rng.integers(-bound, bound + 1, size=(int(zero.sum()), nvars), dtype=np.int64)
        zero = ~pts.any(axis=1)
    return pts


def generic_rank(m: LinFormMatrix, trials: int = 8, seed: int = 0) -> int:
    """Largest rank seen at seeded random points."""
    if m.rows == 0 or m.cols == 0:
        return 0
    rng = np.random.default_rng(seed)
    pts = random_points(rng, m.field, m.nvars, trials)
    if m.field.is_prime:
        return int(rank_batch(m.evaluate_batch(pts), m.field.p).max())
    return max(rank(m.evaluate(pt)) for pt in pts)


# homogeneous polynomials


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree `degree`, graded-lex with x_0 > x_1 > ... ."""
    if degree < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict:
    return {e: k for k, e in enumerate(monomials(nvars, degree))}


def num_monomials(nvars: int, degree: int) -> int:
    return comb(nvars + degree - 1, degree) if degree >= 0 else 0


@lru_cache(maxsize=None)
def _times_variable(nvars: int, degree: int) -> np.ndarray:
    """table[k, v] = index of (monomial k of `degree`) * x_v in degree+1."""
    src = monomials(nvars, degree)
    idx = monomial_index(nvars, degree + 1)
    table = np.zeros((len(src), nvars), dtype=np.int64)
    for k, e in enumerate(src):
        for v in range(nvars):
            f = list(e)
            f[v] += 1
            table[k, v] = idx[tuple(f)]
    return table


class HomogPoly:
    """Homogeneous polynomial as a dense coefficient vector over monomials(nvars, degree)."""

    __slots__ = ("field", "nvars", "degree", "coeffs")

    def __init__(self, field: FieldSpec, nvars: int, degree: int, coeffs):
        arr = field.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs)
        if arr.shape != (num_monomials(nvars, degree),):
            raise DimensionMismatch(f"need {num_monomials(nvars, degree)} coefficients, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("HomogPoly is immutable")

    @classmethod
    def from_terms(cls, field, nvars, terms) -> "HomogPoly":
        """Build from [(coefficient, exponent vector), ...]; all terms share one degree."""
        terms = [(c, tuple(int(x) for x in e)) for c, e in terms]
        degrees = {sum(e) for _, e in terms}
        if len(degrees) > 1:
            raise DegreeMismatch(f"terms of several degrees {sorted(degrees)}")
        degree = degrees.pop() if degrees else 0
        idx = monomial_index(nvars, degree)
        coeffs = [0] * num_monomials(nvars, degree)
        for c, e in terms:
            if len(e) != nvars:
                raise DimensionMismatch(f"exponent vector {e} has wrong length")
            coeffs[idx[e]] += c
        return cls(field, nvars, degree, coeffs)

    @classmethod
    def random(cls, field, nvars, degree, rng) -> "HomogPoly":
        return cls(field, nvars, degree, field.random_array(rng, num_monomials(nvars, degree)))

    def terms(self):
        return [(c, e) for c, e in zip(self.coeffs, monomials(self.nvars, self.degree)) if c != 0]

    def is_zero(self) -> bool:
        return not np.any(self.coeffs != 0)

    def evaluate(self, point):
        coords = point.coords if isinstance(point, ProjPoint) else tuple(point)
        total = self.field.element(0)
        for c, e in self.terms():
            term = c
            for x, k in zip(coords, e):
                if k:
                    term = term * self.field.element(x) ** k
            total = self.field.element(total + term)
        return total

    def times_linear(self, linear) -> "HomogPoly":
        """Multiply by sum_v linear[v] x_v."""
        table = _times_variable(self.nvars, self.degree)
        out = self.field.zeros(num_monomials(self.nvars, self.degree + 1))
        for v in range(self.nvars):
            c = self.field.element(linear[v])
            if c != 0:
                np.add.at(out, table[:, v], self.coeffs * c)
        return HomogPoly(self.field, self.nvars, self.degree + 1, self.field.reduce(out))

    def times_monomial(self, exps) -> "HomogPoly":
        d = sum(exps)
        idx = monomial_index(self.nvars, self.degree + d)
        out = self.field.zeros(num_monomials(self.nvars, self.degree + d))
        for k, e in enumerate(monomials(self.nvars, self.degree)):
            out[idx[tuple(a + b for a, b in zip(e, exps))]] = self.coeffs[k]
        return HomogPoly(self.field, self.nvars, self.degree + d, out)

    def __add__(self, other):
        if (self.nvars, self.degree, self.field) != (other.nvars, other.degree, other.field):
            raise DegreeMismatch("cannot add polynomials of different degree or ring")
        return HomogPoly(self.field, self.nvars, self.degree, self.field.reduce(self.coeffs + other.coeffs))

    def __eq__(self, other):
        if not isinstance(other, HomogPoly):
            return NotImplemented
        return ((self.nvars, self.degree, self.field) == (other.nvars, other.degree, other.field)
                and bool(np.all(self.coeffs == other.coeffs)))

    __hash__ = None

    def __repr__(self):
        return f"HomogPoly(deg {self.degree}, {len(self.terms())} terms)"


def minor_poly(m: LinFormMatrix, rows, cols) -> HomogPoly:
    """Determinant of a square submatrix as a polynomial, by cofactor expansion."""
    rows, cols = list(rows), list(cols)
    k = len(rows)
    if k != len(cols):
        raise DimensionMismatch("minor needs as many rows as columns")
    if k > MINOR_CEILING:
        raise MinorTooLarge(f"minor of size {k} exceeds the ceiling {MINOR_CEILING}")
    f, nv = m.field, m.nvars
    memo = {}

    def det(r: int, avail: int) -> HomogPoly:
        # rows r..k-1 against the columns still set in `avail`
        if r == k:
            return HomogPoly(f, nv, 0, [1])
        key = (r, avail)
        if key in memo:
            return memo[key]
        total = HomogPoly(f, nv, k - r, f.zeros(num_monomials(nv, k - r)))
        sign = 1
        for t in range(k):
            if not avail >> t & 1:
                continue
            lin = [m.data[v, rows[r], cols[t]] for v in range(nv)]
            if any(x != 0 for x in lin):
                sub = det(r + 1, avail & ~(1 << t)).times_linear(lin)
                total = total + (sub if sign > 0 else HomogPoly(f, nv, sub.degree, f.reduce(-sub.coeffs)))
            sign = -sign
        memo[key] = total
        return total

    return det(0, (1 << k) - 1)


def multiplication_matrix(forms, e: int) -> ConstMatrix:
    """Matrix of (h_1..h_m) -> sum h_i q_i from (S_{e-d})^m to S_e.

    Rows follow monomials(nvars, e); columns are grouped by form, each group
    following monomials(nvars, e - d).
    """
    forms = list(forms)
    if not forms:
        raise ValueError("need at least one form")
    f, nv, d = forms[0].field, forms[0].nvars, forms[0].degree
    for q in forms:
        if (q.field, q.nvars, q.degree) != (f, nv, d):
            raise DegreeMismatch("forms must share ring and degree")
    if e < d:
        raise DegreeMismatch(f"target degree {e} below form degree {d}")
    mons = monomials(nv, e - d)
    out = f.zeros((num_monomials(nv, e), len(forms) * len(mons)))
    col = 0
    for q in forms:
        for mu in mons:
            out[:, col] = q.times_monomial(mu).coeffs
            col += 1
    return ConstMatrix(f, out)
