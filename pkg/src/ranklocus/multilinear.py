"""Exterior algebra on a finite-dimensional space and contraction matrices.

A basis element e_{i1} ^ ... ^ e_{ik} (i1 < ... < ik) is stored as the bitmask
with bits i1..ik set.  Bases of each exterior power are listed in
lexicographic order of the increasing index tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import DegreeUnderflow, DimensionMismatch, IndexOutOfRange, RaggedGrid
from .field import DEFAULT_FIELD, ConstMatrix, FieldSpec, block, rank

LEFT = "left"
RIGHT = "right"


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


@lru_cache(maxsize=None)
def wedge_basis(dim: int, degree: int) -> tuple[int, ...]:
    if degree < 0 or degree > dim:
        return ()
    return tuple(mask_of(c) for c in combinations(range(dim), degree))


@lru_cache(maxsize=None)
def wedge_index(dim: int, degree: int) -> dict[int, int]:
    return {m: k for k, m in enumerate(wedge_basis(dim, degree))}


def wedge_dim(dim: int, degree: int) -> int:
    return comb(dim, degree) if 0 <= degree <= dim else 0


def merge_sign(a: int, b: int) -> int:
    """Sign with e_A ^ e_B = sign * e_{A u B}, for disjoint A and B."""
    inversions = 0
    m = b
    while m:
        low = m & -m
        inversions += (a >> low.bit_length()).bit_count()
        m ^= low
    return -1 if inversions & 1 else 1


@dataclass(frozen=True, eq=True)
class ExtVector:
    """Homogeneous element of an exterior power, as {mask: coefficient}."""

    dim: int
    degree: int
    terms: dict = dc_field(default_factory=dict)
    field: FieldSpec = DEFAULT_FIELD

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            if m.bit_count() != self.degree or m >> self.dim:
                raise IndexOutOfRange(f"basis mask {bin(m)} not in degree {self.degree} of dim {self.dim}")
            c = self.field.element(c)
            if c != 0:
                clean[m] = c
        object.__setattr__(self, "terms", clean)

    __hash__ = None

    @classmethod
    def basis(cls, dim, indices, field=DEFAULT_FIELD) -> "ExtVector":
        idx = tuple(indices)
        if len(set(idx)) != len(idx) or any(i < 0 or i >= dim for i in idx):
            raise IndexOutOfRange(f"indices {idx} invalid for dimension {dim}")
        order = sorted(range(len(idx)), key=lambda k: idx[k])
        sign = _perm_sign(order)
        return cls(dim, len(idx), {mask_of(idx): sign}, field)

    @classmethod
    def from_coefficients(cls, dim, degree, coeffs, field=DEFAULT_FIELD) -> "ExtVector":
        """Coefficients listed in the lexicographic basis order."""
        basis = wedge_basis(dim, degree)
        if len(coeffs) != len(basis):
            raise DimensionMismatch(f"need {len(basis)} coefficients, got {len(coeffs)}")
        return cls(dim, degree, dict(zip(basis, coeffs)), field)

    @classmethod
    def random(cls, dim, degree, rng, field=DEFAULT_FIELD) -> "ExtVector":
        n = wedge_dim(dim, degree)
        return cls.from_coefficients(dim, degree, list(field.random_array(rng, n)), field)

    def coefficients(self) -> list:
        zero = self.field.element(0)
        return [self.terms.get(m, zero) for m in wedge_basis(self.dim, self.degree)]

    def coefficient(self, indices):
        return self.terms.get(mask_of(indices), self.field.element(0))

    def _same_space(self, other):
        if self.dim != other.dim or self.field != other.field:
            raise DimensionMismatch("exterior vectors live in different spaces")

    def __add__(self, other):
        self._same_space(other)
        if self.degree != other.degree:
            raise DimensionMismatch("cannot add different degrees")
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return ExtVector(self.dim, self.degree, t, self.field)

    def scale(self, c) -> "ExtVector":
        c = self.field.element(c)
        return ExtVector(self.dim, self.degree, {m: v * c for m, v in self.terms.items()}, self.field)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self):
        return [[list(indices_of(m)), _json_scalar(c)] for m, c in sorted(self.terms.items(),
                                                                           key=lambda kv: indices_of(kv[0]))]


def _json_scalar(c):
    from fractions import Fraction
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return int(c)


def _perm_sign(order) -> int:
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# QForm is an exterior vector used as a form acting by contraction
QForm = ExtVector


def wedge(u: ExtVector, v: ExtVector) -> ExtVector:
    u._same_space(v)
    out = {}
    for a, x in u.terms.items():
        for b, y in v.terms.items():
            if a & b:
                continue
            m = a | b
            out[m] = out.get(m, 0) + merge_sign(a, b) * x * y
    return ExtVector(u.dim, u.degree + v.degree, out, u.field)


def _contract_sign(form_mask: int, rest: int, side: str) -> int:
    if side == LEFT:
        return merge_sign(form_mask, rest)
    if side == RIGHT:
        return merge_sign(rest, form_mask)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def contract(omega: ExtVector, u: ExtVector, side: str = RIGHT) -> ExtVector:
    """Contract u by the form omega.

    With u = s * (e_J ^ w) a left contraction by e_J^* gives s * w; with
    u = s * (w ^ e_J) a right contraction gives s * w.
    """
    omega._same_space(u)
    if omega.degree > u.degree:
        raise DegreeUnderflow(f"cannot contract degree {u.degree} by degree {omega.degree}")
    out = {}
    for j, a in omega.terms.items():
        for pm, b in u.terms.items():
            if pm & j != j:
                continue
            w = pm ^ j
            out[w] = out.get(w, 0) + _contract_sign(j, w, side) * a * b
    return ExtVector(u.dim, u.degree - omega.degree, out, u.field)


def contraction_matrix(omega: ExtVector, p: int, side: str = RIGHT) -> ConstMatrix:
    """Matrix of u -> contract(omega, u) from degree p to degree p - deg(omega).

    Shape is C(N, p - q) x C(N, p) with N the ambient dimension.
    """
    dim, q = omega.dim, omega.degree
    if p < q:
        raise DegreeUnderflow(f"cannot contract degree {p} by degree {q}")
    if p > dim:
        raise DegreeUnderflow(f"degree {p} exceeds dimension {dim}")
    rows_index = wedge_index(dim, p - q)
    src = wedge_basis(dim, p)
    out = np.zeros((wedge_dim(dim, p - q), len(src)), dtype=object)
    out.fill(0)
    for j, a in omega.terms.items():
        for col, pm in enumerate(src):
            if pm & j == j:
                w = pm ^ j
                out[rows_index[w], col] += _contract_sign(j, w, side) * a
    return ConstMatrix(omega.field, out)


def block_contraction_matrix(grid, p: int, q: int, side: str = RIGHT,
                             dim: int | None = None, field: FieldSpec | None = None) -> ConstMatrix:
    """s x t grid of degree (p - q) forms acting from (wedge^p)^t to (wedge^q)^s."""
    grid = [list(row) for row in grid]
    if grid and any(len(row) != len(grid[0]) for row in grid):
        raise RaggedGrid("all rows of the form grid need the same length")
    entries = [w for row in grid for w in row]
    if entries:
        dim = entries[0].dim
        field = entries[0].field
    if dim is None or field is None:
        raise ValueError("an empty grid needs explicit dim and field")
    for w in entries:
        if w.degree != p - q:
            raise DegreeUnderflow(f"form of degree {w.degree} cannot map degree {p} to {q}")
    blocks = [[contraction_matrix(w, p, side) for w in row] for row in grid]
    if not grid or not grid[0]:
        s = len(grid)
        return ConstMatrix.zeros(field, s * wedge_dim(dim, q), 0)
    return block(blocks, field)


@dataclass
class ProfileRow:
    p: int
    rows: int
    cols: int
    rank: int
    trial_ranks: list

    @property
    def max_rank(self) -> int:
        return min(self.rows, self.cols)

    @property
    def deficiency(self) -> int:
        return self.max_rank - self.rank

    def to_json(self):
        return {"p": self.p, "shape": [self.rows, self.cols], "rank": self.rank,
                "max_rank": self.max_rank, "deficiency": self.deficiency,
                "trial_ranks": self.trial_ranks}


@dataclass
class ContractionProfile:
    dim: int
    q: int
    mode: str
    rows: list

    @property
    def maximal(self) -> bool:
        return all(r.deficiency == 0 for r in self.rows)

    def at(self, p: int) -> ProfileRow:
        for r in self.rows:
            if r.p == p:
                return r
        raise KeyError(p)

    def to_json(self):
        return {"dim": self.dim, "q": self.q, "mode": self.mode, "maximal": self.maximal,
                "degrees": [r.to_json() for r in self.rows]}


def maximal_rank_profile(n: int, q: int, omega: ExtVector | None = None, trials: int = 5,
                         seed: int = 0, field: FieldSpec = DEFAULT_FIELD,
                         side: str = RIGHT) -> ContractionProfile:
    """Ranks of contraction by a degree-q form on wedge^p, p = q..n+1, of an (n+1)-dim space.

    With omega given the profile is for that form; otherwise random forms are
    drawn from a seeded generator and the maximum rank over trials is kept.
    """
    dim = n + 1
    if not 0 <= q <= dim:
        raise DegreeUnderflow(f"form degree {q} out of range for dimension {dim}")
    if omega is not None:
        if omega.dim != dim or omega.degree != q:
            raise DimensionMismatch("form does not match (n, q)")
        forms = [omega]
        mode = "given"
    else:
        rng = np.random.default_rng(seed)
        forms = [ExtVector.random(dim, q, rng, field) for _ in range(trials)]
        mode = "generic"
    rows = []
    for p in range(q, dim + 1):
        ranks = [rank(contraction_matrix(w, p, side)) for w in forms]
        rows.append(ProfileRow(p, wedge_dim(dim, p - q), wedge_dim(dim, p), max(ranks), ranks))
    return ContractionProfile(dim, q, mode, rows)
