"""Exact dense linear algebra over a prime field or the rationals.

Prime-field matrices are int64 numpy arrays holding canonical residues in
[0, p).  Rational matrices are object arrays of Fraction.  Nothing here ever
touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from .errors import DimensionMismatch, InconsistentSystem, NotFullColumnRank

_INT64_LIMIT = 2**63 - 1


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either GF(p) for an odd prime 3 <= p < 2**31, or QQ (p is None)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is None:
            return
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise ValueError(f"field characteristic must be an integer, got {self.p!r}")
        p = int(self.p)
        if not (3 <= p < 2**31) or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime below 2**31")
        object.__setattr__(self, "p", p)

    @property
    def is_prime(self) -> bool:
        return self.p is not None

    @property
    def kind(self) -> str:
        return "prime" if self.is_prime else "rational"

    def __str__(self):
        return f"GF({self.p})" if self.is_prime else "QQ"

    @classmethod
    def parse(cls, text) -> "FieldSpec":
        """Accept '32003', 32003, 'QQ', 'rational'."""
        if isinstance(text, FieldSpec):
            return text
        if isinstance(text, str) and text.strip().lower() in ("qq", "q", "rational", "rationals"):
            return QQ
        return cls(int(text))

    def to_json(self) -> dict:
        if self.is_prime:
            return {"kind": "prime", "p": self.p}
        return {"kind": "rational"}

    @classmethod
    def from_json(cls, obj) -> "FieldSpec":
        if obj.get("kind") == "prime":
            return cls(int(obj["p"]))
        if obj.get("kind") == "rational":
            return QQ
        raise ValueError(f"unknown field description {obj!r}")

    # scalars

    def element(self, x):
        """Canonical representative of an int or Fraction."""
        if self.is_prime:
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        return Fraction(x)

    def inv(self, x):
        if self.is_prime:
            return pow(int(x), -1, self.p)
        return 1 / Fraction(x)

    def lift(self, x) -> int | Fraction:
        """Symmetric integer lift of a residue; identity on rationals."""
        if self.is_prime:
            x = int(x) % self.p
            return x - self.p if x > self.p // 2 else x
        return Fraction(x)

    # arrays

    def zeros(self, shape) -> np.ndarray:
        if self.is_prime:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def asarray(self, data) -> np.ndarray:
        """Canonical array from ints, Fractions or an existing array."""
        arr = np.asarray(data)
        if self.is_prime:
            if arr.dtype.kind in "iu":
                if arr.dtype == np.uint64 or arr.dtype.itemsize > 8:
                    arr = arr.astype(object)
                else:
                    return np.mod(arr.astype(np.int64), self.p)
            if arr.dtype.kind in "fc":
                raise TypeError("floating point entries are not exact field elements")
            flat = [self.element(x) for x in arr.ravel()]
            return np.array(flat, dtype=np.int64).reshape(arr.shape)
        if arr.dtype.kind in "fc":
            raise TypeError("floating point entries are not exact field elements")
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for k, x in enumerate(arr.ravel()):
            flat[k] = Fraction(x)
        return out

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.is_prime:
            return np.mod(arr, self.p)
        return arr

    def random_array(self, rng: np.random.Generator, shape, bound: int = 100) -> np.ndarray:
        """Uniform residues, or integers in [-bound, bound] over QQ."""
        if self.is_prime:
            return rng.integers(0, self.p, size=shape, dtype=np.int64)
        return self.asarray(rng.integers(-bound, bound + 1, size=shape))


QQ = FieldSpec(None)
DEFAULT_PRIME = 32003


def GF(p: int) -> FieldSpec:
    return FieldSpec(p)


DEFAULT_FIELD = GF(DEFAULT_PRIME)


def matmul(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    if not field.is_prime:
        if a.shape[-1] == 0:
            return field.zeros(a.shape[:-1] + b.shape[1:])
        return field.asarray(a @ b)
    p = field.p
    k = a.shape[-1]
    chunk = max(1, _INT64_LIMIT // max(1, (p - 1) ** 2))
    if k <= chunk:
        return (a @ b) % p
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    for s in range(0, k, chunk):
        out = (out + (a[..., s:s + chunk] @ b[s:s + chunk]) % p) % p
    return out


class ConstMatrix:
    """Immutable dense matrix over a FieldSpec."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        arr = field.asarray(data)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ConstMatrix is immutable")

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, field.zeros((rows, cols)))

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def T(self) -> "ConstMatrix":
        return ConstMatrix(self.field, self.data.T)

    def _check(self, other):
        if not isinstance(other, ConstMatrix):
            return NotImplemented
        if other.field != self.field:
            raise DimensionMismatch(f"field mismatch: {self.field} vs {other.field}")
        return None

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ConstMatrix(self.field, matmul(self.field, self.data, other.data))

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return ConstMatrix(self.field, self.field.reduce(self.data + other.data))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {self.shape} and {other.shape}")
        return ConstMatrix(self.field, self.field.reduce(self.data - other.data))

    def __neg__(self):
        return ConstMatrix(self.field, self.field.reduce(-self.data))

    def scale(self, c) -> "ConstMatrix":
        c = self.field.element(c)
        return ConstMatrix(self.field, self.field.reduce(self.data * c))

    def __eq__(self, other):
        if not isinstance(other, ConstMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and bool(np.all(self.data == other.data)))

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def tolist(self):
        return self.data.tolist()

    def __repr__(self):
        return f"ConstMatrix({self.field}, {self.rows}x{self.cols})"


def hstack(mats, field=None, rows=None) -> ConstMatrix:
    mats = list(mats)
    if not mats:
        return ConstMatrix.zeros(field, rows or 0, 0)
    return ConstMatrix(mats[0].field, np.hstack([m.data for m in mats]))


def vstack(mats, field=None, cols=None) -> ConstMatrix:
    mats = list(mats)
    if not mats:
        return ConstMatrix.zeros(field, 0, cols or 0)
    return ConstMatrix(mats[0].field, np.vstack([m.data for m in mats]))


def block(grid, field: FieldSpec) -> ConstMatrix:
    """Assemble a 2-d grid of ConstMatrix blocks (rows may have zero height)."""
    rows = [np.hstack([b.data for b in row]) if row else field.zeros((0, 0)) for row in grid]
    if not rows:
        return ConstMatrix.zeros(field, 0, 0)
    return ConstMatrix(field, np.vstack(rows))


def block_diag(mats, field: FieldSpec) -> ConstMatrix:
    mats = list(mats)
    r = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    out = field.zeros((r, c))
    i = j = 0
    for m in mats:
        out[i:i + m.rows, j:j + m.cols] = m.data
        i += m.rows
        j += m.cols
    return ConstMatrix(field, out)


# elimination


def rref(field: FieldSpec, a: np.ndarray):
    """Reduced row echelon form and the list of pivot columns."""
    a = np.array(a, dtype=a.dtype, copy=True)
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = field.reduce(a[r] * field.inv(a[r, c]))
        others = np.flatnonzero(a[:, c] != 0)
        others = others[others != r]
        if others.size:
            a[others] = field.reduce(a[others] - np.outer(a[others, c], a[r]))
        pivots.append(c)
        r += 1
    return a, pivots


def _integer_rows(a: np.ndarray) -> list[list[int]]:
    out = []
    for row in a:
        den = lcm(*(x.denominator for x in row)) if len(row) else 1
        out.append([int(x * den) for x in row])
    return out


def _bareiss_rank(rows: list[list[int]]) -> int:
    """Fraction-free elimination over the integers."""
    m = [r[:] for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    prev = 1
    for c in range(nc):
        piv = next((k for k in range(rank, nr) if m[k][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        for k in range(rank + 1, nr):
            row = m[k]
            f = row[c]
            if f == 0:
                for t in range(c + 1, nc):
                    row[t] = row[t] * pr[c] // prev
            else:
                for t in range(c + 1, nc):
                    row[t] = (row[t] * pr[c] - f * pr[t]) // prev
            row[c] = 0
        prev = pr[c]
        rank += 1
    return rank


def rank(mat: ConstMatrix) -> int:
    if mat.rows == 0 or mat.cols == 0:
        return 0
    if mat.field.is_prime:
        return int(rank_batch(mat.data[None], mat.field.p)[0])
    return _bareiss_rank(_integer_rows(mat.data))


def nullspace_basis(mat: ConstMatrix) -> ConstMatrix:
    """Right kernel basis, one column per free variable.

    Columns are canonical: restricted to the free coordinates they form the
    identity, so the basis depends only on the row space of the input.
    """
    field = mat.field
    n = mat.cols
    if mat.rows == 0:
        return ConstMatrix.identity(field, n)
    r, pivots = rref(field, mat.data)
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    out = field.zeros((n, len(free)))
    for k, f in enumerate(free):
        out[f, k] = 1
        for i, pc in enumerate(pivots):
            out[pc, k] = field.reduce(-r[i, f]) if field.is_prime else -r[i, f]
    return ConstMatrix(field, out)


def solve_exact(a: ConstMatrix, b: ConstMatrix) -> ConstMatrix:
    """Unique X with A X = B; A must have full column rank."""
    if a.field != b.field:
        raise DimensionMismatch("field mismatch")
    if a.rows != b.rows:
        raise DimensionMismatch(f"A has {a.rows} rows but B has {b.rows}")
    field = a.field
    n = a.cols
    aug = np.hstack([a.data, b.data]) if b.cols else a.data
    r, pivots = rref(field, aug)
    if [c for c in pivots if c < n] != list(range(n)):
        raise NotFullColumnRank(f"coefficient matrix {a.rows}x{n} has rank {sum(c < n for c in pivots)}")
    if any(c >= n for c in pivots) or np.any(r[n:, n:] != 0):
        raise InconsistentSystem("right-hand side is not in the column space")
    return ConstMatrix(field, r[:n, n:] if b.cols else field.zeros((n, 0)))


def is_full_row_rank(mat: ConstMatrix) -> bool:
    return rank(mat) == mat.rows


# batched ranks over GF(p), used by exhaustive and sampled verification


@lru_cache(maxsize=8)
def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    x = np.arange(1, p, dtype=np.int64)
    inv[1:] = _pow_vec(x, p - 2, p)
    return inv


def _pow_vec(x: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _inv_vec(x: np.ndarray, p: int) -> np.ndarray:
    if p < 1 << 17:
        return _inverse_table(p)[x]
    return _pow_vec(x, p - 2, p)


def rank_batch(stack: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices of shape (B, r, c) over GF(p)."""
    a = np.mod(np.asarray(stack, dtype=np.int64), p)
    nb, m, n = a.shape
    if m < n:
        a = np.ascontiguousarray(a.transpose(0, 2, 1))
        m, n = n, m
    ranks = np.zeros(nb, dtype=np.int64)
    if nb == 0 or n == 0:
        return ranks
    row_idx = np.arange(m)
    for c in range(n):
        cand = (a[:, :, c] != 0) & (row_idx[None, :] >= ranks[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.flatnonzero(has)
        piv = cand[b].argmax(axis=1)
        rr = ranks[b]
        sub = a[b, :, c:]
        swap = piv != rr
        if swap.any():
            sb = np.flatnonzero(swap)
            top = sub[sb, rr[sb]].copy()
            sub[sb, rr[sb]] = sub[sb, piv[sb]]
            sub[sb, piv[sb]] = top
        lead = np.arange(b.size)
        prow = sub[lead, rr] * _inv_vec(sub[lead, rr, 0], p)[:, None] % p
        factors = sub[:, :, 0].copy()
        factors[row_idx[None, :] <= rr[:, None]] = 0
        sub = (sub - factors[:, :, None] * prow[:, None, :]) % p
        a[b, :, c:] = sub
        ranks[b] += 1
    return ranks
