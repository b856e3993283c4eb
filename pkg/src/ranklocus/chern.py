"""Chern polynomials on P^n as integer series truncated at h^{n+1}."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import DimensionMismatch, NegativeInput


@dataclass(frozen=True)
class ChernPoly:
    n: int
    coeffs: tuple

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)[: self.n + 1]
        c = c + (0,) * (self.n + 1 - len(c))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def one(cls, n):
        return cls(n, (1,))

    def _check(self, other):
        if self.n != other.n:
            raise DimensionMismatch(f"series on P^{self.n} and P^{other.n}")

    def __mul__(self, other: "ChernPoly") -> "ChernPoly":
        self._check(other)
        out = [0] * (self.n + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(self.n + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return ChernPoly(self.n, out)

    def inverse(self) -> "ChernPoly":
        if self.coeffs[0] != 1:
            raise ValueError("only series with constant term 1 are invertible over the integers")
        out = [1] + [0] * self.n
        for k in range(1, self.n + 1):
            out[k] = -sum(self.coeffs[j] * out[k - j] for j in range(1, k + 1))
        return ChernPoly(self.n, out)

    def __pow__(self, e: int) -> "ChernPoly":
        base = self if e >= 0 else self.inverse()
        out = ChernPoly.one(self.n)
        for _ in range(abs(e)):
            out = out * base
        return out

    def __truediv__(self, other):
        return self * other.inverse()

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}h" if k == 1 else f"{c}h^{k}")
        return " + ".join(terms) or "0"


def chern_of_twist(t: int, m: int, n: int) -> ChernPoly:
    """c(O(t)^m) = (1 + t h)^m."""
    if m < 0:
        raise NegativeInput("multiplicity must be non-negative")
    return ChernPoly(n, [comb(m, k) * t**k for k in range(n + 1)])


def _chern_of_term(term, n) -> ChernPoly:
    # a term is (twist, multiplicity) or a list of such summands
    if term and isinstance(term[0], (tuple, list)):
        out = ChernPoly.one(n)
        for t, m in term:
            out = out * chern_of_twist(t, m, n)
        return out
    t, m = term
    return chern_of_twist(t, m, n)


def chern_of_complex_kernel(terms, position: int, n: int) -> ChernPoly:
    """c of the kernel of terms[position] -> terms[position + 1] in an exact complex.

    The complex runs left to right and ends with the last term, so the
    kernel is the alternating product of the Chern polynomials to the right.
    """
    if not 0 <= position < len(terms):
        raise IndexError(f"position {position} outside the complex")
    out = ChernPoly.one(n)
    for k, term in enumerate(terms[position:]):
        c = _chern_of_term(term, n)
        out = out * (c if k % 2 == 0 else c.inverse())
    return out


def kernel_image_cokernel(c_kernel: ChernPoly, a: int, b: int) -> tuple:
    """Chern classes of K, E, C for a constant-rank map O^a -> O(1)^b with kernel K."""
    if a < 0 or b < 0:
        raise NegativeInput("ranks must be non-negative")
    c_image = c_kernel.inverse()
    c_coker = chern_of_twist(1, b, c_kernel.n) * c_kernel
    return c_kernel, c_image, c_coker


def moduli_dimension(dim_spl: int, b: int, h0: int) -> int:
    """dim Spl(C) + b (h0(C) - b)."""
    if dim_spl < 0 or b < 0 or h0 < 0:
        raise NegativeInput("inputs must be non-negative")
    if h0 < b:
        raise NegativeInput(f"h0 = {h0} is smaller than b = {b}")
    return dim_spl + b * (h0 - b)
