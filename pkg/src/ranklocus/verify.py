"""Point-by-point rank certification of linear-form matrices over GF(p)."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EnumerationTooLarge, WrongFieldForExhaustive
from .field import GF, rank_batch
from .linform import LinFormMatrix, generic_rank, product

ENUMERATION_CEILING = 2_000_000
MAX_FAILURES = 100
CHUNK = 4096

EXHAUSTIVE_CAVEAT = ("Exhaustive over the GF(p)-rational points only; constant rank over the "
                     "algebraic closure needs an argument beyond this certificate.")
SAMPLED_CAVEAT = ("Sampled check at random GF(p)-rational points; a degeneracy locus missed by "
                  "the sample is not ruled out.")


@dataclass
class RankCertificate:
    mode: str
    prime: int
    nvars: int
    shape: tuple
    claimed_rank: int
    points_checked: int
    failures: list = field(default_factory=list)
    failure_count: int = 0
    trials: int | None = None
    seed: int | None = None
    caveat: str = ""

    @property
    def verdict(self) -> str:
        # a clean sample is statistical evidence only; trials and caveat say so
        if self.failure_count:
            return "not_constant"
        return "constant" if self.points_checked else "inconclusive"

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def to_json(self) -> dict:
        return {"mode": self.mode, "prime": self.prime, "nvars": self.nvars,
                "shape": list(self.shape), "claimed_rank": self.claimed_rank,
                "points_checked": self.points_checked, "failure_count": self.failure_count,
                "failures": [{"point": list(pt), "rank": r} for pt, r in self.failures],
                "trials": self.trials, "seed": self.seed, "verdict": self.verdict,
                "caveat": self.caveat}


def projective_point_count(p: int, n: int) -> int:
    return (p ** (n + 1) - 1) // (p - 1)


def enumerate_points(p: int, n: int) -> np.ndarray:
    """All points of P^n(GF(p)), normalised, by leading-one position then odometer order."""
    blocks = []
    for lead in range(n + 1):
        tail = n - lead
        grid = np.indices((p,) * tail).reshape(tail, -1).T if tail else np.zeros((1, 0), np.int64)
        pts = np.zeros((grid.shape[0], n + 1), dtype=np.int64)
        pts[:, lead] = 1
        pts[:, lead + 1:] = grid
        blocks.append(pts)
    return np.vstack(blocks)


def _threads() -> int:
    env = os.environ.get("RANKLOCUS_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            pass
    return cap


def _ranks_at(m: LinFormMatrix, pts: np.ndarray) -> np.ndarray:
    p = m.field.p
    chunks = [pts[s:s + CHUNK] for s in range(0, len(pts), CHUNK)]

    def work(chunk):
        return rank_batch(m.evaluate_batch(chunk), p)

    workers = min(_threads(), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def _require_field(m: LinFormMatrix, p: int) -> LinFormMatrix:
    if m.field.is_prime and m.field.p == p:
        return m
    if not m.field.is_prime:
        return reduce_mod(m, p)
    raise WrongFieldForExhaustive(f"matrix is over {m.field}, cannot check over GF({p})")


def reduce_mod(m: LinFormMatrix, p: int) -> LinFormMatrix:
    """Reduce a rational matrix modulo p; denominators must be prime to p."""
    if m.field.is_prime:
        raise WrongFieldForExhaustive("only rational matrices can be reduced")
    target = GF(p)
    for x in m.data.ravel():
        if x.denominator % p == 0:
            raise WrongFieldForExhaustive(f"denominator of {x} vanishes modulo {p}")
    return LinFormMatrix(target, m.data)


def _certificate(m, mode, p, pts, ranks, claimed, trials=None, seed=None, caveat=""):
    bad = np.flatnonzero(ranks != claimed)
    failures = [(tuple(int(x) for x in pts[k]), int(ranks[k])) for k in bad[:MAX_FAILURES]]
    return RankCertificate(mode, p, m.nvars, m.shape, int(claimed), int(len(pts)), failures,
                           int(bad.size), trials, seed, caveat)


def verify_exhaustive(m: LinFormMatrix, p: int, claimed_rank: int | None = None,
                      ceiling: int = ENUMERATION_CEILING, seed: int = 0) -> RankCertificate:
    """Rank at every GF(p)-point of P^n.

    The claimed rank defaults to the largest of the seeded generic rank and
    every rank seen, so no point can exceed it.
    """
    count = projective_point_count(p, m.n)
    if count > ceiling:
        raise EnumerationTooLarge(f"P^{m.n}(GF({p})) has {count} points, ceiling is {ceiling}")
    m = _require_field(m, p)
    pts = enumerate_points(p, m.n)
    ranks = _ranks_at(m, pts)
    if claimed_rank is None:
        claimed_rank = max(generic_rank(m, seed=seed), int(ranks.max()) if len(ranks) else 0)
    return _certificate(m, "exhaustive", p, pts, ranks, claimed_rank, caveat=EXHAUSTIVE_CAVEAT)


def verify_sampled(m: LinFormMatrix, p: int, trials: int, seed: int = 0,
                   claimed_rank: int | None = None) -> RankCertificate:
    m = _require_field(m, p)
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, p, size=(trials, m.nvars), dtype=np.int64)
    zero = ~pts.any(axis=1)
    while zero.any():
        pts[zero] = rng.integers(0, p, size=(int(zero.sum()), m.nvars), dtype=np.int64)
        zero = ~pts.any(axis=1)
    pts = _normalise(pts, p)
    ranks = _ranks_at(m, pts)
    if claimed_rank is None:
        claimed_rank = max(generic_rank(m, seed=seed), int(ranks.max()) if len(ranks) else 0)
    return _certificate(m, "sampled", p, pts, ranks, claimed_rank, trials, seed, SAMPLED_CAVEAT)


def _normalise(pts: np.ndarray, p: int) -> np.ndarray:
    lead_pos = (pts != 0).argmax(axis=1)
    lead = pts[np.arange(len(pts)), lead_pos]
    inv = np.array([pow(int(x), -1, p) for x in lead], dtype=np.int64)
    return pts * inv[:, None] % p


def verify_constant_rank(m: LinFormMatrix, mode: str = "exhaustive", p: int | None = None,
                         trials: int = 1000, seed: int = 0) -> RankCertificate:
    if p is None:
        if not m.field.is_prime:
            raise WrongFieldForExhaustive("a prime must be given for a rational matrix")
        p = m.field.p
    if mode == "exhaustive":
        return verify_exhaustive(m, p, seed=seed)
    if mode == "sampled":
        return verify_sampled(m, p, trials, seed)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class KernelCokernelProfile:
    source_rank: int
    target_rank: int
    rank: int
    labels: dict = field(default_factory=dict)

    @property
    def kernel(self) -> int:
        return self.source_rank - self.rank

    @property
    def cokernel(self) -> int:
        return self.target_rank - self.rank

    def to_json(self):
        return {"source": self.source_rank, "target": self.target_rank, "rank": self.rank,
                "kernel": self.kernel, "cokernel": self.cokernel, "labels": self.labels}


def kernel_cokernel_profile(m: LinFormMatrix, certificate: RankCertificate,
                            labels: dict | None = None) -> KernelCokernelProfile:
    """Ranks of kernel, image and cokernel of O^a -> O(1)^b with a = cols, b = rows."""
    return KernelCokernelProfile(m.cols, m.rows, certificate.claimed_rank, dict(labels or {}))


def verify_chain_commutes(square) -> tuple[bool, tuple | None]:
    """Check h_mid d_top = e_top h_top and h_bottom d_bottom = e_bottom h_mid.

    Returns (True, None) or (False, (square name, slice, row, col)) for the
    first mismatching entry.
    """
    checks = (("top", square.h_mid, square.d_top, square.e_top, square.h_top),
              ("bottom", square.h_bottom, square.d_bottom, square.e_bottom, square.h_mid))
    for name, h_after, d, e, h_before in checks:
        if h_before is None or d is None:
            continue
        try:
            lhs = d.mul_const_left(h_after)
            rhs = e.mul_const_right(h_before)
        except DimensionMismatch:
            return False, (name, None, None, None)
        diff = np.argwhere(lhs.data != rhs.data)
        if diff.size:
            k, i, j = (int(x) for x in diff[0])
            return False, (name, k, i, j)
    return True, None


def composite_is_zero(a: LinFormMatrix, b: LinFormMatrix) -> bool:
    return all(m.is_zero() for m in product(a, b).values())
