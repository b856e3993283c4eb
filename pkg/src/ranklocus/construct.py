"""Constant-rank matrices of linear forms from morphisms between linear complexes.

A morphism between two exact complexes of free sheaves on P^n, linear in a
window and surjective in two consecutive degrees, induces a map between
kernels of constant matrices.  `extract_matrix` computes that map from a
ChainSquare; the builders assemble squares for Koszul complexes, for the
linear strand of the Eagon-Northcott complex, for linear syzygies of a
presentation, and for resolutions read from disk.
"""
from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

from .complexes import bare_h, h_map, koszul_or_zero, strand_delta, sym_dim
from .errors import (CommutativityFailure, ConditionViolated, ContractionNotMaximal,
                     InconsistentSolve, InconsistentSystem, ParseError, PresentationDegenerate,
                     NotSurjective, ShapeMismatch, WindowViolation)
from .field import (DEFAULT_FIELD, ConstMatrix, FieldSpec, block_diag, matmul,
                    nullspace_basis, rank, solve_exact, vstack)
from .linform import (HomogPoly, LinFormMatrix, generic_rank, multiplication_matrix,
                      num_monomials, random_points)
from .multilinear import RIGHT, ExtVector, block_contraction_matrix, contraction_matrix, wedge_dim
from .verify import verify_chain_commutes

log = logging.getLogger(__name__)

RETRY_BUDGET = 5
RANK_TRIALS = 8


# graded term lists and the shape/rank prediction


@dataclass(frozen=True)
class GradedTermList:
    """Terms O(twist)^multiplicity of a complex, terms[k] sitting in degree start + k."""

    terms: tuple
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(t), int(m)) for t, m in self.terms))

    @property
    def end(self) -> int:
        return self.start + len(self.terms) - 1

    def term(self, pos: int):
        if self.start <= pos <= self.end:
            return self.terms[pos - self.start]
        return None

    def rank(self, pos: int) -> int:
        t = self.term(pos)
        return t[1] if t else 0

    def is_linear_at(self, pos: int) -> bool:
        t = self.term(pos)
        return t is None or t[1] == 0 or t[0] == pos

    def to_json(self):
        return {"start": self.start, "terms": [list(t) for t in self.terms]}


def koszul_terms(n: int, copies: int = 1) -> GradedTermList:
    """copies of the Koszul complex on P^n, wedge^k V* (x) O(-k) in degree -k."""
    return GradedTermList(tuple((k, copies * comb(n + 1, -k)) for k in range(-n - 1, 1)), -n - 1)


def eagon_northcott_terms(n: int, g: int, copies: int = 1) -> GradedTermList:
    """Resolution of O(g) by S_k G* (x) wedge^{g+k} F (x) O(-k) in degree -k, O(g) in degree 1."""
    f = n + g
    terms = [(k, copies * sym_dim(g, -k) * comb(f, g - k)) for k in range(-n, 1)]
    terms.append((g, copies))
    return GradedTermList(tuple(terms), -n)


@dataclass(frozen=True)
class Prediction:
    rows: int
    cols: int
    rank: int

    @property
    def shape(self):
        return (self.rows, self.cols)


def predicted_mainthm(P: GradedTermList, Q: GradedTermList, i: int, j: int) -> Prediction:
    """Shape and generic rank of the induced map for P -> Q(-j)[j] surjective in degrees i, i+1.

    cols = p_{i+1} - q_{i+j+1}, rows = p_{i+2} - q_{i+j+2} (the kernel
    dimension when degree i+2 is surjective too), and the rank is the
    alternating sum of the ranks of P from degree i+2 rightwards minus the
    same sum for Q from degree i+j+2.
    """
    for pos in (i, i + 1):
        if not P.is_linear_at(pos):
            raise WindowViolation(f"P is not linear in degree {pos}")
    for pos in (i + j, i + j + 1):
        if not Q.is_linear_at(pos):
            raise WindowViolation(f"Q is not linear in degree {pos}")
    if i + 2 > P.end:
        raise WindowViolation(f"degree {i} leaves no room for degrees {i + 1}, {i + 2} in P")
    cols = P.rank(i + 1) - Q.rank(i + j + 1)
    rows = P.rank(i + 2) - Q.rank(i + j + 2)
    r = sum((-1) ** k * P.rank(i + 2 + k) for k in range(P.end - i - 1))
    r -= sum((-1) ** k * Q.rank(i + j + 2 + k) for k in range(max(0, Q.end - i - j - 1)))
    return Prediction(rows, cols, r)


# chain squares and extraction


@dataclass
class ChainSquare:
    """Three horizontal constant maps between two vertical pairs of differentials.

        P_i   --h_top-->    Q_i'
         | d_top              | e_top
        P_i+1 --h_mid-->    Q_i'+1
         | d_bottom           | e_bottom
        P_i+2 --h_bottom--> Q_i'+2

    The top row may be absent when only the lower square is known.
    """

    d_bottom: LinFormMatrix
    e_bottom: LinFormMatrix
    h_mid: ConstMatrix
    h_bottom: ConstMatrix
    d_top: LinFormMatrix | None = None
    e_top: LinFormMatrix | None = None
    h_top: ConstMatrix | None = None

    @property
    def has_top(self) -> bool:
        return self.h_top is not None and self.d_top is not None and self.e_top is not None


@dataclass
class BuildReport:
    matrix: LinFormMatrix
    predicted_shape: tuple
    predicted_rank: int
    measured_generic_rank: int
    commutativity_ok: bool | None
    seed: int | None = None
    omegas: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    square: ChainSquare | None = None

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def ok(self) -> bool:
        return (tuple(self.shape) == tuple(self.predicted_shape)
                and self.measured_generic_rank == self.predicted_rank
                and self.commutativity_ok is not False)

    def orientations(self) -> dict:
        r, c = self.shape
        return {"map": f"O(-1)^{c} -> O^{r}", "rows_x_cols": f"{r}x{c}",
                "transposed": f"{c}x{r}"}

    def to_json(self) -> dict:
        from .io import matrix_to_json
        return {"format": 1, "kind": "build_report", "config": self.config,
                "predicted_shape": list(self.predicted_shape),
                "predicted_rank": self.predicted_rank,
                "measured_shape": list(self.shape),
                "measured_generic_rank": self.measured_generic_rank,
                "commutativity_ok": self.commutativity_ok, "ok": self.ok, "seed": self.seed,
                "orientations": self.orientations(), "omegas": self.omegas,
                "details": self.details, "matrix": matrix_to_json(self.matrix)}


def extract_matrix(square: ChainSquare, predicted: Prediction | None = None, seed: int = 0,
                   require_top: bool = True) -> BuildReport:
    """Induced map ker(h_mid) -> ker(h_bottom) of d_bottom.

    With S_bot and S_mid the canonical kernel bases, M solves
    S_bot M = d_bottom S_mid slice by slice.
    """
    ok, where = verify_chain_commutes(square)
    if not ok:
        raise CommutativityFailure(where)
    field_ = square.h_mid.field
    details = {}
    checks = [("h_mid", square.h_mid)]
    if square.has_top:
        checks.insert(0, ("h_top", square.h_top))
    elif require_top:
        raise ValueError("square has no top row; pass require_top=False to skip that check")
    for name, h in checks:
        r = rank(h)
        details[f"{name}_rank"] = r
        if r != h.rows:
            raise NotSurjective(name, r, h.rows)
    r_bot = rank(square.h_bottom)
    details["h_bottom_rank"] = r_bot
    details["h_bottom_surjective"] = r_bot == square.h_bottom.rows

    s_bot = nullspace_basis(square.h_bottom)
    s_mid = nullspace_basis(square.h_mid)
    nv = square.d_bottom.nvars
    rhs = [matmul(field_, square.d_bottom.data[k], s_mid.data) for k in range(nv)]
    big = ConstMatrix(field_, np.hstack(rhs)) if rhs else None
    try:
        sol = solve_exact(s_bot, big)
    except InconsistentSystem as exc:
        raise InconsistentSolve("kernel of h_mid is not mapped into kernel of h_bottom") from exc
    w = s_mid.cols
    slices = [sol.data[:, k * w:(k + 1) * w] for k in range(nv)]
    m = LinFormMatrix(field_, np.stack(slices) if slices else field_.zeros((nv, s_bot.cols, w)))
    # cheap re-check of the defining identity
    for k in range(nv):
        if not np.array_equal(matmul(field_, s_bot.data, m.data[k]), rhs[k]):
            raise InconsistentSolve(f"solution fails the identity on slice {k}")
    measured = generic_rank(m, RANK_TRIALS, seed)
    if predicted is None:
        predicted = Prediction(m.rows, m.cols, measured)
    details["kernel_dims"] = {"mid": s_mid.cols, "bottom": s_bot.cols}
    return BuildReport(m, predicted.shape, predicted.rank, measured, True, seed,
                       details=details, square=square)


# random choices


def _attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng([seed, attempt])


def random_form_grid(rng, s: int, t: int, dim: int, degree: int,
                     field_: FieldSpec) -> list:
    return [[ExtVector.random(dim, degree, rng, field_) for _ in range(t)] for _ in range(s)]


def _grid_json(grid):
    return [[w.to_json() for w in row] for row in grid]


# Koszul pairs


def _koszul_square(n, i, j, t, s, grid, field_):
    dim = n + 1
    a = -i  # exterior degree of P_i

    def h(level_deg):
        q = level_deg - j
        if s == 0 or q < 0 or q > dim:
            return ConstMatrix.zeros(field_, s * wedge_dim(dim, q), t * wedge_dim(dim, level_deg))
        return block_contraction_matrix(grid, level_deg, q, RIGHT, dim, field_)

    return ChainSquare(
        d_top=koszul_or_zero(n, a, t, field_), d_bottom=koszul_or_zero(n, a - 1, t, field_),
        e_top=koszul_or_zero(n, a - j, s, field_), e_bottom=koszul_or_zero(n, a - j - 1, s, field_),
        h_top=h(a), h_mid=h(a - 1), h_bottom=h(a - 2))


def build_koszul_blocks(n: int, i: int, j: int, t: int = 1, s: int = 1, grid=None,
                        seed: int = 0, field_: FieldSpec = DEFAULT_FIELD,
                        retries: int = RETRY_BUDGET) -> BuildReport:
    """t copies of the Koszul complex mapped to s copies shifted by j, via an s x t grid of j-forms."""
    if n < 1:
        raise WindowViolation("need n >= 1")
    if not -n - 1 <= i <= -2:
        raise WindowViolation(f"degree {i} must lie in [{-n - 1}, -2]")
    if j < 0 or t < 1 or s < 0:
        raise WindowViolation("need j >= 0, t >= 1, s >= 0")
    if j == 0:
        s = 0
    dim = n + 1
    P, Q = koszul_terms(n, t), koszul_terms(n, s)
    predicted = predicted_mainthm(P, Q, i, j)
    for name, level in (("h_top", i), ("h_mid", i + 1)):
        if t * wedge_dim(dim, -level) < s * wedge_dim(dim, -level - j):
            raise NotSurjective(name)
    attempts = 1 if grid is not None else retries
    last = None
    for attempt in range(attempts):
        g = grid if grid is not None else random_form_grid(_attempt_rng(seed, attempt), s, t, dim, j, field_)
        square = _koszul_square(n, i, j, t, s, g, field_)
        ranks = {name: rank(m) for name, m in
                 (("h_top", square.h_top), ("h_mid", square.h_mid), ("h_bottom", square.h_bottom))}
        maximal = all(ranks[k] == min(m.shape) for k, m in
                      (("h_top", square.h_top), ("h_mid", square.h_mid), ("h_bottom", square.h_bottom)))
        last = ranks
        if maximal:
            report = extract_matrix(square, predicted, seed)
            report.omegas = _grid_json(g)
            report.config = {"builder": "koszul_blocks",
                             "args": {"n": n, "i": i, "j": j, "t": t, "s": s},
                             "field": field_.to_json(), "seed": seed}
            report.details["attempt"] = attempt
            return report
    raise ContractionNotMaximal(f"no maximal-rank grid in {attempts} attempts; ranks {last}", last)


def build_koszul_pair(n: int, i: int, j: int, omega=None, seed: int = 0,
                      field_: FieldSpec = DEFAULT_FIELD) -> BuildReport:
    """Koszul complex mapped to itself shifted by j through one j-form; j = 0 means Q = 0."""
    grid = None if omega is None else [[omega]]
    report = build_koszul_blocks(n, i, j, 1, 1, grid, seed, field_)
    report.config["builder"] = "koszul_pair"
    report.config["args"] = {"n": n, "i": i, "j": j}
    return report


def build_steiner_square(seed: int = 0, field_: FieldSpec = DEFAULT_FIELD) -> BuildReport:
    """Three Koszul complexes on P^3 against two, shifted by one, through six vectors."""
    report = build_koszul_blocks(3, -3, 1, 3, 2, None, seed, field_)
    report.config["builder"] = "steiner_square"
    report.config["args"] = {}
    return report


def build_koszul(n: int, i: int, field_: FieldSpec = DEFAULT_FIELD) -> BuildReport:
    """The Koszul differential wedge^{i+1} -> wedge^i itself, of generic rank C(n, i)."""
    from .complexes import koszul_differential
    m = koszul_differential(n, i, field_)
    measured = generic_rank(m, RANK_TRIALS, 0)
    return BuildReport(m, (comb(n + 1, i), comb(n + 1, i + 1)), comb(n, i), measured, None, None,
                       config={"builder": "koszul", "args": {"n": n, "i": i},
                               "field": field_.to_json(), "seed": None})


# linear strand of the Eagon-Northcott complex against Koszul complexes


def copies_surjective(n: int, d: int, s: int, q: int) -> bool:
    return comb(d + q - 1, q) * comb(n + d, q + d) >= s * comb(n + 1, q)


def max_drezet_degree(n: int, d: int, s: int) -> int:
    """Largest q with the dimension inequality holding in every degree 0..q (0 if none past 1)."""
    q = 0
    while q + 1 <= n + 1 and copies_surjective(n, d, s, q + 1):
        q += 1
    return q


def drezet_prediction(n: int, d: int, s: int, i: int) -> Prediction:
    def w(k):
        return comb(d + k - 1, k) * comb(n + d, k + d) - s * comb(n + 1, k)
    rows = w(i - 2)
    cols = w(i - 1)
    r = sum((-1) ** k * w(i - 2 - k) for k in range(i - 1)) + (-1) ** (i - 1)
    return Prediction(rows, cols, r)


def _drezet_h(n, d, k, grid, field_):
    return h_map(n, d, n + d, k, k, grid, k + d, field_)


def build_drezet_family(n: int, d: int, s: int, i: int, seed: int = 0,
                        field_: FieldSpec = DEFAULT_FIELD, retries: int = RETRY_BUDGET) -> BuildReport:
    """Map between kernels W_{i-1} -> W_{i-2} of the comparison maps H_k on the strand
    S_k G* (x) wedge^{k+d} F, for s generic d-forms on F = k^{n+d}."""
    if n < 1 or d < 2 or s < 1:
        raise ConditionViolated("need n >= 1, d >= 2, s >= 1")
    q = max_drezet_degree(n, d, s)
    if q < 2:
        raise ConditionViolated(f"dimension inequality fails in degree {q + 1} for n={n}, d={d}, s={s}")
    if not 2 <= i <= q:
        raise ConditionViolated(f"i = {i} outside [2, {q}] for n={n}, d={d}, s={s}")
    f = n + d
    predicted = drezet_prediction(n, d, s, i)
    cross = predicted_mainthm(eagon_northcott_terms(n, d), koszul_terms(n, s), -i, 0)
    last = None
    for attempt in range(retries):
        grid = random_form_grid(_attempt_rng(seed, attempt), s, 1, f, d, field_)
        square = ChainSquare(
            d_top=strand_delta(n, d, i, i + d, field_),
            d_bottom=strand_delta(n, d, i - 1, i - 1 + d, field_),
            e_top=koszul_or_zero(n, i, s, field_), e_bottom=koszul_or_zero(n, i - 1, s, field_),
            h_top=_drezet_h(n, d, i, grid, field_), h_mid=_drezet_h(n, d, i - 1, grid, field_),
            h_bottom=_drezet_h(n, d, i - 2, grid, field_))
        ranks = [rank(square.h_top), rank(square.h_mid), rank(square.h_bottom)]
        last = ranks
        if ranks == [square.h_top.rows, square.h_mid.rows, square.h_bottom.rows]:
            report = extract_matrix(square, predicted, seed)
            report.omegas = _grid_json(grid)
            report.config = {"builder": "drezet", "args": {"n": n, "d": d, "s": s, "i": i},
                             "field": field_.to_json(), "seed": seed}
            report.details.update(attempt=attempt, max_degree=q,
                                  general_prediction=[cross.rows, cross.cols, cross.rank])
            return report
    raise ContractionNotMaximal(f"comparison maps not surjective in {retries} attempts; ranks {last}", last)


def build_appendix_a(seed: int = 0, field_: FieldSpec = DEFAULT_FIELD,
                     retries: int = RETRY_BUDGET) -> BuildReport:
    """Five generic 3-forms on k^6 over P^3, assembled block by block.

    H_0 lists the form coefficients, H_1 and H_2 are the bare maps composed
    with contraction of wedge^4 F and wedge^5 F, D is the strand differential
    G* (x) wedge^4 F -> wedge^3 F.  The result is 15 x 25 of generic rank 14.
    """
    n, g, s = 3, 3, 5
    f = n + g
    last = None
    for attempt in range(retries):
        grid = random_form_grid(_attempt_rng(seed, attempt), s, 1, f, g, field_)
        forms = [row[0] for row in grid]
        h0 = vstack([contraction_matrix(w, 3, RIGHT) for w in forms])
        b1, b2 = bare_h(n, g, 1, field_), bare_h(n, g, 2, field_)
        h1 = vstack([b1 @ block_diag([contraction_matrix(w, 4, RIGHT)] * g, field_) for w in forms])
        h2 = vstack([b2 @ block_diag([contraction_matrix(w, 5, RIGHT)] * sym_dim(g, 2), field_)
                     for w in forms])
        ranks = [rank(h2), rank(h1), rank(h0)]
        last = ranks
        if ranks != [30, 20, 5]:
            continue
        square = ChainSquare(
            d_top=strand_delta(n, g, 2, 5, field_), d_bottom=strand_delta(n, g, 1, 4, field_),
            e_top=koszul_or_zero(n, 2, s, field_), e_bottom=koszul_or_zero(n, 1, s, field_),
            h_top=h2, h_mid=h1, h_bottom=h0)
        report = extract_matrix(square, Prediction(15, 25, 14), seed)
        report.omegas = _grid_json(grid)
        report.config = {"builder": "appendix_a", "args": {}, "field": field_.to_json(), "seed": seed}
        report.details.update(attempt=attempt, shapes={"H0": list(h0.shape), "H1": list(h1.shape),
                                                       "H2": list(h2.shape)})
        return report
    raise ContractionNotMaximal(f"comparison maps not surjective in {retries} attempts; ranks {last}", last)


# linear syzygies of a presentation


def _columns(presentation):
    pres = list(presentation)
    if pres and isinstance(pres[0], HomogPoly):
        return [pres]
    return [list(col) for col in pres]


def linear_syzygies(n: int, presentation) -> tuple[ConstMatrix, dict]:
    """Basis (as columns) of tuples of linear forms (l_1..l_m) with sum l_i q_i = 0 for every column."""
    cols = _columns(presentation)
    blocks = [multiplication_matrix(col, col[0].degree + 1) for col in cols]
    stacked = vstack(blocks)
    r = rank(stacked)
    target = sum(b.rows for b in blocks)
    return nullspace_basis(stacked), {"multiplication_rank": r, "multiplication_target": target,
                                      "multiplication_surjective": r == target}


def _check_presentation(n, cols, field_, rng, samples=64):
    m = len(cols[0])
    for col in cols:
        if len(col) != m:
            raise PresentationDegenerate("presentation columns have different lengths")
        degs = {q.degree for q in col}
        if len(degs) != 1 or degs.pop() < 1:
            raise PresentationDegenerate("each column needs forms of one positive degree")
        if any(q.nvars != n + 1 or q.field != field_ for q in col):
            raise PresentationDegenerate("forms must live in the same ring")
    if m <= len(cols):
        raise PresentationDegenerate("need more forms than columns")
    pts = list(random_points(rng, field_, n + 1, samples))
    if n <= 6:
        # 0/1 points catch common zeros along coordinate subspaces, which random points miss
        pts += [np.array([(k >> v) & 1 for v in range(n + 1)]) for k in range(1, 2 ** (n + 1))]
    for pt in pts:
        vals = ConstMatrix(field_, [[q.evaluate(pt) for q in col] for col in cols])
        if rank(vals) < len(cols):
            raise PresentationDegenerate(f"presentation drops rank at {tuple(int(x) for x in pt)}")


def build_pairing_matrix(n: int, presentation, seed: int = 0,
                         field_: FieldSpec | None = None) -> BuildReport:
    """Matrix of H^0(E) (x) O -> H^0(E^v(1))^v (x) O(1) for E the cokernel of a presentation.

    `presentation` is a list of columns, each a list of m forms of one degree,
    or a plain list of m forms.  Rows are the linear syzygies, columns the m
    coordinate sections of E.
    """
    cols = _columns(presentation)
    field_ = field_ or cols[0][0].field
    _check_presentation(n, cols, field_, np.random.default_rng([seed, 99]))
    m = len(cols[0])
    syz, info = linear_syzygies(n, cols)
    nv = n + 1
    data = field_.zeros((nv, syz.cols, m))
    for j in range(syz.cols):
        vec = syz.data[:, j]
        for i in range(m):
            data[:, j, i] = vec[i * nv:(i + 1) * nv]
    mat = LinFormMatrix(field_, data)
    pred_rows = m * nv - sum(num_monomials(nv, col[0].degree + 1) for col in cols)
    predicted = Prediction(pred_rows, m, m - len(cols))
    measured = generic_rank(mat, RANK_TRIALS, seed)
    if syz.cols == 0:
        log.warning("presentation has no linear syzygies; the matrix is empty")
    return BuildReport(mat, predicted.shape, predicted.rank, measured, None, seed,
                       details=dict(info, degrees=[col[0].degree for col in cols],
                                    no_linear_syzygies=syz.cols == 0))


def generic_presentation(n: int, m: int, degrees, rng, field_: FieldSpec) -> list:
    return [[HomogPoly.random(field_, n + 1, d, rng) for _ in range(m)] for d in degrees]


def _pairing_with_retry(n, m, degrees, seed, field_, builder, args, retries=RETRY_BUDGET):
    last = None
    for attempt in range(retries):
        rng = _attempt_rng(seed, attempt)
        pres = generic_presentation(n, m, degrees, rng, field_)
        try:
            report = build_pairing_matrix(n, pres, seed, field_)
        except PresentationDegenerate as exc:
            last = exc
            continue
        if report.ok:
            report.config = {"builder": builder, "args": args, "field": field_.to_json(), "seed": seed}
            report.details["attempt"] = attempt
            return report
        last = report
    if isinstance(last, BuildReport):
        return last
    raise PresentationDegenerate(f"no usable presentation in {retries} attempts: {last}")


def build_steiner_pairing(n: int, m: int, k: int, seed: int = 0,
                          field_: FieldSpec = DEFAULT_FIELD) -> BuildReport:
    """Generic linear presentation O(-1)^k -> O^m on P^n."""
    return _pairing_with_retry(n, m, [1] * k, seed, field_, "steiner_pairing", {"n": n, "m": m, "k": k})


def build_drezet_pairing(n: int, d: int, r: int, seed: int = 0,
                         field_: FieldSpec = DEFAULT_FIELD) -> BuildReport:
    """r + 1 generic forms of degree d, presenting O(-d) -> O^{r+1} on P^n."""
    return _pairing_with_retry(n, r + 1, [d], seed, field_, "drezet_pairing", {"n": n, "d": d, "r": r})


# resolutions computed elsewhere


def _parse_scalar(x, field_: FieldSpec):
    if isinstance(x, str):
        try:
            x = Fraction(x)
        except ValueError as exc:
            raise ParseError(f"bad coefficient {x!r}") from exc
    elif not isinstance(x, int):
        raise ParseError(f"bad coefficient {x!r}")
    return field_.element(x)


def parse_resolution(obj) -> tuple:
    """(field, n, C1, comparison or None, copies or None, expected or None) from the import format.

    Columns of C1 with an entry that is not a linear form are dropped with a warning.
    """
    if isinstance(obj, (str, Path)):
        try:
            obj = json.loads(Path(obj).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read resolution: {exc}") from exc
    try:
        n = int(obj["n"])
        field_ = FieldSpec.from_json(obj["field"])
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or malformed header field: {exc}") from exc
    nv = n + 1
    data = np.zeros((nv, rows, cols), dtype=object)
    data.fill(0)
    nonlinear = set()
    for item in entries:
        try:
            r, c, terms = item
            r, c = int(r), int(c)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad entry {item!r}") from exc
        if not (0 <= r < rows and 0 <= c < cols):
            raise ShapeMismatch(f"entry ({r}, {c}) outside {rows}x{cols}")
        for term in terms:
            try:
                coeff, exps = term
                exps = [int(e) for e in exps]
            except (TypeError, ValueError) as exc:
                raise ParseError(f"bad term {term!r}") from exc
            if len(exps) != nv:
                raise ParseError(f"exponent vector {exps} needs {nv} entries")
            coeff = _parse_scalar(coeff, field_)
            if coeff == 0:
                continue
            if sum(exps) != 1 or min(exps) < 0:
                nonlinear.add(c)
                continue
            data[exps.index(1), r, c] += coeff
    keep = [c for c in range(cols) if c not in nonlinear]
    if nonlinear:
        warnings.warn(f"dropping {len(nonlinear)} columns with non-linear entries", stacklevel=2)
    c1 = LinFormMatrix(field_, data[:, :, keep])
    comparison = None
    if obj.get("comparison") is not None:
        comp = obj["comparison"]
        vals = [[_parse_scalar(x, field_) for x in row] for row in comp["entries"]]
        comparison = ConstMatrix(field_, vals) if vals else ConstMatrix.zeros(field_, 0, rows)
        if comparison.cols != rows:
            raise ShapeMismatch(f"comparison matrix has {comparison.cols} columns, need {rows}")
    return field_, n, c1, comparison, obj.get("copies"), obj.get("expected"), sorted(nonlinear)


def export_resolution(c1: LinFormMatrix, comparison: ConstMatrix | None = None,
                      expected: dict | None = None) -> dict:
    """Inverse of parse_resolution."""
    from .multilinear import _json_scalar
    f = c1.field
    entries = []
    for r in range(c1.rows):
        for c in range(c1.cols):
            terms = []
            for k in range(c1.nvars):
                x = c1.data[k, r, c]
                if x != 0:
                    e = [0] * c1.nvars
                    e[k] = 1
                    terms.append([_json_scalar(x), e])
            if terms:
                entries.append([r, c, terms])
    out = {"format": 1, "n": c1.n, "field": f.to_json(), "rows": c1.rows, "cols": c1.cols,
           "entries": entries}
    if comparison is not None:
        out["comparison"] = {"rows": comparison.rows, "cols": comparison.cols,
                             "entries": [[_json_scalar(x) for x in row] for row in comparison.data]}
        out["copies"] = comparison.rows
    if expected:
        out["expected"] = expected
    return out


def induced_lift(c1: LinFormMatrix, comparison: ConstMatrix) -> ConstMatrix:
    """Constant H with (Koszul wedge^1 -> wedge^0)^s H = comparison C1.

    Row (c, k) of H is row c of comparison times the x_k slice of C1.
    """
    nv = c1.nvars
    s = comparison.rows
    parts = [matmul(c1.field, comparison.data, c1.data[k]) for k in range(nv)]
    out = c1.field.zeros((s * nv, c1.cols))
    for k in range(nv):
        out[k::nv] = parts[k]
    return ConstMatrix(c1.field, out)


def import_and_extract(source, comparison: ConstMatrix | None = None, copies: int | None = None,
                       seed: int = 0) -> BuildReport:
    """Induced matrix from the first differential of a linear resolution and a map to k^s."""
    field_, n, c1, comp, file_copies, expected, dropped = parse_resolution(source)
    comparison = comparison if comparison is not None else comp
    if comparison is None:
        s = copies if copies is not None else file_copies
        if s is None:
            raise ParseError("need a comparison matrix or a number of copies")
        rng = np.random.default_rng([seed, 7])
        comparison = ConstMatrix(field_, field_.random_array(rng, (int(s), c1.rows)))
    s = comparison.rows
    if comparison.cols != c1.rows:
        raise ShapeMismatch(f"comparison is {comparison.shape}, C1 has {c1.rows} rows")
    h1 = induced_lift(c1, comparison)
    square = ChainSquare(d_bottom=c1, e_bottom=koszul_or_zero(n, 1, s, field_),
                         h_mid=h1, h_bottom=comparison)
    r_c1 = generic_rank(c1, RANK_TRIALS, seed)
    predicted = Prediction(c1.rows - s, c1.cols - s * (n + 1), r_c1 - s)
    if expected:
        shape = expected.get("shape", predicted.shape)
        predicted = Prediction(int(shape[0]), int(shape[1]), int(expected.get("rank", predicted.rank)))
    report = extract_matrix(square, predicted, seed, require_top=False)
    report.config = {"builder": "import", "args": {"copies": s}, "field": field_.to_json(),
                     "seed": seed}
    report.details.update(dropped_columns=dropped, c1_shape=list(c1.shape), c1_generic_rank=r_c1)
    return report


BUILDERS = {
    "koszul": lambda a, f, seed: build_koszul(a["n"], a["i"], f),
    "koszul_pair": lambda a, f, seed: build_koszul_pair(a["n"], a["i"], a["j"], seed=seed, field_=f),
    "koszul_blocks": lambda a, f, seed: build_koszul_blocks(a["n"], a["i"], a["j"], a["t"], a["s"],
                                                            seed=seed, field_=f),
    "steiner_square": lambda a, f, seed: build_steiner_square(seed, f),
    "drezet": lambda a, f, seed: build_drezet_family(a["n"], a["d"], a["s"], a["i"], seed, f),
    "appendix_a": lambda a, f, seed: build_appendix_a(seed, f),
    "steiner_pairing": lambda a, f, seed: build_steiner_pairing(a["n"], a["m"], a["k"], seed, f),
    "drezet_pairing": lambda a, f, seed: build_drezet_pairing(a["n"], a["d"], a["r"], seed, f),
}


def rebuild(config: dict, field_: FieldSpec) -> BuildReport:
    """Re-run a recorded build over another field with the same seed."""
    name = config.get("builder")
    if name not in BUILDERS:
        raise ValueError(f"no recipe to rebuild {name!r}")
    return BUILDERS[name](config.get("args", {}), field_, config.get("seed") or 0)
