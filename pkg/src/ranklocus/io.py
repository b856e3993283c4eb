"""JSON and Macaulay2-style text serialisation of linear-form matrices."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ParseError, ShapeMismatch
from .field import FieldSpec
from .linform import LinFormMatrix

FORMAT_VERSION = 1


def _scalar_out(field: FieldSpec, x):
    if field.is_prime:
        return int(x)
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _scalar_in(field: FieldSpec, x):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ParseError(f"bad matrix entry {x!r}")
    try:
        return field.element(Fraction(x) if isinstance(x, str) else x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad matrix entry {x!r}") from exc


def matrix_to_json(m: LinFormMatrix) -> dict:
    return {"format": FORMAT_VERSION, "field": m.field.to_json(), "nvars": m.nvars,
            "rows": m.rows, "cols": m.cols,
            "slices": [[_scalar_out(m.field, x) for x in m.data[k].ravel()]
                       for k in range(m.nvars)]}


def matrix_from_json(obj: dict) -> LinFormMatrix:
    try:
        if int(obj.get("format", FORMAT_VERSION)) != FORMAT_VERSION:
            raise ParseError(f"unsupported format {obj.get('format')}")
        field = FieldSpec.from_json(obj["field"])
        nv, rows, cols = int(obj["nvars"]), int(obj["rows"]), int(obj["cols"])
        slices = obj["slices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix: {exc}") from exc
    if len(slices) != nv or any(len(s) != rows * cols for s in slices):
        raise ShapeMismatch(f"slices do not match {nv} x {rows} x {cols}")
    data = np.empty((nv, rows * cols), dtype=object)
    for k, s in enumerate(slices):
        for t, x in enumerate(s):
            data[k, t] = _scalar_in(field, x)
    return LinFormMatrix(field, data.reshape(nv, rows, cols))


def load_document(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def load_matrix(path_or_obj) -> tuple[LinFormMatrix, dict]:
    """Matrix and enclosing document, from a bare matrix or a build report."""
    obj = load_document(path_or_obj) if isinstance(path_or_obj, (str, Path)) else path_or_obj
    if "matrix" in obj:
        return matrix_from_json(obj["matrix"]), obj
    return matrix_from_json(obj), obj


def _linear_form_text(field: FieldSpec, coeffs) -> str:
    parts = []
    for k, c in enumerate(coeffs):
        c = field.lift(c)
        if c == 0:
            continue
        var = f"x_{k}"
        if c == 1:
            term = var
        elif c == -1:
            term = f"-{var}"
        else:
            term = f"{c}*{var}" if not isinstance(c, Fraction) or c.denominator == 1 else f"({c})*{var}"
        parts.append(term)
    if not parts:
        return "0"
    text = parts[0]
    for t in parts[1:]:
        text += t if t.startswith("-") else "+" + t
    return text


def to_cas(m: LinFormMatrix) -> str:
    """Matrix as a ring declaration and a matrix{{...}} literal in x_0..x_n."""
    ring = f"ZZ/{m.field.p}" if m.field.is_prime else "QQ"
    rows = []
    for i in range(m.rows):
        rows.append("{" + ", ".join(_linear_form_text(m.field, m.entry(i, j))
                                    for j in range(m.cols)) + "}")
    return f"S = {ring}[x_0..x_{m.n}];\nM = matrix{{" + ", ".join(rows) + "};\n"
