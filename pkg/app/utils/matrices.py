"""Exact matrix helpers on top of sympy and their JSON/pretty renderings."""

from fractions import Fraction
from typing import Any, Iterable, List, Sequence, Union

import sympy as sp

Rational = Union[int, Fraction, sp.Rational]


def to_rational(value: Any) -> sp.Rational:
    """Convert an int, Fraction, string or sympy number to an exact sympy Rational."""
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    result = sp.sympify(value)
    if not result.is_Rational:
        raise ValueError(f"{value!r} is not an exact rational")
    return sp.Rational(result)


def rational_matrix(rows: Iterable[Iterable[Any]]) -> sp.ImmutableMatrix:
    """Build an immutable exact-rational matrix from nested rows."""
    rows = [[to_rational(x) for x in row] for row in rows]
    if not rows:
        return sp.ImmutableMatrix(0, 0, [])
    return sp.ImmutableMatrix(rows)


def is_integral(mat: sp.MatrixBase) -> bool:
    return all(sp.Rational(x).q == 1 for x in mat)


def rational_pair(value: Rational) -> List[int]:
    """Serialize an exact rational as ``[numerator, denominator]``."""
    q = to_rational(value)
    return [int(q.p), int(q.q)]


def matrix_to_json(mat: sp.MatrixBase) -> List[List[List[int]]]:
    return [[rational_pair(mat[i, j]) for j in range(mat.cols)] for i in range(mat.rows)]


def format_rational(value: Rational) -> str:
    q = to_rational(value)
    return str(q.p) if q.q == 1 else f"{q.p}/{q.q}"


def format_matrix(mat: sp.MatrixBase, labels: Sequence[Any] = ()) -> str:
    """Render a matrix as right-aligned exact fractions, one row per line."""
    cells = [[format_rational(mat[i, j]) for j in range(mat.cols)] for i in range(mat.rows)]
    if not cells:
        return "[]"
    width = max(len(c) for row in cells for c in row)
    row_labels = [str(x) for x in labels] if labels else []
    label_width = max((len(x) for x in row_labels), default=0)
    lines = []
    for i, row in enumerate(cells):
        prefix = f"{row_labels[i]:>{label_width}} | " if row_labels else ""
        lines.append(prefix + " ".join(c.rjust(width) for c in row))
    return "\n".join(lines)
