"""
Cartan data - 一般Cartan行列と拡張実現

一般Cartan行列 C の検証、最小対称化子 d の決定、そして非退化な拡張
Cartan行列 Cfull (rtilde = 2r - rank C) の構成を行う。重みはすべて
基本ウェイト座標で保持し、単純ルート α_i は Cfull の第 i 列となる。
"""

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy as sp

from app.utils.error_handler import (
    BadShape,
    DegenerateRealization,
    IndexOutOfRange,
    NotGCM,
    NotSymmetrizable,
)

IntMatrix = Tuple[Tuple[int, ...], ...]

PRESETS: Dict[str, List[List[int]]] = {
    "A1": [[2]],
    "A2": [[2, -1], [-1, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "B2": [[2, -2], [-1, 2]],
    "G2": [[2, -1], [-3, 2]],
    "A1affine": [[2, -2], [-2, 2]],
}


def _is_integer(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    try:
        return Fraction(value).denominator == 1
    except (TypeError, ValueError):
        return False


def _as_int_matrix(rows: Any) -> IntMatrix:
    try:
        matrix = [list(row) for row in rows]
    except TypeError as e:
        raise BadShape("Cartan matrix must be a sequence of rows") from e
    size = len(matrix)
    if size == 0 or any(len(row) != size for row in matrix):
        raise BadShape(
            "Cartan matrix must be square and non-empty",
            details={"shape": [len(row) for row in matrix]},
        )
    result = []
    for row in matrix:
        converted = []
        for entry in row:
            if not _is_integer(entry):
                raise NotGCM(f"entry {entry!r} is not an integer")
            converted.append(int(entry))
        result.append(tuple(converted))
    return tuple(result)


def parse_matrix_text(text: str) -> List[List[int]]:
    """Parse "2,-1;-1,2" into nested integer rows."""
    rows = [row for row in re.split(r"[;\n]", text.strip()) if row.strip()]
    try:
        return [[int(x) for x in row.split(",")] for row in rows]
    except ValueError as e:
        raise BadShape(f"cannot parse matrix {text!r}") from e


@dataclass(frozen=True)
class CartanCore:
    """一般Cartan行列とその最小対称化子"""

    C: IntMatrix
    d: Tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.C)

    def to_dict(self) -> Dict[str, Any]:
        return {"r": self.r, "C": [list(row) for row in self.C], "d": list(self.d)}


def validate_core(C: Any) -> CartanCore:
    """
    一般Cartan行列を検証し、最小対称化子を求める

    Args:
        C: 正方整数行列

    Returns:
        CartanCore: 各連結成分ごとに最小な正整数の対称化子を持つ

    Raises:
        BadShape: 正方行列でない
        NotGCM: 対角成分・非対角成分の符号・零パターンの条件違反
        NotSymmetrizable: d_i C_ij = d_j C_ji を満たす正の d が存在しない
    """
    matrix = _as_int_matrix(C)
    r = len(matrix)

    for i in range(r):
        if matrix[i][i] != 2:
            raise NotGCM(f"C[{i + 1}][{i + 1}] = {matrix[i][i]}, expected 2")
        for j in range(r):
            if i == j:
                continue
            if matrix[i][j] > 0:
                raise NotGCM(f"C[{i + 1}][{j + 1}] = {matrix[i][j]} is positive")
            if (matrix[i][j] == 0) != (matrix[j][i] == 0):
                raise NotGCM(
                    f"zero pattern not symmetric at ({i + 1}, {j + 1})",
                    details={"entry": [i + 1, j + 1]},
                )

    # Propagate d_j = d_i C_ij / C_ji over each component of the Dynkin graph
    d: List[Optional[Fraction]] = [None] * r
    for start in range(r):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        component = [start]
        queue = [start]
        while queue:
            i = queue.pop(0)
            for j in range(r):
                if j == i or matrix[i][j] == 0:
                    continue
                value = d[i] * matrix[i][j] / matrix[j][i]
                if d[j] is None:
                    d[j] = value
                    component.append(j)
                    queue.append(j)
                elif d[j] != value:
                    raise NotSymmetrizable(
                        "symmetrizer constraints are inconsistent on a cycle",
                        details={"edge": [i + 1, j + 1]},
                    )
        scale = math.lcm(*(d[k].denominator for k in component))
        numerators = [int(d[k] * scale) for k in component]
        common = math.gcd(*numerators)
        for k, value in zip(component, numerators):
            d[k] = Fraction(value // common)

    return CartanCore(C=matrix, d=tuple(int(x) for x in d))


@dataclass(frozen=True)
class CartanRealization:
    """
    非退化な拡張Cartan行列

    Cfull の左上 r×r ブロックは C、i > r, j <= r の成分は拡張行、
    Cfull_ij = (D/d_i) Cfull_ji (j > r, i <= r)、右下ブロックは 0。
    """

    core: CartanCore
    extension: IntMatrix
    Cfull: IntMatrix
    dfull: Tuple[int, ...]
    D: int
    auto_extended: bool = field(default=False, compare=False)

    @property
    def r(self) -> int:
        return self.core.r

    @property
    def rtilde(self) -> int:
        return len(self.Cfull)

    def entry(self, i: int, j: int) -> int:
        """Cfull_ij with 1-based indices."""
        if not (1 <= i <= self.rtilde and 1 <= j <= self.rtilde):
            raise IndexOutOfRange(f"Cartan entry ({i}, {j}) outside 1..{self.rtilde}")
        return self.Cfull[i - 1][j - 1]

    @cached_property
    def matrix(self) -> sp.ImmutableMatrix:
        return sp.ImmutableMatrix(self.Cfull)

    @cached_property
    def inverse(self) -> sp.ImmutableMatrix:
        return self.matrix.inv()

    def pairing(self, weight: Sequence[Any], i: int) -> Any:
        """⟨λ|α_i^∨⟩: the i-th fundamental-weight coordinate of λ."""
        if len(weight) != self.rtilde:
            raise BadShape(
                f"weight has {len(weight)} coordinates, expected {self.rtilde}"
            )
        if not 1 <= i <= self.rtilde:
            raise IndexOutOfRange(f"coroot index {i} outside 1..{self.rtilde}")
        return weight[i - 1]

    def simple_root(self, i: int) -> Tuple[int, ...]:
        """α_i in fundamental-weight coordinates (column i of Cfull)."""
        if not 1 <= i <= self.rtilde:
            raise IndexOutOfRange(f"root index {i} outside 1..{self.rtilde}")
        return tuple(row[i - 1] for row in self.Cfull)

    def fundamental_coweights(self) -> sp.ImmutableMatrix:
        """Row j holds ω_j^∨ in the simple coroot basis."""
        return self.inverse

    def is_type_a(self) -> bool:
        return self.rtilde == self.r and self.Cfull == type_a_matrix(self.r + 1)

    def to_dict(self) -> Dict[str, Any]:
        data = self.core.to_dict()
        data.update(
            {
                "extension": [list(row) for row in self.extension],
                "auto_extended": self.auto_extended,
                "rtilde": self.rtilde,
                "Cfull": [list(row) for row in self.Cfull],
                "dfull": list(self.dfull),
                "D": self.D,
            }
        )
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CartanRealization":
        core = validate_core(data["C"])
        extension = data.get("extension")
        if data.get("auto_extended") or not extension:
            extension = None
        return extend(core, extension)


def _assemble(core: CartanCore, extension: IntMatrix, D: int) -> IntMatrix:
    r = core.r
    size = r + len(extension)
    full = [[0] * size for _ in range(size)]
    for i in range(r):
        for j in range(r):
            full[i][j] = core.C[i][j]
    for a, row in enumerate(extension):
        for j in range(r):
            full[r + a][j] = row[j]
            full[j][r + a] = (D // core.d[j]) * row[j]
    return tuple(tuple(row) for row in full)


def _is_nondegenerate(full: IntMatrix) -> bool:
    return sp.Matrix(full).det() != 0


def extend(core: CartanCore, extension: Optional[Any] = None) -> CartanRealization:
    """
    拡張実現を構成する

    Args:
        core: 検証済みのCartanデータ
        extension: (rtilde - r)×r 整数行列。省略時は単位行を辞書式で最初の
            非退化な列集合に置く

    Raises:
        BadShape: 拡張行列の形が合わない
        DegenerateRealization: 指定された拡張で Cfull が退化する
    """
    r = core.r
    extra = r - sp.Matrix(core.C).rank()
    D = math.lcm(*core.d)
    dfull = core.d + (D,) * extra

    if extension is None:
        if extra == 0:
            return CartanRealization(core, (), core.C, dfull, D, auto_extended=False)
        for columns in itertools.combinations(range(r), extra):
            rows = tuple(
                tuple(1 if j == col else 0 for j in range(r)) for col in columns
            )
            full = _assemble(core, rows, D)
            if _is_nondegenerate(full):
                return CartanRealization(core, rows, full, dfull, D, auto_extended=True)
        raise DegenerateRealization("no unit-row extension is nondegenerate")

    try:
        rows = tuple(tuple(row) for row in extension)
    except TypeError as e:
        raise BadShape("extension must be a sequence of rows") from e
    if len(rows) != extra or any(len(row) != r for row in rows):
        raise BadShape(
            f"extension must be {extra}x{r}",
            details={"shape": [len(row) for row in rows]},
        )
    if not all(_is_integer(x) for row in rows for x in row):
        raise BadShape("extension entries must be integers")
    rows = tuple(tuple(int(x) for x in row) for row in rows)
    full = _assemble(core, rows, D)
    if not _is_nondegenerate(full):
        raise DegenerateRealization(
            "extended Cartan matrix is singular",
            details={"extension": [list(row) for row in rows]},
        )
    return CartanRealization(core, rows, full, dfull, D, auto_extended=False)


def type_a_matrix(n: int) -> IntMatrix:
    """Cartan matrix of SL_n (rank n-1)."""
    size = n - 1
    return tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(size))
        for i in range(size)
    )


def type_a(n: int) -> CartanRealization:
    if n < 2:
        raise IndexOutOfRange(f"SL_n needs n >= 2, got {n}")
    return extend(validate_core(type_a_matrix(n)))


def from_preset(name: str, extension: Optional[Any] = None) -> CartanRealization:
    if name not in PRESETS:
        raise BadShape(
            f"unknown preset {name!r}", details={"presets": sorted(PRESETS)}
        )
    return extend(validate_core(PRESETS[name]), extension)
