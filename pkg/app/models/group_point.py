"""
GroupPoint - SL_n (および随伴型代表の GL_n) の厳密な点
"""

from dataclasses import dataclass
from typing import Any, Dict

import sympy as sp

from app.utils.error_handler import BadShape
from app.utils.matrices import matrix_to_json


@dataclass(frozen=True)
class GroupPoint:
    """
    有理数成分の n×n 行列

    adjoint=False のとき det = 1 を要求する (SL_n)。余ウェイトトーラスを
    含む随伴型の点は GL_n の代表として adjoint=True で保持する。
    """

    n: int
    mat: sp.ImmutableMatrix
    adjoint: bool = False

    def __post_init__(self):
        if self.mat.shape != (self.n, self.n):
            raise BadShape(
                f"expected a {self.n}x{self.n} matrix",
                details={"shape": list(self.mat.shape)},
            )
        if not self.adjoint and self.mat.det() != 1:
            raise BadShape("SL_n point must have determinant 1")

    @classmethod
    def identity(cls, n: int, adjoint: bool = False) -> "GroupPoint":
        return cls(n, sp.ImmutableMatrix(sp.eye(n)), adjoint)

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        if self.n != other.n:
            raise BadShape(f"cannot multiply points of SL_{self.n} and SL_{other.n}")
        return GroupPoint(self.n, self.mat * other.mat, self.adjoint or other.adjoint)

    def inverse(self) -> "GroupPoint":
        return GroupPoint(self.n, self.mat.inv(), self.adjoint)

    def transpose(self) -> "GroupPoint":
        return GroupPoint(self.n, self.mat.T, self.adjoint)

    def leading_minor(self, i: int) -> sp.Rational:
        return self.mat[:i, :i].det() if i > 0 else sp.Integer(1)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "mat": matrix_to_json(self.mat)}


@dataclass(frozen=True)
class GaussParts:
    """g = [g]₋ [g]₀ [g]₊"""

    lower: sp.ImmutableMatrix
    diagonal: sp.ImmutableMatrix
    upper: sp.ImmutableMatrix

    def product(self) -> sp.ImmutableMatrix:
        return self.lower * self.diagonal * self.upper
