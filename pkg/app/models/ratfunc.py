"""
RatFunc - 有理数係数の多変数有理関数

分子・分母を sympy の Poly (係数体 QQ、固定した生成元) で保持し、常に
既約かつ分母の grlex 先頭係数が 1 の正準形に正規化する。正準形が一意
なので、等価判定は係数比較で済む。
"""

from typing import Any, Mapping, Optional, Sequence, Union

import sympy as sp

from app.utils.matrices import to_rational

Number = Union[int, sp.Rational]


def _canonical(numer: sp.Poly, denom: sp.Poly):
    if denom.is_zero:
        raise ZeroDivisionError("rational function with zero denominator")
    if numer.is_zero:
        return numer, denom.one
    common = numer.gcd(denom)
    if not common.is_one:
        numer = numer.exquo(common)
        denom = denom.exquo(common)
    lead = denom.LC(order="grlex")
    if lead != 1:
        numer = numer.quo_ground(lead)
        denom = denom.quo_ground(lead)
    return numer, denom


class RatFunc:
    """既約な有理関数 numer/denom"""

    __slots__ = ("numer", "denom")

    def __init__(self, numer: sp.Poly, denom: Optional[sp.Poly] = None):
        if denom is None:
            denom = numer.one
        self.numer, self.denom = _canonical(numer, denom)

    @classmethod
    def constant(cls, value: Any, gens: Sequence[sp.Symbol]) -> "RatFunc":
        return cls(sp.Poly(to_rational(value), *gens, domain=sp.QQ))

    @classmethod
    def variable(cls, symbol: sp.Symbol, gens: Sequence[sp.Symbol]) -> "RatFunc":
        return cls(sp.Poly(symbol, *gens, domain=sp.QQ))

    @classmethod
    def from_expr(cls, expr: Any, gens: Sequence[sp.Symbol]) -> "RatFunc":
        numer, denom = sp.fraction(sp.together(sp.sympify(expr)))
        return cls(
            sp.Poly(numer, *gens, domain=sp.QQ), sp.Poly(denom, *gens, domain=sp.QQ)
        )

    @property
    def gens(self):
        return self.numer.gens

    def _coerce(self, other: Any) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        return RatFunc.constant(other, self.gens)

    def __add__(self, other: Any) -> "RatFunc":
        other = self._coerce(other)
        return RatFunc(
            self.numer * other.denom + other.numer * self.denom,
            self.denom * other.denom,
        )

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.numer, self.denom)

    def __sub__(self, other: Any) -> "RatFunc":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "RatFunc":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "RatFunc":
        other = self._coerce(other)
        return RatFunc(self.numer * other.numer, self.denom * other.denom)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RatFunc":
        other = self._coerce(other)
        if other.numer.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.numer * other.denom, self.denom * other.numer)

    def __rtruediv__(self, other: Any) -> "RatFunc":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "RatFunc":
        exponent = int(exponent)
        if exponent >= 0:
            return RatFunc(self.numer**exponent, self.denom**exponent)
        if self.numer.is_zero:
            raise ZeroDivisionError("negative power of zero")
        return RatFunc(self.denom ** (-exponent), self.numer ** (-exponent))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatFunc):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError, sp.SympifyError):
                return NotImplemented
        return self.numer == other.numer and self.denom == other.denom

    def __hash__(self) -> int:
        return hash((self.numer.as_expr(), self.denom.as_expr()))

    def is_zero(self) -> bool:
        return self.numer.is_zero

    def is_laurent(self) -> bool:
        """Laurent polynomial iff the reduced denominator is a monomial."""
        return self.denom.is_monomial

    def is_monomial(self) -> bool:
        return self.numer.is_monomial and self.denom.is_monomial

    def evaluate(self, values: Mapping[sp.Symbol, Any]) -> sp.Rational:
        """Exact value at a rational point."""
        point = {sym: to_rational(values[sym]) for sym in self.gens}
        numer = self.numer.as_expr().xreplace(point)
        denom = self.denom.as_expr().xreplace(point)
        if denom == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return sp.Rational(numer) / sp.Rational(denom)

    def as_expr(self) -> sp.Expr:
        return self.numer.as_expr() / self.denom.as_expr()

    def __repr__(self) -> str:
        return f"RatFunc({self.as_expr()})"

    def __str__(self) -> str:
        return str(self.as_expr())
