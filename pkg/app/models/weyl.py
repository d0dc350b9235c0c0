"""
Weyl group - 基本ウェイト座標上の厳密なWeyl群演算

s_i は β ↦ β - ⟨β|α_i^∨⟩ α_i として rtilde 次元の整数行列で作用する。
長さと正準簡約語(辞書式最小)は降下集合から求める。
"""

import operator
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, List, Sequence, Tuple

import sympy as sp

from app.models.cartan import CartanRealization
from app.utils.error_handler import IndexOutOfRange


@dataclass(frozen=True)
class WeylElement:
    """Weyl群の元 (ω座標への作用行列で同一視する)"""

    realization: CartanRealization = field(repr=False)
    mat: sp.ImmutableMatrix

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.realization, self.mat * other.mat)

    @cached_property
    def inverse_mat(self) -> sp.ImmutableMatrix:
        return self.mat.inv()

    def inverse(self) -> "WeylElement":
        return WeylElement(self.realization, self.inverse_mat)

    def is_identity(self) -> bool:
        return self.mat == sp.eye(self.realization.rtilde)

    def apply(self, weight: Sequence[int]) -> Tuple[int, ...]:
        """Act on a weight given in fundamental-weight coordinates."""
        image = self.mat * sp.Matrix(list(weight))
        return tuple(image)

    def _sends_negative(self, mat: sp.MatrixBase, i: int) -> bool:
        realization = self.realization
        root = sp.Matrix(realization.simple_root(i))
        coords = realization.inverse * (mat * root)
        return all(x <= 0 for x in coords)

    def is_right_descent(self, i: int) -> bool:
        """ℓ(w s_i) < ℓ(w), i.e. w(α_i) is a negative root."""
        _check_letter(self.realization, i)
        return self._sends_negative(self.mat, i)

    def is_left_descent(self, i: int) -> bool:
        """ℓ(s_i w) < ℓ(w), i.e. w^{-1}(α_i) is a negative root."""
        _check_letter(self.realization, i)
        return self._sends_negative(self.inverse_mat, i)

    @cached_property
    def word(self) -> Tuple[int, ...]:
        return length_and_reduce(self)[1]

    @property
    def length(self) -> int:
        return len(self.word)

    def __repr__(self) -> str:
        return f"WeylElement(word={self.word})"


def _check_letter(realization: CartanRealization, i: int) -> None:
    try:
        operator.index(i)
    except TypeError:
        raise IndexOutOfRange(f"reflection index {i!r} is not an integer")
    if not 1 <= i <= realization.r:
        raise IndexOutOfRange(f"reflection index {i} outside 1..{realization.r}")


@lru_cache(maxsize=None)
def _reflection_matrix(realization: CartanRealization, i: int) -> sp.ImmutableMatrix:
    size = realization.rtilde
    column = sp.Matrix(realization.simple_root(i))
    unit = sp.zeros(1, size)
    unit[0, i - 1] = 1
    return sp.ImmutableMatrix(sp.eye(size) - column * unit)


def identity(realization: CartanRealization) -> WeylElement:
    return WeylElement(realization, sp.ImmutableMatrix(sp.eye(realization.rtilde)))


def simple_reflection(realization: CartanRealization, i: int) -> WeylElement:
    """s_i = Id - c_i e_i^T, c_i the i-th column of Cfull"""
    _check_letter(realization, i)
    return WeylElement(realization, _reflection_matrix(realization, int(i)))


def apply_word(realization: CartanRealization, word: Iterable[int]) -> WeylElement:
    """w = s_{i_1} ... s_{i_n}"""
    mat = sp.ImmutableMatrix(sp.eye(realization.rtilde))
    for i in word:
        mat = mat * simple_reflection(realization, i).mat
    return WeylElement(realization, mat)


def length_and_reduce(element: WeylElement) -> Tuple[int, Tuple[int, ...]]:
    """
    降下アルゴリズムで長さと正準簡約語を求める

    毎回最小の左降下 i を取り出し s_i を左から剥がすので、得られる語は
    辞書式最小の簡約語になる。
    """
    realization = element.realization
    current = element.mat
    current_inv = element.inverse_mat
    identity_mat = sp.eye(realization.rtilde)
    word: List[int] = []
    while current != identity_mat:
        for i in range(1, realization.r + 1):
            if element._sends_negative(current_inv, i):
                s = simple_reflection(realization, i).mat
                current = s * current
                current_inv = current_inv * s
                word.append(i)
                break
        else:
            raise RuntimeError("no left descent found for a non-identity element")
    return len(word), tuple(word)


def is_reduced_word(realization: CartanRealization, word: Sequence[int]) -> bool:
    """Each letter must lengthen the prefix: ℓ(w s_i) = ℓ(w) + 1."""
    current = identity(realization)
    for i in word:
        if current.is_right_descent(i):
            return False
        current = current * simple_reflection(realization, i)
    return True


def inverse_word(word: Sequence[int]) -> Tuple[int, ...]:
    return tuple(reversed(word))


def prefix(realization: CartanRealization, word: Sequence[int], k: int) -> WeylElement:
    """s_{i_1} ... s_{i_k}"""
    return apply_word(realization, word[:k])


def suffix_inverse(
    realization: CartanRealization, word: Sequence[int], k: int
) -> WeylElement:
    """s_{i_n} ... s_{i_{k+1}}: the letters after position k, read backwards."""
    return apply_word(realization, inverse_word(word[k:]))
