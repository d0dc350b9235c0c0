"""
Seed - 二重簡約語とそのシード

二重簡約語 i の添字集合 I = (-rtilde..-1, 1..m) 上の組合せ論 (k⁺, ε_k,
|i_k|)、交換行列 B、凍結ブロックの補正 M、および B̃ = B + M を扱う。

添字の規約:
    k < 0:          i_k = k, |i_k| = -k, ε_k = -1
    1 <= k <= m:    文字 i_k, ε_k = sign(i_k)
    k > m:          |i_k| = k - m, ε_k = +1 (トーラス成分と番兵 m+1)
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy as sp

from app.models.cartan import CartanRealization
from app.models.weyl import WeylElement, apply_word, is_reduced_word
from app.utils.error_handler import (
    BadShape,
    IndexOutOfRange,
    NonIntegerBtilde,
    NotReduced,
)
from app.utils.logging import get_logger
from app.utils.matrices import is_integral, matrix_to_json, rational_pair

logger = get_logger("seed")


@dataclass(frozen=True)
class DoubleWord:
    """二重簡約語 (u の簡約語と v の簡約語のシャッフル)"""

    realization: CartanRealization = field(repr=False)
    letters: Tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.letters)

    @property
    def rtilde(self) -> int:
        return self.realization.rtilde

    @property
    def negative_word(self) -> Tuple[int, ...]:
        return tuple(-x for x in self.letters if x < 0)

    @property
    def positive_word(self) -> Tuple[int, ...]:
        return tuple(x for x in self.letters if x > 0)

    @cached_property
    def u(self) -> WeylElement:
        return apply_word(self.realization, self.negative_word)

    @cached_property
    def v(self) -> WeylElement:
        return apply_word(self.realization, self.positive_word)

    @cached_property
    def index_set(self) -> Tuple[int, ...]:
        return tuple(range(-self.rtilde, 0)) + tuple(range(1, self.m + 1))

    @cached_property
    def _positions(self) -> Dict[int, int]:
        return {k: pos for pos, k in enumerate(self.index_set)}

    def position(self, k: int) -> int:
        """Row/column of index k in I-indexed matrices."""
        try:
            return self._positions[k]
        except KeyError:
            raise IndexOutOfRange(f"index {k} not in I", details={"index": k})

    def weight(self, k: int) -> int:
        """|i_k|, including the torus slots k > m."""
        if -self.rtilde <= k < 0:
            return -k
        if 1 <= k <= self.m:
            return abs(self.letters[k - 1])
        if self.m < k <= self.m + self.rtilde:
            return k - self.m
        raise IndexOutOfRange(f"index {k} outside -{self.rtilde}..{self.m + self.rtilde}")

    def epsilon(self, k: int) -> int:
        if -self.rtilde <= k < 0:
            return -1
        if 1 <= k <= self.m:
            return 1 if self.letters[k - 1] > 0 else -1
        if self.m < k <= self.m + self.rtilde:
            return 1
        raise IndexOutOfRange(f"index {k} outside -{self.rtilde}..{self.m + self.rtilde}")

    def successor(self, k: int) -> int:
        """k⁺: the next index of the same weight, or the sentinel m+1."""
        self.position(k)
        target = self.weight(k)
        for index in range(max(k + 1, 1), self.m + 1):
            if abs(self.letters[index - 1]) == target:
                return index
        return self.m + 1

    def slot_successor(self, k: int) -> int:
        """k⁺ with the sentinel replaced by the torus slot m + |i_k|."""
        nxt = self.successor(k)
        return nxt if nxt <= self.m else self.m + self.weight(k)

    def is_frozen(self, k: int) -> bool:
        return k < 0 or self.successor(k) > self.m

    def u_upto(self, k: int) -> WeylElement:
        """u_{≤k}: product of s_{|i_l|} over negative letters at positions l ≤ k."""
        self.position(k)
        letters = [-x for x in self.letters[: max(k, 0)] if x < 0]
        return apply_word(self.realization, letters)

    def v_after(self, k: int) -> WeylElement:
        """v_{>k} = (s_{i_l} over positive letters l > k)^{-1}; v^{-1} for k < 0."""
        self.position(k)
        letters = [x for x in self.letters[max(k, 0):] if x > 0]
        return apply_word(self.realization, tuple(reversed(letters)))

    def a_minor_labels(self) -> List[Tuple[int, int, WeylElement, WeylElement]]:
        """(k, |i_k|, u_{≤k}, v_{>k}) for every k in I."""
        return [(k, self.weight(k), self.u_upto(k), self.v_after(k)) for k in self.index_set]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "letters": list(self.letters),
            "u": list(self.u.word),
            "v": list(self.v.word),
            "I": list(self.index_set),
        }


def parse_letters(text: str) -> Tuple[int, ...]:
    """Parse "-1,-2,1,2" (empty string gives the empty word)."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as e:
        raise BadShape(f"cannot parse word {text!r}") from e


def parse_double_word(realization: CartanRealization, letters: Sequence[int]) -> DoubleWord:
    """
    二重簡約語を検証して構築する

    Raises:
        IndexOutOfRange: 0 または |文字| > r
        NotReduced: 負の文字列 (u) または正の文字列 (v) が簡約でない
    """
    letters = tuple(int(x) for x in letters)
    for x in letters:
        if x == 0 or abs(x) > realization.r:
            raise IndexOutOfRange(
                f"letter {x} must be nonzero with |letter| <= {realization.r}",
                details={"letter": x},
            )
    word = DoubleWord(realization, letters)
    if not is_reduced_word(realization, word.negative_word):
        raise NotReduced("negative", word.negative_word)
    if not is_reduced_word(realization, word.positive_word):
        raise NotReduced("positive", word.positive_word)
    return word


@dataclass(frozen=True)
class Seed:
    """シード: 添字、凍結フラグ、交換行列 B、対称化子"""

    indices: Tuple[int, ...]
    frozen: Tuple[bool, ...]
    weights: Tuple[int, ...]
    B: sp.ImmutableMatrix
    d: Tuple[int, ...]

    def __post_init__(self):
        size = len(self.indices)
        if self.B.shape != (size, size) or len(self.frozen) != size or len(self.d) != size:
            raise BadShape(
                "seed data sizes disagree",
                details={"indices": size, "B": list(self.B.shape)},
            )

    def position(self, k: int) -> int:
        try:
            return self.indices.index(k)
        except ValueError:
            raise IndexOutOfRange(f"index {k} not in seed", details={"index": k})

    def b(self, j: int, k: int) -> sp.Rational:
        return self.B[self.position(j), self.position(k)]

    def d_of(self, k: int) -> int:
        return self.d[self.position(k)]

    def is_frozen(self, k: int) -> bool:
        return self.frozen[self.position(k)]

    @property
    def unfrozen(self) -> Tuple[int, ...]:
        return tuple(k for k, f in zip(self.indices, self.frozen) if not f)

    def with_matrix(self, B: sp.MatrixBase) -> "Seed":
        return Seed(self.indices, self.frozen, self.weights, sp.ImmutableMatrix(B), self.d)

    def invariant_violations(self) -> List[str]:
        """Check skew-symmetrizability, half-integrality and unfrozen-row rank."""
        problems = []
        size = len(self.indices)
        for a in range(size):
            for c in range(size):
                value = self.B[a, c]
                if value * self.d[c] != -self.B[c, a] * self.d[a]:
                    problems.append(f"not skew-symmetrizable at {self.indices[a], self.indices[c]}")
                if sp.Rational(2 * value).q != 1:
                    problems.append(f"2*b not integral at {self.indices[a], self.indices[c]}")
                if sp.Rational(value).q != 1 and not (self.frozen[a] and self.frozen[c]):
                    problems.append(f"non-integral entry off the frozen block at {self.indices[a], self.indices[c]}")
        rows = [a for a in range(size) if not self.frozen[a]]
        if rows and self.B.extract(rows, list(range(size))).rank() != len(rows):
            problems.append("unfrozen rows are not of full rank")
        return problems

    def to_dict(self) -> Dict[str, Any]:
        return {
            "I": list(self.indices),
            "frozen": list(self.frozen),
            "weights": list(self.weights),
            "B": matrix_to_json(self.B),
            "d": list(self.d),
        }

    @classmethod
    def from_matrix(
        cls,
        B: Any,
        frozen: Optional[Sequence[bool]] = None,
        d: Optional[Sequence[int]] = None,
        indices: Optional[Sequence[int]] = None,
    ) -> "Seed":
        """語に由来しない一般のシードを作る (既定: 全て非凍結, d = 1, 添字 1..n)"""
        matrix = sp.ImmutableMatrix(B)
        size = matrix.rows
        indices = tuple(indices) if indices is not None else tuple(range(1, size + 1))
        frozen = tuple(frozen) if frozen is not None else (False,) * size
        d = tuple(d) if d is not None else (1,) * size
        return cls(indices, frozen, (0,) * size, matrix, d)


def exchange_entry(word: DoubleWord, j: int, k: int) -> sp.Rational:
    """b_jk from the six-bracket formula."""
    m = word.m
    jp, kp = word.successor(j), word.successor(k)
    ej, ek = word.epsilon(j), word.epsilon(k)
    ejp, ekp = word.epsilon(jp), word.epsilon(kp)
    brackets = (
        ej * (j == kp)
        - ek * (jp == k)
        + ej * (k < j < kp and j > 0)
        - ejp * (k < jp < kp and jp <= m)
        - ek * (j < k < jp and k > 0)
        + ekp * (j < kp < jp and kp <= m)
    )
    if brackets == 0:
        return sp.Integer(0)
    coefficient = word.realization.entry(word.weight(k), word.weight(j))
    return sp.Rational(coefficient, 2) * brackets


def build_seed(word: DoubleWord) -> Seed:
    """Word seed Σ_i on I = (-rtilde..-1, 1..m)."""
    indices = word.index_set
    B = sp.ImmutableMatrix(
        len(indices),
        len(indices),
        [exchange_entry(word, j, k) for j in indices for k in indices],
    )
    weights = tuple(word.weight(k) for k in indices)
    dfull = word.realization.dfull
    return Seed(
        indices=indices,
        frozen=tuple(word.is_frozen(k) for k in indices),
        weights=weights,
        B=B,
        d=tuple(dfull[w - 1] for w in weights),
    )


@dataclass(frozen=True)
class EnsembleMatrices:
    """B, M, B̃ = B + M と det B̃"""

    seed: Seed
    M: sp.ImmutableMatrix
    Btilde: sp.ImmutableMatrix
    det: sp.Rational

    @property
    def B(self) -> sp.ImmutableMatrix:
        return self.seed.B

    def to_dict(self) -> Dict[str, Any]:
        data = self.seed.to_dict()
        data.update(
            {
                "M": matrix_to_json(self.M),
                "Btilde": matrix_to_json(self.Btilde),
                "detBtilde": rational_pair(self.det),
            }
        )
        return data


def frozen_shift(word: DoubleWord) -> sp.ImmutableMatrix:
    """M_jk = ½ C_{|i_k|,|i_j|} ([j⁺ > m and k⁺ > m] + [j < 0 and k < 0])"""
    indices = word.index_set
    m = word.m

    def entry(j: int, k: int) -> sp.Rational:
        count = int(word.successor(j) > m and word.successor(k) > m) + int(j < 0 and k < 0)
        if count == 0:
            return sp.Integer(0)
        return sp.Rational(word.realization.entry(word.weight(k), word.weight(j)), 2) * count

    return sp.ImmutableMatrix(
        len(indices), len(indices), [entry(j, k) for j in indices for k in indices]
    )


def build_ensemble(word: DoubleWord, seed: Optional[Seed] = None) -> EnsembleMatrices:
    """
    B̃ = B + M を構成する

    Raises:
        NonIntegerBtilde: B̃ に非整数成分がある (式の転記ミスを意味する)
    """
    seed = seed or build_seed(word)
    M = frozen_shift(word)
    Btilde = sp.ImmutableMatrix(seed.B + M)
    if not is_integral(Btilde):
        logger.error("Non-integral Btilde", extra={"letters": list(word.letters)})
        raise NonIntegerBtilde(
            "B + M has non-integer entries", details={"letters": list(word.letters)}
        )
    return EnsembleMatrices(seed=seed, M=M, Btilde=Btilde, det=Btilde.det())


def empty_word(realization: CartanRealization) -> DoubleWord:
    return DoubleWord(realization, ())
