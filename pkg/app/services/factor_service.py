"""
Factor service - Chamber Ansatz の指数行列

Ψ と、X座標から A座標への計算に現れる行列 D, E, F を構成し、
D·E·F = B + M を検証する。トーラス成分 k > m では |i_k| = k - m,
ε_k = +1 とする (DoubleWord.weight / epsilon の規約)。
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import sympy as sp

from app.models.report import CheckReport
from app.models.seed import DoubleWord, build_ensemble
from app.utils.logging import get_logger
from app.utils.matrices import matrix_to_json, rational_pair

logger = get_logger("factor_service")


def psi_entry(word: DoubleWord, j: int, k: int) -> sp.Rational:
    """Ψ_jk = -ε_jε_k([j=k] + [j=k⁺]) + ½C_{|i_k|,|i_j|}(ε_j(ε_{k⁺}-ε_k)[k⁺<j] - (1+ε_jε_k)[k<j<k⁺])"""
    kp = word.successor(k)
    ej, ek, ekp = word.epsilon(j), word.epsilon(k), word.epsilon(kp)
    value = sp.Integer(-ej * ek * (int(j == k) + int(j == kp)))
    bracket = ej * (ekp - ek) * int(kp < j) - (1 + ej * ek) * int(k < j < kp)
    if bracket:
        c = word.realization.entry(word.weight(k), word.weight(j))
        value += sp.Rational(c, 2) * bracket
    return value


def build_psi(word: DoubleWord) -> sp.ImmutableMatrix:
    """Rows j = 1..m, columns k ∈ I."""
    indices = word.index_set
    return sp.ImmutableMatrix(
        word.m, len(indices), [psi_entry(word, j, k) for j in range(1, word.m + 1) for k in indices]
    )


def torus_exponent(word: DoubleWord, a: int, k: int) -> sp.Rational:
    """½(ε_{k⁺} - ε_k) on indices k of weight a, zero elsewhere."""
    if word.weight(k) != a:
        return sp.Integer(0)
    return sp.Rational(word.epsilon(word.successor(k)) - word.epsilon(k), 2)


@dataclass(frozen=True)
class FactorMatrices:
    """D (I×スロット), E (スロット²), F (スロット×I)。スロットは 1..m+rtilde"""

    Psi: sp.ImmutableMatrix
    D: sp.ImmutableMatrix
    E: sp.ImmutableMatrix
    F: sp.ImmutableMatrix

    def product(self) -> sp.ImmutableMatrix:
        return self.D * self.E * self.F

    def to_dict(self) -> Dict[str, Any]:
        return {
            "Psi": matrix_to_json(self.Psi),
            "D": matrix_to_json(self.D),
            "E": matrix_to_json(self.E),
            "F": matrix_to_json(self.F),
        }


def build_def(word: DoubleWord) -> FactorMatrices:
    """
    D, E, F を構成する

    D_jk = ([j⁺ = k] - [j = k]) ε_k (k⁺ がない場合はスロット m + |i_j| を使う)
    E_jk = δ_jk [j <= m] + C_{|i_k|,|i_j|} [j, k > m]
    F_jk = [j <= m] Ψ_jk + [j > m] ½(ε_{k⁺} - ε_k)[|i_k| = j - m]
    """
    indices = word.index_set
    m = word.m
    slots = m + word.rtilde
    realization = word.realization

    D = sp.zeros(len(indices), slots)
    for row, j in enumerate(indices):
        target = word.slot_successor(j)
        D[row, target - 1] += word.epsilon(target)
        if j > 0:
            D[row, j - 1] -= word.epsilon(j)

    E = sp.zeros(slots, slots)
    for j in range(1, slots + 1):
        for k in range(1, slots + 1):
            if j <= m:
                E[j - 1, k - 1] = int(j == k)
            elif k > m:
                E[j - 1, k - 1] = realization.entry(k - m, j - m)

    psi = build_psi(word)
    F = sp.zeros(slots, len(indices))
    for j in range(1, slots + 1):
        for col, k in enumerate(indices):
            if j <= m:
                F[j - 1, col] = psi[j - 1, col]
            else:
                F[j - 1, col] = torus_exponent(word, j - m, k)

    return FactorMatrices(
        Psi=psi,
        D=sp.ImmutableMatrix(D),
        E=sp.ImmutableMatrix(E),
        F=sp.ImmutableMatrix(F),
    )


def chamber_exponents(word: DoubleWord) -> sp.ImmutableMatrix:
    """
    Chamber Ansatz の指数

    行 j <= m は Ψ_j、行 m+a は ½(ε_{k⁺} - ε_k) (|i_k| = a)。t_j は
    ∏_k A_k(x')^{行 j} で与えられる。
    """
    return build_def(word).F


def oracle_def(word: DoubleWord, instance: Optional[Dict[str, Any]] = None) -> CheckReport:
    """D·E·F = B + M を成分ごとに厳密に比較する"""
    instance = dict(instance or {"letters": list(word.letters)})
    product = build_def(word).product()
    btilde = build_ensemble(word).Btilde
    indices = word.index_set
    for row, j in enumerate(indices):
        for col, k in enumerate(indices):
            if product[row, col] != btilde[row, col]:
                logger.warning(
                    "D*E*F differs from B + M",
                    extra={"letters": list(word.letters), "entry": [j, k]},
                )
                return CheckReport(
                    "def-oracle",
                    instance,
                    False,
                    {
                        "entry": [j, k],
                        "product": rational_pair(product[row, col]),
                        "btilde": rational_pair(btilde[row, col]),
                    },
                )
    return CheckReport("def-oracle", instance, True, {"size": len(indices)})
