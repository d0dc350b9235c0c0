"""
SL_n lab - A_{n-1} 型での群レベルの構成と恒等式の厳密検証

生成元 x_{±i}(t)、コルートトーラス、Weyl群の代表元 s̄_i / s̿_i、Gauss分解、
一般化小行列式、対合 θ/ι/σ、ツイスト写像 ζ^{u,v}、射影 π_±、およびそれらに
関する恒等式の検証を有理数上で厳密に行う。

Weyl群の元は WeylElement (正準簡約語) か、簡約語そのもの (整数の列) で渡す。
"""

import operator
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from app.models.cartan import CartanRealization, type_a
from app.models.group_point import GaussParts, GroupPoint
from app.models.report import CheckReport
from app.models.seed import DoubleWord, build_ensemble
from app.models.weyl import WeylElement, apply_word, is_reduced_word, simple_reflection
from app.services.factor_service import build_def, chamber_exponents
from app.utils.error_handler import (
    BadShape,
    IndexOutOfRange,
    NonIntegerExponent,
    NotInCell,
    NotInG0,
    NotReduced,
    PreconditionViolated,
)
from app.utils.logging import get_logger
from app.utils.matrices import rational_pair, to_rational
from app.utils.sampling import random_positive_rational, random_positive_vector, trial_rng

logger = get_logger("sln_lab")

WordLike = Union[WeylElement, Sequence[int]]
REPRESENTATIVES = ("bar", "doublebar")
INVOLUTIONS = ("theta", "iota", "sigma")


def _word(w: WordLike) -> Tuple[int, ...]:
    if isinstance(w, WeylElement):
        return w.word
    return tuple(int(x) for x in w)


def _check_generator(n: int, i: int) -> int:
    try:
        operator.index(i)
    except TypeError:
        raise IndexOutOfRange(f"generator index {i!r} is not an integer")
    if not 1 <= abs(i) <= n - 1:
        raise IndexOutOfRange(f"generator index {i} needs 1 <= |i| <= {n - 1}")
    return abs(i)


def _nonzero(value: Any, what: str) -> sp.Rational:
    q = to_rational(value)
    if q == 0:
        raise PreconditionViolated(f"{what} must be nonzero")
    return q


def elem(n: int, i: int, t: Any) -> GroupPoint:
    """x_i(t) = I + tE_{i,i+1} (i > 0), x_{-i}(t) = I + tE_{i+1,i}"""
    a = _check_generator(n, i)
    mat = sp.eye(n)
    if i > 0:
        mat[a - 1, a] = to_rational(t)
    else:
        mat[a, a - 1] = to_rational(t)
    return GroupPoint(n, sp.ImmutableMatrix(mat))


def coroot(n: int, i: int, t: Any) -> GroupPoint:
    """α_i^∨(t) = diag(.., t, 1/t, ..) at slots i, i+1"""
    a = _check_generator(n, i)
    t = _nonzero(t, "torus parameter")
    diagonal = [sp.Integer(1)] * n
    diagonal[a - 1] = t
    diagonal[a] = 1 / t
    return GroupPoint(n, sp.ImmutableMatrix(sp.diag(*diagonal)))


def coweight_torus(n: int, i: int, X: Any) -> GroupPoint:
    """GL_n representative of X^{ω_i^∨}: X in the first i diagonal slots."""
    a = _check_generator(n, i)
    X = _nonzero(X, "coweight parameter")
    diagonal = [X] * a + [sp.Integer(1)] * (n - a)
    return GroupPoint(n, sp.ImmutableMatrix(sp.diag(*diagonal)), adjoint=True)


@lru_cache(maxsize=None)
def _representative(n: int, word: Tuple[int, ...], variant: str) -> sp.ImmutableMatrix:
    sign = 1 if variant == "bar" else -1
    result = sp.eye(n)
    for i in word:
        a = _check_generator(n, i)
        factor = sp.eye(n)
        factor[a - 1, a - 1] = 0
        factor[a, a] = 0
        factor[a - 1, a] = -sign
        factor[a, a - 1] = sign
        result = result * factor
    return sp.ImmutableMatrix(result)


def weyl_rep(n: int, w: WordLike, variant: str = "bar") -> GroupPoint:
    """
    Weyl群の代表元 w̄ (bar) / w̿ (doublebar)

    s̄_i = x_i(-1) x_{-i}(1) x_i(-1)、s̿_i = s̄_i^{-1}。簡約語に沿った積は
    組みひも関係により語の取り方に依らない。
    """
    if variant not in REPRESENTATIVES:
        raise BadShape(f"unknown representative {variant!r}")
    return GroupPoint(n, _representative(n, _word(w), variant))


def _bar(n: int, w: WordLike) -> sp.ImmutableMatrix:
    return _representative(n, _word(w), "bar")


def _bar_of_inverse(n: int, w: WordLike) -> sp.ImmutableMatrix:
    """Representative of w^{-1}, read off the reversed reduced word."""
    return _representative(n, tuple(reversed(_word(w))), "bar")


def _matrix(g: Union[GroupPoint, sp.MatrixBase]) -> sp.ImmutableMatrix:
    return g.mat if isinstance(g, GroupPoint) else sp.ImmutableMatrix(g)


def gauss(g: Union[GroupPoint, sp.MatrixBase]) -> GaussParts:
    """
    Gauss分解 g = [g]₋[g]₀[g]₊ (ピボットなしの厳密なLDU)

    Raises:
        NotInG0: 最初に 0 になる主小行列式の番号付き
    """
    work = sp.Matrix(_matrix(g))
    size = work.rows
    lower = sp.eye(size)
    upper = sp.eye(size)
    pivots = []
    for p in range(size):
        pivot = work[p, p]
        if pivot == 0:
            raise NotInG0(p + 1)
        pivots.append(pivot)
        for i in range(p + 1, size):
            lower[i, p] = work[i, p] / pivot
        for j in range(p + 1, size):
            upper[p, j] = work[p, j] / pivot
        for i in range(p + 1, size):
            factor = work[i, p] / pivot
            if factor == 0:
                continue
            for j in range(p + 1, size):
                work[i, j] -= factor * work[p, j]
    return GaussParts(
        lower=sp.ImmutableMatrix(lower),
        diagonal=sp.ImmutableMatrix(sp.diag(*pivots)),
        upper=sp.ImmutableMatrix(upper),
    )


def minor(g: GroupPoint, i: int, w: WordLike = (), wprime: WordLike = ()) -> sp.Rational:
    """Δ^{ω_i}_{w,w'}(g): leading i×i determinant of w̄^{-1} g w̄'"""
    if not 1 <= i <= g.n - 1:
        raise IndexOutOfRange(f"minor index {i} outside 1..{g.n - 1}")
    # signed permutation matrices: inverse is the transpose
    translated = _bar(g.n, w).T * g.mat * _bar(g.n, wprime)
    return translated[:i, :i].det()


def _h0(n: int) -> sp.ImmutableMatrix:
    return sp.ImmutableMatrix(sp.diag(*[(-1) ** k for k in range(n)]))


def involution(g: GroupPoint, which: str) -> GroupPoint:
    """θ(g) = h₀(gᵀ)⁻¹h₀⁻¹, ι(g) = h₀g⁻¹h₀⁻¹, σ(g) = (gᵀ)⁻¹"""
    h0 = _h0(g.n)
    if which == "theta":
        mat = h0 * g.mat.T.inv() * h0
    elif which == "iota":
        mat = h0 * g.mat.inv() * h0
    elif which == "sigma":
        mat = g.mat.T.inv()
    else:
        raise BadShape(f"unknown involution {which!r}", details={"allowed": list(INVOLUTIONS)})
    return GroupPoint(g.n, sp.ImmutableMatrix(mat), g.adjoint)


def _gauss_or_cell(mat: sp.MatrixBase, where: str) -> GaussParts:
    try:
        return gauss(mat)
    except NotInG0 as e:
        raise NotInCell(
            f"{where} has no Gaussian decomposition",
            details={"where": where, "minor_index": e.minor_index},
        ) from e


def twist(u: WordLike, v: WordLike, g: GroupPoint) -> GroupPoint:
    """
    ツイスト写像 ζ^{u,v}(x) = θ([ū⁻¹x]₋⁻¹ ū⁻¹ x (v⁻¹)‾ [x (v⁻¹)‾]₊⁻¹)

    Raises:
        NotInCell: ū⁻¹x または x(v⁻¹)‾ が G₀ にない
    """
    n = g.n
    left = _bar(n, u).T * g.mat
    right = g.mat * _bar_of_inverse(n, v)
    lower = _gauss_or_cell(left, "u^-1 x").lower
    upper = _gauss_or_cell(right, "x v^-1").upper
    core = lower.inv() * left * _bar_of_inverse(n, v) * upper.inv()
    return involution(GroupPoint(n, sp.ImmutableMatrix(core), g.adjoint), "theta")


def pi_plus(w: WordLike, x: GroupPoint) -> GroupPoint:
    """π₊(x) = ẇ[ẇ⁻¹x]₋ẇ⁻¹"""
    rep = _bar(x.n, w)
    lower = _gauss_or_cell(rep.T * x.mat, "w^-1 x").lower
    return GroupPoint(x.n, sp.ImmutableMatrix(rep * lower * rep.T), x.adjoint)


def pi_minus(w: WordLike, x: GroupPoint) -> GroupPoint:
    """π₋(x) = ẇ⁻¹[xẇ⁻¹]₊ẇ"""
    rep = _bar(x.n, w)
    upper = _gauss_or_cell(x.mat * rep.T, "x w^-1").upper
    return GroupPoint(x.n, sp.ImmutableMatrix(rep.T * upper * rep), x.adjoint)


def in_double_cell(u: WordLike, v: WordLike, g: GroupPoint) -> bool:
    """Necessary conditions for G^{u,v}: ū⁻¹g and g(v⁻¹)‾ both lie in G₀."""
    try:
        gauss(_bar(g.n, u).T * g.mat)
        gauss(g.mat * _bar_of_inverse(g.n, v))
    except NotInG0:
        return False
    return True


def _require_type_a(word: DoubleWord) -> int:
    if not word.realization.is_type_a():
        raise PreconditionViolated(
            "group-level checks need a type A realization",
            details={"C": [list(row) for row in word.realization.core.C]},
        )
    return word.realization.r + 1


def build_t_param(word: DoubleWord, t: Sequence[Any]) -> GroupPoint:
    """x_{i_1}(t_1) ⋯ x_{i_m}(t_m) t_{m+1}^{α_1^∨} ⋯ t_{m+r}^{α_r^∨}"""
    n = _require_type_a(word)
    expected = word.m + word.rtilde
    if len(t) != expected:
        raise BadShape(f"expected {expected} parameters, got {len(t)}")
    values = [_nonzero(x, "t parameter") for x in t]
    g = GroupPoint.identity(n)
    for k, letter in enumerate(word.letters):
        g = g * elem(n, letter, values[k])
    for a in range(1, word.rtilde + 1):
        g = g * coroot(n, a, values[word.m + a - 1])
    return g


def build_x_param(word: DoubleWord, X: Mapping[int, Any]) -> GroupPoint:
    """
    余ウェイトによるパラメータ付け

    X_{-r}^{ω∨} ⋯ X_{-1}^{ω∨} E_{i_1} X_1^{ω∨} ⋯ E_{i_m} X_m^{ω∨} (E_i = x_i(1))
    を GL_n の代表として返す。
    """
    n = _require_type_a(word)
    g = GroupPoint.identity(n, adjoint=True)
    for j in range(-word.rtilde, 0):
        g = g * coweight_torus(n, -j, X[j])
    for k, letter in enumerate(word.letters, start=1):
        g = g * elem(n, letter, 1) * coweight_torus(n, abs(letter), X[k])
    return g


def coweight_t_prime(word: DoubleWord, X: Mapping[int, Any]) -> List[sp.Rational]:
    """t'_k = ∏_{j<k, |i_j|=|i_k|} X_j^{ε_k} for the slots k = 1..m+r."""
    result = []
    for k in range(1, word.m + word.rtilde + 1):
        value = sp.Integer(1)
        for j in word.index_set:
            if j < k and word.weight(j) == word.weight(k):
                value *= to_rational(X[j]) ** word.epsilon(k)
        result.append(value)
    return result


def a_minors(word: DoubleWord, xprime: GroupPoint) -> Dict[int, sp.Rational]:
    """A_k(x') = Δ^{ω_{|i_k|}}_{u_{≤k}, v_{>k}}(x') for k ∈ I"""
    return {
        k: minor(xprime, word.weight(k), word.u_upto(k), word.v_after(k))
        for k in word.index_set
    }


def _power_product(bases: Sequence[sp.Rational], exponents: Sequence[Any]) -> sp.Rational:
    value = sp.Integer(1)
    for base, exponent in zip(bases, exponents):
        q = sp.Rational(exponent)
        if q == 0:
            continue
        if q.q != 1:
            raise NonIntegerExponent(f"exponent {q} is not an integer")
        if base == 0 and q < 0:
            raise NotInCell("a vanishing minor appears with a negative exponent")
        value *= base ** int(q)
    return value


def theorem_point(word: DoubleWord, t: Sequence[Any]) -> GroupPoint:
    """x' = ζ^{u⁻¹,v⁻¹}(ι(x)) for x = build_t_param(word, t)"""
    x = build_t_param(word, t)
    return twist(word.u.inverse(), word.v.inverse(), involution(x, "iota"))


def _instance(word: DoubleWord, values: Sequence[Any]) -> Dict[str, Any]:
    return {
        "n": word.realization.r + 1,
        "letters": list(word.letters),
        "t": [rational_pair(x) for x in values],
    }


def verify_thm_main(word: DoubleWord, t: Sequence[Any]) -> CheckReport:
    """
    Chamber Ansatz: t_j = ∏_k A_k(x')^{Ψ_jk} (1 <= j <= m) と
    t_{m+a} = ∏_{|i_k|=a} A_k(x')^{½(ε_{k⁺}-ε_k)} (1 <= a <= r)
    """
    xprime = theorem_point(word, t)
    minors = a_minors(word, xprime)
    bases = [minors[k] for k in word.index_set]
    exponents = chamber_exponents(word)
    values = [to_rational(x) for x in t]

    mismatches = []
    for row in range(word.m + word.rtilde):
        got = _power_product(bases, list(exponents.row(row)))
        if got != values[row]:
            mismatches.append(
                {"slot": row + 1, "got": rational_pair(got), "expected": rational_pair(values[row])}
            )
    return CheckReport(
        "thm-main",
        _instance(word, values),
        not mismatches,
        {"mismatches": mismatches},
    )


def verify_x_to_a(word: DoubleWord, t: Sequence[Any]) -> CheckReport:
    """X_j = ∏(t'_k)^{D_jk} with t'_j = ∏ t_k^{E_jk}, against ∏_k A_k(x')^{B̃_jk}"""
    minors = a_minors(word, theorem_point(word, t))
    factors = build_def(word)
    btilde = build_ensemble(word).Btilde
    values = [to_rational(x) for x in t]
    t_prime = [_power_product(values, list(factors.E.row(j))) for j in range(len(values))]
    bases = [minors[k] for k in word.index_set]

    mismatches = []
    for row, j in enumerate(word.index_set):
        lhs = _power_product(t_prime, list(factors.D.row(row)))
        rhs = _power_product(bases, list(btilde.row(row)))
        if lhs != rhs:
            mismatches.append({"index": j, "from_t": rational_pair(lhs), "from_a": rational_pair(rhs)})
    return CheckReport("x-to-a", _instance(word, values), not mismatches, {"mismatches": mismatches})


def verify_coweight_param(word: DoubleWord, X: Mapping[int, Any]) -> CheckReport:
    """
    余ウェイトパラメータ付けが x_{i_1}(t'_1)⋯x_{i_m}(t'_m)∏(t'_{m+a})^{ω_a∨}
    に一致し、X_j = ∏(t'_k)^{D_jk} で X が復元できることを確かめる
    """
    n = _require_type_a(word)
    g = build_x_param(word, X)
    t_prime = coweight_t_prime(word, X)
    h = GroupPoint.identity(n, adjoint=True)
    for k, letter in enumerate(word.letters):
        h = h * elem(n, letter, t_prime[k])
    for a in range(1, word.rtilde + 1):
        h = h * coweight_torus(n, a, t_prime[word.m + a - 1])

    D = build_def(word).D
    recovered = {
        j: _power_product(t_prime, list(D.row(row))) for row, j in enumerate(word.index_set)
    }
    wrong = [j for j in word.index_set if recovered[j] != to_rational(X[j])]
    passed = g.mat == h.mat and not wrong
    return CheckReport(
        "coweight-param",
        {
            "n": n,
            "letters": list(word.letters),
            "X": {str(j): rational_pair(X[j]) for j in word.index_set},
        },
        passed,
        {"factorization_equal": g.mat == h.mat, "unrecovered": wrong},
    )


def verify_twist_zero(u: WordLike, v: WordLike, x: GroupPoint) -> CheckReport:
    """[ζ(x)]₀ = [ū⁻¹x]₀⁻¹ [x]₀ [x(v⁻¹)‾]₀⁻¹"""
    n = x.n
    lhs = gauss(twist(u, v, x)).diagonal
    rhs = (
        _gauss_or_cell(_bar(n, u).T * x.mat, "u^-1 x").diagonal.inv()
        * gauss(x).diagonal
        * _gauss_or_cell(x.mat * _bar_of_inverse(n, v), "x v^-1").diagonal.inv()
    )
    return CheckReport(
        "twist-zero",
        {"n": n, "u": list(_word(u)), "v": list(_word(v))},
        lhs == rhs,
        {"diagonal": [rational_pair(lhs[i, i]) for i in range(n)]},
    )


def _inverse_word(w: WordLike) -> Tuple[int, ...]:
    return tuple(reversed(_word(w)))


def verify_twist_inverse(u: WordLike, v: WordLike, x: GroupPoint) -> CheckReport:
    """ζ^{u⁻¹,v⁻¹}(ζ^{u,v}(x)) = x"""
    back = twist(_inverse_word(u), _inverse_word(v), twist(u, v, x))
    return CheckReport(
        "twist-inverse",
        {"n": x.n, "u": list(_word(u)), "v": list(_word(v))},
        back.mat == x.mat,
        {},
    )


def involution_self_test(n: int, t: Any) -> CheckReport:
    """θ(x_i(t)) = x_{-i}(t), ι(x_i(t)) = x_i(t), σ(x_i(t)) = x_{-i}(-t), and all invert H"""
    t = to_rational(t)
    failures = []
    for i in range(1, n):
        generator = elem(n, i, t)
        if involution(generator, "theta").mat != elem(n, -i, t).mat:
            failures.append(f"theta x_{i}")
        if involution(elem(n, -i, t), "theta").mat != generator.mat:
            failures.append(f"theta x_-{i}")
        if involution(generator, "iota").mat != generator.mat:
            failures.append(f"iota x_{i}")
        if involution(generator, "sigma").mat != elem(n, -i, -t).mat:
            failures.append(f"sigma x_{i}")
        if t != 0:
            h = coroot(n, i, t)
            inverse = coroot(n, i, 1 / t)
            for which in ("theta", "iota"):
                if involution(h, which).mat != inverse.mat:
                    failures.append(f"{which} on H")
    return CheckReport("involutions", {"n": n, "t": rational_pair(t)}, not failures, {"failures": failures})


def verify_newlem(
    word: DoubleWord, t: Sequence[Any], k: int, j: int, statement: str = "minus"
) -> CheckReport:
    """
    π₋: Δ^{ω_j}_{v_{>k},e}(π₋(x)) = Δ^{ω_j}_{e,v_{≤k}}(x') / Δ^{ω_j}_{e,v}(x')  (0 <= k <= ℓ(v))
    π₊: Δ^{ω_j}_{e,u_{<k}}(π₊(x)) = Δ^{ω_j}_{u_{≥k},e}(x') / Δ^{ω_j}_{u⁻¹,e}(x')  (1 <= k <= ℓ(u)+1)

    x = build_t_param(word, t) ∈ G^{u,v}, x' = ζ^{u,v}(x)。k は v (u) の簡約語
    の中の位置。
    """
    n = _require_type_a(word)
    realization = word.realization
    if not 1 <= j <= n - 1:
        raise IndexOutOfRange(f"minor index {j} outside 1..{n - 1}")
    x = build_t_param(word, t)
    u_word, v_word = word.negative_word, word.positive_word
    xprime = twist(u_word, v_word, x)

    if statement == "minus":
        if not 0 <= k <= len(v_word):
            raise IndexOutOfRange(f"position {k} outside 0..{len(v_word)}")
        after = tuple(reversed(v_word[k:]))
        lhs = minor(pi_minus(v_word, x), j, after, ())
        numerator = minor(xprime, j, (), v_word[:k])
        denominator = minor(xprime, j, (), v_word)
    elif statement == "plus":
        if not 1 <= k <= len(u_word) + 1:
            raise IndexOutOfRange(f"position {k} outside 1..{len(u_word) + 1}")
        from_k = tuple(reversed(u_word[k - 1:]))
        lhs = minor(pi_plus(u_word, x), j, (), u_word[: k - 1])
        numerator = minor(xprime, j, from_k, ())
        denominator = minor(xprime, j, _inverse_word(u_word), ())
    else:
        raise BadShape(f"unknown statement {statement!r}")

    if denominator == 0:
        raise NotInCell("denominator minor vanishes", details={"j": j, "k": k})
    rhs = numerator / denominator
    instance = _instance(word, t)
    instance.update({"k": k, "j": j, "statement": statement, "rank": realization.r})
    return CheckReport(
        "newlem",
        instance,
        lhs == rhs,
        {"lhs": rational_pair(lhs), "rhs": rational_pair(rhs)},
    )


def _positive_word(realization: CartanRealization, word: Sequence[int]) -> Tuple[int, ...]:
    word = tuple(int(x) for x in word)
    for letter in word:
        if not 1 <= letter <= realization.r:
            raise IndexOutOfRange(f"letter {letter} outside 1..{realization.r}")
    if not is_reduced_word(realization, word):
        raise NotReduced("positive", word)
    return word


def _w_chain(realization: CartanRealization, word: Sequence[int]) -> List[WeylElement]:
    """w_k = s_{i_n} ⋯ s_{i_k} for k = 1..n+1 (w_{n+1} = e), stored at index k-1."""
    return [apply_word(realization, tuple(reversed(word[k:]))) for k in range(len(word) + 1)]


def verify_group_fact(n: int, word_w: Sequence[int], p: Sequence[Any]) -> CheckReport:
    """
    y = y_1(p_1)⋯y_n(p_n), y_k = w̄_{k+1} x_{-i_k}(p_k) w̄_{k+1}⁻¹ から
    p_k = Δ^{ω_{i_k}}_{w_k,w_{k+1}}(y) で復元できることを確かめる
    """
    realization = type_a(n)
    word = _positive_word(realization, word_w)
    if len(p) != len(word):
        raise BadShape(f"expected {len(word)} parameters, got {len(p)}")
    values = [to_rational(x) for x in p]
    chain = _w_chain(realization, word)

    y = sp.ImmutableMatrix(sp.eye(n))
    for k, letter in enumerate(word):
        rep = _bar(n, chain[k + 1])
        y = y * rep * elem(n, -letter, values[k]).mat * rep.T
    point = GroupPoint(n, y)

    recovered = [minor(point, letter, chain[k], chain[k + 1]) for k, letter in enumerate(word)]
    wrong = [k + 1 for k in range(len(word)) if recovered[k] != values[k]]
    return CheckReport(
        "group-fact",
        {"n": n, "word": list(word), "p": [rational_pair(x) for x in values]},
        not wrong,
        {"recovered": [rational_pair(x) for x in recovered], "wrong_positions": wrong},
    )


def verify_uni_fact(n: int, word_w: Sequence[int], t: Sequence[Any]) -> CheckReport:
    """
    x = x_{i_1}(t_1)⋯x_{i_n}(t_n)、y = π₋(x) から
    t_k = ∏_{j≠i_k} Δ^{ω_j}_{w_{k+1},e}(y)^{-C_{j,i_k}} / (Δ^{ω_{i_k}}_{w_k,e}(y) Δ^{ω_{i_k}}_{w_{k+1},e}(y))
    で復元できることを確かめる
    """
    realization = type_a(n)
    word = _positive_word(realization, word_w)
    if len(t) != len(word):
        raise BadShape(f"expected {len(word)} parameters, got {len(t)}")
    values = [_nonzero(x, "t parameter") for x in t]

    x = GroupPoint.identity(n)
    for letter, value in zip(word, values):
        x = x * elem(n, letter, value)
    y = pi_minus(word, x)
    chain = _w_chain(realization, word)

    recovered = []
    for k, letter in enumerate(word):
        denominator = minor(y, letter, chain[k]) * minor(y, letter, chain[k + 1])
        if denominator == 0:
            raise NotInCell("vanishing minor in the unipotent factorization")
        value = 1 / denominator
        for j in range(1, n):
            if j != letter:
                exponent = -realization.entry(j, letter)
                if exponent:
                    value *= minor(y, j, chain[k + 1]) ** exponent
        recovered.append(value)
    wrong = [k + 1 for k in range(len(word)) if recovered[k] != values[k]]
    return CheckReport(
        "uni-fact",
        {"n": n, "word": list(word), "t": [rational_pair(x) for x in values]},
        not wrong,
        {"recovered": [rational_pair(x) for x in recovered], "wrong_positions": wrong},
    )


def random_sl_point(n: int, rng: np.random.Generator, bound: int) -> GroupPoint:
    """g = L·D·U with positive random entries; det D = 1."""
    lower = sp.eye(n)
    upper = sp.eye(n)
    for i in range(n):
        for j in range(i):
            lower[i, j] = random_positive_rational(rng, bound)
            upper[j, i] = random_positive_rational(rng, bound)
    diagonal = random_positive_vector(rng, n - 1, bound)
    product = sp.Mul(*diagonal)
    diagonal.append(1 / product)
    return GroupPoint(n, sp.ImmutableMatrix(lower * sp.diag(*diagonal) * upper))


def verify_gendetid(
    n: int,
    u: Sequence[int],
    v: Sequence[int],
    i: int,
    trials: int,
    rng_seed: int,
    max_entry: int = 100,
) -> CheckReport:
    """
    一般化行列式恒等式
    Δ_{u,v} Δ_{us_i,vs_i} = Δ_{us_i,v} Δ_{u,vs_i} + ∏_{k≠i} Δ^{ω_k}_{u,v}^{-C_{ki}}

    Raises:
        PreconditionViolated: ℓ(us_i) > ℓ(u), ℓ(vs_i) > ℓ(v) が成り立たない
    """
    realization = type_a(n)
    if not 1 <= i <= realization.r:
        raise IndexOutOfRange(f"index {i} outside 1..{realization.r}")
    u_el = apply_word(realization, u)
    v_el = apply_word(realization, v)
    if u_el.is_right_descent(i) or v_el.is_right_descent(i):
        raise PreconditionViolated(
            "need l(u s_i) > l(u) and l(v s_i) > l(v)",
            details={"u": list(u), "v": list(v), "i": i},
        )
    s = simple_reflection(realization, i)
    us, vs = u_el * s, v_el * s

    failures = []
    for trial in range(trials):
        g = random_sl_point(n, trial_rng(rng_seed, trial), max_entry)
        lhs = minor(g, i, u_el, v_el) * minor(g, i, us, vs)
        rhs = minor(g, i, us, v_el) * minor(g, i, u_el, vs)
        extra = sp.Integer(1)
        for k in range(1, n):
            if k != i and realization.entry(k, i):
                extra *= minor(g, k, u_el, v_el) ** (-realization.entry(k, i))
        if lhs != rhs + extra:
            failures.append(trial)
    return CheckReport(
        "gendetid",
        {"n": n, "u": list(u_el.word), "v": list(v_el.word), "i": i},
        not failures,
        {"trials": trials, "failed_trials": failures[:5]},
    )
