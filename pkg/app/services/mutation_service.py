"""
Mutation service - シード変異とクラスターアンサンブル

交換行列の変異、クラスター変数 (A) と X座標の変換、修正アンサンブル
写像 p_M、Poisson 行列、および P,Q 座標での Poisson 括弧の記号的検証を
提供する。交換関係・X変換は RatFunc でも sympy の有理数でも同じ関数で
計算できる (記号的検証とランダム点評価の両方に使う)。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy as sp

from app.models.ratfunc import RatFunc
from app.models.report import CheckReport
from app.models.seed import DoubleWord, EnsembleMatrices, Seed, build_seed
from app.utils.error_handler import FrozenIndex, NonIntegerBtilde, NonIntegerExponent
from app.utils.logging import get_logger
from app.utils.matrices import is_integral, rational_pair
from app.utils.sampling import random_positive_rational, trial_rng

logger = get_logger("mutation_service")


def symbol_name(prefix: str, k: int) -> str:
    """A_-3 -> "Am3", A_2 -> "A2"."""
    return f"{prefix}m{-k}" if k < 0 else f"{prefix}{k}"


def cluster_symbols(indices: Sequence[int], prefix: str) -> Dict[int, sp.Symbol]:
    return {k: sp.Symbol(symbol_name(prefix, k), positive=True) for k in indices}


@dataclass(frozen=True)
class ClusterState:
    """シードと A, X 座標の割り当て"""

    seed: Seed
    assign_a: Dict[int, Any] = field(hash=False)
    assign_x: Dict[int, Any] = field(hash=False)
    history: Tuple[int, ...] = ()


def initial_state(seed: Seed) -> ClusterState:
    """各添字 i に自由生成元 A_i, X_i を割り当てた初期状態"""
    a_symbols = cluster_symbols(seed.indices, "A")
    x_symbols = cluster_symbols(seed.indices, "X")
    a_gens = [a_symbols[k] for k in seed.indices]
    x_gens = [x_symbols[k] for k in seed.indices]
    return ClusterState(
        seed=seed,
        assign_a={k: RatFunc.variable(a_symbols[k], a_gens) for k in seed.indices},
        assign_x={k: RatFunc.variable(x_symbols[k], x_gens) for k in seed.indices},
    )


def _require_unfrozen(seed: Seed, k: int) -> int:
    position = seed.position(k)
    if seed.frozen[position]:
        raise FrozenIndex(f"index {k} is frozen", details={"index": k})
    return position


def _int_exponent(value: Any) -> int:
    q = sp.Rational(value)
    if q.q != 1:
        raise NonIntegerExponent(f"exponent {q} is not an integer")
    return int(q)


def mutate_b(seed: Seed, k: int) -> Seed:
    """
    交換行列の変異 μ_k

    b'_ij = -b_ij (i = k または j = k)
          = b_ij + |b_ik| b_kj (b_ik b_kj > 0)
          = b_ij (それ以外)
    """
    p = _require_unfrozen(seed, k)
    B = seed.B
    size = B.rows

    def entry(i: int, j: int) -> sp.Rational:
        if i == p or j == p:
            return -B[i, j]
        if B[i, p] * B[p, j] > 0:
            return B[i, j] + abs(B[i, p]) * B[p, j]
        return B[i, j]

    return seed.with_matrix(
        sp.ImmutableMatrix(size, size, [entry(i, j) for i in range(size) for j in range(size)])
    )


def exchange(seed: Seed, values: Mapping[int, Any], k: int) -> Dict[int, Any]:
    """A'_k = (∏_{b_kj>0} A_j^{b_kj} + ∏_{b_kj<0} A_j^{-b_kj}) / A_k"""
    p = _require_unfrozen(seed, k)
    one = values[k] ** 0
    positive, negative = one, one
    for j, index in enumerate(seed.indices):
        b = seed.B[p, j]
        if b > 0:
            positive = positive * values[index] ** _int_exponent(b)
        elif b < 0:
            negative = negative * values[index] ** _int_exponent(-b)
    result = dict(values)
    result[k] = (positive + negative) / values[k]
    return result


def x_transform(seed: Seed, values: Mapping[int, Any], k: int) -> Dict[int, Any]:
    """X'_k = X_k^{-1}, X'_i = X_i X_k^{[b_ik]+} (1 + X_k)^{-b_ik}"""
    p = _require_unfrozen(seed, k)
    xk = values[k]
    result = {}
    for i, index in enumerate(seed.indices):
        if index == k:
            result[index] = 1 / xk
            continue
        b = _int_exponent(seed.B[i, p])
        if b == 0:
            result[index] = values[index]
        else:
            result[index] = values[index] * xk ** max(0, b) * (1 + xk) ** (-b)
    return result


def mutate_a(state: ClusterState, k: int) -> ClusterState:
    """A 座標の変異 (B も同時に変異、X はそのまま)"""
    return ClusterState(
        seed=mutate_b(state.seed, k),
        assign_a=exchange(state.seed, state.assign_a, k),
        assign_x=state.assign_x,
        history=state.history + (k,),
    )


def mutate_x(state: ClusterState, k: int) -> ClusterState:
    """X 座標の変異 (B も同時に変異、A はそのまま)"""
    return ClusterState(
        seed=mutate_b(state.seed, k),
        assign_a=state.assign_a,
        assign_x=x_transform(state.seed, state.assign_x, k),
        history=state.history + (k,),
    )


def mutate(state: ClusterState, k: int) -> ClusterState:
    """μ_k on (B, A, X)"""
    return ClusterState(
        seed=mutate_b(state.seed, k),
        assign_a=exchange(state.seed, state.assign_a, k),
        assign_x=x_transform(state.seed, state.assign_x, k),
        history=state.history + (k,),
    )


def mutate_sequence(state: ClusterState, sequence: Sequence[int]) -> ClusterState:
    for k in sequence:
        state = mutate(state, k)
    return state


def monomial_map(
    indices: Sequence[int], exponents: sp.MatrixBase, values: Mapping[int, Any]
) -> Dict[int, Any]:
    """X_i = ∏_j A_j^{exponents_ij}"""
    if not is_integral(exponents):
        raise NonIntegerBtilde("exponent matrix has non-integer entries")
    one = values[indices[0]] ** 0
    result = {}
    for i, index in enumerate(indices):
        value = one
        for j, other in enumerate(indices):
            power = int(exponents[i, j])
            if power:
                value = value * values[other] ** power
        result[index] = value
    return result


def ensemble_map(ensemble: EnsembleMatrices, assign_a: Mapping[int, Any]) -> Dict[int, Any]:
    """p_M: X_i = ∏_j A_j^{B̃_ij}"""
    return monomial_map(ensemble.seed.indices, ensemble.Btilde, assign_a)


def _shifted(seed: Seed, M: sp.MatrixBase) -> sp.ImmutableMatrix:
    btilde = sp.ImmutableMatrix(seed.B + M)
    if not is_integral(btilde):
        raise NonIntegerBtilde("B + M has non-integer entries")
    return btilde


def _commute_mismatches(
    seed: Seed, M: sp.MatrixBase, k: int, values: Mapping[int, Any]
) -> List[int]:
    """Indices where μ_k^X(p_M(a)) and p'_M(μ_k^A(a)) disagree."""
    before = _shifted(seed, M)
    after = _shifted(mutate_b(seed, k), M)
    lhs = x_transform(seed, monomial_map(seed.indices, before, values), k)
    rhs = monomial_map(seed.indices, after, exchange(seed, values, k))
    return [index for index in seed.indices if lhs[index] != rhs[index]]


def verify_ensemble_commute(
    ensemble: EnsembleMatrices,
    k: Optional[int],
    trials: int,
    rng_seed: int,
    max_entry: int = 100,
    m_override: Optional[sp.MatrixBase] = None,
    instance: Optional[Dict[str, Any]] = None,
) -> CheckReport:
    """
    p_M と変異の可換性をランダムな正の有理点で検証する

    Args:
        ensemble: 検証対象の B, M
        k: 変異する非凍結添字 (None なら最初の非凍結添字)
        trials: 評価点の数
        rng_seed: 乱数シード (試行 t の点は (rng_seed, t) から決まる)
        m_override: M の代わりに使う行列 (負の対照実験用)
    """
    seed = ensemble.seed
    instance = dict(instance or {})
    if not seed.unfrozen:
        return CheckReport.vacuous("ensemble-commute", instance, "no unfrozen index")
    if k is None:
        k = seed.unfrozen[0]
    _require_unfrozen(seed, k)
    instance["k"] = k
    M = ensemble.M if m_override is None else sp.ImmutableMatrix(m_override)

    failures = []
    for trial in range(trials):
        rng = trial_rng(rng_seed, trial)
        point = {index: random_positive_rational(rng, max_entry) for index in seed.indices}
        mismatched = _commute_mismatches(seed, M, k, point)
        if mismatched:
            failures.append({"trial": trial, "indices": mismatched})

    if failures:
        logger.warning(
            "Ensemble map does not commute with mutation",
            extra={"k": k, "failed_trials": len(failures)},
        )
    return CheckReport(
        "ensemble-commute",
        instance,
        not failures,
        {"mode": "random", "trials": trials, "failures": failures[:5]},
    )


def verify_ensemble_commute_symbolic(
    ensemble: EnsembleMatrices,
    k: Optional[int] = None,
    m_override: Optional[sp.MatrixBase] = None,
    instance: Optional[Dict[str, Any]] = None,
) -> CheckReport:
    """Same identity compared as canonical rational functions in the A's."""
    seed = ensemble.seed
    instance = dict(instance or {})
    if not seed.unfrozen:
        return CheckReport.vacuous("ensemble-commute", instance, "no unfrozen index")
    if k is None:
        k = seed.unfrozen[0]
    _require_unfrozen(seed, k)
    instance["k"] = k
    M = ensemble.M if m_override is None else sp.ImmutableMatrix(m_override)
    mismatched = _commute_mismatches(seed, M, k, initial_state(seed).assign_a)
    return CheckReport(
        "ensemble-commute",
        instance,
        not mismatched,
        {"mode": "symbolic", "indices": mismatched},
    )


def is_involution(state: ClusterState, k: int) -> bool:
    """μ_k μ_k = id on (B, A, X)."""
    twice = mutate(mutate(state, k), k)
    return (
        twice.seed.B == state.seed.B
        and twice.assign_a == state.assign_a
        and twice.assign_x == state.assign_x
    )


def poisson_matrix(seed: Seed) -> sp.ImmutableMatrix:
    """{X_i, X_j} = b_ij d_j X_i X_j"""
    size = len(seed.indices)
    return sp.ImmutableMatrix(
        size, size, [seed.B[i, j] * seed.d[j] for i in range(size) for j in range(size)]
    )


def pq_exponents(word: DoubleWord, j: int) -> Tuple[List[int], List[int]]:
    """
    m*X_j の P, Q 指数

    j > 0 なら P_j Q_j^{-ε_j}、j⁺ <= m なら P_{j⁺} Q_{j⁺}^{ε_{j⁺}}、
    j < l < j⁺ の各文字 l に P_l^{C_{|i_l|,|i_j|}} を掛ける。
    """
    m = word.m
    p_exp = [0] * m
    q_exp = [0] * m
    if j > 0:
        p_exp[j - 1] += 1
        q_exp[j - 1] -= word.epsilon(j)
    nxt = word.successor(j)
    if nxt <= m:
        p_exp[nxt - 1] += 1
        q_exp[nxt - 1] += word.epsilon(nxt)
    for l in range(max(j + 1, 1), min(nxt, m + 1)):
        p_exp[l - 1] += word.realization.entry(word.weight(l), word.weight(j))
    return p_exp, q_exp


def verify_poisson_word(word: DoubleWord) -> CheckReport:
    """
    P,Q 座標での Poisson 括弧から {X_j, X_k} = b_jk d_k X_j X_k を検証する

    {P_l, Q_l} = (d_{|i_l|}/2) P_l Q_l を微分則で多項式に拡張し、H 座標は
    Casimir として扱う。
    """
    seed = build_seed(word)
    m = word.m
    P = [sp.Symbol(f"P{l}", positive=True) for l in range(1, m + 1)]
    Q = [sp.Symbol(f"Q{l}", positive=True) for l in range(1, m + 1)]
    half_d = [sp.Rational(word.realization.dfull[word.weight(l) - 1], 2) for l in range(1, m + 1)]

    monomials = {}
    for j in word.index_set:
        p_exp, q_exp = pq_exponents(word, j)
        monomials[j] = sp.Mul(*[P[l] ** p_exp[l] * Q[l] ** q_exp[l] for l in range(m)])

    def bracket(f: sp.Expr, g: sp.Expr) -> sp.Expr:
        total = sp.Integer(0)
        for l in range(m):
            total += half_d[l] * P[l] * Q[l] * (
                sp.diff(f, P[l]) * sp.diff(g, Q[l]) - sp.diff(f, Q[l]) * sp.diff(g, P[l])
            )
        return total

    mismatches = []
    for j in word.index_set:
        for k in word.index_set:
            f, g = monomials[j], monomials[k]
            ratio = sp.cancel(bracket(f, g) / (f * g))
            expected = seed.b(j, k) * seed.d_of(k)
            if ratio != expected:
                mismatches.append(
                    {"pair": [j, k], "got": str(ratio), "expected": rational_pair(expected)}
                )

    return CheckReport(
        "poisson-word",
        {"letters": list(word.letters), "C": [list(row) for row in word.realization.core.C]},
        not mismatches,
        {"pairs": len(word.index_set) ** 2, "mismatches": mismatches[:5]},
    )


@dataclass
class LaurentSurvey:
    """Laurent 現象の調査結果"""

    sequences_checked: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _record_laurent(state: ClusterState, survey: LaurentSurvey) -> None:
    survey.sequences_checked += 1
    bad = [index for index, value in state.assign_a.items() if not value.is_laurent()]
    if bad:
        survey.failures.append({"sequence": list(state.history), "indices": bad})


def laurent_survey(
    seed: Seed,
    depth: int = 4,
    random_sequences: int = 0,
    random_length: int = 5,
    rng_seed: int = 0,
) -> LaurentSurvey:
    """
    変異列ごとにクラスター変数が Laurent 多項式であることを確かめる

    長さ depth 以下の全ての変異列 (直前と同じ添字は打ち消し合うので除く)
    と、長さ random_length のランダム列 random_sequences 本を調べる。
    """
    survey = LaurentSurvey()
    unfrozen = seed.unfrozen
    if not unfrozen:
        return survey
    start = initial_state(seed)

    def walk(state: ClusterState, last: Optional[int], remaining: int) -> None:
        for k in unfrozen:
            if k == last:
                continue
            nxt = mutate_a(state, k)
            _record_laurent(nxt, survey)
            if remaining > 1:
                walk(nxt, k, remaining - 1)

    if depth > 0:
        walk(start, None, depth)

    length = random_length if len(unfrozen) > 1 else 1
    for index in range(random_sequences):
        rng = trial_rng(rng_seed, index)
        state, last = start, None
        for _ in range(length):
            choices = [k for k in unfrozen if k != last]
            last = choices[int(rng.integers(0, len(choices)))]
            state = mutate_a(state, last)
        _record_laurent(state, survey)

    logger.debug(
        "Laurent survey finished",
        extra={"sequences": survey.sequences_checked, "failures": len(survey.failures)},
    )
    return survey
