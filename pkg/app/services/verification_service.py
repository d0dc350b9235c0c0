"""
Verification service - 検証スイートの実行

ランダムな (Cartanデータ, 二重簡約語) の生成、各検証の実行、結果の集計を
行う。インスタンス i の乱数は (rng_seed, i) から決まり、並列実行しても
結果の順序はインスタンス番号順に固定される。
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import sympy as sp

from app.config import Config
from app.models.cartan import CartanRealization, from_preset, type_a
from app.models.report import CheckReport
from app.models.seed import DoubleWord, build_ensemble, build_seed, parse_double_word
from app.models.weyl import identity, simple_reflection
from app.services.factor_service import build_def, build_psi, oracle_def
from app.services.mutation_service import (
    initial_state,
    is_involution,
    laurent_survey,
    mutate_b,
    verify_ensemble_commute,
    verify_ensemble_commute_symbolic,
    verify_poisson_word,
)
from app.services.sln_lab import (
    build_t_param,
    in_double_cell,
    involution_self_test,
    verify_coweight_param,
    verify_gendetid,
    verify_group_fact,
    verify_newlem,
    verify_thm_main,
    verify_twist_inverse,
    verify_twist_zero,
    verify_uni_fact,
    verify_x_to_a,
)
from app.utils.error_handler import (
    DegenerateRealization,
    ErrorHandler,
    NotInCell,
    resample_on,
)
from app.utils.logging import LogContext, MetricsLogger, get_logger, log_execution_time
from app.utils.matrices import rational_matrix, rational_pair
from app.utils.sampling import random_positive_vector, trial_rng

logger = get_logger("verification_service")

T = TypeVar("T")

RANDOM_TYPES = ("A2", "B2", "G2", "A1affine")
SYMBOLIC_INDEX_LIMIT = 7

# Worked example: affine A1 with the double word (-1,-2,1,2), I = (-3,-2,-1,1,2,3,4)
EXAMPLE_WORD = (-1, -2, 1, 2)
EXAMPLE_CFULL = [[2, -2, 1], [-2, 2, 0], [1, 0, 0]]
EXAMPLE_B = [
    [0, 0, sp.Rational(-1, 2), 1, 0, sp.Rational(-1, 2), 0],
    [0, 0, 1, -2, 1, 0, 0],
    [sp.Rational(1, 2), -1, 0, 1, 0, 0, 0],
    [-1, 2, -1, 0, 0, -1, 0],
    [0, -1, 0, 0, 0, 2, -1],
    [sp.Rational(1, 2), 0, 0, 1, -2, 0, 1],
    [0, 0, 0, 0, 1, -1, 0],
]
EXAMPLE_M = [
    [0, 0, sp.Rational(1, 2), 0, 0, sp.Rational(1, 2), 0],
    [0, 1, -1, 0, 0, 0, 0],
    [sp.Rational(1, 2), -1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
    [sp.Rational(1, 2), 0, 0, 0, 0, 1, -1],
    [0, 0, 0, 0, 0, -1, 1],
]
EXAMPLE_BTILDE = [
    [0, 0, 0, 1, 0, 0, 0],
    [0, 1, 0, -2, 1, 0, 0],
    [1, -2, 1, 1, 0, 0, 0],
    [-1, 2, -1, 0, 0, -1, 0],
    [0, -1, 0, 0, 0, 2, -1],
    [1, 0, 0, 1, -2, 1, 0],
    [0, 0, 0, 0, 1, -2, 1],
]


def random_realization(rng: np.random.Generator) -> CartanRealization:
    """A2, B2, G2 or affine A1; the affine case gets a random valid extension half the time."""
    name = RANDOM_TYPES[int(rng.integers(0, len(RANDOM_TYPES)))]
    if name != "A1affine" or rng.integers(0, 2) == 0:
        return from_preset(name)
    for _ in range(10):
        row = [int(x) for x in rng.integers(-2, 3, size=2)]
        try:
            return from_preset(name, [row])
        except DegenerateRealization:
            continue
    return from_preset(name)


def random_double_word(
    realization: CartanRealization, rng: np.random.Generator, max_length: int
) -> DoubleWord:
    """Shuffle of random reduced words, grown one length-increasing letter at a time."""
    target = int(rng.integers(0, max_length + 1))
    u = identity(realization)
    v = identity(realization)
    letters: List[int] = []
    attempts = 0
    while len(letters) < target and attempts < 10 * (max_length + 1):
        attempts += 1
        i = int(rng.integers(1, realization.r + 1))
        if rng.integers(0, 2) == 0:
            if not u.is_right_descent(i):
                u = u * simple_reflection(realization, i)
                letters.append(-i)
        elif not v.is_right_descent(i):
            v = v * simple_reflection(realization, i)
            letters.append(i)
    return parse_double_word(realization, letters)


def word_instance(word: DoubleWord) -> Dict[str, Any]:
    realization = word.realization
    return {
        "C": [list(row) for row in realization.core.C],
        "extension": [list(row) for row in realization.extension],
        "letters": list(word.letters),
    }


def structural_problems(word: DoubleWord, rng: Optional[np.random.Generator] = None) -> List[str]:
    """
    Seed, ensemble, mutation and Ψ invariants of one word seed.

    Symbolic involutivity is checked at one random unfrozen index when rng is
    given, otherwise at every unfrozen index.
    """
    seed = build_seed(word)
    problems = seed.invariant_violations()

    ensemble = build_ensemble(word, seed)
    if ensemble.det == 0:
        problems.append("det Btilde vanishes")
    size = len(seed.indices)
    for a in range(size):
        for c in range(size):
            if ensemble.M[a, c] != 0 and not (seed.frozen[a] and seed.frozen[c]):
                problems.append(f"M not supported on frozen pair {seed.indices[a], seed.indices[c]}")

    for k in seed.unfrozen:
        if mutate_b(mutate_b(seed, k), k).B != seed.B:
            problems.append(f"mutation at {k} is not an involution on B")
    if seed.unfrozen and size <= SYMBOLIC_INDEX_LIMIT:
        if rng is None:
            symbolic = seed.unfrozen
        else:
            symbolic = (seed.unfrozen[int(rng.integers(0, len(seed.unfrozen)))],)
        state = initial_state(seed)
        for k in symbolic:
            if not is_involution(state, k):
                problems.append(f"symbolic mutation at {k} is not an involution")

    psi = build_psi(word)
    realization = word.realization
    for row, j in enumerate(range(1, word.m + 1)):
        for col, k in enumerate(word.index_set):
            c = realization.entry(word.weight(k), word.weight(j))
            if psi[row, col] not in (0, 1, -1, c, -c):
                problems.append(f"Psi value {psi[row, col]} at {j, k}")
    F = build_def(word).F
    if F[: word.m, :] != psi:
        problems.append("F rows 1..m differ from Psi")
    if any(sp.Rational(2 * x).q != 1 for x in F):
        problems.append("2F is not integral")
    return problems


def newlem_sweep(word: DoubleWord, t: Sequence[Any]) -> List[CheckReport]:
    """Both π± minor identities for every minor index and every admissible position."""
    n = word.realization.r + 1
    reports = []
    for j in range(1, n):
        for k in range(len(word.positive_word) + 1):
            reports.append(verify_newlem(word, t, k, j, "minus"))
        for k in range(1, len(word.negative_word) + 2):
            reports.append(verify_newlem(word, t, k, j, "plus"))
    return reports


class VerificationService:
    """検証スイートの実行と集計"""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()
        self.metrics = MetricsLogger(get_logger("metrics"))
        self.error_handler = ErrorHandler(logger)

    @property
    def settings(self):
        return self.config.verification

    def _map(self, func: Callable[[Any], T], items: Iterable[Any]) -> List[T]:
        items = list(items)
        workers = max(1, self.settings.max_workers)
        if workers == 1 or len(items) < 2:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(func, items))

    def _record(self, reports: List[CheckReport]) -> List[CheckReport]:
        for report in reports:
            self.metrics.log_counter("checks_run", tags={"check": report.check})
            name = "checks_passed" if report.passed else "checks_failed"
            self.metrics.log_counter(name, tags={"check": report.check})
        return reports

    def _resampled(
        self, check: str, word: DoubleWord, sampler: Callable[..., List[CheckReport]]
    ) -> Callable[[int], List[CheckReport]]:
        """Redraw the point on NotInCell; a trial that never lands in the cell fails."""

        def counted(trial: int, attempt: int) -> List[CheckReport]:
            if attempt:
                self.metrics.log_counter("resampled")
            return sampler(trial, attempt=attempt)

        retrying = resample_on(NotInCell, self.settings.resample_limit, logger)(counted)

        def run(trial: int) -> List[CheckReport]:
            try:
                return retrying(trial)
            except NotInCell as e:
                self.error_handler.log_error(e, {"check": check, "trial": trial}, False)
                instance = word_instance(word)
                instance["trial"] = trial
                return [CheckReport(check, instance, False, {"error": e.error_code, **e.details})]

        return run

    def summary(self, reports: List[CheckReport]) -> CheckReport:
        """Final line: counts of checks, passes and failures."""
        passed = sum(1 for r in reports if r.passed)
        metrics = self.metrics.get_metrics_summary()
        return CheckReport(
            "summary",
            {},
            passed == len(reports),
            {
                "checks": len(reports),
                "passed": passed,
                "failed": len(reports) - passed,
                "resampled": metrics.get("resampled", {}).get("count", 0),
            },
        )

    @log_execution_time()
    def def_oracle_suite(
        self, instances: int = 200, max_length: int = 12, rng_seed: Optional[int] = None
    ) -> List[CheckReport]:
        """D·E·F = B + M on random words over A2, B2, G2 and affine A1"""
        seed = self.settings.rng_seed if rng_seed is None else rng_seed

        def run(index: int) -> CheckReport:
            rng = trial_rng(seed, index)
            word = random_double_word(random_realization(rng), rng, max_length)
            return oracle_def(word, word_instance(word))

        with LogContext(logger, suite="def-oracle"):
            logger.info(f"Running {instances} oracle instances")
            return self._record(self._map(run, range(instances)))

    @log_execution_time()
    def structural_suite(
        self, instances: int = 1000, max_length: int = 8, rng_seed: Optional[int] = None
    ) -> List[CheckReport]:
        seed = self.settings.rng_seed if rng_seed is None else rng_seed

        def run(index: int) -> CheckReport:
            rng = trial_rng(seed, index)
            word = random_double_word(random_realization(rng), rng, max_length)
            problems = structural_problems(word, rng)
            return CheckReport("structural", word_instance(word), not problems, {"problems": problems})

        with LogContext(logger, suite="structural"):
            return self._record(self._map(run, range(instances)))

    @log_execution_time()
    def laurent_suite(
        self,
        word: DoubleWord,
        depth: int = 4,
        random_sequences: int = 50,
        random_length: int = 5,
    ) -> List[CheckReport]:
        survey = laurent_survey(
            build_seed(word),
            depth=depth,
            random_sequences=random_sequences,
            random_length=random_length,
            rng_seed=self.settings.rng_seed,
        )
        instance = word_instance(word)
        instance.update({"depth": depth, "random_sequences": random_sequences})
        report = CheckReport(
            "laurent",
            instance,
            survey.passed,
            {"sequences": survey.sequences_checked, "failures": survey.failures[:5]},
        )
        return self._record([report])

    @log_execution_time()
    def ensemble_commute_suite(
        self, word: DoubleWord, trials: Optional[int] = None
    ) -> List[CheckReport]:
        """Random-point check at every unfrozen index, symbolic too for small seeds."""
        trials = trials or self.settings.trials
        ensemble = build_ensemble(word)
        instance = word_instance(word)
        unfrozen = ensemble.seed.unfrozen
        if not unfrozen:
            return self._record(
                [CheckReport.vacuous("ensemble-commute", instance, "no unfrozen index")]
            )

        def run(k: int) -> List[CheckReport]:
            reports = [
                verify_ensemble_commute(
                    ensemble,
                    k,
                    trials,
                    self.settings.rng_seed,
                    max_entry=self.settings.max_entry,
                    instance=instance,
                )
            ]
            if len(ensemble.seed.indices) <= SYMBOLIC_INDEX_LIMIT:
                reports.append(verify_ensemble_commute_symbolic(ensemble, k, instance=instance))
            return reports

        return self._record([r for group in self._map(run, unfrozen) for r in group])

    @log_execution_time()
    def poisson_suite(self, word: DoubleWord) -> List[CheckReport]:
        return self._record([verify_poisson_word(word)])

    def _random_t(self, word: DoubleWord, trial: int, attempt: int = 0) -> List[sp.Rational]:
        rng = trial_rng(self.settings.rng_seed, trial * self.settings.resample_limit + attempt)
        return random_positive_vector(rng, word.m + word.rtilde, self.settings.max_entry)

    @log_execution_time()
    def sln_suite(self, word: DoubleWord, trials: Optional[int] = None) -> List[CheckReport]:
        """Chamber Ansatz, X-to-A, coweight parametrization and the π± minor identities"""
        trials = trials or self.settings.trials
        n = word.realization.r + 1

        def sample(trial: int, attempt: int = 0) -> List[CheckReport]:
            t = self._random_t(word, trial, attempt)
            reports = [verify_thm_main(word, t), verify_x_to_a(word, t)]
            reports.append(verify_coweight_param(word, dict(zip(word.index_set, t))))
            return reports + newlem_sweep(word, t)

        run = self._resampled("sln", word, sample)
        with LogContext(logger, suite="sln"):
            reports = [involution_self_test(n, self._random_t(word, 0)[0])]
            for group in self._map(run, range(trials)):
                reports.extend(group)
            return self._record(reports)

    @log_execution_time()
    def newlem_suite(self, word: DoubleWord, trials: Optional[int] = None) -> List[CheckReport]:
        trials = trials or self.settings.trials

        def sample(trial: int, attempt: int = 0) -> List[CheckReport]:
            return newlem_sweep(word, self._random_t(word, trial, attempt))

        run = self._resampled("newlem", word, sample)
        return self._record([r for group in self._map(run, range(trials)) for r in group])

    @log_execution_time()
    def twist_suite(
        self, n: int, u: Sequence[int], v: Sequence[int], trials: Optional[int] = None
    ) -> List[CheckReport]:
        """ζ∘ζ = id and the [ζ(x)]₀ identity at points x = build_t_param of a (u, v) word."""
        trials = trials or self.settings.trials
        realization = type_a(n)
        word = parse_double_word(realization, [-i for i in u] + list(v))

        def sample(trial: int, attempt: int = 0) -> List[CheckReport]:
            x = build_t_param(word, self._random_t(word, trial, attempt))
            if not in_double_cell(u, v, x):
                raise NotInCell("sampled point misses the cell")
            return [verify_twist_inverse(u, v, x), verify_twist_zero(u, v, x)]

        run = self._resampled("twist", word, sample)
        return self._record([r for group in self._map(run, range(trials)) for r in group])

    @log_execution_time()
    def gendetid_suite(
        self,
        n: int,
        triples: Sequence[Tuple[Sequence[int], Sequence[int], int]],
        trials: Optional[int] = None,
    ) -> List[CheckReport]:
        trials = trials or self.settings.trials

        def run(triple: Tuple[Sequence[int], Sequence[int], int]) -> CheckReport:
            u, v, i = triple
            return verify_gendetid(
                n, u, v, i, trials, self.settings.rng_seed, self.settings.max_entry
            )

        return self._record(self._map(run, triples))

    def _factorization_suite(
        self,
        verifier: Callable[[int, Sequence[int], Sequence[Any]], CheckReport],
        n: int,
        words: Sequence[Sequence[int]],
        trials: int,
    ) -> List[CheckReport]:
        def run(item: Tuple[int, Sequence[int]]) -> CheckReport:
            index, word = item
            rng = trial_rng(self.settings.rng_seed, index)
            values = random_positive_vector(rng, len(word), self.settings.max_entry)
            return verifier(n, word, values)

        items = [
            (w_index * trials + trial, word)
            for w_index, word in enumerate(words)
            for trial in range(trials)
        ]
        return self._record(self._map(run, items))

    @log_execution_time()
    def groupfact_suite(
        self, n: int, words: Sequence[Sequence[int]], trials: Optional[int] = None
    ) -> List[CheckReport]:
        return self._factorization_suite(
            verify_group_fact, n, words, trials or self.settings.trials
        )

    @log_execution_time()
    def unifact_suite(
        self, n: int, words: Sequence[Sequence[int]], trials: Optional[int] = None
    ) -> List[CheckReport]:
        return self._factorization_suite(
            verify_uni_fact, n, words, trials or self.settings.trials
        )

    @log_execution_time()
    def worked_example_suite(self) -> List[CheckReport]:
        """The affine A1 example: C, B, M, B̃, |det B̃| = 2 and the derived checks"""
        realization = from_preset("A1affine")
        word = parse_double_word(realization, EXAMPLE_WORD)
        ensemble = build_ensemble(word)
        instance = word_instance(word)

        comparisons = {
            "Cfull": (rational_matrix(realization.Cfull), rational_matrix(EXAMPLE_CFULL)),
            "B": (ensemble.B, rational_matrix(EXAMPLE_B)),
            "M": (ensemble.M, rational_matrix(EXAMPLE_M)),
            "Btilde": (ensemble.Btilde, rational_matrix(EXAMPLE_BTILDE)),
        }
        reports = []
        for name, (computed, expected) in comparisons.items():
            differing = [
                [i, j]
                for i in range(expected.rows)
                for j in range(expected.cols)
                if computed.shape != expected.shape or computed[i, j] != expected[i, j]
            ]
            reports.append(
                CheckReport(f"example-{name}", instance, not differing, {"differing": differing[:5]})
            )
        reports.append(
            CheckReport(
                "example-det",
                instance,
                abs(ensemble.det) == 2,
                {"det": rational_pair(ensemble.det)},
            )
        )
        reports.append(
            CheckReport(
                "example-unfrozen",
                instance,
                ensemble.seed.unfrozen == (1, 2),
                {"unfrozen": list(ensemble.seed.unfrozen)},
            )
        )
        reports.append(oracle_def(word, instance))
        reports.append(verify_poisson_word(word))
        self._record(reports)
        return reports + self.ensemble_commute_suite(word)


def all_reduced_words(realization: CartanRealization, max_length: int) -> List[Tuple[int, ...]]:
    """Every reduced word of length 1..max_length, in lexicographic order."""
    words: List[Tuple[int, ...]] = []
    frontier = [((), identity(realization))]
    for _ in range(max_length):
        next_frontier = []
        for word, element in frontier:
            for i in range(1, realization.r + 1):
                if not element.is_right_descent(i):
                    extended = (word + (i,), element * simple_reflection(realization, i))
                    next_frontier.append(extended)
                    words.append(extended[0])
        frontier = next_frontier
    return sorted(words, key=lambda w: (len(w), w))

