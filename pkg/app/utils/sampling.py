"""Deterministic random rational points for verification trials."""

from typing import List

import numpy as np
import sympy as sp


def trial_rng(rng_seed: int, trial: int) -> np.random.Generator:
    """Independent stream per (run seed, trial index)."""
    return np.random.default_rng([rng_seed, trial])


def random_positive_rational(rng: np.random.Generator, bound: int) -> sp.Rational:
    """p/q with 1 <= p, q <= bound."""
    numerator = int(rng.integers(1, bound + 1))
    denominator = int(rng.integers(1, bound + 1))
    return sp.Rational(numerator, denominator)


def random_positive_vector(
    rng: np.random.Generator, size: int, bound: int
) -> List[sp.Rational]:
    return [random_positive_rational(rng, bound) for _ in range(size)]
