"""Random branch sets for property tests and ``curvetop selftest``."""
from __future__ import annotations

import random
from fractions import Fraction

from curvetop.resolution import BranchSpec, ResolutionError, Term, check_distinct


def random_branch(rng: random.Random, name: str, max_denominator: int = 4,
                  max_terms: int = 3) -> BranchSpec:
    roll = rng.random()
    if roll < 0.06:
        return BranchSpec(name, (), "x=0")
    if roll < 0.12:
        return BranchSpec(name, (), "y=0")
    n = rng.randint(1, max_denominator)
    numerators = sorted(rng.sample(range(1, 4 * n + 1), rng.randint(1, max_terms)))
    terms = []
    for m in numerators:
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        terms.append(Term(Fraction(c), Fraction(m, n)))
    return BranchSpec(name, tuple(terms))


def random_curve(rng: random.Random, max_branches: int = 3, **kw) -> list[BranchSpec]:
    """Between one and ``max_branches`` pairwise distinct branches."""
    while True:
        k = rng.randint(1, max_branches)
        branches = [random_branch(rng, f"S{i}", **kw) for i in range(1, k + 1)]
        try:
            check_distinct(branches)
        except ResolutionError:
            continue
        return branches
