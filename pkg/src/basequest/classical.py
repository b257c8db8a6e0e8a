"""Classical query baselines for the unsorted-database search.

Two sampling disciplines: memoryless queries (with replacement, expected
cost = database size) and non-repeating queries (without replacement,
expected cost = (size + 1)/2). Monte-Carlo simulation uses the PCG64
generator; trials are grouped into fixed-size blocks, each block drawing
from its own SeedSequence child stream, so any parallel schedule over
blocks reproduces the serial results exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DrawBudgetExceededError,
    InvalidDimensionError,
    InvalidParameterError,
)
from .grover import optimal_queries

# Trials per seed block. Fixed constant: changing it changes the sampled
# stream, so it is part of the documented determinism contract.
BLOCK_SIZE = 4096

# Per-trial query budget for with-replacement runs, in units of the
# database size.
DRAW_BUDGET_FACTOR = 10**6


class SearchMode(str, Enum):
    WITH_REPLACEMENT = "with"
    WITHOUT_REPLACEMENT = "without"


@dataclass(frozen=True)
class TrialStats:
    """Monte-Carlo summary: mean queries and its standard error."""

    trials: int
    mean_queries: float
    std_error: float


def _check_size(database_size: int) -> None:
    if not isinstance(database_size, (int, np.integer)) or database_size < 1:
        raise InvalidDimensionError(
            f"database size must be an integer >= 1, got {database_size!r}")


def expected_queries(database_size: int, mode: SearchMode) -> float:
    """Exact expectation of the query count for the given discipline."""
    _check_size(database_size)
    mode = SearchMode(mode)
    if mode is SearchMode.WITH_REPLACEMENT:
        return float(database_size)
    return (database_size + 1) / 2.0


def _with_replacement_block(rng: np.random.Generator, count: int,
                            database_size: int, budget: int) -> np.ndarray:
    # Memoryless queries hit the target with chance 1/size each; the query
    # count is exactly geometric, so sample that law directly.
    draws = rng.geometric(1.0 / database_size, size=count)
    worst = int(draws.max())
    if worst > budget:
        raise DrawBudgetExceededError(
            f"a trial needed {worst} draws, over the budget of {budget}")
    return draws


def _without_replacement_block(rng: np.random.Generator, count: int,
                               database_size: int) -> np.ndarray:
    # Random query priorities: each object gets an i.i.d. key and queries
    # proceed in key order, which samples a uniformly random permutation.
    # The query count is the rank of the target's key. Chunk rows to bound
    # memory; chunk size depends only on the inputs, so streams reproduce.
    out = np.empty(count, dtype=np.int64)
    chunk = max(1, min(count, 10**7 // max(1, database_size)))
    done = 0
    while done < count:
        rows = min(chunk, count - done)
        keys = rng.random((rows, database_size))
        out[done:done + rows] = 1 + (keys < keys[:, :1]).sum(axis=1)
        done += rows
    return out


def sample_queries(
    database_size: int,
    mode: SearchMode,
    trials: int,
    seed: int | None = None,
    *,
    max_draws: int | None = None,
) -> np.ndarray:
    """Per-trial query counts, one entry per trial.

    Deterministic for a fixed seed, and the first k*BLOCK_SIZE entries do
    not depend on how many trials follow them. max_draws overrides the
    default with-replacement per-trial budget of 10**6 * database_size
    draws; the budget exists to turn an astronomically unlucky (or
    misconfigured) run into an explicit error instead of a silent crawl.
    """
    _check_size(database_size)
    mode = SearchMode(mode)
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise InvalidParameterError(f"trials must be an integer >= 1, got {trials!r}")
    budget = DRAW_BUDGET_FACTOR * database_size if max_draws is None else max_draws
    if budget < 1:
        raise InvalidParameterError(f"draw budget must be >= 1, got {budget!r}")

    blocks = -(-trials // BLOCK_SIZE)
    streams = np.random.SeedSequence(seed).spawn(blocks)
    samples = np.empty(trials, dtype=np.int64)
    for k, stream in enumerate(streams):
        lo = k * BLOCK_SIZE
        hi = min(trials, lo + BLOCK_SIZE)
        rng = np.random.Generator(np.random.PCG64(stream))
        if mode is SearchMode.WITH_REPLACEMENT:
            samples[lo:hi] = _with_replacement_block(rng, hi - lo,
                                                     database_size, budget)
        else:
            samples[lo:hi] = _without_replacement_block(rng, hi - lo,
                                                        database_size)
    return samples


def simulate_search(
    database_size: int,
    mode: SearchMode,
    trials: int,
    seed: int | None = None,
    *,
    max_draws: int | None = None,
) -> TrialStats:
    """Monte-Carlo estimate of the classical query cost.

    Mean of sample_queries with its standard error (sample standard
    deviation over sqrt(trials); zero for a single trial).
    """
    samples = sample_queries(database_size, mode, trials, seed,
                             max_draws=max_draws)
    mean = float(samples.mean())
    spread = float(samples.std(ddof=1)) if trials > 1 else 0.0
    return TrialStats(trials=int(trials), mean_queries=mean,
                      std_error=spread / math.sqrt(trials))


def theoretical_std(database_size: int, mode: SearchMode) -> float:
    """Population standard deviation of the query count."""
    _check_size(database_size)
    mode = SearchMode(mode)
    if mode is SearchMode.WITH_REPLACEMENT:
        # geometric law: var = (1-p)/p**2 with p = 1/size
        return math.sqrt(database_size**2 - database_size)
    # uniform on 1..size: var = (size**2 - 1)/12
    return math.sqrt((database_size**2 - 1) / 12.0)


def speedup_ratio(database_size: int) -> float | None:
    """Classical with-replacement cost over the optimal amplified query count.

    None when the optimal count is zero (a two-object database already starts
    at its best success chance), where the ratio is undefined.
    """
    best = optimal_queries(database_size)
    if best.queries == 0:
        return None
    return expected_queries(database_size, SearchMode.WITH_REPLACEMENT) / best.queries
