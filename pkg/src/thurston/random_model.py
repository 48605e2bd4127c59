"""Random intersection-data model and the probability that the freeness test fails.

Model: each of the n x m intersection numbers is uniform on {0, ..., k-1} and
each multiplicity is uniform on {1, ..., k}, all independent.  The "bad" event
is the failure of the sufficient freeness condition,

    some row alpha has n_alpha * sum_beta i(alpha, beta) = 1, or
    some column beta has m_beta * sum_alpha i(alpha, beta) = 1.

Its probability is bounded by ``exact_bound``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import InputError

ENUMERATION_LIMIT = 10**8
MC_CHUNK = 200_000


class TooLargeToEnumerate(InputError):
    pass


@dataclass(frozen=True)
class ModelParams:
    n: int
    m: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InputError("n and m must be at least 1")
        if self.k < 2:
            raise InputError("k must be at least 2")


@dataclass(frozen=True)
class ModelSample:
    intersections: np.ndarray
    row_mult: np.ndarray
    col_mult: np.ndarray

    def is_bad(self) -> bool:
        rows = self.row_mult * self.intersections.sum(axis=1)
        cols = self.col_mult * self.intersections.sum(axis=0)
        return bool((rows == 1).any() or (cols == 1).any())


def exact_bound(p: ModelParams) -> float:
    n, m, k = p.n, p.m, p.k
    return 2.0 - (1.0 - m / k ** (m + 1)) ** n - (1.0 - n / k ** (n + 1)) ** m


def _exact_bound_fraction(p: ModelParams) -> Fraction:
    n, m, k = p.n, p.m, p.k
    return 2 - (1 - Fraction(m, k ** (m + 1))) ** n - (1 - Fraction(n, k ** (n + 1))) ** m


def bad_event_prob_exact(p: ModelParams) -> Fraction:
    """Exact bad-event probability for n = m = 1, else the two-term union bound.

    For n = m = 1 the event is {i = 1} and {n_alpha = 1 or m_beta = 1}.  For
    larger sizes the row and column events are correlated through the shared
    matrix, so only the union bound is returned; with uniform laws it
    coincides with :func:`exact_bound`.
    """
    k = p.k
    if p.n == 1 and p.m == 1:
        return Fraction(1, k) * (1 - (1 - Fraction(1, k)) ** 2)
    return _exact_bound_fraction(p)


def brute_force_prob(p: ModelParams) -> Fraction:
    """Exact bad-event probability by enumerating every outcome of the model."""
    n, m, k = p.n, p.m, p.k
    total = k ** (n * m + n + m)
    if total > ENUMERATION_LIMIT:
        raise TooLargeToEnumerate(f"{total} outcomes exceed the limit {ENUMERATION_LIMIT}")

    # All multiplicity tuples, as an array of shape (k^(n+m), n+m) with entries 1..k.
    mults = _digits(np.arange(k ** (n + m)), k, n + m) + 1
    unit_mult = (mults == 1).astype(np.int64)

    # Bad or not depends on the matrix only through which row and column sums
    # equal 1; count each such pattern over all matrices, then count the bad
    # multiplicity tuples for each pattern.
    mats = _digits(np.arange(k ** (n * m)), k, n * m).reshape(-1, n, m)
    pattern = np.concatenate([mats.sum(axis=2) == 1, mats.sum(axis=1) == 1], axis=1)
    keys = pattern.astype(np.int64) @ (1 << np.arange(n + m))
    counts = np.bincount(keys, minlength=1 << (n + m))

    bad = 0
    for key in np.nonzero(counts)[0]:
        mask = ((int(key) >> np.arange(n + m)) & 1).astype(np.int64)
        bad_mults = int(((unit_mult @ mask) > 0).sum())
        bad += int(counts[key]) * bad_mults
    return Fraction(bad, total)


def _digits(x: np.ndarray, base: int, width: int) -> np.ndarray:
    return (x[:, None] // base ** np.arange(width)) % base


def sample_model(p: ModelParams, rng: np.random.Generator) -> ModelSample:
    return ModelSample(
        rng.integers(0, p.k, size=(p.n, p.m)),
        rng.integers(1, p.k + 1, size=p.n),
        rng.integers(1, p.k + 1, size=p.m),
    )


def _count_bad(p: ModelParams, trials: int, seed_seq: np.random.SeedSequence) -> int:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    mats = rng.integers(0, p.k, size=(trials, p.n, p.m))
    rows = rng.integers(1, p.k + 1, size=(trials, p.n))
    cols = rng.integers(1, p.k + 1, size=(trials, p.m))
    bad = ((rows * mats.sum(axis=2)) == 1).any(axis=1) | ((cols * mats.sum(axis=1)) == 1).any(axis=1)
    return int(bad.sum())


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    std_error: float
    trials: int
    seed: int


def mc_estimate(p: ModelParams, trials: int, seed: int, threads: int = 1) -> MCEstimate:
    """Monte-Carlo frequency of the bad event.

    Trials are split into fixed-size chunks, each with its own spawned seed
    stream, so the result does not depend on ``threads``.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda a: _count_bad(p, *a), zip(sizes, streams)))
    else:
        counts = [_count_bad(p, s, ss) for s, ss in zip(sizes, streams)]
    est = sum(counts) / trials
    return MCEstimate(est, math.sqrt(est * (1.0 - est) / trials), trials, seed)


def model_report(p: ModelParams, trials: int | None = None, seed: int | None = None, threads: int = 1) -> dict:
    out: dict = {"n": p.n, "m": p.m, "k": p.k, "exact_bound": exact_bound(p)}
    if p.n == 1 and p.m == 1:
        out["exact_prob"] = float(bad_event_prob_exact(p))
    else:
        try:
            out["exact_prob"] = float(brute_force_prob(p))
        except TooLargeToEnumerate:
            pass
    if trials:
        if seed is None:
            raise InputError("a seed is required for Monte-Carlo estimation")
        mc = mc_estimate(p, trials, seed, threads)
        out.update(mc_estimate=mc.estimate, mc_std_error=mc.std_error, trials=trials, seed=seed)
    return out
