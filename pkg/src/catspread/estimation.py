"""
Estimation of squared distance variance from categorical samples.

Two estimators are provided:

``paper``
    A closed-form expression in ``n`` and the empirical frequencies, kept
    verbatim for comparison. It is *not* unbiased (it returns -24 on a
    constant sample of four).
``ustat`` (default)
    The exactly unbiased U-statistic
    ``S2/(n)_2 + S4/(n)_4 - 2 S3/(n)_3`` built from the pairwise distances
    of distinct observations.

Both depend on the sample only through the category counts, which is what
makes the jackknife cheap: deleting an observation of category ``k`` gives
the same leave-one-out estimate for every member of that category.
"""

from __future__ import annotations

import enum
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CatSpreadError, SampleSizeError
from .measures import (DistanceSpec, Euclidean, Pmf, as_pmf,
                       category_distance_matrix, distance_variance)


class Method(str, enum.Enum):
    PAPER = "paper"
    USTAT = "ustat"


@dataclass(frozen=True)
class Sample:
    """
    I.i.d. categorical observations.

    Labels are opaque; categories are indexed in order of first appearance.
    """

    observations: tuple

    def __post_init__(self):
        obs = tuple(self.observations)
        if not obs:
            raise SampleSizeError("empty sample")
        object.__setattr__(self, "observations", obs)
        index = {}
        for label in obs:
            index.setdefault(label, len(index))
        codes = np.fromiter((index[x] for x in obs), dtype=np.intp, count=len(obs))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_codes", codes)

    @property
    def n(self):
        return len(self.observations)

    @property
    def K(self):
        return len(self._index)

    @property
    def category_index(self):
        return dict(self._index)

    @property
    def labels(self):
        return tuple(self._index)

    @property
    def codes(self):
        return self._codes.copy()

    @property
    def counts(self):
        return np.bincount(self._codes, minlength=self.K)


def as_sample(sample) -> Sample:
    return sample if isinstance(sample, Sample) else Sample(tuple(sample))


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    method: Method
    n: int
    K: int
    jackknife_se: float | None = None
    ci: tuple | None = None
    confidence: float | None = None

    def to_dict(self):
        out = {"estimate": self.estimate, "method": self.method.value,
               "n": self.n, "K": self.K}
        if self.jackknife_se is not None:
            out["se"] = self.jackknife_se
        if self.ci is not None:
            out["ci"] = list(self.ci)
            out["confidence"] = self.confidence
        return out


def empirical_pmf(sample) -> Pmf:
    """Maximum likelihood pmf ``count_k / n`` with labels kept."""
    sample = as_sample(sample)
    return Pmf(tuple(sample.counts / sample.n), tuple(str(x) for x in sample.labels))


# ---------------------------------------------------------------------------
# Count-level kernels
# ---------------------------------------------------------------------------

def _paper_from_counts(counts):
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    if n < 4:
        raise SampleSizeError("paper estimator needs n >= 4, got n = %d" % n)
    p = np.sort(counts / n)
    s2 = np.sum(p ** 2)
    s3 = np.sum(p ** 3)
    d3 = (n - 1) * (n - 2) * (n - 3)
    d2 = (n - 2) * (n - 3)
    return float(n ** 3 / d3 * (1 - s2) ** 2
                 - 2 * n ** 2 / d2 * s3
                 - n * (n - 6) / d2 * s2
                 - n * (n + 2) / d2)


def _ustat_from_counts(counts, D):
    # Sums over distinct-index tuples reduced to category aggregates:
    #   T  = sum_{i!=j} d_ij          S2 = sum_{i!=j} d_ij^2
    #   S3 = sum_i r_i^2 - S2         (r_i = sum_{j!=i} d_ij)
    #   S4 = T^2 - 4 S3 - 2 S2
    c = np.asarray(counts, dtype=float)
    n = c.sum()
    if n < 4:
        raise SampleSizeError("U-statistic needs n >= 4, got n = %d" % n)
    diag = np.diag(D)
    D2 = D * D
    T = c @ D @ c - c @ diag
    S2 = c @ D2 @ c - c @ np.diag(D2)
    r = D @ c - diag
    S3 = c @ (r * r) - S2
    S4 = T * T - 4.0 * S3 - 2.0 * S2
    ff2 = n * (n - 1)
    ff3 = ff2 * (n - 2)
    ff4 = ff3 * (n - 3)
    return float(S2 / ff2 + S4 / ff4 - 2.0 * S3 / ff3)


def _estimator(method, spec, K):
    method = Method(method)
    if method is Method.PAPER:
        return _paper_from_counts
    D = category_distance_matrix(spec, K)
    return lambda counts: _ustat_from_counts(counts, D)


# ---------------------------------------------------------------------------
# Public estimators
# ---------------------------------------------------------------------------

def unbiased_dvar_sq_paper(sample) -> float:
    """
    Closed-form estimate of the squared distance variance, kept verbatim.

    Evaluated verbatim; the result can be negative and is biased (see module
    docstring).
    """
    return _paper_from_counts(as_sample(sample).counts)


def unbiased_dvar_sq_ustat(sample, spec: DistanceSpec = Euclidean()) -> float:
    """
    Unbiased U-statistic for the squared distance variance.

    Cost is ``O(K^2)`` in the number of observed categories. With a
    ``MatrixDistance``, rows of the matrix follow first-appearance order of
    the sample labels.
    """
    sample = as_sample(sample)
    D = category_distance_matrix(spec, sample.K)
    return _ustat_from_counts(sample.counts, D)


def estimate(sample, method=Method.USTAT, spec: DistanceSpec = Euclidean()) -> EstimateResult:
    sample = as_sample(sample)
    value = _estimator(method, spec, sample.K)(sample.counts)
    return EstimateResult(value, Method(method), sample.n, sample.K)


def _normal_quantile(confidence):
    if not 0 < confidence < 1:
        raise CatSpreadError("confidence must lie in (0, 1), got %r" % confidence)
    return statistics.NormalDist().inv_cdf(0.5 + confidence / 2.0)


def _jackknife_counts(counts, fn):
    counts = np.asarray(counts)
    n = int(counts.sum())
    theta = fn(counts)
    pseudo = np.zeros(len(counts))
    for k in np.flatnonzero(counts):
        loo = counts.copy()
        loo[k] -= 1
        pseudo[k] = n * theta - (n - 1) * fn(loo)
    w = counts.astype(float)
    mean = np.sum(w * pseudo) / n
    var = np.sum(w * (pseudo - mean) ** 2) / (n * (n - 1))
    return theta, math.sqrt(max(var, 0.0))


def jackknife(sample, estimator=Method.USTAT, confidence: float = 0.95,
              spec: DistanceSpec = Euclidean()) -> EstimateResult:
    """
    Delete-one jackknife standard error and normal confidence interval.

    Pseudo-values are ``n theta - (n-1) theta_(-i)`` and
    ``SE^2 = sum (pv_i - mean pv)^2 / (n (n-1))``. The interval is
    ``theta +/- z SE`` around the full-sample estimate.

    Raises
    ------
    SampleSizeError
        ``n < 5``; the leave-one-out samples must still have ``n >= 4``.
    """
    z = _normal_quantile(confidence)
    sample = as_sample(sample)
    if sample.n < 5:
        raise SampleSizeError("jackknife needs n >= 5, got n = %d" % sample.n)
    fn = _estimator(estimator, spec, sample.K)
    theta, se = _jackknife_counts(sample.counts, fn)
    return EstimateResult(theta, Method(estimator), sample.n, sample.K,
                          jackknife_se=se, ci=(theta - z * se, theta + z * se),
                          confidence=confidence)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def replicate_seed(seed: int, replicate: int) -> np.random.SeedSequence:
    """Seed of one replicate: ``SeedSequence([seed, replicate])``."""
    return np.random.SeedSequence([int(seed), int(replicate)])


@dataclass(frozen=True)
class SimulationSummary:
    mean: float
    variance: float
    mc_se: float
    coverage: float | None
    true_value: float
    n: int
    reps: int
    method: Method

    def to_dict(self):
        return {"mean": self.mean, "variance": self.variance,
                "mc_se": self.mc_se, "coverage": self.coverage,
                "true_value": self.true_value, "n": self.n,
                "reps": self.reps, "method": self.method.value}


def simulate_estimator(pmf, n: int, reps: int, seed: int,
                       estimator=Method.USTAT,
                       spec: DistanceSpec = Euclidean(),
                       confidence: float = 0.95,
                       workers: int = 1) -> SimulationSummary:
    """
    Monte Carlo mean, variance and CI coverage of an estimator.

    Replicate ``r`` draws ``n`` observations with a generator seeded by
    :func:`replicate_seed`, so results do not depend on ``workers``.
    ``coverage`` is the fraction of jackknife intervals containing the true
    squared distance variance; it is ``None`` when ``n < 5``.
    """
    pmf = as_pmf(pmf)
    if n < 4:
        raise SampleSizeError("simulation needs n >= 4, got %d" % n)
    if reps < 1:
        raise CatSpreadError("reps must be >= 1")
    z = _normal_quantile(confidence)
    method = Method(estimator)
    probs = pmf.array
    K = pmf.K
    fn = _estimator(method, spec, K)
    truth = distance_variance(pmf, spec) ** 2
    with_ci = n >= 5

    def one(r):
        rng = np.random.default_rng(replicate_seed(seed, r))
        counts = np.bincount(rng.choice(K, size=n, p=probs), minlength=K)
        if not with_ci:
            return fn(counts), None
        theta, se = _jackknife_counts(counts, fn)
        return theta, abs(theta - truth) <= z * se

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(reps)))
    else:
        results = [one(r) for r in range(reps)]

    values = [v for v, _ in results]
    mean = math.fsum(values) / reps
    var = math.fsum((v - mean) ** 2 for v in values) / (reps - 1) if reps > 1 else 0.0
    coverage = (sum(bool(h) for _, h in results) / reps) if with_ci else None
    return SimulationSummary(mean, var, math.sqrt(var / reps), coverage, truth,
                             n, reps, method)

