"""
Spread measures for categorical distributions.

Everything here is a pure function of a probability vector. Scalar entry
points (``distance_variance``, ``shannon``, ...) validate their input as a
:class:`Pmf`; the measure descriptors additionally expose ``evaluate``, which
works on raw arrays of shape ``(..., K)`` without simplex validation so the
axiom checker can batch evaluations and take unconstrained partial
derivatives.

Natural logarithms are used throughout, with ``0 log 0 = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import (DegenerateDenominatorError, DimensionError, DomainError,
                     NegativeTypeError, SimplexError)

SIMPLEX_TOL = 1e-9
CLAMP_TOL = 1e-12
SYMMETRY_TOL = 1e-12
SHANNON_SWITCH = 1e-8


# ---------------------------------------------------------------------------
# Probability vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pmf:
    """
    Probability mass function on ``K`` categories.

    Zero entries are allowed (closed simplex). ``labels``, when given, must be
    aligned with ``probs``.
    """

    probs: tuple
    labels: tuple | None = None

    def __post_init__(self):
        probs = tuple(float(p) for p in np.asarray(self.probs, dtype=float).ravel())
        object.__setattr__(self, "probs", probs)
        if len(probs) < 1:
            raise SimplexError("a pmf needs at least one category")
        if not all(math.isfinite(p) for p in probs):
            raise SimplexError("probabilities must be finite")
        if min(probs) < 0:
            raise SimplexError("negative probability %r" % min(probs))
        total = math.fsum(probs)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise SimplexError(
                "probabilities sum to %.12g, not 1 (tolerance %g)"
                % (total, SIMPLEX_TOL))
        if self.labels is not None:
            labels = tuple(str(lab) for lab in self.labels)
            if len(labels) != len(probs):
                raise SimplexError("%d labels for %d probabilities"
                                   % (len(labels), len(probs)))
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_values(cls, values, labels=None, renormalize=False):
        """Build a pmf, optionally dividing by the total.

        Renormalization is refused when the total lies outside
        ``[0.5, 2.0]``; that is treated as a data error, not rounding noise.
        """
        arr = np.asarray(values, dtype=float).ravel()
        if renormalize:
            if arr.size and np.all(np.isfinite(arr)) and arr.min() >= 0:
                total = math.fsum(arr)
                if not 0.5 <= total <= 2.0:
                    raise SimplexError(
                        "cannot renormalize: total %.12g outside [0.5, 2]"
                        % total)
                arr = arr / total
        return cls(tuple(arr), labels)

    @classmethod
    def uniform(cls, K):
        return cls((1.0 / K,) * K)

    @classmethod
    def degenerate(cls, K, index=0):
        probs = [0.0] * K
        probs[index] = 1.0
        return cls(tuple(probs))

    @property
    def K(self):
        return len(self.probs)

    @property
    def array(self):
        return np.array(self.probs, dtype=float)

    @property
    def is_degenerate(self):
        return max(self.probs) == 1.0

    def one_hot(self, k):
        """One-hot vector of category ``k`` (0-based)."""
        z = np.zeros(self.K)
        z[k] = 1.0
        return z


PmfLike = Union[Pmf, Sequence[float], np.ndarray]


def as_pmf(pmf: PmfLike) -> Pmf:
    return pmf if isinstance(pmf, Pmf) else Pmf(tuple(np.asarray(pmf, float).ravel()))


def _canon(P):
    # Sorting fixes the summation order, so permuted inputs give identical floats.
    return np.sort(np.asarray(P, dtype=float), axis=-1)


# ---------------------------------------------------------------------------
# Distance families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Euclidean:
    """One-hot Euclidean distance: 0 on matches, sqrt(2) otherwise."""

    def constants(self):
        return 0.0, math.sqrt(2.0)

    @property
    def scale(self):
        return math.sqrt(2.0)


@dataclass(frozen=True)
class AlphaPower:
    """Euclidean distance raised to ``alpha`` in (0, 2]."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 2:
            raise DomainError("alpha must lie in (0, 2], got %r" % self.alpha)

    def constants(self):
        return 0.0, 2.0 ** (self.alpha / 2.0)

    @property
    def scale(self):
        return 2.0 ** (self.alpha / 2.0)


@dataclass(frozen=True)
class GaussianKernel:
    """Kernel ``exp(-|z1 - z2|_2 / sigma2)`` used as the distance."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise DomainError("sigma2 must be positive, got %r" % self.sigma2)

    def constants(self):
        return 1.0, math.exp(-math.sqrt(2.0) / self.sigma2)

    @property
    def scale(self):
        return -math.expm1(-math.sqrt(2.0) / self.sigma2)


@dataclass(frozen=True)
class TwoConstant:
    """``c1`` on matches and ``c2`` on mismatches."""

    c1: float
    c2: float

    def __post_init__(self):
        if self.c1 == self.c2:
            raise DomainError("two-constant distance needs c1 != c2")

    def constants(self):
        return float(self.c1), float(self.c2)

    @property
    def scale(self):
        return abs(self.c1 - self.c2)


@dataclass(frozen=True)
class MatrixDistance:
    """Explicit symmetric, nonnegative ``K x K`` distance matrix."""

    D: tuple

    def __post_init__(self):
        arr = np.asarray(self.D, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError("distance matrix must be square, got shape %s"
                                 % (arr.shape,))
        if not np.all(np.isfinite(arr)):
            raise DomainError("distance matrix has non-finite entries")
        if np.any(arr < 0):
            raise DomainError("distance matrix has negative entries")
        if np.max(np.abs(arr - arr.T), initial=0.0) > 1e-12:
            raise DomainError("distance matrix is not symmetric")
        object.__setattr__(self, "D", tuple(map(tuple, arr.tolist())))

    @property
    def array(self):
        return np.array(self.D, dtype=float)


DistanceSpec = Union[Euclidean, AlphaPower, GaussianKernel, TwoConstant,
                     MatrixDistance]


def category_distance_matrix(spec: DistanceSpec, K: int) -> np.ndarray:
    """Distance between every pair of categories under ``spec``."""
    if isinstance(spec, MatrixDistance):
        D = spec.array
        if D.shape[0] != K:
            raise DimensionError("distance matrix is %dx%d but K = %d"
                                 % (D.shape[0], D.shape[0], K))
        return D
    same, diff = spec.constants()
    D = np.full((K, K), diff)
    np.fill_diagonal(D, same)
    return D


# ---------------------------------------------------------------------------
# Distance variance
# ---------------------------------------------------------------------------

def _sum_others(X):
    # sum_{j != k} X_j for sorted nonnegative X. Only the largest entry can
    # cancel badly in S - X_k, so its complement is summed directly.
    out = np.sum(X, axis=-1, keepdims=True) - X
    out[..., -1] = np.sum(X[..., :-1], axis=-1)
    return out


def _base_term_sq(P):
    # (sum pi^2)^2 + sum pi^2 - 2 sum pi^3, rearranged into nonnegative terms
    # so that near-degenerate pmfs keep full relative precision
    P = _canon(P)
    sq = P * P
    return np.sum(sq * (1.0 - P) ** 2 + sq * _sum_others(sq), axis=-1)


def _base_term(P):
    return np.sqrt(np.maximum(_base_term_sq(P), 0.0))


def base_term(pmf: PmfLike) -> float:
    """
    Bracket shared by every binary-distance variant of distance variance.

    ``B(pi) = [(sum pi^2)^2 + sum pi^2 - 2 sum pi^3]^(1/2)``; zero exactly
    on degenerate distributions.
    """
    return float(_base_term(as_pmf(pmf).array))


def generalized_distance_variance(pmf: PmfLike, D) -> float:
    """
    Distance variance for an arbitrary category distance matrix ``D``.

    Evaluates ``E[d^2(X1,X2)] + E^2[d(X1,X2)] - 2 E[d(X1,X2) d(X1,X3)]`` with
    independent copies ``X1, X2, X3`` and returns its square root.

    Raises
    ------
    DimensionError
        ``D`` is not ``K x K``.
    NegativeTypeError
        The moment expression is below ``-1e-12``. It equals the mean square
        of the double-centred distance, so for a symmetric ``D`` this only
        happens through numerical breakdown. Values in ``[-1e-12, 0)`` are
        clamped.
    """
    pmf = as_pmf(pmf)
    D = MatrixDistance(D).array if not isinstance(D, MatrixDistance) else D.array
    if D.shape[0] != pmf.K:
        raise DimensionError("distance matrix is %dx%d but K = %d"
                             % (D.shape[0], D.shape[0], pmf.K))
    p = pmf.array
    e_d2 = p @ (D ** 2) @ p
    e_d = p @ D @ p
    row = D @ p
    e_dd = p @ (row ** 2)
    inner = e_d2 + e_d ** 2 - 2.0 * e_dd
    if inner < -CLAMP_TOL:
        raise NegativeTypeError(
            "distance variance expression is %.3e < 0" % inner)
    return math.sqrt(max(inner, 0.0))


def distance_variance(pmf: PmfLike, spec: DistanceSpec = Euclidean()) -> float:
    """
    Distance variance of a categorical variable.

    For every two-valued distance the result is ``scale * base_term(pmf)``
    with ``scale`` equal to ``sqrt(2)`` (Euclidean), ``2**(alpha/2)``,
    ``1 - exp(-sqrt(2)/sigma2)`` or ``|c1 - c2|``. ``MatrixDistance`` is
    delegated to :func:`generalized_distance_variance`.

    Examples
    --------
    >>> round(distance_variance([0.5, 0.5]), 6)
    0.707107
    >>> distance_variance([0.5, 0.5], TwoConstant(1, 3))
    1.0
    """
    pmf = as_pmf(pmf)
    if isinstance(spec, MatrixDistance):
        return generalized_distance_variance(pmf, spec)
    return float(spec.scale * _base_term(pmf.array))


def uniform_distance_variance(K: int) -> float:
    """Closed form ``sqrt(2(K-1))/K`` for the uniform pmf on K categories."""
    return math.sqrt(2.0 * (K - 1)) / K


def lin_distance_matrix(pmf: PmfLike, zero_diagonal: bool = False) -> np.ndarray:
    """
    Lin's frequency-weighted distance between categories.

    ``d(k, k') = [log pi_k + log pi_k' - 2 log(pi_k + pi_k')]
    / [2 log(pi_k + pi_k')]``, evaluated verbatim. The formula gives nonzero
    self-distances; ``zero_diagonal=True`` forces them to 0 and skips their
    evaluation.
    """
    pmf = as_pmf(pmf)
    p = pmf.array
    if np.any(p <= 0):
        raise DomainError("Lin distance needs strictly positive probabilities")
    K = pmf.K
    D = np.zeros((K, K))
    logs = np.log(p)
    # off-diagonal pairs first so errors name a genuine pair of categories
    pairs = [(i, j) for i in range(K) for j in range(i + 1, K)]
    if not zero_diagonal:
        pairs += [(i, i) for i in range(K)]
    for i, j in pairs:
        total = p[i] + p[j]
        if abs(total - 1.0) <= CLAMP_TOL:
            raise DegenerateDenominatorError((i, j))
        lt = math.log(total)
        D[i, j] = D[j, i] = (logs[i] + logs[j] - 2.0 * lt) / (2.0 * lt)
    return D


# ---------------------------------------------------------------------------
# One-hot geometry
# ---------------------------------------------------------------------------

def one_hot_covariance(pmf: PmfLike) -> np.ndarray:
    """Covariance matrix of the one-hot encoding, ``diag(pi) - pi pi^T``."""
    p = as_pmf(pmf).array
    return np.diag(p) - np.outer(p, p)


def _deviation_norms(P, p):
    # |Z(k) - E(Z)|_p for every k, in closed form
    P = np.asarray(P, dtype=float)
    A = np.abs(P)
    if math.isinf(p):
        K = P.shape[-1]
        if K == 1:
            other = np.zeros_like(P)
        else:
            order = np.argsort(A, axis=-1)
            top = np.take_along_axis(A, order[..., -1:], axis=-1)
            second = np.take_along_axis(A, order[..., -2:-1], axis=-1)
            is_top = np.zeros(P.shape, dtype=bool)
            np.put_along_axis(is_top, order[..., -1:], True, axis=-1)
            other = np.where(is_top, second, top)
        return np.maximum(np.abs(1.0 - P), other)
    Ap = A ** p
    rest = np.maximum(np.sum(Ap, axis=-1, keepdims=True) - Ap, 0.0)
    return (np.abs(1.0 - P) ** p + rest) ** (1.0 / p)


def deviation_norms(pmf: PmfLike, p: float = 2.0) -> np.ndarray:
    """Vector p-norms ``|Z(k) - E(Z)|_p`` of the one-hot deviations."""
    _check_norm_order(p)
    return _deviation_norms(as_pmf(pmf).array, p)


def _check_norm_order(p):
    if not (math.isinf(p) and p > 0) and not (math.isfinite(p) and p >= 1):
        raise DomainError("norm order must be >= 1 or inf, got %r" % p)


# ---------------------------------------------------------------------------
# Weight functions for the geometric family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Power:
    """``w(pi) = pi**q``."""

    q: float

    def __post_init__(self):
        if not self.q >= 0:
            raise DomainError("power weight needs q >= 0")

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** self.q

    def to_spec(self):
        return "pow%s" % _num(self.q)


@dataclass(frozen=True)
class TsallisSum:
    """
    ``w(pi) = 1/(m-1) * sum_{q=start}^{m-1} pi**q``.

    ``start=1`` (default) makes the L1 geometric measure exactly twice the
    Tsallis entropy; ``start=0`` adds the constant ``2(K-1)/(m-1)``.
    """

    m: int
    start: int = 1

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise DomainError("TsallisSum needs an integer m >= 2")
        if self.start not in (0, 1):
            raise DomainError("TsallisSum start index must be 0 or 1")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for q in range(self.start, int(self.m)):
            out = out + x ** q
        return out / (self.m - 1)

    def to_spec(self):
        return "tsallis%d" % self.m + ("" if self.start == 1 else "@0")


@dataclass(frozen=True)
class NegLogComplement:
    """``w(pi) = -log(1 - pi)``; undefined at ``pi = 1``."""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x >= 1.0):
            raise DomainError("-log(1 - pi) is infinite at pi = 1")
        return -np.log1p(-x)

    def to_spec(self):
        return "neglog"


@dataclass(frozen=True)
class Exp:
    def __call__(self, x):
        return np.exp(np.asarray(x, dtype=float))

    def to_spec(self):
        return "exp"


@dataclass(frozen=True)
class Sin:
    def __call__(self, x):
        return np.sin(np.asarray(x, dtype=float))

    def to_spec(self):
        return "sin"


@dataclass(frozen=True)
class CustomWeight:
    """Arbitrary scalar map on [0, 1], applied elementwise."""

    fn: Callable[[float], float] = field(compare=False)
    name: str = "custom"

    def __call__(self, x):
        return np.vectorize(self.fn, otypes=[float])(np.asarray(x, dtype=float))

    def to_spec(self):
        return self.name


WeightFunction = Union[Power, TsallisSum, NegLogComplement, Exp, Sin,
                       CustomWeight]


def _geometric(P, w, l, p):
    P = _canon(P)
    norms = _deviation_norms(P, p)
    terms = np.zeros_like(P)
    # 0 * w(1) := 0 when the deviation vanishes (degenerate pmf)
    nz = norms > 0
    if np.any(nz):
        terms[nz] = w(P[nz]) * norms[nz] ** l
    return np.sum(terms, axis=-1)


def geometric_family(pmf: PmfLike, w: WeightFunction, l: float = 1.0,
                     p: float = 1.0) -> float:
    """
    Weighted sum of one-hot deviation norms.

    ``sum_k w(pi_k) |Z(k) - E(Z)|_p ** l``. With ``w = Power(2)``, ``l = 2``,
    ``p = 2`` this is half the squared distance variance; with ``p = 1`` the
    deviation norm is ``2(1 - pi_k)``.
    """
    _check_norm_order(p)
    if not (l > 0 and math.isfinite(l)):
        raise DomainError("exponent l must be finite and positive")
    return float(_geometric(as_pmf(pmf).array, w, l, p))


def _algebraic(P, p):
    P = _canon(P)
    A = np.abs(P)
    diag = np.abs(P * (1.0 - P))
    if math.isinf(p):
        if P.shape[-1] == 1:
            return np.max(diag, axis=-1)
        top = np.sort(A, axis=-1)
        off = top[..., -1] * top[..., -2]
        return np.maximum(np.max(diag, axis=-1), off)
    Ap = A ** p
    inner = np.sum(diag ** p + Ap * _sum_others(Ap), axis=-1)
    return inner ** (1.0 / p)


def algebraic_family(pmf: PmfLike, p: float = 2.0) -> float:
    """
    Entrywise p-norm of the one-hot covariance matrix.

    ``p = 1`` gives twice the Gini index, ``p = 2`` the Frobenius norm
    (distance variance over sqrt(2)), ``p = inf`` the largest
    ``pi_k (1 - pi_k)``.
    """
    _check_norm_order(p)
    return float(_algebraic(as_pmf(pmf).array, p))


# ---------------------------------------------------------------------------
# Entropies
# ---------------------------------------------------------------------------

def _xlogx(x):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def _shannon(P):
    return -np.sum(_xlogx(_canon(P)), axis=-1)


def _tsallis(P, m):
    if abs(m - 1.0) < SHANNON_SWITCH:
        return _shannon(P)
    P = _canon(P)
    return (1.0 - np.sum(np.abs(P) ** m, axis=-1)) / (m - 1.0)


def _gini(P):
    P = _canon(P)
    return 1.0 - np.sum(P ** 2, axis=-1)


def _extropy(P):
    return -np.sum(_xlogx(1.0 - _canon(P)), axis=-1)


def tsallis(pmf: PmfLike, m: float) -> float:
    """Tsallis entropy ``(1 - sum pi**m)/(m - 1)``; Shannon when m is ~1."""
    if not m > 0:
        raise DomainError("Tsallis order must be positive, got %r" % m)
    return float(_tsallis(as_pmf(pmf).array, m))


def shannon(pmf: PmfLike) -> float:
    return float(_shannon(as_pmf(pmf).array))


def gini(pmf: PmfLike) -> float:
    return float(_gini(as_pmf(pmf).array))


def extropy(pmf: PmfLike) -> float:
    """Extropy ``-sum (1 - pi) log(1 - pi)``."""
    return float(_extropy(as_pmf(pmf).array))


# ---------------------------------------------------------------------------
# Measure descriptors
# ---------------------------------------------------------------------------

def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return ("%.12g" % x)


class _Measure:
    """Common surface: ``evaluate`` on arrays, call on a pmf."""

    symmetric = True

    def evaluate(self, P):
        raise NotImplementedError

    def __call__(self, pmf: PmfLike) -> float:
        return float(self.evaluate(as_pmf(pmf).array))


@dataclass(frozen=True)
class DistanceVariance(_Measure):
    spec: DistanceSpec = Euclidean()

    def __post_init__(self):
        if isinstance(self.spec, MatrixDistance):
            object.__setattr__(self, "symmetric", False)

    def evaluate(self, P):
        if isinstance(self.spec, MatrixDistance):
            P = np.asarray(P, dtype=float)
            if P.ndim == 1:
                return generalized_distance_variance(P, self.spec)
            flat = P.reshape(-1, P.shape[-1])
            out = [generalized_distance_variance(row, self.spec) for row in flat]
            return np.array(out).reshape(P.shape[:-1])
        return self.spec.scale * _base_term(P)

    def to_spec(self):
        s = self.spec
        if isinstance(s, AlphaPower):
            return "dvar:alpha=%s" % _num(s.alpha)
        if isinstance(s, GaussianKernel):
            return "dvar:sigma2=%s" % _num(s.sigma2)
        if isinstance(s, TwoConstant):
            return "dvar:c1=%s,c2=%s" % (_num(s.c1), _num(s.c2))
        if isinstance(s, MatrixDistance):
            return "dvar:matrix"
        return "dvar"


@dataclass(frozen=True)
class Geometric(_Measure):
    w: WeightFunction
    l: float = 1.0
    p: float = 1.0

    def __post_init__(self):
        _check_norm_order(self.p)
        if not (self.l > 0 and math.isfinite(self.l)):
            raise DomainError("exponent l must be finite and positive")

    def evaluate(self, P):
        return _geometric(P, self.w, self.l, self.p)

    def to_spec(self):
        return "geom:w=%s,l=%s,p=%s" % (self.w.to_spec(), _num(self.l),
                                        _num(self.p))


@dataclass(frozen=True)
class Algebraic(_Measure):
    p: float = 2.0

    def __post_init__(self):
        _check_norm_order(self.p)

    def evaluate(self, P):
        return _algebraic(P, self.p)

    def to_spec(self):
        return "alg:p=%s" % _num(self.p)


@dataclass(frozen=True)
class Tsallis(_Measure):
    m: float = 2.0

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError("Tsallis order must be positive, got %r" % self.m)

    def evaluate(self, P):
        return _tsallis(P, self.m)

    def to_spec(self):
        return "tsallis:m=%s" % _num(self.m)


@dataclass(frozen=True)
class Shannon(_Measure):
    def evaluate(self, P):
        return _shannon(P)

    def to_spec(self):
        return "shannon"


@dataclass(frozen=True)
class Gini(_Measure):
    def evaluate(self, P):
        return _gini(P)

    def to_spec(self):
        return "gini"


@dataclass(frozen=True)
class Extropy(_Measure):
    def evaluate(self, P):
        return _extropy(P)

    def to_spec(self):
        return "extropy"


@dataclass(frozen=True)
class Custom(_Measure):
    """
    User-supplied functional of a probability vector.

    ``fn`` receives a 1-D array. Symmetry is not assumed; the axiom checker
    tests it.
    """

    fn: Callable[[np.ndarray], float] = field(compare=False)
    name: str = "custom"
    symmetric = False

    def evaluate(self, P):
        P = np.asarray(P, dtype=float)
        if P.ndim == 1:
            return float(self.fn(P))
        flat = P.reshape(-1, P.shape[-1])
        return np.array([float(self.fn(row)) for row in flat]).reshape(P.shape[:-1])

    def to_spec(self):
        return self.name


MeasureDescriptor = Union[DistanceVariance, Geometric, Algebraic, Tsallis,
                          Shannon, Gini, Extropy, Custom]


def evaluate(measure: MeasureDescriptor, pmf: PmfLike) -> float:
    """Evaluate a measure descriptor on a validated pmf."""
    return measure(as_pmf(pmf))
