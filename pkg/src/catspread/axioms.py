"""
Majorization and mechanical checks of the spread-measure axioms.

The axioms checked for a measure ``Delta`` on the simplex are

A1  ``Delta(pi) >= 0`` with equality exactly at the vertices;
A2  ``Delta`` is continuously differentiable (probed numerically);
A3  ``pi`` strictly majorized by ``pi'`` implies ``Delta(pi) > Delta(pi')``
    (strict Schur-concavity).

Symmetry, the Marshall-Olkin derivative conditions and Shannon-type
additivity are checked alongside. Every check is randomized with seeds
derived from a master seed, so reports are reproducible byte for byte.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CatSpreadError, DomainError
from .measures import Pmf, PmfLike, as_pmf

MAJORIZATION_EPS = 1e-12
A3_SLACK = 1e-10
TIE_GAP = 1e-4
A2_STEPS = (1e-5, 1e-6)
TIE_TOL = 1e-9


# ---------------------------------------------------------------------------
# Majorization
# ---------------------------------------------------------------------------

class Relation(str, enum.Enum):
    EQUAL = "EqualUpToPermutation"
    STRICTLY_MAJORIZED_BY = "StrictlyMajorizedBy"
    WEAKLY_MAJORIZED_BY = "WeaklyMajorizedBy"
    STRICTLY_MAJORIZES = "StrictlyMajorizes"
    WEAKLY_MAJORIZES = "WeaklyMajorizes"
    INCOMPARABLE = "Incomparable"

    @property
    def mirror(self):
        return _MIRROR[self]


_MIRROR = {
    Relation.EQUAL: Relation.EQUAL,
    Relation.STRICTLY_MAJORIZED_BY: Relation.STRICTLY_MAJORIZES,
    Relation.STRICTLY_MAJORIZES: Relation.STRICTLY_MAJORIZED_BY,
    Relation.WEAKLY_MAJORIZED_BY: Relation.WEAKLY_MAJORIZES,
    Relation.WEAKLY_MAJORIZES: Relation.WEAKLY_MAJORIZED_BY,
    Relation.INCOMPARABLE: Relation.INCOMPARABLE,
}


@dataclass(frozen=True)
class MajorizationVerdict:
    """
    Order relation of ``p`` relative to ``q``.

    ``witness_index`` is the 1-based number of top components whose partial
    sums certify strictness, or, for ``Incomparable``, the level where the
    direction flips.
    """

    relation: Relation
    witness_index: int | None = None

    def mirror(self):
        return MajorizationVerdict(self.relation.mirror, self.witness_index)

    def __str__(self):
        if self.relation is Relation.INCOMPARABLE:
            return "%s %d" % (self.relation.value, self.witness_index)
        return self.relation.value


def _top_sums(x, L):
    x = np.sort(np.concatenate([x, np.zeros(L - len(x))]))[::-1]
    return np.cumsum(x)


def majorization_compare(p: PmfLike, q: PmfLike,
                         eps: float = MAJORIZATION_EPS) -> MajorizationVerdict:
    """
    Compare two pmfs under majorization.

    Shorter vectors are padded with zeros. With ``P_i``, ``Q_i`` the sums
    of the ``i`` largest components, ``p`` is strictly majorized by ``q``
    when ``P_i <= Q_i`` for all ``i`` and some inequality exceeds ``eps``.
    If the totals differ by more than ``eps`` only weak (sub-)majorization
    can hold.

    Examples
    --------
    >>> majorization_compare([1/6, 1/6, 2/6, 2/6], [.1, .2, .3, .4]).relation.value
    'StrictlyMajorizedBy'
    >>> str(majorization_compare([.5, .5, 0], [.6, .2, .2]))
    'Incomparable 2'
    """
    p = as_pmf(p).array
    q = as_pmf(q).array
    L = max(len(p), len(q))
    d = _top_sums(q, L) - _top_sums(p, L)
    weak = abs(d[-1]) > eps
    levels = d if weak else d[:-1]
    pos = np.flatnonzero(levels > eps)
    neg = np.flatnonzero(levels < -eps)
    if pos.size and neg.size:
        return MajorizationVerdict(Relation.INCOMPARABLE,
                                   int(max(pos[0], neg[0])) + 1)
    if pos.size:
        rel = Relation.WEAKLY_MAJORIZED_BY if weak else Relation.STRICTLY_MAJORIZED_BY
        return MajorizationVerdict(rel, int(pos[0]) + 1)
    if neg.size:
        rel = Relation.WEAKLY_MAJORIZES if weak else Relation.STRICTLY_MAJORIZES
        return MajorizationVerdict(rel, int(neg[0]) + 1)
    return MajorizationVerdict(Relation.EQUAL)


def majorization_gap(p, q) -> float:
    """Largest partial-sum excess of ``q`` over ``p``."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    L = max(len(p), len(q))
    return float(np.max(_top_sums(q, L) - _top_sums(p, L)))


def t_transform(x, i: int, j: int, lam: float) -> np.ndarray:
    """
    Robin-Hood transfer between coordinates ``i`` and ``j``.

    Returns ``lam * x + (1 - lam) * x_swapped``; the result is majorized by
    ``x`` and strictly so when ``x_i != x_j`` and ``0 < lam < 1``.
    """
    x = np.array(x, dtype=float)
    xi, xj = x[i], x[j]
    x[i] = lam * xi + (1.0 - lam) * xj
    x[j] = lam * xj + (1.0 - lam) * xi
    return x


def random_majorization_pair(K: int, seed, transforms: int = 3,
                             max_retries: int = 100) -> tuple:
    """
    Draw ``(pi, pi')`` with ``pi`` strictly majorized by ``pi'``.

    ``pi'`` is uniform on the simplex (normalized exponential draws);
    ``pi`` applies between 1 and ``transforms`` random T-transforms to it.
    ``seed`` is anything accepted by :func:`numpy.random.default_rng`.
    """
    if K < 2:
        raise DomainError("majorization pairs need K >= 2")
    if transforms < 1:
        raise DomainError("need at least one transform")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        e = rng.exponential(size=K)
        prime = e / e.sum()
        x = prime
        for _ in range(int(rng.integers(1, transforms + 1))):
            i, j = rng.choice(K, size=2, replace=False)
            x = t_transform(x, i, j, rng.uniform(0.0, 1.0))
        x = x / x.sum()
        pair = Pmf(tuple(x)), Pmf(tuple(prime))
        if majorization_compare(*pair).relation is Relation.STRICTLY_MAJORIZED_BY:
            return pair
    raise CatSpreadError("no strictly majorized pair after %d draws" % max_retries)


def trial_seed(seed: int, *stream) -> np.random.SeedSequence:
    """Derived seed ``SeedSequence([seed, *stream])``."""
    return np.random.SeedSequence([int(seed)] + [int(s) for s in stream])


@functools.lru_cache(maxsize=64)
def _pair_batch(K, seed, trials, transforms):
    lo = np.empty((trials, K))
    hi = np.empty((trials, K))
    for t in range(trials):
        a, b = random_majorization_pair(K, trial_seed(seed, K, t), transforms)
        lo[t], hi[t] = a.probs, b.probs
    lo.flags.writeable = False
    hi.flags.writeable = False
    return lo, hi


def _interior(rng, n, K):
    e = rng.exponential(size=(n, K))
    return e / e.sum(axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# Derivative conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeTest:
    condition2: bool
    condition3: bool | None
    gradients: tuple
    failing_pairs: tuple = ()

    @property
    def passed(self):
        return self.condition2 and self.condition3 is not False


def schur_derivative_test(measure, pmf: PmfLike,
                          fd_step: float = 1e-5) -> DerivativeTest:
    """
    Marshall-Olkin conditions for strict Schur-concavity at ``pmf``.

    Uses central finite differences in unconstrained coordinates.
    Condition 2: ``pi_k < pi_k'`` implies ``dDelta/dpi_k > dDelta/dpi_k'``.
    Condition 3: where the two partials tie (within 1e-9),
    ``D_kk + D_k'k' - D_kk' - D_k'k < 0``; ``None`` when no pair ties.
    ``failing_pairs`` holds 0-based index pairs.
    """
    x = as_pmf(pmf).array
    if x.min() < 10 * fd_step:
        raise DomainError("pmf too close to the boundary for step %g" % fd_step)
    K = len(x)
    h = fd_step
    E = np.eye(K)
    pts = np.concatenate([x + h * E, x - h * E])
    vals = np.asarray(measure.evaluate(pts), dtype=float)
    grad = (vals[:K] - vals[K:]) / (2 * h)

    ties = []
    fails2 = []
    for a in range(K):
        for b in range(K):
            if a == b or x[a] > x[b]:
                continue
            diff = grad[a] - grad[b]
            if x[a] == x[b] or abs(diff) <= TIE_TOL:
                if a < b:
                    ties.append((a, b))
            elif diff < 0:
                fails2.append((a, b))

    cond3 = None
    fails3 = []
    if ties:
        hh = max(10 * h, 1e-4)
        f0 = float(measure.evaluate(x))
        for a, b in ties:
            ea, eb = hh * E[a], hh * E[b]
            quad = np.stack([x + ea, x - ea, x + eb, x - eb,
                             x + ea + eb, x + ea - eb, x - ea + eb, x - ea - eb])
            v = np.asarray(measure.evaluate(quad), dtype=float)
            faa = (v[0] - 2 * f0 + v[1]) / hh ** 2
            fbb = (v[2] - 2 * f0 + v[3]) / hh ** 2
            fab = (v[4] - v[5] - v[6] + v[7]) / (4 * hh ** 2)
            if not faa + fbb - 2 * fab < -1e-6:
                fails3.append((a, b))
        cond3 = not fails3
    return DerivativeTest(not fails2, cond3, tuple(float(g) for g in grad),
                          tuple(fails2 + fails3))


# ---------------------------------------------------------------------------
# Additivity
# ---------------------------------------------------------------------------

def additivity_residual(measure, pmf: PmfLike, k: int, t: float) -> float:
    """
    ``|Delta(split) - Delta(pi) - pi_k Delta(t, 1-t)|`` for category ``k``.

    ``k`` is 0-based; the split replaces ``pi_k`` by ``t pi_k, (1-t) pi_k``.
    """
    x = as_pmf(pmf).array
    split = np.concatenate([x[:k], [t * x[k], (1 - t) * x[k]], x[k + 1:]])
    lhs = float(measure.evaluate(split))
    rhs = float(measure.evaluate(x)) + x[k] * float(measure.evaluate(np.array([t, 1 - t])))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class AdditivityResult:
    passed: bool
    max_residual: float
    worst: dict
    trials: int

    def to_dict(self):
        return {"status": "Pass" if self.passed else "Fail",
                "max_residual": self.max_residual, "trials": self.trials,
                "worst": self.worst}


def check_additivity(measure, trials: int = 1000, seed: int = 0,
                     tol: float = 1e-10) -> AdditivityResult:
    """Random probes of Shannon's additivity rule; pass iff residual <= tol."""
    if trials < 1:
        raise CatSpreadError("trials must be >= 1")
    rng = np.random.default_rng(trial_seed(seed, 0, 4))
    worst = {"residual": -1.0}
    for _ in range(trials):
        K = int(rng.integers(2, 7))
        pi = _interior(rng, 1, K)[0]
        k = int(rng.integers(K))
        t = float(rng.uniform())
        r = additivity_residual(measure, Pmf(tuple(pi)), k, t)
        if r > worst["residual"]:
            worst = {"residual": r, "pi": pi.tolist(), "k": k, "t": t}
    return AdditivityResult(worst["residual"] <= tol, worst["residual"], worst,
                            trials)


# ---------------------------------------------------------------------------
# Axiom report
# ---------------------------------------------------------------------------

class Status(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    SKIPPED = "Skipped"


@dataclass
class AxiomResult:
    status: Status
    details: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    def to_dict(self):
        out = {"status": self.status.value}
        out.update(self.details)
        if self.counterexamples or self.status is not Status.SKIPPED:
            out["counterexamples"] = self.counterexamples
        return out


def _merge(statuses):
    statuses = list(statuses)
    if Status.FAIL in statuses:
        return Status.FAIL
    if statuses and all(s is Status.SKIPPED for s in statuses):
        return Status.SKIPPED
    return Status.PASS


@dataclass
class AxiomReport:
    measure: str
    seed: int
    trials: int
    kmin: int
    kmax: int
    allow_zero_probs: bool
    axioms: dict

    @property
    def passed(self):
        return all(r.status is not Status.FAIL for r in self.axioms.values())

    def status(self, name):
        return self.axioms[name].status

    def to_dict(self):
        return {"measure": self.measure, "seed": self.seed,
                "trials": self.trials, "kmin": self.kmin, "kmax": self.kmax,
                "allow_zero_probs": self.allow_zero_probs,
                "axioms": {k: v.to_dict() for k, v in self.axioms.items()}}

    def format_text(self):
        lines = ["measure: %s  (K %d..%d, trials %d, seed %d)"
                 % (self.measure, self.kmin, self.kmax, self.trials, self.seed)]
        for name, res in self.axioms.items():
            extra = ""
            if res.counterexamples:
                extra = "  (%d counterexample(s) retained)" % len(res.counterexamples)
            lines.append("  %-10s %s%s" % (name, res.status.value, extra))
        lines.append("overall: %s" % ("Pass" if self.passed else "Fail"))
        return "\n".join(lines)


def _eval(measure, P):
    v = np.asarray(measure.evaluate(P), dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("measure returned a non-finite value")
    return v


def _as_list(x):
    return [float(v) for v in x]


def _witness_pairs(K, allow_zero_probs):
    pairs = []
    if K >= 3:
        geo = [2.0 ** -(i + 1) for i in range(K - 1)] + [2.0 ** -(K - 1)]
        pairs.append(("geometric", np.full(K, 1.0 / K), np.array(geo)))
    if allow_zero_probs:
        for j in range(K, 1, -1):
            lo = np.array([1.0 / j] * j + [0.0] * (K - j))
            hi = (np.array([1.0 / (j - 1)] * (j - 1) + [0.0] * (K - j + 1)))
            pairs.append(("chain%d" % j, lo, hi))
    return pairs


def _a3_violations(lo, hi, vlo, vhi, slack):
    diff = vlo - vhi
    gaps = np.array([majorization_gap(a, b) for a, b in zip(lo, hi)]) \
        if np.any((diff <= 0) & (diff >= -slack)) else np.zeros(len(lo))
    return (diff < -slack) | ((diff <= 0) & (gaps >= TIE_GAP))


def _check_a1(measure, Ks, trials, seed, allow_zero, cap):
    per_k = {}
    cex = []
    statuses = []
    try:
        for K in Ks:
            V = np.eye(K)
            vv = _eval(measure, V)
            pts = _interior(np.random.default_rng(trial_seed(seed, K, 1)), trials, K)
            vi = _eval(measure, pts)
            bad_v = np.flatnonzero(np.abs(vv) > 1e-12)
            bad_i = np.flatnonzero(~(vi > 0))
            vertex_ok = bad_v.size == 0
            per_k[str(K)] = {"vertex_max_abs": float(np.max(np.abs(vv))),
                             "vertex_status": "Pass" if vertex_ok else "Fail",
                             "interior_min": float(np.min(vi)),
                             "interior_failures": int(bad_i.size)}
            for i in bad_i[:cap]:
                cex.append({"pi": _as_list(pts[i]), "value": float(vi[i]),
                            "regime": "interior"})
            if allow_zero:
                for i in bad_v[:cap]:
                    cex.append({"pi": _as_list(V[i]), "value": float(vv[i]),
                                "regime": "vertex"})
            ok = bad_i.size == 0 and (vertex_ok or not allow_zero)
            statuses.append(Status.PASS if ok else Status.FAIL)
    except (CatSpreadError, ValueError, FloatingPointError) as exc:
        return AxiomResult(Status.SKIPPED, {"reason": str(exc), "per_K": per_k}, cex)
    return AxiomResult(_merge(statuses), {"per_K": per_k}, cex)


def _check_a2(measure, Ks, points, seed):
    worst_c = 0.0
    worst_k = 0.0
    failures = 0
    h1, h2 = A2_STEPS
    probes = 0
    try:
        for K in Ks:
            rng = np.random.default_rng(trial_seed(seed, K, 2))
            X = 0.9 * _interior(rng, points, K) + 0.1 / K
            X = np.vstack([np.full(K, 1.0 / K), X])
            E = np.eye(K)
            # shape (N, step, sign, direction, K)
            steps = np.array([h1, h2])[None, :, None, None, None]
            signs = np.array([1.0, -1.0])[None, None, :, None, None]
            pts = X[:, None, None, None, :] + steps * signs * E[None, None, None]
            f = _eval(measure, pts)
            f0 = _eval(measure, X)[:, None]
            fwd = (f[:, :, 0] - f0[:, :, None]) / np.array([h1, h2])[None, :, None]
            bwd = (f0[:, :, None] - f[:, :, 1]) / np.array([h1, h2])[None, :, None]
            cen = 0.5 * (fwd + bwd)
            scale = 1.0 + np.abs(cen[:, 0])
            c_disc = np.abs(cen[:, 0] - cen[:, 1]) / scale
            jump1 = np.abs(fwd[:, 0] - bwd[:, 0])
            jump2 = np.abs(fwd[:, 1] - bwd[:, 1])
            # smooth: the one-sided gap shrinks with the step; a kink keeps it
            kink = jump2 > 1e-6 * scale + 0.5 * jump1
            bad = (c_disc > 1e-4) | kink
            failures += int(np.any(bad, axis=1).sum())
            probes += len(X)
            worst_c = max(worst_c, float(c_disc.max()))
            worst_k = max(worst_k, float((jump2 / scale).max()))
    except (CatSpreadError, ValueError, FloatingPointError) as exc:
        return AxiomResult(Status.SKIPPED, {"reason": str(exc)})
    return AxiomResult(Status.PASS if failures == 0 else Status.FAIL,
                       {"probes": probes, "failures": failures,
                        "max_step_discrepancy": worst_c,
                        "max_one_sided_gap": worst_k,
                        "steps": list(A2_STEPS)})


def _check_a3(measure, Ks, trials, seed, transforms, allow_zero, slack, cap):
    per_k = {}
    cex = []
    statuses = []
    try:
        for K in Ks:
            lo, hi = _pair_batch(K, seed, trials, transforms)
            vlo = _eval(measure, lo)
            vhi = _eval(measure, hi)
            bad = np.flatnonzero(_a3_violations(lo, hi, vlo, vhi, slack))
            entry = {"violations": int(bad.size), "trials": trials}
            for i in bad[:cap]:
                cex.append({"K": K, "trial": int(i), "pi": _as_list(lo[i]),
                            "piPrime": _as_list(hi[i]), "value": float(vlo[i]),
                            "valuePrime": float(vhi[i])})
            wit = []
            for name, a, b in _witness_pairs(K, allow_zero):
                va = float(_eval(measure, a))
                vb = float(_eval(measure, b))
                viol = bool(_a3_violations(a[None], b[None], np.array([va]),
                                           np.array([vb]), slack)[0])
                wit.append({"name": name, "value": va, "valuePrime": vb,
                            "violated": viol})
                if viol:
                    cex.append({"K": K, "witness": name, "pi": _as_list(a),
                                "piPrime": _as_list(b), "value": va,
                                "valuePrime": vb})
            entry["witnesses"] = wit
            failed = bad.size > 0 or any(w["violated"] for w in wit)
            statuses.append(Status.FAIL if failed else Status.PASS)
            entry["status"] = statuses[-1].value
            per_k[str(K)] = entry
    except (CatSpreadError, ValueError, FloatingPointError) as exc:
        return AxiomResult(Status.SKIPPED, {"reason": str(exc), "per_K": per_k}, cex)
    return AxiomResult(_merge(statuses), {"per_K": per_k, "slack": slack}, cex)


def _check_symmetry(measure, Ks, trials, seed, cap):
    worst = 0.0
    cex = []
    n = min(trials, 1000)
    try:
        for K in Ks:
            rng = np.random.default_rng(trial_seed(seed, K, 3))
            X = _interior(rng, n, K)
            perm = np.argsort(rng.random((n, K)), axis=1)
            Y = np.take_along_axis(X, perm, axis=1)
            a = _eval(measure, X)
            b = _eval(measure, Y)
            r = np.abs(a - b) / np.maximum(1.0, np.abs(a))
            worst = max(worst, float(r.max()))
            for i in np.flatnonzero(r > 1e-12)[:cap]:
                cex.append({"K": K, "pi": _as_list(X[i]), "piPrime": _as_list(Y[i]),
                            "value": float(a[i]), "valuePrime": float(b[i])})
    except (CatSpreadError, ValueError, FloatingPointError) as exc:
        return AxiomResult(Status.SKIPPED, {"reason": str(exc)})
    return AxiomResult(Status.FAIL if cex else Status.PASS,
                       {"max_residual": worst}, cex)


def _check_derivative(measure, Ks, points, seed, cap):
    cex = []
    tested = 0
    try:
        for K in Ks:
            rng = np.random.default_rng(trial_seed(seed, K, 5))
            X = list(0.9 * _interior(rng, points, K) + 0.1 / K)
            X.append(np.full(K, 1.0 / K))
            if K >= 3:
                geo = [2.0 ** -(i + 1) for i in range(K - 1)] + [2.0 ** -(K - 1)]
                X.append(np.array(geo))
            for x in X:
                res = schur_derivative_test(measure, Pmf(tuple(x)))
                tested += 1
                if not res.passed and len(cex) < cap * len(Ks):
                    cex.append({"K": K, "pi": _as_list(x),
                                "gradients": list(res.gradients),
                                "pairs": [list(p) for p in res.failing_pairs[:5]]})
    except (CatSpreadError, ValueError, FloatingPointError) as exc:
        return AxiomResult(Status.SKIPPED, {"reason": str(exc)})
    return AxiomResult(Status.FAIL if cex else Status.PASS,
                       {"points": tested}, cex)


def check_axioms(measure, kmin: int = 2, kmax: int = 8, trials: int = 1000,
                 seed: int = 0, allow_zero_probs: bool = False,
                 additivity: bool = False, transforms: int = 3,
                 slack: float = A3_SLACK, max_counterexamples: int = 10,
                 a2_points: int = 100, derivative_points: int = 20) -> AxiomReport:
    """
    Run every axiom check on ``measure`` for ``K = kmin..kmax``.

    A1 always evaluates the vertices; their outcome decides the status only
    when ``allow_zero_probs`` is set (it is reported per K either way).
    Interior points are strictly positive. A3 draws ``trials`` strict pairs
    per K, plus deterministic witnesses, and flags ``Delta(pi) <
    Delta(pi') - slack`` as a reversal and exact non-increase as a tie when
    the majorization gap is at least 1e-4.

    A check whose evaluation fails (domain error, non-finite value) is
    reported as ``Skipped`` with the reason.
    """
    if not 2 <= kmin <= kmax <= 12:
        raise CatSpreadError("need 2 <= kmin <= kmax <= 12")
    if trials < 1:
        raise CatSpreadError("trials must be >= 1")
    Ks = range(kmin, kmax + 1)
    cap = max_counterexamples
    with np.errstate(all="ignore"):
        axioms = {
            "A1": _check_a1(measure, Ks, trials, seed, allow_zero_probs, cap),
            "A2": _check_a2(measure, Ks, min(trials, a2_points), seed),
            "A3": _check_a3(measure, Ks, trials, seed, transforms,
                            allow_zero_probs, slack, cap),
            "symmetry": _check_symmetry(measure, Ks, trials, seed, cap),
            "derivative": _check_derivative(measure, Ks, min(trials, derivative_points),
                                      seed, cap),
        }
        if additivity:
            try:
                add = check_additivity(measure, trials=min(trials, 1000), seed=seed)
                axioms["additivity"] = AxiomResult(
                    Status.PASS if add.passed else Status.FAIL,
                    {"max_residual": add.max_residual, "worst": add.worst})
            except (CatSpreadError, ValueError, FloatingPointError) as exc:
                axioms["additivity"] = AxiomResult(Status.SKIPPED, {"reason": str(exc)})
    name = measure.to_spec() if hasattr(measure, "to_spec") else repr(measure)
    return AxiomReport(name, int(seed), int(trials), kmin, kmax,
                       bool(allow_zero_probs), axioms)
