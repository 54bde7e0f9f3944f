"""Joint types, epsilon-typicality, and the permuted-pair typicality probability.

The quantity of interest throughout is ``P((X^n, pi(Y^n)) typical)`` for
``(X_i, Y_i)`` drawn i.i.d. from a joint distribution. It is computed
three ways: exactly by enumerating every pair of sequences, by Monte
Carlo with an exact binomial confidence interval, and bounded above by
the closed-form exponential in :func:`theorem1_bound`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from . import rng
from .dist import JointEdgeDistribution, _draw, mutual_information
from .errors import GuardExceeded
from .perm import CycleType, Permutation

# (l*l)**n above this is refused by the enumerator; admits n=12 at l=2
ENUM_GUARD = 2**24
# absolute slack on the "<= epsilon" test so decimal epsilons hit exact lattice ties
TIE_TOL = 1e-12
# below this log-weight exp() loses the pair entirely; switch to log-space
LOG_UNDERFLOW = -700.0
MC_BLOCK = 4096


@dataclass(frozen=True, eq=False)
class JointType:
    """Pair counts ``N(a, b | x, y)``."""

    n: int
    counts: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, JointType):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.counts, other.counts)

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n


@dataclass(frozen=True)
class TypicalityReport:
    epsilon: float
    deviations: np.ndarray
    max_deviation: float
    typical: bool


@dataclass(frozen=True)
class Theorem1Bound:
    """Exponential upper bound ``exp(-(n/t) (I - |X||Y| eps))`` on the typicality probability.

    ``valid`` is False (and ``bound`` is 1) when a precondition fails;
    ``note`` says which.
    """

    n: int
    epsilon: float
    t: int
    mi_nats: float
    alphabet_product: int
    bound: float
    valid: bool
    note: str = ""


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    successes: int
    trials: int


def within(deviation, epsilon):
    """The non-strict per-cell test, with :data:`TIE_TOL` slack."""
    return deviation <= epsilon + TIE_TOL


def joint_type(x, y, shape: int | tuple[int, int]) -> JointType:
    """Count symbol pairs. ``shape`` is ``l`` or ``(l_x, l_y)``."""
    lx, ly = (shape, shape) if np.isscalar(shape) else shape
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"sequences must be 1-D of equal length, got {x.shape} and {y.shape}")
    if x.size == 0:
        raise ValueError("sequences must be non-empty")
    if x.min() < 0 or x.max() >= lx or y.min() < 0 or y.max() >= ly:
        raise ValueError(f"symbol outside alphabet [0, {lx - 1}] x [0, {ly - 1}]")
    counts = np.bincount(x * ly + y, minlength=lx * ly).reshape(lx, ly)
    return JointType(int(x.size), counts)


def is_typical(x, y, dist: JointEdgeDistribution, epsilon: float) -> TypicalityReport:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    jt = joint_type(x, y, dist.l)
    dev = np.abs(jt.frequencies() - dist.p)
    worst = float(dev.max())
    return TypicalityReport(float(epsilon), dev, worst, bool(within(worst, epsilon)))


def default_t(ct: CycleType) -> int:
    return max(2, ct.lengths[0]) if ct.lengths else 2


def theorem1_bound(dist: JointEdgeDistribution, n: int, epsilon: float, ct: CycleType,
                   t: int | None = None, *, allow_fixed_points: bool = False) -> Theorem1Bound:
    """Bound on ``P((X^n, pi(Y^n)) typical)`` for any ``pi`` of cycle type ``ct``.

    The rate is ``(n/t) (I_nats - l^2 eps)``. Preconditions:
    ``0 < eps < I_nats / l^2`` and ``m < sqrt(n)``. The argument behind the
    bound is only worked out for derangements, so ``m > 0`` is reported
    invalid unless ``allow_fixed_points`` is set.
    """
    if t is None:
        t = default_t(ct)
    if t < 2:
        raise ValueError(f"t must be at least 2, got {t}")
    mi = mutual_information(dist, "e")
    a = dist.l * dist.l

    def result(bound, valid, note=""):
        return Theorem1Bound(n, float(epsilon), int(t), mi, a, bound, valid, note)

    if ct.n != n:
        return result(1.0, False, f"cycle type covers {ct.n} points, not {n}")
    if not 0 < epsilon < mi / a:
        return result(1.0, False, f"epsilon outside (0, I/|X||Y|) = (0, {mi / a:.6g})")
    if ct.m * ct.m >= n:
        return result(1.0, False, "m >= sqrt(n)")
    if ct.m > 0 and not allow_fixed_points:
        return result(1.0, False, "m>0: outline only")
    return result(math.exp(-(n / t) * (mi - a * epsilon)), True)


def _all_sequences(l: int, n: int) -> np.ndarray:
    """All ``l**n`` sequences, lexicographic, as an ``(l**n, n)`` array."""
    grids = np.indices((l,) * n).reshape(n, -1).T
    return np.ascontiguousarray(grids)


def exact_perm_typicality_prob(dist: JointEdgeDistribution, n: int, pi: Permutation,
                               epsilon: float) -> float:
    """``P((X^n, pi(Y^n)) typical)`` by summing over all ``(l^2)^n`` sequence pairs.

    ``pi`` acts as ``z_i = y_{pi(i)}``. Pair counts and log-weights for a
    block of ``x`` against every ``y`` come from indicator matrix products,
    so the work is ``O(l^2 * (l^2)^n * n)``. Block sums are combined with
    ``math.fsum`` in a fixed order.
    """
    if pi.n != n:
        raise ValueError(f"permutation size {pi.n} does not match n={n}")
    l = dist.l
    if float(l * l) ** n > ENUM_GUARD:
        raise GuardExceeded(f"(l^2)^n = {l * l}^{n} exceeds the enumeration guard {ENUM_GUARD}")
    seqs = _all_sequences(l, n)
    z = seqs[:, pi.array0()]
    y_ind = [(seqs == b).astype(np.float64) for b in range(l)]
    z_ind = [(z == b).astype(np.float64) for b in range(l)]
    p = dist.p
    with np.errstate(divide="ignore"):
        logp = np.log(p)
    positive = p[p > 0]
    log_space = n * math.log(positive.min()) < LOG_UNDERFLOW

    total = len(seqs)
    block = max(1, (1 << 21) // total)
    parts = []
    for start in range(0, total, block):
        xs = seqs[start:start + block]
        typical = np.ones((len(xs), total), dtype=bool)
        logw = np.zeros((len(xs), total))
        alive = np.ones((len(xs), total), dtype=bool)
        for a in range(l):
            xa = (xs == a).astype(np.float64)
            for b in range(l):
                count = xa @ z_ind[b].T
                typical &= within(np.abs(count / n - p[a, b]), epsilon)
                pair = xa @ y_ind[b].T
                if p[a, b] > 0:
                    logw += pair * logp[a, b]
                else:
                    alive &= pair == 0
        mask = typical & alive
        if log_space:
            parts.append(logsumexp(logw[mask]) if mask.any() else -math.inf)
        else:
            parts.append(float(np.exp(logw[mask]).sum()))
    if log_space:
        return float(math.exp(logsumexp(parts)))
    return math.fsum(parts)


def mc_perm_typicality_prob(dist: JointEdgeDistribution, n: int, pi: Permutation, epsilon: float,
                            trials: int, seed: int, *, jobs: int = 1,
                            confidence: float = 0.95) -> MCEstimate:
    """Monte Carlo estimate with a Clopper-Pearson interval.

    Trials are drawn in fixed blocks of :data:`MC_BLOCK`, block ``k`` from
    its own stream, so the result does not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if pi.n != n:
        raise ValueError(f"permutation size {pi.n} does not match n={n}")
    perm0 = pi.array0()
    l = dist.l

    def run_block(k):
        size = min(MC_BLOCK, trials - k * MC_BLOCK)
        draws = _draw(dist, size * n, rng.stream(seed, rng.MONTE_CARLO, k)).reshape(size, n, 2)
        x, y = draws[..., 0], draws[..., 1]
        code = x * l + y[:, perm0]
        freq = np.stack([(code == c).sum(axis=1) for c in range(l * l)], axis=1) / n
        dev = np.abs(freq - dist.p.ravel()).max(axis=1)
        return int(np.count_nonzero(within(dev, epsilon)))

    blocks = range(-(-trials // MC_BLOCK))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            hits = sum(pool.map(run_block, blocks))
    else:
        hits = sum(map(run_block, blocks))
    lo, hi = clopper_pearson(hits, trials, confidence)
    return MCEstimate(hits / trials, lo, hi, hits, trials)


def clopper_pearson(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    alpha = 1.0 - confidence
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi
