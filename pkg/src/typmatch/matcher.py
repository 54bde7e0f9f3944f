"""Typicality matching: pick a labeling that makes the two upper triangles jointly typical.

Exhaustive mode is the algorithm proper: enumerate ``S_n``, keep every
labeling whose relabeled partner is epsilon-typical with ``g1``, return
one uniformly at random. Greedy mode is a local-search stand-in for
larger ``n`` and is flagged ``heuristic`` in every result.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import rng
from .dist import JointEdgeDistribution
from .errors import GuardExceeded
from .graph import CmperInstance, LabeledGraph, pair_count, relabel, relabel_gather
from .perm import Permutation, compose, fixed_point_count, invert
from .typicality import joint_type, within

_CHUNK = 1 << 15


def auto_epsilon(n: int) -> float:
    """``4 ln(N) / N`` with ``N = n(n-1)/2``."""
    big_n = pair_count(n)
    if big_n < 2:
        raise ValueError("auto epsilon needs n >= 3")
    return 4.0 * math.log(big_n) / big_n


@dataclass(frozen=True)
class MatchConfig:
    epsilon: float | str = "auto"
    mode: str = "exhaustive"
    max_exhaustive_n: int = 10
    seed: int = 0
    restarts: int = 32
    max_passes: int = 50
    jobs: int = 1

    def __post_init__(self):
        if self.epsilon != "auto" and not (isinstance(self.epsilon, (int, float)) and self.epsilon > 0):
            raise ValueError(f"epsilon must be 'auto' or a positive number, got {self.epsilon!r}")
        if self.mode not in ("exhaustive", "greedy"):
            raise ValueError(f"mode must be 'exhaustive' or 'greedy', got {self.mode!r}")
        if self.max_exhaustive_n < 2:
            raise ValueError("max_exhaustive_n must be at least 2")
        if self.restarts < 1 or self.max_passes < 1:
            raise ValueError("restarts and max_passes must be positive")

    def resolve_epsilon(self, n: int) -> float:
        return auto_epsilon(n) if self.epsilon == "auto" else float(self.epsilon)


@dataclass(frozen=True)
class MatchResult:
    """Outcome of one matching run.

    ``status`` is ``"ok"``, or ``"empty"`` when no labeling is typical at
    ``epsilon`` (exhaustive mode); an empty outcome has ``chosen=None`` and
    scores as zero correct vertices. ``automorphism_ties`` counts the
    candidates that reproduce the true relabeled graph exactly (1 for an
    asymmetric instance whose truth is typical).
    """

    n: int
    mode: str
    epsilon: float
    status: str
    chosen: Permutation | None
    candidate_count: int
    correct_fraction: float
    mismatch_count: int
    max_deviation_at_chosen: float
    truth_typical: bool
    automorphism_ties: int
    heuristic: bool
    elapsed: float = field(compare=False, default=0.0)


def typicality_score(g1: LabeledGraph, g2: LabeledGraph, sigma: Permutation,
                     dist: JointEdgeDistribution) -> float:
    """Largest cell deviation of the joint type of ``g1`` and ``relabel(g2, sigma)`` from ``dist``."""
    jt = joint_type(g1.ut, relabel(g2, sigma).ut, dist.l)
    return float(np.abs(jt.frequencies() - dist.p).max())


def correct_fraction(chosen: Permutation, secret: Permutation) -> float:
    return fixed_point_count(compose(chosen, invert(secret))) / chosen.n


@lru_cache(maxsize=4)
def _sym_table(m: int) -> np.ndarray:
    """All of ``S_m`` in lexicographic order, 0-based."""
    return np.array(list(itertools.permutations(range(m))), dtype=np.int16).reshape(-1, m)


def _block(n: int, first: int) -> np.ndarray:
    """Lexicographic block of ``S_n`` whose first image is ``first``."""
    rest = np.array([v for v in range(n) if v != first], dtype=np.int16)
    tail = rest[_sym_table(n - 1)]
    head = np.full((len(tail), 1), first, dtype=np.int16)
    return np.hstack([head, tail])


def _scan(g1_ut, g2_ut, p, l, n, epsilon, perms):
    """Return (typical mask, max deviation) for every row of ``perms``."""
    big_n = len(g1_ut)
    mask = np.empty(len(perms), dtype=bool)
    worst = np.empty(len(perms))
    target = p.ravel()
    for s in range(0, len(perms), _CHUNK):
        gather = relabel_gather(perms[s:s + _CHUNK].astype(np.intp))
        code = g1_ut[None, :] * l + g2_ut[gather]
        dev = np.zeros(len(gather))
        for c in range(l * l):
            np.maximum(dev, np.abs(np.count_nonzero(code == c, axis=1) / big_n - target[c]), out=dev)
        worst[s:s + _CHUNK] = dev
        mask[s:s + _CHUNK] = within(dev, epsilon)
    return mask, worst


def _check_guard(n: int, limit: int):
    if n > limit:
        raise GuardExceeded(f"n={n} exceeds the exhaustive-search guard {limit}; use greedy mode")


def _exhaustive(inst: CmperInstance, epsilon: float, jobs: int = 1):
    """Candidate array (sorted lexicographically) and per-candidate deviations."""
    n, l = inst.n, inst.dist.l
    g1_ut, g2_ut = inst.g1.ut, inst.g2_anon.ut

    def one(first):
        perms = _block(n, first)
        mask, worst = _scan(g1_ut, g2_ut, inst.dist.p, l, n, epsilon, perms)
        return perms[mask], worst[mask]

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(one, range(n)))
    else:
        parts = [one(f) for f in range(n)]
    # blocks come back in first-image order, so the concatenation stays sorted
    return np.concatenate([c for c, _ in parts]), np.concatenate([w for _, w in parts])


def candidate_set_exhaustive(inst: CmperInstance, epsilon: float, *, max_n: int = 10,
                             jobs: int = 1) -> list[Permutation]:
    """Every labeling ``s`` with ``(g1.ut, relabel(g2_anon, s).ut)`` epsilon-typical, sorted."""
    _check_guard(inst.n, max_n)
    cands, _ = _exhaustive(inst, epsilon, jobs)
    return [Permutation._from0(row) for row in cands]


def match(inst: CmperInstance, config: MatchConfig = MatchConfig()) -> MatchResult:
    if config.mode == "greedy":
        return match_greedy(inst, config)
    t0 = time.perf_counter()
    n = inst.n
    _check_guard(n, config.max_exhaustive_n)
    eps = config.resolve_epsilon(n)
    cands, worst = _exhaustive(inst, eps, config.jobs)
    secret0 = inst.secret.array0()
    truth_row = np.all(cands == secret0, axis=1)
    truth_typical = bool(truth_row.any())
    ties = _automorphism_ties(inst, cands)
    if len(cands) == 0:
        return MatchResult(n, "exhaustive", eps, "empty", None, 0, 0.0, n, math.nan,
                           False, 0, False, time.perf_counter() - t0)
    k = int(rng.stream(config.seed, rng.PICK).integers(len(cands)))
    chosen = Permutation._from0(cands[k])
    frac = correct_fraction(chosen, inst.secret)
    mismatch = int(np.count_nonzero(cands[k] != secret0))
    return MatchResult(n, "exhaustive", eps, "ok", chosen, len(cands), frac, mismatch,
                       float(worst[k]), truth_typical, ties, False, time.perf_counter() - t0)


def _automorphism_ties(inst: CmperInstance, cands: np.ndarray) -> int:
    """Candidates whose relabeled partner equals the truly aligned partner."""
    if len(cands) == 0:
        return 0
    truth_ut = relabel(inst.g2_anon, inst.secret).ut
    hits = 0
    for s in range(0, len(cands), _CHUNK):
        gather = relabel_gather(cands[s:s + _CHUNK].astype(np.intp))
        hits += int(np.count_nonzero(np.all(inst.g2_anon.ut[gather] == truth_ut, axis=1)))
    return hits


# ---- greedy local search -------------------------------------------------

def _objective(counts: np.ndarray, target: np.ndarray, big_n: int):
    dev = np.abs(counts / big_n - target)
    return dev.max(axis=(-2, -1)), dev.sum(axis=(-2, -1))


def _signature_init(g1: LabeledGraph, g2: LabeledGraph) -> np.ndarray:
    """Align vertices by sorting on edge-value histograms and neighbour histograms."""

    def keys(g):
        adj = g.adjacency()
        hist = np.stack([(adj == a).sum(axis=1) for a in range(1, g.l)], axis=1)
        out = []
        for v in range(g.n):
            nbr = sorted((int(adj[v, w]), tuple(hist[w])) for w in range(g.n) if w != v)
            out.append((tuple(hist[v]), tuple(nbr)))
        return out

    k1, k2 = keys(g1), keys(g2)
    order1 = sorted(range(g1.n), key=lambda v: k1[v])
    order2 = sorted(range(g2.n), key=lambda v: k2[v])
    sigma = np.empty(g1.n, dtype=np.intp)
    sigma[order2] = order1
    return sigma


def _local_search(a1: np.ndarray, g2: LabeledGraph, dist: JointEdgeDistribution,
                  sigma: np.ndarray, max_passes: int, gen: np.random.Generator):
    """Swap-based descent on (max deviation, total deviation). Returns (sigma, objective)."""
    n, l = g2.n, g2.l
    big_n = pair_count(n)
    target = dist.p
    ia = np.stack([(a1 == a) for a in range(l)]).astype(np.float64)
    sigma = sigma.copy()
    b = relabel(g2, Permutation._from0(sigma)).adjacency()
    iu = np.triu_indices(n, 1)
    counts = np.zeros((l, l))
    np.add.at(counts, (a1[iu], b[iu]), 1)
    best = _objective(counts, target, big_n)
    for _ in range(max_passes):
        improved = False
        for u in gen.permutation(n):
            ib = np.stack([(b == v) for v in range(l)]).astype(np.float64)
            diag = np.einsum("avw,bvw->abv", ia, ib)
            row = np.einsum("bvw,aw->abv", ib, ia[:, u, :])
            col = np.einsum("avw,bw->abv", ia, ib[:, u, :])
            edge = ia[:, u, :][:, None, :] * ib[:, u, :][None, :, :]
            delta = row + col - diag[:, :, [u]] - diag + 2 * edge
            cand = counts[:, :, None] + delta
            mx, tot = _objective(np.moveaxis(cand, 2, 0), target, big_n)
            mx[u], tot[u] = np.inf, np.inf
            v = int(np.lexsort((tot, mx))[0])
            if (mx[v], tot[v]) < best:
                swap = np.arange(n)
                swap[[u, v]] = swap[[v, u]]
                b = b[np.ix_(swap, swap)]
                # labels u and v trade places in the relabeled graph
                sigma = swap[sigma]
                counts = np.rint(cand[:, :, v])
                best = (mx[v], tot[v])
                improved = True
        if not improved:
            break
    return sigma, best


def match_greedy(inst: CmperInstance, config: MatchConfig = MatchConfig(mode="greedy"), *,
                 init: Permutation | None = None) -> MatchResult:
    """Multi-restart swap descent; heuristic, not the enumerating algorithm.

    Restart 0 starts from ``init`` if given, else from a vertex-signature
    alignment; the others start from seeded uniform permutations.
    ``candidate_count`` is the number of distinct typical end points.
    """
    t0 = time.perf_counter()
    n = inst.n
    eps = config.resolve_epsilon(n)
    a1 = inst.g1.adjacency()
    ends = []
    for r in range(config.restarts):
        gen = rng.stream(config.seed, rng.GREEDY, r)
        if r == 0:
            start = init.array0() if init is not None else _signature_init(inst.g1, inst.g2_anon)
        else:
            start = gen.permutation(n)
        ends.append(_local_search(a1, inst.g2_anon, inst.dist, start, config.max_passes, gen))
    sigma, (mx, _) = min(ends, key=lambda e: e[1])
    chosen = Permutation._from0(sigma)
    typical_ends = {tuple(s) for s, (m, _) in ends if within(m, eps)}
    secret0 = inst.secret.array0()
    return MatchResult(n, "greedy", eps, "ok", chosen, len(typical_ends),
                       correct_fraction(chosen, inst.secret),
                       int(np.count_nonzero(sigma != secret0)), float(mx),
                       bool(within(typicality_score(inst.g1, inst.g2_anon, inst.secret, inst.dist), eps)),
                       0, True,
                       time.perf_counter() - t0)
