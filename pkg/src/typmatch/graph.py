"""Marked labeled graphs stored as upper-triangle edge-value sequences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .dist import JointEdgeDistribution, _draw
from .errors import FormatError
from .perm import Permutation, _random_perm, invert


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(n: int, i: int, j: int) -> int:
    """Position of the unordered pair ``{i, j}`` (1-based, i != j) in the UT sequence."""
    if i == j:
        raise ValueError("self-loops are not part of the upper triangle")
    if i > j:
        i, j = j, i
    i0, j0 = i - 1, j - 1
    return i0 * n - i0 * (i0 + 1) // 2 + (j0 - i0 - 1)


def _pairs0(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _index0(n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return lo * n - lo * (lo + 1) // 2 + (hi - lo - 1)


def relabel_gather(perms0: np.ndarray) -> np.ndarray:
    """Gather indices for relabeling by many permutations at once.

    ``perms0`` is ``(K, n)`` with 0-based images. Returns ``(K, N)`` such
    that ``g.ut[out[k]]`` is ``relabel(g, perm_k).ut``.
    """
    perms0 = np.atleast_2d(perms0)
    n = perms0.shape[1]
    inv = np.empty_like(perms0)
    np.put_along_axis(inv, perms0, np.arange(n)[None, :], axis=1)
    a, b = _pairs0(n)
    return _index0(n, inv[:, a], inv[:, b])


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """An ``(n, l)`` graph as its row-major upper triangle."""

    n: int
    l: int
    ut: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a graph needs at least 2 vertices")
        if self.l < 2:
            raise ValueError("alphabet size must be at least 2")
        ut = np.array(self.ut, dtype=np.int64).ravel()
        if ut.size != pair_count(self.n):
            raise ValueError(f"expected {pair_count(self.n)} values, got {ut.size}")
        if ut.size and (ut.min() < 0 or ut.max() >= self.l):
            raise ValueError(f"edge values must lie in [0, {self.l - 1}]")
        ut.setflags(write=False)
        object.__setattr__(self, "ut", ut)

    def value(self, i: int, j: int) -> int:
        return int(self.ut[pair_index(self.n, i, j)])

    def adjacency(self, diagonal: int = -1) -> np.ndarray:
        """Symmetric ``n x n`` matrix; the diagonal holds ``diagonal``."""
        a = np.full((self.n, self.n), diagonal, dtype=np.int64)
        i, j = _pairs0(self.n)
        a[i, j] = self.ut
        a[j, i] = self.ut
        return a

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (self.n, self.l) == (other.n, other.l) and np.array_equal(self.ut, other.ut)

    def __hash__(self):
        return hash((self.n, self.l, self.ut.tobytes()))

    def __repr__(self):
        return f"LabeledGraph(n={self.n}, l={self.l}, ut={self.ut.tolist()})"


@dataclass(frozen=True)
class CmperInstance:
    """A de-anonymized graph, an anonymized partner, and the hidden alignment.

    ``relabel(g2_anon, secret) == g2`` where ``g2`` is the partner in
    ``g1``'s vertex order.
    """

    g1: LabeledGraph
    g2_anon: LabeledGraph
    secret: Permutation
    dist: JointEdgeDistribution

    def __post_init__(self):
        if not (self.g1.n == self.g2_anon.n == self.secret.n):
            raise ValueError("graph sizes and secret size disagree")
        if not (self.g1.l == self.g2_anon.l == self.dist.l):
            raise ValueError("alphabet sizes disagree")

    @property
    def n(self) -> int:
        return self.g1.n


def relabel(g: LabeledGraph, rho: Permutation) -> LabeledGraph:
    """Move the value on ``{i, j}`` to ``{rho(i), rho(j)}``."""
    if rho.n != g.n:
        raise ValueError(f"permutation size {rho.n} does not match graph size {g.n}")
    idx = relabel_gather(rho.array0()[None, :])[0]
    return LabeledGraph(g.n, g.l, g.ut[idx])


def generate_cmer(dist: JointEdgeDistribution, n: int, seed: int) -> tuple[LabeledGraph, LabeledGraph]:
    """Correlated pair on a shared vertex order: each vertex pair draws ``(x1, x2)`` from ``dist``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    draws = _draw(dist, pair_count(n), rng.stream(seed, rng.GRAPH))
    return LabeledGraph(n, dist.l, draws[:, 0]), LabeledGraph(n, dist.l, draws[:, 1])


def anonymize(g2: LabeledGraph, seed: int, *, rho: Permutation | None = None) -> tuple[LabeledGraph, Permutation]:
    """Relabel by a uniform random ``rho``; returns ``(relabel(g2, rho), rho)``.

    ``rho`` may be forced, for tests.
    """
    if rho is None:
        rho = _random_perm(g2.n, rng.stream(seed, rng.ANONYMIZE))
    return relabel(g2, rho), rho


def make_instance(dist: JointEdgeDistribution, n: int, seed: int) -> CmperInstance:
    g1, g2 = generate_cmer(dist, n, seed)
    g2_anon, rho = anonymize(g2, seed)
    return CmperInstance(g1, g2_anon, invert(rho), dist)


def read_graph(text: str) -> LabeledGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"graph header must be 'n l', got {lines[0]!r}")
    try:
        n, l = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError(f"graph header must be 'n l', got {lines[0]!r}") from None
    if n < 2 or l < 2:
        raise FormatError(f"graph header needs n >= 2 and l >= 2, got {n} {l}")
    if len(lines) != 2:
        raise FormatError(f"graph file needs 2 lines, got {len(lines)}")
    try:
        ut = [int(t) for t in lines[1].split()]
    except ValueError:
        raise FormatError("edge values must be integers") from None
    if len(ut) != pair_count(n):
        raise FormatError(f"expected {pair_count(n)} values, got {len(ut)}")
    bad = [v for v in ut if not 0 <= v < l]
    if bad:
        raise FormatError(f"edge value {bad[0]} outside [0, {l - 1}]")
    return LabeledGraph(n, l, ut)


def write_graph(g: LabeledGraph) -> str:
    return f"{g.n} {g.l}\n" + " ".join(map(str, g.ut.tolist())) + "\n"
