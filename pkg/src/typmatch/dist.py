"""Joint edge-value distributions on the alphabet ``[0, l-1]^2``."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import FormatError, SmallCellWarning

SUM_TOL = 1e-12
LOAD_TOL = 1e-9
SMALL_CELL = 1e-6


@dataclass(frozen=True, eq=False)
class JointEdgeDistribution:
    """An ``l x l`` probability matrix; rows index the first graph's value."""

    p: np.ndarray
    l: int = field(init=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"probability matrix must be square, got shape {p.shape}")
        if p.shape[0] < 2:
            raise ValueError("alphabet size l must be at least 2")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and non-negative")
        total = math.fsum(p.ravel())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "l", p.shape[0])

    def __eq__(self, other):
        if not isinstance(other, JointEdgeDistribution):
            return NotImplemented
        return np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash(self.p.tobytes())

    def __repr__(self):
        return f"JointEdgeDistribution(l={self.l}, p={self.p.tolist()})"

    @classmethod
    def from_marginals(cls, px, py) -> "JointEdgeDistribution":
        """Product distribution with the given marginals."""
        return cls(np.outer(np.asarray(px, float), np.asarray(py, float)))

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        return marginals(self)

    def mutual_information(self, base=2) -> float:
        return mutual_information(self, base)

    def small_cells(self, threshold: float = SMALL_CELL) -> list[tuple[int, int]]:
        """Cells below ``threshold``; the achievability result assumes there are none."""
        return [tuple(map(int, ij)) for ij in np.argwhere(self.p < threshold)]


def correlated_family(rho: float, l: int = 2) -> JointEdgeDistribution:
    """``rho * diag(1/l) + (1 - rho) * uniform product`` over ``l`` symbols."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    p = rho * np.eye(l) / l + (1.0 - rho) * np.full((l, l), 1.0 / l**2)
    # push rounding residue onto the diagonal so the sum is 1 to the last ulp
    p[np.diag_indices(l)] += (1.0 - math.fsum(p.ravel())) / l
    return JointEdgeDistribution(p)


def load_distribution(text: str) -> JointEdgeDistribution:
    """Parse the distribution file format.

    Line 1 holds ``l``; the next ``l`` lines hold ``l`` probabilities each
    (row = first graph's value). Blank trailing lines are ignored. The sum
    must be within 1e-9 of 1 and is never renormalised beyond that; inside
    the tolerance the residue is folded into the largest cell so the
    in-memory sum meets the internal 1e-12 check.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty distribution file")
    try:
        l = int(lines[0].strip())
    except ValueError:
        raise FormatError(f"first line must be the alphabet size, got {lines[0]!r}") from None
    if l < 2:
        raise FormatError(f"alphabet size must be at least 2, got {l}")
    rows = lines[1:]
    if len(rows) != l:
        raise FormatError(f"expected {l} probability rows, got {len(rows)}")
    p = np.empty((l, l))
    for i, row in enumerate(rows):
        fields = row.split()
        if len(fields) != l:
            raise FormatError(f"row {i + 1}: expected {l} values, got {len(fields)}")
        try:
            p[i] = [float(f) for f in fields]
        except ValueError:
            raise FormatError(f"row {i + 1}: non-numeric entry in {row!r}") from None
    if not np.all(np.isfinite(p)):
        raise FormatError("non-finite probability")
    if np.any(p < 0):
        i, j = np.argwhere(p < 0)[0]
        raise FormatError(f"negative probability {p[i, j]} at ({i}, {j})")
    total = math.fsum(p.ravel())
    if abs(total - 1.0) > LOAD_TOL:
        raise FormatError(f"probabilities sum to {total!r}; must be 1 within {LOAD_TOL}")
    if total != 1.0:
        idx = np.unravel_index(np.argmax(p), p.shape)
        p[idx] += 1.0 - total
    dist = JointEdgeDistribution(p)
    small = dist.small_cells()
    if small:
        warnings.warn(f"cells {small} are below {SMALL_CELL}; the distribution is not "
                      "bounded away from 0", SmallCellWarning, stacklevel=2)
    return dist


def format_distribution(dist: JointEdgeDistribution) -> str:
    """Inverse of :func:`load_distribution` (``repr`` floats round-trip exactly)."""
    rows = [" ".join(repr(float(v)) for v in row) for row in dist.p]
    return f"{dist.l}\n" + "\n".join(rows) + "\n"


def marginals(dist: JointEdgeDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Row sums (first graph) and column sums (second graph)."""
    return dist.p.sum(axis=1), dist.p.sum(axis=0)


def mutual_information(dist: JointEdgeDistribution, base=2) -> float:
    """I(X1;X2) in bits (``base=2``) or nats (``base='e'`` or ``math.e``).

    Zero cells contribute nothing. The result is clipped at 0 so product
    distributions return exactly 0.0 rather than a tiny negative residue.
    """
    if base in ("e", math.e):
        log = math.log
    elif base in (2, "2"):
        log = math.log2
    else:
        raise ValueError(f"base must be 2 or 'e', got {base!r}")
    px, py = marginals(dist)
    terms = [
        dist.p[i, j] * log(dist.p[i, j] / (px[i] * py[j]))
        for i in range(dist.l) for j in range(dist.l)
        if dist.p[i, j] > 0
    ]
    return max(0.0, math.fsum(terms))


def sample_pairs(dist: JointEdgeDistribution, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. draws from ``dist`` as a ``(count, 2)`` integer array."""
    if count < 0:
        raise ValueError("count must be non-negative")
    gen = rng.stream(seed, rng.SAMPLE)
    return _draw(dist, count, gen)


def _draw(dist: JointEdgeDistribution, count: int, gen: np.random.Generator) -> np.ndarray:
    flat = dist.p.ravel()
    cdf = np.cumsum(flat)
    # zero-mass cells are zero-width steps; the last live cell absorbs rounding
    cdf[np.flatnonzero(flat)[-1]:] = 1.0
    cells = np.searchsorted(cdf, gen.random(count), side="right")
    return np.stack(np.divmod(cells, dist.l), axis=1).astype(np.int64)
