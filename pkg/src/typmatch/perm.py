"""Permutations of ``[1, n]`` and their cycle structure.

Values are 1-indexed at every public surface: ``Permutation((2, 3, 1))``
sends 1 to 2, 2 to 3 and 3 to 1. Storage is a 0-based tuple.

Two sequence actions are provided because they differ on non-involutions:

* :func:`apply` gives ``z[i] = s[pi(i)]``;
* :func:`apply_inverse` gives ``z[i] = s[pi^-1(i)]``, which moves the entry
  at position ``i`` to position ``pi(i)``.

For the cycle ``(1 2 3)`` on ``(a1, a2, a3)`` the first yields
``(a2, a3, a1)`` and the second ``(a3, a1, a2)``. Every probability the
package computes depends only on cycle type, which ``pi`` and its
inverse share, so either action gives the same numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import rng
from .errors import FormatError


class Permutation:
    """A bijection on ``[1, n]``."""

    __slots__ = ("_img",)

    def __init__(self, images: Iterable[int]):
        img = tuple(int(v) - 1 for v in images)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a permutation of [1, {len(img)}]: {[v + 1 for v in img]}")
        self._img = img

    @classmethod
    def _from0(cls, img0) -> "Permutation":
        obj = cls.__new__(cls)
        obj._img = tuple(int(v) for v in img0)
        return obj

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._from0(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build from disjoint cycles; ``(a, b, c)`` means a->b->c->a."""
        img = list(range(n))
        seen: set[int] = set()
        for cyc in cycles:
            for k, a in enumerate(cyc):
                if not 1 <= a <= n or a in seen:
                    raise ValueError(f"cycles are not disjoint within [1, {n}]: {cycles}")
                seen.add(a)
                img[a - 1] = cyc[(k + 1) % len(cyc)] - 1
        return cls._from0(img)

    @property
    def n(self) -> int:
        return len(self._img)

    @property
    def map(self) -> tuple[int, ...]:
        """Images ``(pi(1), ..., pi(n))``."""
        return tuple(v + 1 for v in self._img)

    def array0(self) -> np.ndarray:
        """0-based image array, for vectorised indexing."""
        return np.fromiter(self._img, dtype=np.intp, count=len(self._img))

    def __call__(self, i: int) -> int:
        return self._img[i - 1] + 1

    def __len__(self):
        return len(self._img)

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._img == other._img

    def __lt__(self, other: "Permutation"):
        return self._img < other._img

    def __hash__(self):
        return hash(self._img)

    def __repr__(self):
        return f"Permutation({list(self.map)})"

    def cycles(self) -> list[tuple[int, ...]]:
        return cycle_decomposition(self)[1]

    @property
    def cycle_type(self) -> "CycleType":
        return cycle_decomposition(self)[0]


@dataclass(frozen=True)
class CycleType:
    """Fixed-point count ``m`` and non-trivial cycle lengths, longest first."""

    m: int
    lengths: tuple[int, ...] = ()

    def __post_init__(self):
        lengths = tuple(sorted((int(k) for k in self.lengths), reverse=True))
        if self.m < 0:
            raise ValueError("fixed-point count must be non-negative")
        if any(k < 2 for k in lengths):
            raise ValueError(f"non-trivial cycles have length >= 2, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @property
    def c(self) -> int:
        return len(self.lengths)

    @property
    def n(self) -> int:
        return self.m + sum(self.lengths)

    def __str__(self):
        return f"m={self.m};" + ",".join(map(str, self.lengths))

    @classmethod
    def parse(cls, spec: str, n: int | None = None) -> "CycleType":
        """Parse ``"m=0;2,2,2,2"``; ``"m=5;"`` is the identity on 5 points.

        If ``n`` is given the spec must describe a permutation of ``[1, n]``.
        """
        head, sep, tail = spec.strip().partition(";")
        key, eq, val = head.partition("=")
        if not sep or key.strip() != "m" or not eq:
            raise FormatError(f"cycle spec must look like 'm=0;2,2', got {spec!r}")
        try:
            m = int(val)
            lengths = tuple(int(t) for t in tail.split(",") if t.strip())
            ct = cls(m, lengths)
        except ValueError as exc:
            raise FormatError(f"bad cycle spec {spec!r}: {exc}") from None
        if n is not None and ct.n != n:
            raise FormatError(f"cycle spec {spec!r} covers {ct.n} points, not n={n}")
        return ct


def cycle_decomposition(pi: Permutation) -> tuple[CycleType, list[tuple[int, ...]]]:
    """Cycle type and non-trivial cycles of ``pi``.

    Each cycle starts at its smallest element; cycles are ordered by
    decreasing length, then by smallest element.
    """
    img = pi._img
    seen = [False] * len(img)
    cycles = []
    for start in range(len(img)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i + 1)
            i = img[i]
        if len(cyc) > 1:
            cycles.append(tuple(cyc))  # start is the minimum: we scan upward
    cycles.sort(key=lambda c: (-len(c), c[0]))
    m = len(img) - sum(len(c) for c in cycles)
    return CycleType(m, tuple(len(c) for c in cycles)), cycles


def standard_permutation(ct: CycleType) -> Permutation:
    """Cycles on consecutive leading blocks, fixed points last.

    ``CycleType(2, (3, 2))`` gives ``(1 2 3)(4 5)(6)(7)``.
    """
    cycles, start = [], 1
    for k in ct.lengths:
        cycles.append(tuple(range(start, start + k)))
        start += k
    return Permutation.from_cycles(ct.n, cycles)


def apply(pi: Permutation, s: Sequence):
    """``z[i] = s[pi(i)]``. Returns an array for array input, else a tuple."""
    _check_len(pi, s)
    if isinstance(s, np.ndarray):
        return s[pi.array0()]
    return tuple(s[j] for j in pi._img)


def apply_inverse(pi: Permutation, s: Sequence):
    """``z[i] = s[pi^-1(i)]``; ``(1 2 3)(4 5)`` maps ``a`` to ``(a3, a1, a2, a5, a4, ...)``."""
    return apply(invert(pi), s)


def compose(p1: Permutation, p2: Permutation) -> Permutation:
    """``i -> p1(p2(i))``."""
    _check_same(p1, p2)
    a = p1._img
    return Permutation._from0(a[j] for j in p2._img)


def invert(pi: Permutation) -> Permutation:
    inv = [0] * pi.n
    for i, j in enumerate(pi._img):
        inv[j] = i
    return Permutation._from0(inv)


def random_permutation(n: int, seed: int) -> Permutation:
    """Uniform draw from ``S_n``."""
    return _random_perm(n, rng.stream(seed, rng.PERMUTATION))


def _random_perm(n: int, gen: np.random.Generator) -> Permutation:
    return Permutation._from0(gen.permutation(n))


def fixed_point_count(pi: Permutation) -> int:
    return sum(1 for i, j in enumerate(pi._img) if i == j)


def labeling_mismatch(s1: Permutation, s2: Permutation) -> int:
    """Number of points where two labelings disagree (never exactly 1)."""
    _check_same(s1, s2)
    return sum(1 for a, b in zip(s1._img, s2._img) if a != b)


def permutation_count(n: int) -> int:
    return math.factorial(n)


def read_labeling(text: str) -> Permutation:
    """Parse a labeling file: ``n`` then the ``n`` images on one line."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise FormatError(f"labeling file needs 2 lines, got {len(lines)}")
    try:
        n = int(lines[0])
        images = [int(t) for t in lines[1].split()]
    except ValueError:
        raise FormatError("labeling file holds non-integer tokens") from None
    if len(images) != n:
        raise FormatError(f"expected {n} values, got {len(images)}")
    try:
        return Permutation(images)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_labeling(pi: Permutation) -> str:
    return f"{pi.n}\n" + " ".join(map(str, pi.map)) + "\n"


def _check_len(pi, s):
    if len(s) != pi.n:
        raise ValueError(f"sequence length {len(s)} does not match permutation size {pi.n}")


def _check_same(p1, p2):
    if p1.n != p2.n:
        raise ValueError(f"permutation sizes differ: {p1.n} vs {p2.n}")
