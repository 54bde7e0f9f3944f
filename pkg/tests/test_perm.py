import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typmatch.errors import FormatError
from typmatch.perm import (CycleType, Permutation, apply, apply_inverse, compose,
                           cycle_decomposition, fixed_point_count, invert, labeling_mismatch,
                           random_permutation, read_labeling, standard_permutation,
                           write_labeling)

perms = st.integers(1, 40).flatmap(lambda n: st.permutations(range(1, n + 1))).map(Permutation)


def brute_cycle_type(images):
    """Cycle lengths by repeatedly following images, no shared code with the package."""
    n = len(images)
    seen, lengths = set(), []
    for s in range(1, n + 1):
        if s in seen:
            continue
        k, i = 0, s
        while i not in seen:
            seen.add(i)
            i = images[i - 1]
            k += 1
        lengths.append(k)
    return sorted((k for k in lengths if k > 1), reverse=True), lengths.count(1)


def test_example_cycle_type():
    pi = Permutation.from_cycles(7, [(1, 2, 3), (4, 5)])
    ct, cycles = cycle_decomposition(pi)
    assert ct == CycleType(m=2, lengths=(3, 2))
    assert (ct.c, ct.n) == (2, 7)
    assert cycles == [(1, 2, 3), (4, 5)]


def test_identity_cycle_type():
    ct, cycles = cycle_decomposition(Permutation.identity(5))
    assert ct == CycleType(5, ()) and cycles == []


def test_decompose_rebuild_roundtrip_random():
    for seed in range(20):
        pi = random_permutation(50, seed)
        assert Permutation.from_cycles(50, pi.cycles()) == pi


@pytest.mark.parametrize("n", range(1, 8))
def test_decompose_rebuild_exhaustive(n):
    for images in itertools.permutations(range(1, n + 1)):
        pi = Permutation(images)
        ct, cycles = cycle_decomposition(pi)
        assert Permutation.from_cycles(n, cycles) == pi
        lengths, m = brute_cycle_type(images)
        assert ct == CycleType(m, tuple(lengths))
        assert standard_permutation(ct).cycle_type == ct


def test_canonical_cycle_order():
    pi = Permutation.from_cycles(9, [(9, 8), (5, 2, 7), (4, 3)])
    assert pi.cycles() == [(2, 7, 5), (3, 4), (8, 9)]


def test_standard_permutation_examples():
    std = standard_permutation(CycleType(2, (3, 2)))
    assert std.map == (2, 3, 1, 5, 4, 6, 7)
    assert std == Permutation.from_cycles(7, [(1, 2, 3), (4, 5)])
    assert standard_permutation(CycleType(6)) == Permutation.identity(6)
    assert standard_permutation(CycleType(0, (4,))).map == (2, 3, 4, 1)


def test_cycle_type_validation():
    with pytest.raises(ValueError):
        CycleType(0, (1, 2))
    with pytest.raises(ValueError):
        CycleType(-1, (2,))
    assert CycleType(0, (2, 3)).lengths == (3, 2)


def test_cycle_spec_parse():
    assert CycleType.parse("m=0;2,2,2,2", 8) == CycleType(0, (2, 2, 2, 2))
    assert CycleType.parse("m=5;", 5) == CycleType(5)
    with pytest.raises(FormatError):
        CycleType.parse("m=0;2,2", 5)
    with pytest.raises(FormatError):
        CycleType.parse("2,2")


def test_apply_conventions():
    s = ("a1", "a2", "a3", "a4", "a5", "a6", "a7")
    pi = Permutation.from_cycles(7, [(1, 2, 3), (4, 5)])
    assert apply(Permutation.identity(3), ("a", "b", "c")) == ("a", "b", "c")
    # z_i = s_{pi(i)}
    assert apply(pi, s) == ("a2", "a3", "a1", "a5", "a4", "a6", "a7")
    # entry at position i moves to position pi(i)
    assert apply_inverse(pi, s) == ("a3", "a1", "a2", "a5", "a4", "a6", "a7")
    np.testing.assert_array_equal(apply(pi, np.arange(7)), [1, 2, 0, 4, 3, 5, 6])
    with pytest.raises(ValueError):
        apply(pi, s[:3])


@settings(max_examples=200)
@given(perms)
def test_apply_inverse_roundtrip(pi):
    s = tuple(range(100, 100 + pi.n))
    assert apply(pi, apply(invert(pi), s)) == s
    assert apply_inverse(pi, apply(pi, s)) == s


@settings(max_examples=200)
@given(perms)
def test_group_laws(pi):
    e = Permutation.identity(pi.n)
    assert compose(pi, invert(pi)) == e == compose(invert(pi), pi)
    assert sorted(compose(pi, pi).map) == list(range(1, pi.n + 1))
    assert fixed_point_count(e) == pi.n


def test_compose_order():
    a = Permutation((2, 1, 3))
    b = Permutation((1, 3, 2))
    c = compose(a, b)
    assert all(c(i) == a(b(i)) for i in range(1, 4))


@pytest.mark.parametrize("n", range(1, 7))
def test_conjugation_preserves_cycle_type_exhaustive(n):
    group = [Permutation(p) for p in itertools.permutations(range(1, n + 1))]
    for pi in group:
        ct = pi.cycle_type
        for rho in group:
            assert compose(compose(rho, pi), invert(rho)).cycle_type == ct


def test_conjugation_preserves_cycle_type_random():
    for seed in range(50):
        n = 7 + seed
        pi, rho = random_permutation(n, seed), random_permutation(n, 1000 + seed)
        assert compose(compose(rho, pi), invert(rho)).cycle_type == pi.cycle_type


def test_random_permutation_uniform_on_s3():
    counts = {}
    for seed in range(6000):
        p = random_permutation(3, seed).map
        counts[p] = counts.get(p, 0) + 1
    assert len(counts) == 6
    # sd of each count is ~29; 150 is > 5 sd
    assert all(abs(c - 1000) < 150 for c in counts.values())


def test_mismatch_examples():
    e = Permutation.identity(5)
    assert labeling_mismatch(e, e) == 0
    assert labeling_mismatch(e, Permutation.from_cycles(5, [(1, 2)])) == 2
    with pytest.raises(ValueError):
        labeling_mismatch(e, Permutation.identity(4))


def test_mismatch_fixed_point_identity_n8():
    for seed in range(200):
        s1, s2 = random_permutation(8, seed), random_permutation(8, seed + 500)
        direct = sum(1 for i in range(1, 9) if s1(i) != s2(i))
        assert labeling_mismatch(s1, s2) == direct == 8 - fixed_point_count(compose(s1, invert(s2)))
        assert labeling_mismatch(s1, s2) != 1


def test_invalid_permutations():
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))
    with pytest.raises(ValueError):
        Permutation((0, 1, 2))
    with pytest.raises(ValueError):
        Permutation.from_cycles(4, [(1, 2), (2, 3)])


def test_labeling_file_roundtrip():
    pi = random_permutation(12, 5)
    assert read_labeling(write_labeling(pi)) == pi
    assert write_labeling(Permutation((2, 1, 3))) == "3\n2 1 3\n"
    for bad in ("3\n1 2\n", "3\n1 1 2\n", "x\n1\n", "3\n"):
        with pytest.raises(FormatError):
            read_labeling(bad)
