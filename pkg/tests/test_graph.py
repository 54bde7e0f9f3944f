import itertools

import numpy as np
import pytest

from typmatch import rng
from typmatch.dist import JointEdgeDistribution, correlated_family
from typmatch.errors import FormatError
from typmatch.graph import (LabeledGraph, anonymize, generate_cmer, make_instance, pair_index,
                            read_graph, relabel, write_graph)
from typmatch.perm import Permutation, compose, invert, random_permutation


def relabel_oracle(g, rho):
    """Dict-based relabel: new[{rho(i), rho(j)}] = old[{i, j}]."""
    old = {}
    k = 0
    for i in range(1, g.n + 1):
        for j in range(i + 1, g.n + 1):
            old[(i, j)] = int(g.ut[k])
            k += 1
    new = {}
    for (i, j), v in old.items():
        a, b = sorted((rho(i), rho(j)))
        new[(a, b)] = v
    return [new[p] for p in sorted(new)]


def random_graph(n, l, seed):
    gen = rng.stream(seed, 99)
    return LabeledGraph(n, l, gen.integers(0, l, n * (n - 1) // 2))


def test_pair_index_row_major():
    pairs = [(i, j) for i in range(1, 6) for j in range(i + 1, 6)]
    assert [pair_index(5, i, j) for i, j in pairs] == list(range(10))
    assert pair_index(5, 4, 2) == pair_index(5, 2, 4)


def test_relabel_three_vertex_example():
    # rho(1)=2, rho(2)=3, rho(3)=1: old {1,2} -> {2,3}, {1,3} -> {1,2}, {2,3} -> {1,3}
    g = LabeledGraph(3, 3, [0, 1, 2])  # e12=0, e13=1, e23=2
    rho = Permutation((2, 3, 1))
    h = relabel(g, rho)
    assert h.ut.tolist() == relabel_oracle(g, rho) == [1, 2, 0]


def test_relabel_identity():
    g = random_graph(9, 3, 1)
    assert relabel(g, Permutation.identity(9)) == g


def test_relabel_matches_oracle():
    for seed in range(100):
        n = 2 + seed % 12
        g = random_graph(n, 4, seed)
        rho = random_permutation(n, seed)
        assert relabel(g, rho).ut.tolist() == relabel_oracle(g, rho)


def test_relabel_functorial():
    for seed in range(100):
        n = 2 + seed % 9
        g = random_graph(n, 3, seed)
        r1, r2 = random_permutation(n, seed), random_permutation(n, seed + 7)
        assert relabel(relabel(g, r1), r2) == relabel(g, compose(r2, r1))


def test_relabel_size_mismatch():
    with pytest.raises(ValueError):
        relabel(random_graph(4, 2, 0), Permutation.identity(5))


def test_cmer_perfect_correlation_equal():
    g1, g2 = generate_cmer(correlated_family(1.0, 3), 30, 11)
    assert g1 == g2


def test_cmer_deterministic():
    d = correlated_family(0.5, 2)
    a = generate_cmer(d, 20, 3)
    b = generate_cmer(d, 20, 3)
    assert a == b
    assert write_graph(a[0]).encode() == write_graph(b[0]).encode()


def test_cmer_product_joint_type_within_3_sigma():
    d = JointEdgeDistribution([[0.3 * 0.6, 0.3 * 0.4], [0.7 * 0.6, 0.7 * 0.4]])
    g1, g2 = generate_cmer(d, 200, 17)
    big_n = 200 * 199 // 2
    counts = np.zeros((2, 2))
    np.add.at(counts, (g1.ut, g2.ut), 1)
    sd = np.sqrt(d.p * (1 - d.p) / big_n)
    assert np.all(np.abs(counts / big_n - d.p) <= 3 * sd)


def test_cmer_marginals_within_3_sigma(ref_dist):
    d = JointEdgeDistribution([[0.5, 0.1, 0.0], [0.05, 0.15, 0.05], [0.0, 0.05, 0.1]])
    g1, g2 = generate_cmer(d, 200, 23)
    big_n = 200 * 199 // 2
    for g, marg in ((g1, d.p.sum(1)), (g2, d.p.sum(0))):
        freq = np.bincount(g.ut, minlength=3) / big_n
        assert np.all(np.abs(freq - marg) <= 3 * np.sqrt(marg * (1 - marg) / big_n))


def test_anonymize_properties():
    g = random_graph(10, 3, 4)
    same, rho = anonymize(g, 0, rho=Permutation.identity(10))
    assert same == g
    anon, rho = anonymize(g, 8)
    assert relabel(anon, invert(rho)) == g
    assert sorted(anon.ut.tolist()) == sorted(g.ut.tolist())


def test_instance_secret_realigns():
    for seed in range(20):
        inst = make_instance(correlated_family(1.0, 2), 9, seed)
        assert relabel(inst.g2_anon, inst.secret) == inst.g1


def test_prop1_identity_small_exhaustive():
    g = random_graph(5, 3, 2)
    for images in itertools.permutations(range(1, 6)):
        rho = Permutation(images)
        h = relabel(g, rho)
        for i in range(1, 6):
            for j in range(i + 1, 6):
                assert h.value(rho(i), rho(j)) == g.value(i, j)


def test_graph_file_format():
    g = read_graph("3 2\n1 0 1\n")
    assert (g.n, g.l, g.ut.tolist()) == (3, 2, [1, 0, 1])
    assert write_graph(g) == "3 2\n1 0 1\n"
    h = random_graph(12, 4, 3)
    assert read_graph(write_graph(h)) == h


@pytest.mark.parametrize("text, message", [
    ("3 2\n1 0\n", "expected 3 values"),
    ("3\n1 0 1\n", "header"),
    ("3 2\n1 0 2\n", "outside"),
    ("a b\n1\n", "header"),
    ("", "empty"),
])
def test_graph_file_errors(text, message):
    with pytest.raises(FormatError, match=message):
        read_graph(text)


def test_labeled_graph_validation():
    with pytest.raises(ValueError, match="expected 3 values"):
        LabeledGraph(3, 2, [0, 1])
    with pytest.raises(ValueError):
        LabeledGraph(3, 2, [0, 1, 2])
