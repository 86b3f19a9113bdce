"""Normal forms, group operations, medians, and the finite-hull oracle."""

import itertools

import numpy as np
import pytest

from medianwalk.errors import DefiningGraphMismatch, UnknownGenerator
from medianwalk.raag import (
    DefiningGraph,
    cyclic_reduction,
    dist,
    gromov_raag,
    identity,
    median_raag,
    nf,
    translation_length,
)
from medianwalk.raagwalls import hull_materialize, interval_elements


def f2():
    return DefiningGraph(["a", "b"])


def z2():
    return DefiningGraph(["a", "b"], [("a", "b")])


def c5():
    names = [f"v{i}" for i in range(5)]
    edges = [(names[i], names[(i + 1) % 5]) for i in range(5)]
    return DefiningGraph(names, edges)


def random_word(dg, rng, length):
    return [(int(rng.integers(0, dg.num_generators)), int(rng.choice([1, -1])))
            for _ in range(length)]


def test_free_reduction():
    g = nf(f2(), "a A b")
    assert len(g) == 1
    assert g == nf(f2(), "b")


def test_z2_canonical_order():
    g = nf(z2(), "b a")
    assert g == nf(z2(), "a b")
    assert len(g) == 2


def test_c5_no_cancellation_across_noncommuting():
    g = nf(c5(), "v1 v3 V1")
    assert len(g) == 3


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        nf(f2(), "a c")


def test_mixed_graphs_rejected():
    with pytest.raises(DefiningGraphMismatch):
        nf(f2(), "a") * nf(z2(), "a")


def test_group_axioms_and_metric():
    rng = np.random.default_rng(1)
    for dg in (f2(), z2(), c5()):
        e = identity(dg)
        for _ in range(60):
            a = nf(dg, random_word(dg, rng, int(rng.integers(0, 9))))
            b = nf(dg, random_word(dg, rng, int(rng.integers(0, 9))))
            cc = nf(dg, random_word(dg, rng, int(rng.integers(0, 9))))
            assert (a * b) * cc == a * (b * cc)
            assert a * a.inv() == e
            assert dist(a, a) == 0
            assert dist(a, b) == dist(b, a) == len(a.inv() * b)
            assert dist(a, cc) <= dist(a, b) + dist(b, cc)


def test_normal_form_confluence():
    """Words massaged by commutations and cancelling insertions keep the
    same canonical form."""
    rng = np.random.default_rng(2)
    for dg in (f2(), z2(), c5()):
        for _ in range(400):
            word = random_word(dg, rng, int(rng.integers(0, 10)))
            target = nf(dg, word)
            mutated = list(word)
            for _ in range(6):
                op = rng.integers(0, 2)
                if op == 0 and len(mutated) >= 2:
                    i = int(rng.integers(0, len(mutated) - 1))
                    g1, g2 = mutated[i][0], mutated[i + 1][0]
                    if g1 != g2 and g2 in dg.adj[g1]:
                        mutated[i], mutated[i + 1] = mutated[i + 1], mutated[i]
                else:
                    i = int(rng.integers(0, len(mutated) + 1))
                    g = int(rng.integers(0, dg.num_generators))
                    s = int(rng.choice([1, -1]))
                    mutated[i:i] = [(g, s), (g, -s)]
            assert nf(dg, mutated) == target


def test_dist_examples():
    assert dist(nf(f2(), "a"), nf(f2(), "b")) == 2
    assert dist(nf(z2(), "a b"), identity(z2())) == 2


def test_median_trivial_and_grid():
    dgz = z2()
    e, a, ab = identity(dgz), nf(dgz, "a"), nf(dgz, "a b")
    assert median_raag(e, e, a) == e
    assert median_raag(e, a, ab) == a
    dgf = f2()
    m = median_raag(identity(dgf), nf(dgf, "a b"), nf(dgf, "a B"))
    assert m == nf(dgf, "a")


def test_median_axioms_random():
    rng = np.random.default_rng(3)
    for dg in (f2(), z2(), c5()):
        for _ in range(150):
            x, y, z = (nf(dg, random_word(dg, rng, int(rng.integers(0, 7)))) for _ in range(3))
            m = median_raag(x, y, z)
            assert m == median_raag(z, x, y) == median_raag(y, x, z)
            assert median_raag(x, x, y) == x


def test_gromov_examples():
    dgf = f2()
    e = identity(dgf)
    assert gromov_raag(nf(dgf, "a b"), nf(dgf, "a B"), e, check=True) == 1
    assert gromov_raag(nf(dgf, "a"), nf(dgf, "b"), nf(dgf, "a")) == 0


def test_translation_lengths():
    assert translation_length(nf(f2(), "a b A"), mode="cyclic") == 1
    assert translation_length(nf(f2(), "a b A"), mode="limit") == 1
    assert translation_length(nf(z2(), "a b"), mode="cyclic") == 2
    assert translation_length(nf(z2(), "a b"), mode="limit") == 2
    assert cyclic_reduction(nf(f2(), "a b A")) == nf(f2(), "b")


def test_translation_modes_agree_randomly():
    rng = np.random.default_rng(4)
    for dg in (f2(), z2(), c5()):
        for _ in range(60):
            g = nf(dg, random_word(dg, rng, int(rng.integers(1, 7))))
            assert translation_length(g, "cyclic") == translation_length(g, "limit")


def test_join_detection():
    assert z2().is_join() == (frozenset({"a"}), frozenset({"b"}))
    assert f2().is_join() is None
    assert c5().is_join() is None


def test_interval_elements_of_free_word():
    dg = f2()
    g = nf(dg, "a b a")
    ivl = interval_elements(identity(dg), g)
    assert len(ivl) == 4  # a path of length 3


def test_hull_z2_square():
    dg = z2()
    c, index = hull_materialize([identity(dg), nf(dg, "a b")])
    assert c.n == 4
    assert len(c.edges) == 4


def test_hull_f2_path():
    dg = f2()
    g = nf(dg, "a b A b")
    c, index = hull_materialize([identity(dg), g])
    assert c.n == len(g) + 1
    assert len(c.edges) == len(g)


def test_hull_idempotent():
    dg = c5()
    pts = [identity(dg), nf(dg, "v0 v2"), nf(dg, "v1 V3")]
    c, index = hull_materialize(pts)
    c2, index2 = hull_materialize(list(index))
    assert c2.n == c.n


def test_hull_oracle_distance_median_agree():
    rng = np.random.default_rng(5)
    for dg in (f2(), z2(), c5()):
        for _ in range(25):
            pts = [nf(dg, random_word(dg, rng, int(rng.integers(0, 5)))) for _ in range(3)]
            c, index = hull_materialize(pts)
            x, y, z = (index[p] for p in pts)
            assert c.d(x, y) == dist(pts[0], pts[1])
            assert c.d(y, z) == dist(pts[1], pts[2])
            m = median_raag(*pts)
            assert index[m] == c.median(x, y, z)
            assert gromov_raag(pts[0], pts[1], pts[2]) == c.gromov_product(x, y, z)
