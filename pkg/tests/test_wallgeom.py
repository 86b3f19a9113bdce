"""Wall relations, contact graphs, strong separation, hyperbolicity."""

import numpy as np
import pytest

from medianwalk.complexes import build_complex
from medianwalk.errors import WallOutOfRange
from medianwalk.families import generate_family, grid_edges, hypercube_edges
from medianwalk.wallgeom import (
    WallRelation,
    contact_graph,
    cx_distance,
    cx_gromov,
    hyperbolicity_delta,
    max_ss_set,
    strongly_separated,
    wall_relation,
    walls_adjacent_to,
)

from oracles import bfs_distances, four_point_delta, max_clique


def p4():
    return build_complex(4, [(0, 1), (1, 2), (2, 3)])


def wall_of_edge(c, edge):
    for w in c.walls:
        if tuple(edge) in w.dual_edges:
            return w.id
    raise AssertionError(f"no wall for {edge}")


def test_q3_all_pairs_transverse():
    c = build_complex(8, hypercube_edges(3))
    for i in range(3):
        for j in range(3):
            expect = WallRelation.EQUAL if i == j else WallRelation.TRANSVERSE
            assert wall_relation(c, i, j) == expect


def test_p4_nesting_classification():
    c = p4()
    e1, e2, e3 = (wall_of_edge(c, e) for e in [(0, 1), (1, 2), (2, 3)])
    assert wall_relation(c, e1, e2) == WallRelation.TIGHTLY_NESTED
    assert wall_relation(c, e2, e3) == WallRelation.TIGHTLY_NESTED
    assert wall_relation(c, e1, e3) == WallRelation.NESTED_LOOSE


def test_tree_walls_all_strongly_separated():
    c = generate_family({"family": "tree", "seed": 9, "size": 14})
    for i in range(c.num_walls):
        for j in range(c.num_walls):
            if i != j:
                assert strongly_separated(c, i, j)


def test_grid_no_strongly_separated_pairs():
    c = build_complex(9, grid_edges(3, 3))
    for i in range(4):
        for j in range(4):
            if i != j:
                assert not strongly_separated(c, i, j)


def test_q3_no_strongly_separated_pairs():
    c = build_complex(8, hypercube_edges(3))
    assert not any(
        strongly_separated(c, i, j) for i in range(3) for j in range(3) if i != j
    )


def test_strong_separation_needs_distinct_walls():
    with pytest.raises(WallOutOfRange):
        strongly_separated(p4(), 1, 1)


def test_p4_contact_graph_is_path():
    c = p4()
    cg = contact_graph(c)
    e1, e2, e3 = (wall_of_edge(c, e) for e in [(0, 1), (1, 2), (2, 3)])
    assert cg.adjacency[e1, e2] and cg.adjacency[e2, e3] and not cg.adjacency[e1, e3]
    assert cx_distance(cg, e1, e3) == 2
    assert cx_distance(cg, e1, e1) == 0
    assert cx_gromov(cg, e1, e3, e2) == 0


def test_grid_contact_graph_complete():
    c = build_complex(9, grid_edges(3, 3))
    cg = contact_graph(c)
    assert cg.adjacency.sum() == 4 * 3  # K4
    assert cg.dist.max() == 1


def test_contact_graph_connected_on_families():
    for spec in (
        {"family": "tree", "seed": 2, "size": 20},
        {"family": "median_closure", "seed": 3, "dim": 6, "points": 9},
        {"family": "product", "factors": [
            {"family": "tree", "seed": 0, "size": 4},
            {"family": "tree", "seed": 1, "size": 4},
        ]},
    ):
        cg = contact_graph(generate_family(spec))
        assert (cg.dist >= 0).all()


def test_pi_cliques():
    c = p4()
    assert walls_adjacent_to(c, 0) == [wall_of_edge(c, (0, 1))]
    cg = contact_graph(c)
    for x in range(4):
        ws = walls_adjacent_to(c, x)
        for a in ws:
            for b in ws:
                if a != b:
                    assert cg.adjacency[a, b]


def test_max_ss_tree_equals_distance():
    c = generate_family({"family": "tree", "seed": 4, "size": 18})
    rng = np.random.default_rng(0)
    for _ in range(40):
        x, y = (int(v) for v in rng.integers(0, c.n, size=2))
        assert max_ss_set(c, x, y) == c.d(x, y)


def test_max_ss_grid_and_cube():
    grid = build_complex(9, grid_edges(3, 3))
    assert max_ss_set(grid, 0, 8) == 1
    q3 = build_complex(8, hypercube_edges(3))
    assert max_ss_set(q3, 0, 7) == 1
    assert max_ss_set(q3, 0, 0) == 0


def test_max_ss_versus_brute_clique():
    from medianwalk.wallgeom import wall_pairs

    rng = np.random.default_rng(12)
    for spec in (
        {"family": "median_closure", "seed": 5, "dim": 6, "points": 10},
        {"family": "product", "factors": [
            {"family": "tree", "seed": 3, "size": 5},
            {"family": "tree", "seed": 4, "size": 5},
        ]},
    ):
        c = generate_family(spec)
        wp = wall_pairs(c)
        for _ in range(30):
            x, y = (int(v) for v in rng.integers(0, c.n, size=2))
            sep = c.separating_walls(x, y)
            if not (0 < len(sep) <= 16):
                continue
            best = max_clique(sep, lambda a, b: wp.strongly_sep[a, b])
            assert max_ss_set(c, x, y) == max(1, len(best))


def test_chain_transitivity_of_strong_separation():
    # nested h1 > h2 > h3 with consecutive SS pairs forces SS(h1, h3)
    from medianwalk.wallgeom import wall_pairs

    for spec in (
        {"family": "tree", "seed": 6, "size": 16},
        {"family": "median_closure", "seed": 8, "dim": 6, "points": 10},
    ):
        c = generate_family(spec)
        if c.num_walls > 20:
            continue
        wp = wall_pairs(c)
        M = c.side_one
        sides = {}
        for w in range(c.num_walls):
            sides[(w, 1)] = frozenset(np.flatnonzero(M[w]))
            sides[(w, 0)] = frozenset(np.flatnonzero(~M[w]))
        keys = list(sides)
        for k1 in keys:
            for k2 in keys:
                if k1[0] == k2[0] or not sides[k1] > sides[k2]:
                    continue
                for k3 in keys:
                    if k3[0] in (k1[0], k2[0]) or not sides[k2] > sides[k3]:
                        continue
                    if wp.strongly_sep[k1[0], k2[0]] and wp.strongly_sep[k2[0], k3[0]]:
                        assert wp.strongly_sep[k1[0], k3[0]]


def test_hyperbolicity_tree_zero():
    c = generate_family({"family": "tree", "seed": 1, "size": 20})
    assert hyperbolicity_delta(c.dist, samples=10**6) == 0


def test_hyperbolicity_c12_is_three():
    edges = [(i, (i + 1) % 12) for i in range(12)]
    dist = bfs_distances(12, edges)
    assert hyperbolicity_delta(dist, samples=10**6) == 3
    assert four_point_delta(dist) == 3


def test_hyperbolicity_sampled_mode_bounded_by_exact():
    edges = [(i, (i + 1) % 12) for i in range(12)]
    dist = bfs_distances(12, edges)
    sampled = hyperbolicity_delta(dist, samples=150, seed=5)
    assert 0 <= sampled <= 3
