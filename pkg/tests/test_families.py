"""Family generators all produce validated complexes."""

import pytest

from medianwalk.errors import SizeBudgetExceeded
from medianwalk.families import generate_family


def test_hypercube():
    c = generate_family({"family": "hypercube", "dim": 3})
    assert c.n == 8 and c.num_walls == 3
    assert c.meta["median_check"]["mode"] == "exhaustive"


def test_grid_3x3_has_four_walls():
    c = generate_family({"family": "grid", "p": 3, "q": 3})
    assert c.n == 9 and c.num_walls == 4


def test_product_of_edges_is_four_cycle():
    p2 = {"family": "grid", "p": 1, "q": 2}
    c = generate_family({"family": "product", "factors": [p2, p2]})
    assert c.n == 4
    assert len(c.edges) == 4
    assert all(c.d(x, y) <= 2 for x in range(4) for y in range(4))


def test_trees_have_size_minus_one_walls():
    for seed in range(4):
        c = generate_family({"family": "tree", "seed": seed, "size": 25})
        assert c.num_walls == 24
        assert len(c.edges) == 24


def test_median_closure_validates():
    for seed in range(5):
        c = generate_family({"family": "median_closure", "seed": seed, "dim": 7, "points": 10})
        assert c.n >= 2
        # closed under majority means every triple has its median realized
        assert c.meta["median_check"]["mode"] == "exhaustive" or c.n > 128


def test_budget_guard():
    with pytest.raises(SizeBudgetExceeded):
        generate_family({"family": "hypercube", "dim": 13})


def test_product_distances_add():
    c1 = generate_family({"family": "tree", "seed": 0, "size": 5})
    c2 = generate_family({"family": "grid", "p": 2, "q": 3})
    c = generate_family({"family": "product", "factors": [
        {"family": "tree", "seed": 0, "size": 5},
        {"family": "grid", "p": 2, "q": 3},
    ]})
    n2 = c2.n
    for a in range(c1.n):
        for b in range(n2):
            for a2 in range(c1.n):
                for b2 in range(n2):
                    assert c.d(a * n2 + b, a2 * n2 + b2) == c1.d(a, a2) + c2.d(b, b2)
