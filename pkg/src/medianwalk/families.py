"""Generators for families of finite median complexes.

Every generator returns a complex that has passed full build validation,
so a bug here surfaces as a build error rather than silent bad geometry.
"""

from __future__ import annotations

import numpy as np

from .complexes import FiniteMedianComplex, build_complex
from .errors import SchemaViolation, SizeBudgetExceeded

DEFAULT_VERTEX_BUDGET = 4096


def random_tree_edges(seed, size):
    rng = np.random.default_rng(seed)
    return [(int(rng.integers(0, i)), i) for i in range(1, size)]


def grid_edges(p, q):
    edges = []
    for i in range(p):
        for j in range(q):
            v = i * q + j
            if j + 1 < q:
                edges.append((v, v + 1))
            if i + 1 < p:
                edges.append((v, v + q))
    return edges


def hypercube_edges(dim):
    edges = []
    for v in range(1 << dim):
        for b in range(dim):
            u = v ^ (1 << b)
            if u > v:
                edges.append((v, u))
    return edges


def product_edges(c1: FiniteMedianComplex, c2: FiniteMedianComplex):
    n2 = c2.n
    edges = []
    for a in range(c1.n):
        for u, v in c2.edges:
            edges.append((a * n2 + u, a * n2 + v))
    for u, v in c1.edges:
        for b in range(n2):
            edges.append((u * n2 + b, v * n2 + b))
    return c1.n * n2, edges


def median_closure_points(seed, dim, points, budget):
    """Random hypercube subset closed under coordinatewise majority."""
    rng = np.random.default_rng(seed)
    current = np.unique(rng.integers(0, 1 << dim, size=points, dtype=np.int64))
    frontier = current
    while len(frontier):
        x = frontier[:, None, None]
        s1 = current[None, :, None]
        s2 = current[None, None, :]
        maj = (x & s1) | (s1 & s2) | (x & s2)
        candidates = np.unique(maj)
        new = np.setdiff1d(candidates, current, assume_unique=True)
        current = np.union1d(current, new)
        frontier = new
        if len(current) > budget:
            raise SizeBudgetExceeded(f"median closure exceeded {budget} points")
    return current


def betweenness_edges(points):
    """Edge (x, y) when no third set point is coordinatewise between them."""
    pts = np.asarray(points, dtype=np.int64)
    k = len(pts)
    edges = []
    for i in range(k):
        zi = pts ^ pts[i]                      # (k,)
        zj = pts[:, None] ^ pts[None, :]       # (k, k), rows are z
        between = (zi[:, None] & zj) == 0      # z between pts[i] and pts[j]
        between[i, :] = False
        between[np.arange(k), np.arange(k)] = False
        blocked = between.any(axis=0)
        for j in range(i + 1, k):
            if not blocked[j]:
                edges.append((i, j))
    return edges


def generate_family(spec, budget=DEFAULT_VERTEX_BUDGET):
    """Build a complex from a family spec dict.

    Supported: {"family": "tree", "seed", "size"}, {"family": "grid", "p", "q"},
    {"family": "hypercube", "dim"}, {"family": "product", "factors": [s1, s2]},
    {"family": "median_closure", "seed", "dim", "points"}.
    """
    if isinstance(spec, FiniteMedianComplex):
        return spec
    try:
        kind = spec["family"]
    except (TypeError, KeyError):
        raise SchemaViolation("family spec needs a 'family' key", key="family")
    if kind == "tree":
        size = int(spec["size"])
        _check_budget(size, budget)
        c = build_complex(size, random_tree_edges(int(spec["seed"]), size))
    elif kind == "grid":
        p, q = int(spec["p"]), int(spec["q"])
        _check_budget(p * q, budget)
        c = build_complex(p * q, grid_edges(p, q))
    elif kind == "hypercube":
        dim = int(spec["dim"])
        _check_budget(1 << dim, budget)
        c = build_complex(1 << dim, hypercube_edges(dim))
    elif kind == "product":
        f1, f2 = spec["factors"]
        c1 = generate_family(f1, budget)
        c2 = generate_family(f2, budget)
        n, edges = product_edges(c1, c2)
        _check_budget(n, budget)
        c = build_complex(n, edges)
    elif kind == "median_closure":
        pts = median_closure_points(int(spec["seed"]), int(spec["dim"]), int(spec["points"]), budget)
        c = build_complex(len(pts), betweenness_edges(pts))
    else:
        raise SchemaViolation(f"unknown family {kind!r}", key="family")
    c.meta["family"] = {k: v for k, v in spec.items()} if isinstance(spec, dict) else str(spec)
    return c


def _check_budget(n, budget):
    if n > budget:
        raise SizeBudgetExceeded(f"{n} vertices exceeds budget {budget}")
