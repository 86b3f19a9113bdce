"""Independent brute-force oracles used by the test suite.

Everything here is deliberately naive: distances by BFS over adjacency
dicts, wall classes by the pairwise edge relation, medians by scanning all
vertices.  None of it shares code with the package internals it checks.
"""

from collections import deque
from itertools import combinations

import numpy as np


def bfs_distances(n, edges):
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    dist = np.full((n, n), -1, dtype=int)
    for s in range(n):
        dist[s, s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if dist[s, y] < 0:
                    dist[s, y] = dist[s, x] + 1
                    q.append(y)
    return dist


def djokovic_winkler_classes(n, edges):
    """Wall classes via the pairwise relation d(u,x)+d(v,y) != d(u,y)+d(v,x).

    Transitivity is assumed (true on median graphs); each edge is assigned
    to the class of the first related edge.
    """
    dist = bfs_distances(n, edges)
    classes = []
    for e in edges:
        u, v = e
        for cls in classes:
            x, y = cls[0]
            if dist[u, x] + dist[v, y] != dist[u, y] + dist[v, x]:
                cls.append(e)
                break
        else:
            classes.append([e])
    return classes


def brute_medians(n, edges, x, y, z):
    dist = bfs_distances(n, edges)
    out = []
    for m in range(n):
        if (
            dist[x, m] + dist[m, y] == dist[x, y]
            and dist[y, m] + dist[m, z] == dist[y, z]
            and dist[x, m] + dist[m, z] == dist[x, z]
        ):
            out.append(m)
    return out


def brute_interval(dist, x, y):
    return {w for w in range(dist.shape[0]) if dist[x, w] + dist[w, y] == dist[x, y]}


def four_point_delta(dist):
    """Exact hyperbolicity defect over all vertex quadruples."""
    n = dist.shape[0]
    best = 0
    for a, b, c, d in combinations(range(n), 4):
        s = sorted([dist[a, b] + dist[c, d], dist[a, c] + dist[b, d], dist[a, d] + dist[b, c]])
        best = max(best, s[2] - s[1])
    return best / 2


def max_clique(nodes, compatible):
    """Maximum clique by branch and bound; fine for ~20 nodes."""
    best = []

    def grow(clique, candidates):
        nonlocal best
        if len(clique) + len(candidates) <= len(best):
            return
        if not candidates:
            if len(clique) > len(best):
                best = list(clique)
            return
        head, *rest = candidates
        grow(clique + [head], [c for c in rest if compatible(head, c)])
        grow(clique, rest)

    grow([], list(nodes))
    return best


def f2_birth_death(n):
    """Exact E and Var of d(Z_n o, o) for the simple random walk on F2."""
    p = np.zeros(n + 2)
    p[0] = 1.0
    for _ in range(n):
        q = np.zeros_like(p)
        q[1] += p[0]
        q[2:] += 0.75 * p[1:-1]
        q[:-1] += 0.25 * p[1:]
        p = q
    d = np.arange(n + 2)
    mean = float((p * d).sum())
    var = float((p * d * d).sum() - mean**2)
    return mean, var
