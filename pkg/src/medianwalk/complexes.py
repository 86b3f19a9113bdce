"""Exact finite median complexes.

A complex is stored as its vertex set (dense indices), the combinatorial
metric (all-pairs table), and its walls: the half-space bipartitions
extracted from the edge set.  Everything is validated at build time; all
other modules treat a built complex as ground truth, so construction is
deliberately paranoid.

Wall extraction uses the classical edge relation: edges (u,v) and (x,y)
are co-dual exactly when d(u,x)+d(v,y) != d(u,y)+d(v,x).  On a bipartite
graph this groups edges by the bipartition {w : d(w,u) < d(w,v)}, which is
how the classes are computed here; the pairwise relation itself is
cross-checked in the test suite.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import (
    IntegrityFailure,
    NotBipartite,
    NotConnected,
    NotMedian,
    VertexOutOfRange,
)

# Above this vertex count the median property is checked on sampled triples
# instead of all of them (the mode used is recorded in complex metadata).
EXHAUSTIVE_MEDIAN_LIMIT = 128
SAMPLED_MEDIAN_TRIPLES = 100_000
CONVEXITY_SAMPLE_PAIRS = 64


@dataclass(frozen=True)
class Wall:
    """A hyperplane: a bipartition of the vertices plus its dual edges.

    ``side_zero`` is the side containing vertex 0; swapping sides is the
    half-space involution.
    """

    id: int
    side_zero: frozenset
    side_one: frozenset
    dual_edges: frozenset


@dataclass(frozen=True)
class Halfspace:
    """One side of a wall; orientation 1 means ``side_one``."""

    wall_id: int
    orientation: int

    def complement(self) -> "Halfspace":
        return Halfspace(self.wall_id, 1 - self.orientation)


class FiniteMedianComplex:
    """Immutable validated median graph with cached metric and walls.

    Instances are produced by :func:`build_complex`; direct construction
    skips validation and is reserved for internal use.
    """

    def __init__(self, n, edges, dist, walls, side_one_matrix, meta):
        self.n = n
        self.edges = edges                    # tuple of sorted (u, v)
        self.dist = dist                      # (n, n) int32
        self.walls = walls                    # tuple of Wall
        self.side_one = side_one_matrix       # (W, n) bool, True = side_one
        self.meta = meta
        self.adjacency = [[] for _ in range(n)]
        for u, v in edges:
            self.adjacency[u].append(v)
            self.adjacency[v].append(u)
        for nbrs in self.adjacency:
            nbrs.sort()
        # per-vertex half-space membership as an int bitmask over walls
        self.masks = [0] * n
        for w in range(len(walls)):
            col = side_one_matrix[w]
            for v in np.flatnonzero(col):
                self.masks[v] |= 1 << w
        self._mask_to_vertex = {m: v for v, m in enumerate(self.masks)}
        if len(self._mask_to_vertex) != n:
            raise NotMedian("two vertices share a half-space profile")

    # --- basic accessors -------------------------------------------------

    @property
    def num_walls(self):
        return len(self.walls)

    def check_vertex(self, *vs):
        for v in vs:
            if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
                raise VertexOutOfRange(f"vertex {v!r} not in [0, {self.n})")

    def d(self, x, y):
        self.check_vertex(x, y)
        return int(self.dist[x, y])

    def separating_walls(self, x, y):
        """Ids of the walls separating x from y."""
        self.check_vertex(x, y)
        m = self.masks[x] ^ self.masks[y]
        out = []
        w = 0
        while m:
            if m & 1:
                out.append(w)
            m >>= 1
            w += 1
        return out

    def vertex_for_mask(self, mask):
        return self._mask_to_vertex.get(mask)

    # --- median structure -------------------------------------------------

    def median(self, x, y, z):
        """Median vertex via the half-space majority formula."""
        self.check_vertex(x, y, z)
        mx, my, mz = self.masks[x], self.masks[y], self.masks[z]
        maj = (mx & my) | (my & mz) | (mx & mz)
        v = self._mask_to_vertex.get(maj)
        if v is None:
            raise IntegrityFailure(f"majority profile of {(x, y, z)} is not a vertex")
        return v

    def median_by_intervals(self, x, y, z):
        """Independent median computation: the triple interval intersection."""
        self.check_vertex(x, y, z)
        D = self.dist
        in_xy = D[x] + D[y] == D[x, y]
        in_yz = D[y] + D[z] == D[y, z]
        in_xz = D[x] + D[z] == D[x, z]
        hits = np.flatnonzero(in_xy & in_yz & in_xz)
        if len(hits) != 1:
            raise NotMedian(
                f"triple {(x, y, z)} has {len(hits)} medians",
                triple=(x, y, z),
                count=len(hits),
            )
        return int(hits[0])

    def interval(self, x, y, check=False):
        """I(x, y): vertices on combinatorial geodesics from x to y."""
        self.check_vertex(x, y)
        D = self.dist
        hits = np.flatnonzero(D[x] + D[y] == D[x, y])
        result = tuple(int(v) for v in hits)
        if check:
            mand = self.masks[x] & self.masks[y]
            mor = self.masks[x] | self.masks[y]
            by_halfspaces = tuple(
                v for v in range(self.n)
                if (self.masks[v] & mand) == mand and (self.masks[v] & ~mor) == 0
            )
            if by_halfspaces != result:
                raise IntegrityFailure("interval characterizations disagree")
        return result

    def convex_hull(self, points):
        """Smallest superset of ``points`` closed under intervals."""
        pts = list(points)
        self.check_vertex(*pts)
        if not pts:
            raise VertexOutOfRange("convex hull of an empty set")
        hull = set(pts)
        frontier = list(hull)
        while frontier:
            new = set()
            members = list(hull)
            for a in frontier:
                for b in members:
                    for v in self.interval(a, b):
                        if v not in hull:
                            new.add(v)
            hull |= new
            frontier = list(new)
        return tuple(sorted(hull))

    def gromov_product(self, x, y, o):
        """(x|y)_o = d(o, m(x,y,o)); always an exact integer here."""
        self.check_vertex(x, y, o)
        two = int(self.dist[x, o]) + int(self.dist[y, o]) - int(self.dist[x, y])
        if two % 2:
            raise IntegrityFailure("odd doubled Gromov product in a median graph")
        value = two // 2
        if value != int(self.dist[o, self.median(x, y, o)]):
            raise IntegrityFailure("Gromov product disagrees with median distance")
        return value

    def horofunction(self, x, o, a):
        """h_x(a) = d(o,a) - 2(a|x)_o, normalized so h_x(o) = 0."""
        self.check_vertex(x, o, a)
        value = int(self.dist[o, a]) - 2 * self.gromov_product(a, x, o)
        if value != int(self.dist[x, a]) - int(self.dist[x, o]):
            raise IntegrityFailure("horofunction identities disagree")
        return value


# --- construction ---------------------------------------------------------


def _all_pairs_distances(n, edges):
    if not edges and n > 1:
        raise NotConnected("graph has no edges")
    rows = [u for u, v in edges] + [v for u, v in edges]
    cols = [v for u, v in edges] + [u for u, v in edges]
    data = np.ones(len(rows), dtype=np.int8)
    adj = csr_matrix((data, (rows, cols)), shape=(n, n))
    dist = shortest_path(adj, method="D", unweighted=True)
    if np.isinf(dist).any():
        raise NotConnected("graph is not connected")
    return dist.astype(np.int32)


def _check_bipartite(edges, dist):
    parity = dist[0] & 1
    for u, v in edges:
        if parity[u] == parity[v]:
            raise NotBipartite(f"edge {(u, v)} joins vertices at even distance", witness=(u, v))


def _extract_walls(n, edges, dist):
    """Group edges into walls by the bipartition each edge induces."""
    groups = {}
    for u, v in edges:
        closer_u = dist[u] < dist[v]
        if (dist[u] == dist[v]).any():
            raise IntegrityFailure("tie in edge bipartition of a bipartite graph")
        side0 = closer_u if closer_u[0] else ~closer_u
        key = np.packbits(side0).tobytes()
        groups.setdefault(key, (side0, []))[1].append((u, v))
    ordered = sorted(groups.values(), key=lambda g: min(g[1]))
    side_one = np.zeros((len(ordered), n), dtype=bool)
    walls = []
    for w, (side0, dual) in enumerate(ordered):
        side_one[w] = ~side0
        walls.append(
            Wall(
                id=w,
                side_zero=frozenset(int(v) for v in np.flatnonzero(side0)),
                side_one=frozenset(int(v) for v in np.flatnonzero(~side0)),
                dual_edges=frozenset(dual),
            )
        )
    return tuple(walls), side_one


def _verify_wall_system(c: FiniteMedianComplex):
    M = c.side_one
    W, n = M.shape
    if W == 0:
        if n > 1:
            raise IntegrityFailure("no walls in a complex with several vertices")
        return
    U = np.array([e[0] for e in c.edges])
    V = np.array([e[1] for e in c.edges])
    crossings = M[:, U] ^ M[:, V]
    per_edge = crossings.sum(axis=0)
    if (per_edge != 1).any():
        bad = int(np.flatnonzero(per_edge != 1)[0])
        raise NotMedian(f"edge {c.edges[bad]} crosses {int(per_edge[bad])} walls")
    # d(x, y) must equal the number of separating walls, for every pair.
    Mi = M.astype(np.int32)
    ham = Mi.T @ (1 - Mi) + (1 - Mi).T @ Mi
    if not np.array_equal(ham, c.dist):
        x, y = np.argwhere(ham != c.dist)[0]
        raise NotMedian(
            f"distance {int(c.dist[x, y])} != {int(ham[x, y])} separating walls for {(int(x), int(y))}",
            triple=(int(x), int(y), None),
        )
    # Together with the edge check above this forces both sides of every
    # wall to be convex (a geodesic never recrosses a wall); spot-check the
    # interval closure directly anyway.
    rng = np.random.default_rng(0)
    for wall in c.walls:
        for side in (wall.side_zero, wall.side_one):
            side_list = sorted(side)
            if len(side_list) < 2:
                continue
            k = min(CONVEXITY_SAMPLE_PAIRS, len(side_list) * (len(side_list) - 1) // 2)
            for _ in range(k):
                a, b = rng.choice(side_list, size=2, replace=False)
                if not set(c.interval(int(a), int(b))) <= side:
                    raise IntegrityFailure(f"side of wall {wall.id} is not convex")


def _verify_median_property(c: FiniteMedianComplex, exhaustive_limit, sample_triples):
    n = c.n
    lookup = c._mask_to_vertex
    masks = c.masks
    if n <= exhaustive_limit:
        for x in range(n):
            mx = masks[x]
            for y in range(x, n):
                my = masks[y]
                both = mx & my
                either = mx | my
                for z in range(y, n):
                    maj = both | (either & masks[z])
                    if maj not in lookup:
                        c.median_by_intervals(x, y, z)  # raises with witness
                        raise NotMedian("majority profile missing", triple=(x, y, z))
        return {"mode": "exhaustive", "triples": n * (n + 1) * (n + 2) // 6}
    rng = np.random.default_rng(n ^ len(c.edges))
    triples = rng.integers(0, n, size=(sample_triples, 3))
    M = c.side_one
    batch = 4096
    for start in range(0, sample_triples, batch):
        t = triples[start:start + batch]
        mx, my, mz = M[:, t[:, 0]], M[:, t[:, 1]], M[:, t[:, 2]]
        maj = (mx & my) | (my & mz) | (mx & mz)
        keys = np.packbits(maj, axis=0).T
        for row, (x, y, z) in zip(keys, t):
            if row.tobytes() not in c.meta["_vertex_keys"]:
                raise NotMedian("majority profile missing", triple=(int(x), int(y), int(z)))
    return {"mode": "sampled", "triples": sample_triples}


def build_complex(
    vertices,
    edges,
    exhaustive_limit=EXHAUSTIVE_MEDIAN_LIMIT,
    sample_triples=SAMPLED_MEDIAN_TRIPLES,
):
    """Build and fully validate a finite median complex.

    Raises NotConnected / NotBipartite / NotMedian on bad input; any other
    inconsistency is an IntegrityFailure (a bug, not bad data).
    """
    n = int(vertices)
    if n <= 0:
        raise VertexOutOfRange("vertex count must be positive")
    seen = set()
    clean = []
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"edge {(u, v)} out of range")
        if u == v:
            raise IntegrityFailure(f"self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        clean.append(key)
    clean.sort()
    dist = _all_pairs_distances(n, clean)
    _check_bipartite(clean, dist)
    walls, side_one = _extract_walls(n, clean, dist)
    meta = {"vertices": n, "edge_count": len(clean)}
    c = FiniteMedianComplex(n, tuple(clean), dist, walls, side_one, meta)
    _verify_wall_system(c)
    meta["_vertex_keys"] = {
        np.packbits(side_one[:, v]).tobytes() for v in range(n)
    }
    meta["median_check"] = _verify_median_property(c, exhaustive_limit, sample_triples)
    del meta["_vertex_keys"]
    return c


# --- interchange format ----------------------------------------------------


def complex_to_json(c: FiniteMedianComplex, include_walls=True):
    doc = {"vertices": c.n, "edges": [list(e) for e in c.edges]}
    if include_walls:
        doc["walls"] = [sorted(w.side_zero) for w in c.walls]
    return doc


def complex_from_json(doc, **kwargs):
    if "vertices" not in doc or "edges" not in doc:
        raise IntegrityFailure("complex document needs 'vertices' and 'edges'")
    raw = doc["edges"]
    labels = sorted({x for e in raw for x in e}, key=str)
    if all(isinstance(x, int) for x in labels):
        edges = [(u, v) for u, v in raw]
        n = doc["vertices"]
    else:
        index = {lab: i for i, lab in enumerate(labels)}
        edges = [(index[u], index[v]) for u, v in raw]
        n = len(labels)
    return build_complex(n, edges, **kwargs)


def load_complex(path, **kwargs):
    with open(path) as fh:
        return complex_from_json(json.load(fh), **kwargs)


def save_complex(c: FiniteMedianComplex, path, include_walls=True):
    with open(path, "w") as fh:
        json.dump(complex_to_json(c, include_walls), fh, sort_keys=True)
        fh.write("\n")


def complex_hash(c: FiniteMedianComplex):
    """Content digest of the underlying graph (walls are derived data)."""
    payload = json.dumps(complex_to_json(c, include_walls=False), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()
