"""Mechanical verification of combinatorial wall lemmas on finite complexes.

Each verifier scans its configured case space and returns a report with the
number of cases checked and any witnesses of failure.  The statements are
theorems, so every nonzero violation count indicates a bug somewhere in the
geometry core; the verifiers exist to make that check mechanical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .complexes import FiniteMedianComplex, complex_hash
from .errors import ChainInvalid, HierarchyNotFound
from .wallgeom import carrier_matrix, contact_graph, max_ss_set, wall_pairs, walls_adjacent_to


@dataclass
class VerificationReport:
    lemma: str
    complex_hash: str
    cases_checked: int
    violations: int
    witnesses: list = field(default_factory=list)

    def to_json(self):
        return {
            "lemma": self.lemma,
            "complex_hash": self.complex_hash,
            "cases_checked": self.cases_checked,
            "violations": self.violations,
            "witnesses": self.witnesses,
        }


# --- contact distance >= 3 forces strong separation -------------------------


def verify_remark_ss(c: FiniteMedianComplex):
    """Return a wall pair at contact distance >= 3 that is not strongly
    separated, or None (none is the expected outcome)."""
    cg = contact_graph(c)
    wp = wall_pairs(c)
    bad = (cg.dist >= 3) & ~wp.strongly_sep
    if bad.any():
        i, j = np.argwhere(bad)[0]
        return int(i), int(j)
    return None


def remark_ss_report(c: FiniteMedianComplex) -> VerificationReport:
    w = c.num_walls
    witness = verify_remark_ss(c)
    return VerificationReport(
        lemma="remark_contact3_strongly_separated",
        complex_hash=complex_hash(c),
        cases_checked=w * (w - 1) // 2,
        violations=0 if witness is None else 1,
        witnesses=[] if witness is None else [list(witness)],
    )


# --- clique projection lemma -------------------------------------------------


def verify_projection_lemma(c: FiniteMedianComplex, trials, A=3, seed=0) -> VerificationReport:
    """d_CX(pi(x), pi(y)) <= d(x, y); and when the clique distance is at
    least A, the walls any geodesic crosses contain floor(A/3) pairwise
    strongly separated ones."""
    if A < 3:
        raise ValueError("A must be at least 3")
    cg = contact_graph(c)
    rng = np.random.default_rng(seed)
    witnesses = []
    checked = 0
    for _ in range(trials):
        x, y = (int(v) for v in rng.integers(0, c.n, size=2))
        checked += 1
        pix = walls_adjacent_to(c, x)
        piy = walls_adjacent_to(c, y)
        dcx = min(cg.distance(a, b) for a in pix for b in piy)
        if dcx > c.d(x, y):
            witnesses.append({"pair": [x, y], "clause": "projection", "dcx": dcx})
            continue
        if dcx >= A and max_ss_set(c, x, y) < A // 3:
            witnesses.append({"pair": [x, y], "clause": "ss_count", "dcx": dcx})
    return VerificationReport(
        lemma="projection_lemma",
        complex_hash=complex_hash(c),
        cases_checked=checked,
        violations=len(witnesses),
        witnesses=witnesses,
    )


# --- hierarchy paths ---------------------------------------------------------


def hierarchy_path_search(c: FiniteMedianComplex, x, y):
    """Find a geodesic from x to y split into carrier segments whose wall
    sequence is a contact-graph geodesic.

    Returns (vertex path, wall sequence, segment lengths).  Existence is
    guaranteed, so exhausting the search raises HierarchyNotFound.
    """
    c.check_vertex(x, y)
    if x == y:
        return [x], [], []
    cg = contact_graph(c)
    carriers = carrier_matrix(c)
    D = c.dist
    pix = walls_adjacent_to(c, x)
    piy = walls_adjacent_to(c, y)
    pairs = sorted(
        ((int(cg.dist[a, b]), a, b) for a in pix for b in piy),
    )
    for _, start_wall, end_wall in pairs:
        K = int(cg.dist[start_wall, end_wall])
        init = (x, start_wall, K)
        parent = {init: None}
        queue = deque([init])
        goal = None
        while queue:
            state = queue.popleft()
            v, w, r = state
            if v == y and w == end_wall:
                goal = state
                break
            for v2 in c.adjacency[v]:
                if D[x, v2] == D[x, v] + 1 and D[v2, y] == D[v, y] - 1 and carriers[w, v2]:
                    nxt = (int(v2), w, r)
                    if nxt not in parent:
                        parent[nxt] = (state, "step")
                        queue.append(nxt)
            if r > 0:
                for w2 in np.flatnonzero(cg.adjacency[w]):
                    w2 = int(w2)
                    if cg.dist[w2, end_wall] == r - 1 and carriers[w2, v]:
                        nxt = (v, w2, r - 1)
                        if nxt not in parent:
                            parent[nxt] = (state, "switch")
                            queue.append(nxt)
        if goal is None:
            continue
        verts, wall_seq, seg_lens = [], [], []
        chain = []
        state = goal
        while state is not None:
            entry = parent[state]
            chain.append((state, None if entry is None else entry[1]))
            state = None if entry is None else entry[0]
        chain.reverse()
        seg = 0
        for (v, w, _), move in chain:
            if move is None:
                verts.append(v)
                wall_seq.append(w)
            elif move == "step":
                verts.append(v)
                seg += 1
            else:
                wall_seq.append(w)
                seg_lens.append(seg)
                seg = 0
        seg_lens.append(seg)
        return verts, wall_seq, seg_lens
    raise HierarchyNotFound(f"no hierarchy path found for ({x}, {y})")


def check_hierarchy_path(c, x, y):
    """Run the search and verify every hierarchy-path property; returns the
    wall sequence length K."""
    verts, wall_seq, seg_lens = hierarchy_path_search(c, x, y)
    assert verts[0] == x and verts[-1] == y
    assert len(verts) == c.d(x, y) + 1
    for a, b in zip(verts, verts[1:]):
        assert c.d(a, b) == 1
    cg = contact_graph(c)
    if wall_seq:
        K = len(wall_seq) - 1
        assert cg.dist[wall_seq[0], wall_seq[-1]] == K
        for a, b in zip(wall_seq, wall_seq[1:]):
            assert cg.adjacency[a, b]
        carriers = carrier_matrix(c)
        pos = 0
        for w, length in zip(wall_seq, seg_lens):
            for v in verts[pos:pos + length + 1]:
                assert carriers[w, v]
            pos += length
    return len(wall_seq) - 1 if wall_seq else 0


# --- Gromov products along strongly separated chains -------------------------


def verify_chain_gromov(c: FiniteMedianComplex, chain) -> VerificationReport:
    """Check (h_n | h_m)_{h_0} >= min(n, m) - 3 and (h_0 | h_N)_{h_k} <= 3
    for a nested pairwise strongly separated half-space chain.

    ``chain`` is a list of (wall_id, orientation) pairs ordered by strict
    half-space inclusion.  Products are compared in doubled form.
    """
    if len(chain) < 2:
        raise ChainInvalid("need at least two half-spaces")
    M = c.side_one
    wp = wall_pairs(c)
    sides = []
    for wall_id, orientation in chain:
        wp.check_wall(wall_id)
        col = M[wall_id] if orientation == 1 else ~M[wall_id]
        sides.append(frozenset(int(v) for v in np.flatnonzero(col)))
    ids = [w for w, _ in chain]
    for k in range(len(chain) - 1):
        if not sides[k] > sides[k + 1]:
            raise ChainInvalid(f"half-space {k + 1} is not strictly inside {k}")
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if not wp.strongly_sep[ids[i], ids[j]]:
                raise ChainInvalid(f"walls {ids[i]}, {ids[j]} not strongly separated")
    cg = contact_graph(c)
    witnesses = []
    checked = 0
    N = len(ids) - 1
    for n in range(N + 1):
        for m in range(N + 1):
            checked += 1
            if cg.gromov2(ids[n], ids[m], ids[0]) < 2 * (min(n, m) - 3):
                witnesses.append({"clause": "lower", "n": n, "m": m})
    for k in range(1, N):
        checked += 1
        if cg.gromov2(ids[0], ids[N], ids[k]) > 6:
            witnesses.append({"clause": "upper", "k": k})
    return VerificationReport(
        lemma="chain_gromov_bounds",
        complex_hash=complex_hash(c),
        cases_checked=checked,
        violations=len(witnesses),
        witnesses=witnesses,
    )


# --- the box lemma ------------------------------------------------------------


def _ss_halfspace_pairs(c: FiniteMedianComplex):
    """Ordered half-space pairs (h1 in h2) over strongly separated walls,
    as membership matrices rows=(pair), cols=vertices."""
    wp = wall_pairs(c)
    M = c.side_one
    in1, in2 = [], []
    W = c.num_walls
    for i in range(W):
        for j in range(W):
            if i == j or not wp.strongly_sep[i, j]:
                continue
            for a in (0, 1):
                side_i = M[i] if a else ~M[i]
                for b in (0, 1):
                    side_j = M[j] if b else ~M[j]
                    if wp.subset[(a, b)][i, j]:
                        in1.append(side_i)
                        in2.append(side_j)
    if not in1:
        return None, None
    return np.array(in1), np.array(in2)


def _median_row_table(c, o):
    """med[x, y] = m(o, x, y) for all pairs, as an (n, n) int array."""
    M = c.side_one
    n = c.n
    keys = {np.packbits(M[:, v]).tobytes(): v for v in range(n)}
    mo = M[:, o][:, None]
    out = np.empty((n, n), dtype=np.int32)
    for x in range(n):
        mx = M[:, x][:, None]
        both = mo & mx
        either = mo | mx
        maj = both | (either & M)
        packed = np.packbits(maj, axis=0)
        for y in range(n):
            out[x, y] = keys[packed[:, y].tobytes()]
    return out


def verify_box_lemma(c: FiniteMedianComplex, mode="exhaustive", quadruples=100_000, seed=0) -> VerificationReport:
    """Scan (o, x, y, z): whenever some strongly separated pair h1 in h2 has
    z, m2 in h1 and o, m3 outside h2, the medians m1 = m(o,z,y),
    m2 = m(o,z,x), m3 = m(o,m1,m2), m4 = m(o,x,y) must satisfy m1 = m3 = m4.
    """
    S1, S2 = _ss_halfspace_pairs(c)
    n = c.n
    witnesses = []
    checked = 0
    if mode == "exhaustive":
        for o in range(n):
            med_o = _median_row_table(c, o)
            for z in range(n):
                row = med_o[z]                       # m1 over y, m2 over x
                m3 = med_o[np.ix_(row, row)]         # [x, y] -> m(o, m2(x), m1(y))
                eq = (m3 == row[None, :]) & (m3 == med_o)
                checked += n * n
                if S1 is None or eq.all():
                    continue
                hyp_cache = {}
                mask_oz = S1[:, z] & ~S2[:, o]
                if not mask_oz.any():
                    continue
                for xi, yi in np.argwhere(~eq):
                    m2v, m3v = int(row[xi]), int(m3[xi, yi])
                    key = (m2v, m3v)
                    hit = hyp_cache.get(key)
                    if hit is None:
                        hit = bool((mask_oz & S1[:, m2v] & ~S2[:, m3v]).any())
                        hyp_cache[key] = hit
                    if hit:
                        witnesses.append([int(o), int(xi), int(yi), int(z)])
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        quads = rng.integers(0, n, size=(quadruples, 4))
        masks = c.masks
        lookup = c._mask_to_vertex
        for o, x, y, z in quads:
            o, x, y, z = int(o), int(x), int(y), int(z)
            checked += 1
            mo, mx, my, mz = masks[o], masks[x], masks[y], masks[z]
            m1 = (mo & mz) | ((mo | mz) & my)
            m2 = (mo & mz) | ((mo | mz) & mx)
            m3 = (mo & m1) | ((mo | m1) & m2)
            m4 = (mo & mx) | ((mo | mx) & my)
            if m1 == m3 == m4:
                continue
            if S1 is None:
                continue
            m2v, m3v = lookup[m2], lookup[m3]
            if (S1[:, z] & ~S2[:, o] & S1[:, m2v] & ~S2[:, m3v]).any():
                witnesses.append([o, x, y, z])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return VerificationReport(
        lemma="box_lemma",
        complex_hash=complex_hash(c),
        cases_checked=checked,
        violations=len(witnesses),
        witnesses=witnesses[:16],
    )
