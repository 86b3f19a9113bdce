"""Walls of the Salvetti-cover cube complex, seen through normal forms.

The geodesic from the origin to g*o crosses one wall per letter of nf(g);
the wall of the letter at position j is represented by the edge base: the
word prefix before j, shifted by the generator when the letter is an
inverse, so every wall is a pair (base element, generator).  Two such
pairs name the same wall exactly when the bases differ by an element of
the special subgroup generated by the generator's link.

Strong separation between nested walls is decided by searching for a
common transversal.  A wall with label u crossing both walls forces a
factorization w = x * d * y of the between-element w with x in <lk(p)>,
d in <lk(u)>, y in <lk(q)>; a minimal-length factorization has no
cancellation, so x is a prefix ideal of the heap of w and y a suffix
filter.  Enumerating those ideals is therefore a complete search: if it
finishes with no witness, the pair is certified strongly separated, and
any witness found pins an explicit transversal wall (re-verified against
finite hulls in the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import build_complex
from .errors import (
    BudgetExceeded,
    DefiningGraphMismatch,
    IntegrityFailure,
    PieceMismatch,
    RadiusZero,
)
from .raag import (
    DefiningGraph,
    NormalForm,
    identity,
    maximal_pieces,
    minimal_pieces,
    nf,
    reduce_letters,
    strip_position,
)

SEARCH_BUDGET = 50_000


@dataclass(frozen=True)
class Piece:
    """One letter of a canonical form, together with the wall it crosses."""

    position: int
    gen: int
    sign: int
    prefix: NormalForm   # product of the strict down-set in the heap
    base: NormalForm     # sign-normalized edge base of the dual wall


@dataclass(frozen=True)
class SSCertificate:
    verdict: str                  # "yes" | "no" | "unknown"
    reason: str = ""
    witness: dict | None = None   # for "no": label, base, x, y
    radius: int | None = None     # for "unknown"

    @property
    def is_yes(self):
        return self.verdict == "yes"

    @property
    def is_no(self):
        return self.verdict == "no"


def _downsets(dg, letters):
    """Strict down-set bitmask per position (transitive dependence)."""
    masks = []
    for k, (gk, _) in enumerate(letters):
        m = 0
        for j in range(k):
            if dg.dependent(letters[j][0], gk):
                m |= masks[j] | (1 << j)
        masks.append(m)
    return masks


def reach_table(dg, letters):
    """reach[k][t]: latest position <= k with label t inside the down-set
    of k (including k itself), or -1.  Gives O(1) heap comparability:
    j <= k in the heap iff reach[k][label_j] >= j."""
    G = dg.num_generators
    last = [-1] * G
    reach = []
    for k, (gk, _) in enumerate(letters):
        row = [-1] * G
        for s in range(G):
            if dg.dependent(s, gk) and last[s] >= 0:
                prior = reach[last[s]]
                for t in range(G):
                    if prior[t] > row[t]:
                        row[t] = prior[t]
        row[gk] = k
        reach.append(row)
        last[gk] = k
    return reach


def comparable(reach, letters, j, k):
    if j == k:
        return True
    if j > k:
        j, k = k, j
    return reach[k][letters[j][0]] >= j


def pieces(g: NormalForm):
    """One piece per letter of nf(g), with heap prefixes and wall bases."""
    dg = g.dg
    letters = g.letters
    masks = _downsets(dg, letters)
    out = []
    for k, (gen, sign) in enumerate(letters):
        down = tuple(letters[j] for j in range(k) if masks[k] >> j & 1)
        prefix = NormalForm(dg, down)
        base = prefix if sign > 0 else prefix * NormalForm(dg, ((gen, -1),))
        out.append(Piece(position=k, gen=gen, sign=sign, prefix=prefix, base=base))
    return out


def transverse_pieces(g: NormalForm, p: Piece, q: Piece):
    """Incomparable in the heap order = the two walls cross."""
    letters = g.letters
    _check_pieces(g, p, q)
    masks = _downsets(g.dg, letters)
    below = masks[q.position] >> p.position & 1
    above = masks[p.position] >> q.position & 1
    return not (below or above or p.position == q.position)


def _check_pieces(g, *ps):
    for p in ps:
        if not (0 <= p.position < len(g.letters)):
            raise PieceMismatch(f"piece position {p.position} outside nf(g)")
        gen, sign = g.letters[p.position]
        if (gen, sign) != (p.gen, p.sign):
            raise PieceMismatch("piece does not match the letter at its position")


def piece_base(dg, letters, position):
    """Sign-normalized wall base from the plain word prefix (any reduced
    linearization of the same heap names the same wall)."""
    gen, sign = letters[position]
    prefix = letters[:position]
    if sign < 0:
        prefix = prefix + ((gen, -1),)
    return NormalForm(dg, prefix)


def same_wall(dg, base_a: NormalForm, gen_a, base_b: NormalForm, gen_b):
    """W(a, u) = W(b, u) iff the labels agree and a^-1 b lies in <lk(u)>."""
    if gen_a != gen_b:
        return False
    link = dg.adj[gen_a]
    between = base_a.inv() * base_b
    return all(g in link for g, _ in between.letters)


# --- complete transversal search ---------------------------------------------


def _letters_subset(letters, allowed):
    return all(g in allowed for g, _ in letters)


def _enumerate_ideals(dg, letters, allowed, max_strip, budget):
    """All prefix ideals of the heap whose labels lie in ``allowed``.

    Yields (stripped letters tuple, remaining letters tuple).  Returns a
    truncation flag when the radius or node budget cut the enumeration.
    """
    start = tuple(letters)
    states = {start: ()}
    queue = [start]
    truncated = False
    explored = 0
    while queue:
        rem = queue.pop()
        x = states[rem]
        explored += 1
        if explored > budget:
            truncated = True
            break
        if len(x) >= max_strip:
            if any(g in allowed for g in minimal_pieces(dg, rem)):
                truncated = True
            continue
        for g, (s, pos) in minimal_pieces(dg, rem).items():
            if g not in allowed:
                continue
            rem2 = strip_position(rem, pos)
            if rem2 not in states:
                states[rem2] = x + ((g, s),)
                queue.append(rem2)
    return states, truncated


def _search_transversal(dg, w_letters, link_p, link_q, label_u, max_strip, budget):
    """Find x in <lk(p)>, y in <lk(q)> with x^-1 w y^-1 ... the middle in
    <lk(u)>; complete unless truncated (see module docstring)."""
    link_u = dg.adj[label_u]
    allowed_all = link_p | link_q | link_u
    if not _letters_subset(w_letters, allowed_all):
        return None, False
    ideals, trunc_left = _enumerate_ideals(dg, w_letters, link_p, max_strip, budget)
    truncated = trunc_left
    for rem, x in ideals.items():
        flipped = tuple((g, -s) for g, s in reversed(rem))
        filters, trunc_right = _enumerate_ideals(dg, flipped, link_q, max_strip, budget)
        truncated = truncated or trunc_right
        for rem2, y_inv in filters.items():
            middle = tuple((g, -s) for g, s in reversed(rem2))
            if _letters_subset(middle, link_u):
                x_el = NormalForm(dg, x)
                y_el = NormalForm(dg, tuple((g, -s) for g, s in reversed(y_inv)))
                return (x_el, y_el), truncated
    return None, truncated


def certify_between(dg, label_p, label_q, w_letters, radius=8, budget=SEARCH_BUDGET):
    """Strong-separation certificate for two nested walls given the reduced
    between-word w = base_p^-1 base_q.

    YesCertified either because the labels' links are disjoint (no wall
    label could cross both) or because the complete transversal search
    exhausted without a witness.  NoCertified carries the witness wall
    base relative to base_p (base_p * x).
    """
    if radius < 1:
        raise RadiusZero("search radius must be at least 1")
    common = dg.adj[label_p] & dg.adj[label_q]
    if not common:
        return SSCertificate(verdict="yes", reason="disjoint-links")
    truncated = False
    for u in sorted(common):
        link_u = dg.adj[u]
        if _letters_subset(w_letters, link_u):
            # the wall labeled u at base_p itself crosses both
            e = NormalForm(dg, (), _canonical=True)
            return SSCertificate(
                verdict="no",
                witness={"label": dg.names[u], "x": e, "y": e},
            )
        found, trunc = _search_transversal(
            dg, w_letters, dg.adj[label_p], dg.adj[label_q], u,
            max_strip=max(radius, len(w_letters)), budget=budget,
        )
        truncated = truncated or trunc
        if found:
            x, y = found
            return SSCertificate(
                verdict="no",
                witness={"label": dg.names[u], "x": x, "y": y},
            )
    if truncated:
        return SSCertificate(verdict="unknown", radius=radius)
    return SSCertificate(verdict="yes", reason="search-exhausted")


def certify_pair(dg, base_p, label_p, base_q, label_q, radius=8, budget=SEARCH_BUDGET):
    """certify_between on actual wall bases; a No witness is absolutized to
    the witness wall base base_p * x."""
    w = (base_p.inv() * base_q).letters
    cert = certify_between(dg, label_p, label_q, w, radius=radius, budget=budget)
    if cert.is_no:
        witness = dict(cert.witness)
        witness["base"] = base_p * witness["x"]
        return SSCertificate(verdict="no", witness=witness)
    return cert


def ss_pieces(g: NormalForm, p: Piece, q: Piece, radius=8, budget=SEARCH_BUDGET):
    """Certificate for the walls of two comparable pieces of nf(g)."""
    _check_pieces(g, p, q)
    if transverse_pieces(g, p, q) or p.position == q.position:
        raise PieceMismatch("strong separation needs nested (comparable, distinct) pieces")
    if p.position > q.position:
        p, q = q, p
    return certify_pair(g.dg, p.base, p.gen, q.base, q.gen, radius=radius, budget=budget)


# --- certified chains ----------------------------------------------------------


def _pair_between_letters(letters, j, k):
    """Letters of base_j^-1 * base_k for word positions j < k."""
    gj, sj = letters[j]
    gk, sk = letters[k]
    mid = list(letters[j + 1:k])
    if sj > 0:
        mid.insert(0, (gj, 1))
    if sk < 0:
        mid.append((gk, -1))
    return tuple(mid)


def max_certified_ss_chain(g: NormalForm, radius=8, window=24, budget=SEARCH_BUDGET):
    """Longest chain of nested pieces whose consecutive pairs are certified
    strongly separated: a sound lower bound for S(n) on walk endpoints.

    Pairs further than ``window`` apart in the word are not attempted, so
    the value is monotone in (radius, window, budget) as certification
    tightens.
    """
    dg = g.dg
    letters = g.letters
    L = len(letters)
    if L == 0:
        return 0
    disjoint = [
        [not (dg.adj[a] & dg.adj[b]) for b in range(dg.num_generators)]
        for a in range(dg.num_generators)
    ]
    reach = reach_table(dg, letters)
    memo = {}
    dp = [1] * L
    best = 1
    for k in range(L):
        gk = letters[k][0]
        lo = max(0, k - window)
        for j in range(lo, k):
            if dp[j] + 1 <= dp[k]:
                continue
            gj = letters[j][0]
            if reach[k][gj] < j:
                continue  # incomparable: transverse walls
            if disjoint[gj][gk]:
                ok = True
            else:
                w = reduce_letters(dg, _pair_between_letters(letters, j, k))
                key = (gj, gk, w)
                cert = memo.get(key)
                if cert is None:
                    cert = certify_between(dg, gj, gk, w, radius=radius, budget=budget)
                    memo[key] = cert
                ok = cert.is_yes
            if ok:
                dp[k] = dp[j] + 1
        best = max(best, dp[k])
    return best


# --- rank-1 witnesses -----------------------------------------------------------


def find_rank1_witness(g: NormalForm, n_max=20, radius=8, budget=SEARCH_BUDGET):
    """Search for a half-space h and power n with g^n h strictly inside h
    and the pair certified strongly separated.

    Uses the doubled geodesic of g^n: when |g^{2n}| = 2|g^n| the word
    w = nf(g^n) nf(g^n) is reduced, and position j of the second copy is
    the g^n-translate of position j of the first, so nesting and the
    certificate apply directly.  A Some result is a sound certificate of
    regular rank-1 (hence loxodromic on the contact graph); None is
    inconclusive.
    """
    dg = g.dg
    if len(g.letters) == 0:
        return None
    G = g
    for n in range(1, n_max + 1):
        if n > 1:
            G = G * g
        L = len(G.letters)
        w2 = G.letters + G.letters
        if len(reduce_letters(dg, w2)) != 2 * L:
            continue
        reach = reach_table(dg, w2)
        for j in range(L):
            k = j + L
            gj = w2[j][0]
            if reach[k][gj] < j:
                continue
            base_j = piece_base(dg, w2, j)
            base_k = piece_base(dg, w2, k)
            if same_wall(dg, base_j, gj, base_k, w2[k][0]):
                continue
            cert = certify_pair(dg, base_j, gj, base_k, w2[k][0], radius=radius, budget=budget)
            if cert.is_yes:
                piece = Piece(position=j, gen=gj, sign=w2[j][1],
                              prefix=NormalForm(dg, w2[:j]), base=base_j)
                return piece, n, cert
    return None


# --- finite hull bridge -----------------------------------------------------------


def interval_elements(a: NormalForm, b: NormalForm):
    """All group elements on geodesics from a to b: a times each prefix
    ideal of the heap of a^-1 b."""
    dg = a.dg
    w = (a.inv() * b).letters
    states = {w: a}
    queue = [w]
    out = {a}
    while queue:
        rem = queue.pop()
        point = states[rem]
        for gen, (s, pos) in minimal_pieces(dg, rem).items():
            rem2 = strip_position(rem, pos)
            if rem2 not in states:
                nxt = point * NormalForm(dg, ((gen, s),))
                states[rem2] = nxt
                queue.append(rem2)
                out.add(nxt)
    return out


def hull_materialize(points, budget=4000):
    """Interval-closure of finitely many orbit points, returned as a
    validated finite complex plus the element -> vertex map."""
    points = list(points)
    if not points:
        raise BudgetExceeded("cannot materialize an empty hull", size=0)
    dg = points[0].dg
    for p in points:
        if p.dg != dg:
            raise DefiningGraphMismatch("hull points over different defining graphs")
    hull = set(points)
    frontier = list(points)
    while frontier:
        new = set()
        members = list(hull)
        for a in frontier:
            for b in members:
                for el in interval_elements(a, b):
                    if el not in hull:
                        new.add(el)
        hull |= new
        if len(hull) > budget:
            raise BudgetExceeded(f"hull exceeded {budget} vertices", size=len(hull))
        frontier = list(new)
    ordered = sorted(hull, key=lambda el: (len(el.letters), el.letters))
    index = {el: i for i, el in enumerate(ordered)}
    edges = []
    for el, i in index.items():
        for gen in range(dg.num_generators):
            for s in (1, -1):
                other = el * NormalForm(dg, ((gen, s),))
                j = index.get(other)
                if j is not None and i < j:
                    edges.append((i, j))
    complex_ = build_complex(len(ordered), edges)
    return complex_, index


def wall_in_hull(complex_, index, base: NormalForm, gen):
    """Finite wall id of W(base, gen) inside a materialized hull; None when
    the dual edge is not present."""
    other = base * NormalForm(base.dg, ((gen, 1),))
    i = index.get(base)
    j = index.get(other)
    if i is None or j is None:
        return None
    edge = (min(i, j), max(i, j))
    for wall in complex_.walls:
        if edge in wall.dual_edges:
            return wall.id
    raise IntegrityFailure("hull edge missing from every wall")
