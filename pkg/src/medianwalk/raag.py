"""Right-angled Artin groups via trace normal forms (heaps of pieces).

Elements are reduced words modulo commutations, held in a canonical
linearization: repeatedly emit the available letter with the smallest
generator index.  Two words represent the same group element exactly when
their canonical forms coincide, and the canonical length is the 1-skeleton
distance from the origin to the translated origin in the universal cover
of the Salvetti complex.

Reduction uses the classical piling algorithm: one stack per generator,
where pushing a letter also pushes a marker onto the stacks of all
non-commuting generators, so a letter can cancel only while it is still
"visible" past the markers.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .errors import (
    DefiningGraphMismatch,
    IntegrityFailure,
    UnknownGenerator,
)


class DefiningGraph:
    """Commutation graph: vertices are generators, edges mean 'commute'."""

    def __init__(self, generators, commutation_edges=()):
        self.names = tuple(generators)
        if len(set(self.names)) != len(self.names):
            raise UnknownGenerator("duplicate generator names")
        for name in self.names:
            if not (name and name[0].isalpha() and name.isalnum() and name == name.lower() and name != name.upper()):
                raise UnknownGenerator(f"generator {name!r} must be lowercase alphanumeric")
        self.index = {name: i for i, name in enumerate(self.names)}
        k = len(self.names)
        adj = [set() for _ in range(k)]
        for a, b in commutation_edges:
            i, j = self._gen_index(a), self._gen_index(b)
            if i == j:
                raise UnknownGenerator(f"self-commutation edge at {a!r}")
            adj[i].add(j)
            adj[j].add(i)
        self.adj = tuple(frozenset(s) for s in adj)
        self.noncomm = tuple(
            tuple(sorted(set(range(k)) - adj[i] - {i})) for i in range(k)
        )

    def _gen_index(self, g):
        if isinstance(g, str):
            try:
                return self.index[g]
            except KeyError:
                raise UnknownGenerator(f"unknown generator {g!r}")
        if 0 <= g < len(self.names):
            return int(g)
        raise UnknownGenerator(f"generator index {g} out of range")

    @property
    def num_generators(self):
        return len(self.names)

    def link(self, g):
        return self.adj[self._gen_index(g)]

    def star(self, g):
        i = self._gen_index(g)
        return self.adj[i] | {i}

    def dependent(self, i, j):
        """Letters with these labels never commute past each other."""
        return i == j or j not in self.adj[i]

    def is_join(self):
        """Partition of the generators if the complement graph is
        disconnected (reducible complex), else None."""
        k = self.num_generators
        if k == 0:
            return None
        seen = {0}
        queue = [0]
        while queue:
            i = queue.pop()
            for j in range(k):
                if j not in seen and j != i and j not in self.adj[i]:
                    seen.add(j)
                    queue.append(j)
        if len(seen) == k:
            return None
        part_a = frozenset(self.names[i] for i in sorted(seen))
        part_b = frozenset(self.names[i] for i in range(k) if i not in seen)
        return (part_a, part_b)

    # --- word syntax: lowercase = generator, uppercase = inverse ---------

    def parse_word(self, text):
        letters = []
        for token in text.split():
            sign = 1 if token == token.lower() else -1
            letters.append((self._gen_index(token.lower()), sign))
        return letters

    def format_word(self, letters):
        if not letters:
            return "e"
        return " ".join(
            self.names[g] if s > 0 else self.names[g].upper() for g, s in letters
        )

    def to_json(self):
        return {
            "generators": list(self.names),
            "edges": sorted(
                [self.names[i], self.names[j]]
                for i in range(self.num_generators)
                for j in self.adj[i]
                if i < j
            ),
        }

    def __eq__(self, other):
        return isinstance(other, DefiningGraph) and self.names == other.names and self.adj == other.adj

    def __hash__(self):
        return hash((self.names, self.adj))

    def __repr__(self):
        return f"DefiningGraph({self.names}, edges={len([1 for a in self.adj for _ in a]) // 2})"


def defining_graph_from_json(doc):
    return DefiningGraph(doc["generators"], doc.get("edges", ()))


def load_defining_graph(path):
    with open(path) as fh:
        return defining_graph_from_json(json.load(fh))


# --- piling -----------------------------------------------------------------


class Piler:
    """Mutable reduction state; push letters one at a time, read the length.

    Used directly by the walk simulator so a running walk costs O(1)
    amortized per letter.
    """

    __slots__ = ("dg", "piles", "count")

    def __init__(self, dg: DefiningGraph):
        self.dg = dg
        self.piles = [deque() for _ in range(dg.num_generators)]
        self.count = 0

    def push(self, g, s):
        pile = self.piles[g]
        if pile and pile[-1] == -s:
            pile.pop()
            for j in self.dg.noncomm[g]:
                self.piles[j].pop()
            self.count -= 1
        else:
            pile.append(s)
            for j in self.dg.noncomm[g]:
                self.piles[j].append(0)
            self.count += 1

    def push_letters(self, letters):
        for g, s in letters:
            self.push(g, s)

    def copy(self):
        c = Piler.__new__(Piler)
        c.dg = self.dg
        c.piles = [deque(p) for p in self.piles]
        c.count = self.count
        return c

    def depile(self):
        """Destructively emit the canonical linearization."""
        dg = self.dg
        out = []
        gens = range(dg.num_generators)
        while self.count:
            for i in gens:
                pile = self.piles[i]
                if pile and pile[0] != 0:
                    out.append((i, pile[0]))
                    pile.popleft()
                    for j in dg.noncomm[i]:
                        self.piles[j].popleft()
                    self.count -= 1
                    break
            else:
                raise IntegrityFailure("piling state has no available letter")
        return tuple(out)

    def letters(self):
        return self.copy().depile()


def reduce_letters(dg, letters):
    """Canonical reduced form of an arbitrary letter sequence."""
    p = Piler(dg)
    p.push_letters(letters)
    return p.depile()


def word_length(dg, letters):
    p = Piler(dg)
    p.push_letters(letters)
    return p.count


# --- group elements ----------------------------------------------------------


class NormalForm:
    """Immutable group element held in canonical reduced form."""

    __slots__ = ("dg", "letters", "_hash")

    def __init__(self, dg, letters, _canonical=False):
        self.dg = dg
        self.letters = letters if _canonical else reduce_letters(dg, letters)
        self._hash = None

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other):
        if isinstance(other, NormalForm):
            if other.dg != self.dg:
                raise DefiningGraphMismatch("elements over different defining graphs")
            other = other.letters
        return NormalForm(self.dg, self.letters + tuple(other))

    def inv(self):
        flipped = tuple((g, -s) for g, s in reversed(self.letters))
        return NormalForm(self.dg, flipped)

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        out = identity(self.dg)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        return (
            isinstance(other, NormalForm)
            and self.dg == other.dg
            and self.letters == other.letters
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.letters)
        return self._hash

    def __repr__(self):
        return f"<{self.dg.format_word(self.letters)}>"


def identity(dg):
    return NormalForm(dg, (), _canonical=True)


def nf(dg, word):
    """Canonical normal form of a word (string or letter list)."""
    letters = dg.parse_word(word) if isinstance(word, str) else [
        (dg._gen_index(g), int(s)) for g, s in word
    ]
    for _, s in letters:
        if s not in (1, -1):
            raise UnknownGenerator(f"letter sign must be +-1, got {s}")
    return NormalForm(dg, tuple(letters))


def mul(a: NormalForm, b: NormalForm):
    return a * b


def inv(a: NormalForm):
    return a.inv()


def dist(a: NormalForm, b: NormalForm):
    """1-skeleton distance between orbit points a*o and b*o."""
    if a.dg != b.dg:
        raise DefiningGraphMismatch("elements over different defining graphs")
    flipped = [(g, -s) for g, s in reversed(a.letters)]
    p = Piler(a.dg)
    p.push_letters(flipped)
    p.push_letters(b.letters)
    return p.count


# --- heap structure -----------------------------------------------------------


def minimal_pieces(dg, letters):
    """Map generator -> (sign, position) of its minimal piece, if any.

    A piece (g, s) is minimal when no earlier letter depends on it; only
    the first unblocked occurrence per generator can qualify.
    """
    found = {}
    blocked = set()
    k = dg.num_generators
    for pos, (g, s) in enumerate(letters):
        if g not in blocked:
            found[g] = (s, pos)
            blocked.add(g)
        blocked.update(dg.noncomm[g])
        if len(blocked) == k:
            break
    return found


def maximal_pieces(dg, letters):
    found = {}
    blocked = set()
    k = dg.num_generators
    n = len(letters)
    for back, (g, s) in enumerate(reversed(letters)):
        if g not in blocked:
            found[g] = (s, n - 1 - back)
            blocked.add(g)
        blocked.update(dg.noncomm[g])
        if len(blocked) == k:
            break
    return found


def strip_position(letters, pos):
    return letters[:pos] + letters[pos + 1:]


def median_raag(x: NormalForm, y: NormalForm, z: NormalForm):
    """Median of three orbit points: x times the maximal common prefix
    ideal of nf(x^-1 y) and nf(x^-1 z), built by greedy stripping of
    shared minimal pieces."""
    if not (x.dg == y.dg == z.dg):
        raise DefiningGraphMismatch("median needs one defining graph")
    dg = x.dg
    u = list((x.inv() * y).letters)
    v = list((x.inv() * z).letters)
    common = []
    while True:
        mu = minimal_pieces(dg, u)
        mv = minimal_pieces(dg, v)
        pick = None
        for g in sorted(mu):
            if g in mv and mu[g][0] == mv[g][0]:
                pick = g
                break
        if pick is None:
            break
        s, pu = mu[pick]
        _, pv = mv[pick]
        common.append((pick, s))
        del u[pu]
        del v[pv]
    m = x * NormalForm(dg, tuple(common))
    for a, b in ((x, y), (x, z), (y, z)):
        if dist(a, m) + dist(m, b) != dist(a, b):
            raise IntegrityFailure("median missed an interval")
    return m


def gromov_raag(x: NormalForm, y: NormalForm, o: NormalForm, check=False):
    """(x|y)_o by the distance formula; optionally cross-checked against
    the median characterization."""
    two = dist(x, o) + dist(y, o) - dist(x, y)
    if two < 0 or two % 2:
        raise IntegrityFailure("invalid doubled Gromov product")
    if check and two // 2 != dist(o, median_raag(x, y, o)):
        raise IntegrityFailure("Gromov product disagrees with median")
    return two // 2


def horofunction_raag(x: NormalForm, a: NormalForm, o: NormalForm = None):
    """h_x(a) = d(x, a) - d(x, o), the deep-point horofunction proxy."""
    o = o if o is not None else identity(x.dg)
    return dist(x, a) - dist(x, o)


def cyclic_reduction(g: NormalForm):
    """Strip conjugating pieces (minimal piece whose inverse is maximal)
    until none remain; the result has the true translation length."""
    dg = g.dg
    letters = list(g.letters)
    while len(letters) >= 2:
        mins = minimal_pieces(dg, letters)
        maxs = maximal_pieces(dg, letters)
        stripped = False
        for gen, (s, pos) in sorted(mins.items()):
            if gen in maxs and maxs[gen][0] == -s and maxs[gen][1] != pos:
                hi = maxs[gen][1]
                del letters[hi]
                del letters[pos]
                stripped = True
                break
        if not stripped:
            break
    return NormalForm(dg, tuple(letters))


def translation_length(g: NormalForm, mode="cyclic", N=64):
    """Stable translation length.

    mode="cyclic": length after iterated cyclic reduction.
    mode="limit": observe d(o, g^k o) for k <= N and return the stabilized
    increment (falls back to d(o, g^N o)/N if no stable run appears).
    Both modes agree on every element; the limit mode exists as the
    self-consistency oracle.
    """
    from fractions import Fraction

    if mode == "cyclic":
        return Fraction(len(cyclic_reduction(g)))
    if mode != "limit":
        raise ValueError(f"unknown mode {mode!r}")
    p = Piler(g.dg)
    dists = [0]
    for _ in range(N):
        p.push_letters(g.letters)
        dists.append(p.count)
    increments = [dists[k + 1] - dists[k] for k in range(N)]
    tail = increments[-1]
    run = 0
    for inc in reversed(increments):
        if inc != tail:
            break
        run += 1
    if run >= max(4, N // 4):
        return Fraction(tail)
    return Fraction(dists[-1], N)
