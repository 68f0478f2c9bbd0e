"""Connected components, edge-path groups and a weak-equivalence test for 1-types."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..fincat import DomainError, PresheafMap
from .simplex import TruncatedSSet


class ScopeError(Exception):
    """The question is outside what the 1-type oracle can decide."""


def _edge_ends(x: TruncatedSSet, e):
    return x.d(1, 1, e), x.d(1, 0, e)


def pi0(x: TruncatedSSet) -> dict:
    """Map each vertex to the first vertex (in level order) of its component."""
    parent = {v: v for v in x.at[0]}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    order = {v: i for i, v in enumerate(x.at[0])}
    if x.N >= 1:
        for e in x.at[1]:
            a, b = (find(v) for v in _edge_ends(x, e))
            if a != b:
                if order[a] > order[b]:
                    a, b = b, a
                parent[b] = a
    return {v: find(v) for v in x.at[0]}


def components(x: TruncatedSSet) -> list:
    """Representative vertices, one per component, in level order."""
    seen = []
    for v, r in pi0(x).items():
        if r not in seen:
            seen.append(r)
    return seen


# -- coset enumeration ---------------------------------------------------------


class CosetTable:
    """Todd-Coxeter enumeration of the cosets of the trivial subgroup.

    Generators are ``0..g-1``; a word is a list of nonzero ints, ``+(i+1)``
    for generator ``i`` and ``-(i+1)`` for its inverse.
    """

    def __init__(self, ngens: int, relators: list[list[int]], limit: int = 20000):
        self.ngens = ngens
        self.cols = 2 * ngens
        self.limit = limit
        self.table: list[list[int | None]] = [[None] * self.cols]
        self.parent = [0]
        rels = [[self._col(a) for a in w] for w in relators if w]
        self._enumerate(rels)

    @staticmethod
    def _col(a: int) -> int:
        return 2 * (a - 1) if a > 0 else 2 * (-a - 1) + 1

    def _define(self, c, x):
        if len(self.table) >= self.limit:
            raise ScopeError(f"coset enumeration exceeded {self.limit} cosets")
        d = len(self.table)
        self.table.append([None] * self.cols)
        self.parent.append(d)
        self.table[c][x] = d
        self.table[d][x ^ 1] = c

    def _rep(self, c):
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def _merge(self, k, l, queue):
        k, l = self._rep(k), self._rep(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        self.parent[l] = k
        queue.append(l)

    def _coincidence(self, a, b):
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        t = self.table
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(self.cols):
                f = t[e][x]
                if f is None:
                    continue
                t[f][x ^ 1] = None
                e1, f1 = self._rep(e), self._rep(f)
                if t[e1][x] is not None:
                    self._merge(f1, t[e1][x], queue)
                elif t[f1][x ^ 1] is not None:
                    self._merge(e1, t[f1][x ^ 1], queue)
                else:
                    t[e1][x] = f1
                    t[f1][x ^ 1] = e1

    def _scan_and_fill(self, c, w):
        t = self.table
        f = b = c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and t[f][w[i]] is not None:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self._coincidence(f, b)
                return
            while j >= i and t[b][w[j] ^ 1] is not None:
                b = t[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self._coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][w[i] ^ 1] = f
                return
            self._define(f, w[i])

    def _enumerate(self, rels):
        c = 0
        while c < len(self.table):
            for w in rels:
                if self.parent[c] != c:
                    break
                self._scan_and_fill(c, w)
            if self.parent[c] == c:
                for x in range(self.cols):
                    if self.table[c][x] is None:
                        self._define(c, x)
            c += 1
        live = [c for c in range(len(self.table)) if self.parent[c] == c]
        renum = {c: i for i, c in enumerate(live)}
        self.rows = [[renum[self._rep(self.table[c][x])] for x in range(self.cols)] for c in live]

    def __len__(self):
        return len(self.rows)

    def act(self, coset: int, word) -> int:
        for a in word:
            coset = self.rows[coset][self._col(a)]
        return coset


@dataclass
class Group:
    """A finite group given by a coset table; elements are ``0..order-1`` with ``0`` the unit."""

    table: CosetTable
    words: list = field(default_factory=list)

    @classmethod
    def presented(cls, ngens: int, relators: list[list[int]], limit: int = 20000) -> "Group":
        table = CosetTable(ngens, relators, limit)
        words: list = [None] * len(table)
        words[0] = []
        queue = deque([0])
        while queue:
            c = queue.popleft()
            for g in range(ngens):
                for a in (g + 1, -(g + 1)):
                    d = table.act(c, [a])
                    if words[d] is None:
                        words[d] = words[c] + [a]
                        queue.append(d)
        return cls(table, words)

    @property
    def order(self) -> int:
        return len(self.table)

    def element(self, word) -> int:
        return self.table.act(0, word)

    def mul(self, a: int, b: int) -> int:
        return self.table.act(a, self.words[b])

    def multiplication_table(self) -> list[list[int]]:
        return [[self.mul(a, b) for b in range(self.order)] for a in range(self.order)]


@dataclass
class EdgePathGroup:
    """Edge-path group of a component, with the spanning tree used to present it."""

    basepoint: object
    edges: list
    group: Group
    tree_path: dict  # vertex -> list of (edge, +1/-1) from the basepoint

    @property
    def order(self) -> int:
        return self.group.order

    def loop(self, path) -> int:
        """Group element of an edge path given as ``[(edge, +1|-1), ...]``."""
        index = {e: i for i, e in enumerate(self.edges)}
        return self.group.element([(index[e] + 1) * s for e, s in path])


def pi1(x: TruncatedSSet, basepoint, limit: int = 20000) -> EdgePathGroup:
    """Edge-path group at ``basepoint``; relations come from the 2-simplices.

    Generators are all edges of the component; tree edges and degenerate
    edges are trivial; a 2-simplex ``t`` gives ``d2 t . d0 t = d1 t``.
    """
    if x.N < 2:
        raise ScopeError("fundamental groups need simplices through dimension 2")
    if basepoint not in x.index[0]:
        raise DomainError(f"{basepoint!r} is not a vertex")
    comp = pi0(x)
    root = comp[basepoint]
    verts = [v for v in x.at[0] if comp[v] == root]
    vset = set(verts)
    edges = [e for e in x.at[1] if x.d(1, 1, e) in vset]
    index = {e: i + 1 for i, e in enumerate(edges)}
    # breadth-first spanning tree from the basepoint
    adj: dict = {v: [] for v in verts}
    for e in edges:
        a, b = _edge_ends(x, e)
        adj[a].append((e, 1, b))
        adj[b].append((e, -1, a))
    tree_path = {basepoint: []}
    tree = set()
    queue = deque([basepoint])
    while queue:
        v = queue.popleft()
        for e, s, w in adj[v]:
            if w not in tree_path:
                tree_path[w] = tree_path[v] + [(e, s)]
                tree.add(e)
                queue.append(w)
    relators = []
    for e in edges:
        a, b = _edge_ends(x, e)
        if e in tree or e == x.s(0, 0, a):
            relators.append([index[e]])
    for t in x.at[2]:
        if x.act[(0, 2, (0,))][t] not in vset:
            continue
        relators.append([index[x.d(2, 2, t)], index[x.d(2, 0, t)], -index[x.d(2, 1, t)]])
    group = Group.presented(len(edges), relators, limit)
    return EdgePathGroup(basepoint, edges, group, tree_path)


# -- weak equivalences of 1-types ---------------------------------------------


@dataclass
class WeakEquivalenceReport:
    passed: bool
    pi0_source: int
    pi0_target: int
    pi0_matched: int
    pi1: list = field(default_factory=list)  # (source basepoint, target basepoint, |G_src|, |G_tgt|, bijective)
    reason: str = ""

    def as_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "pi0": {"source": self.pi0_source, "target": self.pi0_target, "matched": self.pi0_matched},
            "pi1": [
                {"source_base": repr(a), "target_base": repr(b), "source_order": m, "target_order": n, "iso": ok}
                for a, b, m, n, ok in self.pi1
            ],
            "reason": self.reason,
        }


def _induced(f: PresheafMap, gx: EdgePathGroup, gy: EdgePathGroup) -> list[int]:
    """Images of the generators of ``gx`` in ``gy`` (both based compatibly)."""
    x = f.source
    out = []
    for e in gx.edges:
        a, b = _edge_ends(x, e)
        path = gx.tree_path[a] + [(e, 1)] + [(g, -s) for g, s in reversed(gx.tree_path[b])]
        image = [(f.comp[1][g], s) for g, s in path]
        out.append(gy.loop(image))
    return out


def induced_map(f: PresheafMap, gx: EdgePathGroup, gy: EdgePathGroup) -> list[int]:
    """The homomorphism on element indices, ``gx`` element ``i`` to its image."""
    gens = _induced(f, gx, gy)
    out = []
    for word in gx.group.words:
        img = 0
        for a in word:
            g = gens[abs(a) - 1]
            if a < 0:
                g = next(h for h in range(gy.order) if gy.group.mul(g, h) == 0)
            img = gy.group.mul(img, g)
        out.append(img)
    return out


def is_weak_equivalence_1type(f: PresheafMap, require_kan: bool = False, limit: int = 20000) -> WeakEquivalenceReport:
    """Compare connected components and fundamental groups along ``f``.

    Sufficient for maps between 1-types.  With ``require_kan`` both sides must
    first pass the Kan check through dimension 3 (else :class:`ScopeError`).
    """
    x, y = f.source, f.target
    if not isinstance(x, TruncatedSSet) or not isinstance(y, TruncatedSSet):
        raise DomainError("expected a map of truncated simplicial sets")
    if x.N < 2:
        raise ScopeError("the 1-type oracle needs truncation level at least 2")
    if require_kan:
        from .lifting import is_kan_complex

        for side in (x, y):
            if not is_kan_complex(side, min(3, side.N)).passed:
                raise ScopeError(f"{side.name or 'input'} is not a Kan complex")
    cy = pi0(y)
    reps_x, reps_y = components(x), components(y)
    image = {}
    for r in reps_x:
        image.setdefault(cy[f.comp[0][r]], []).append(r)
    matched = sum(1 for ry in reps_y if len(image.get(ry, [])) == 1)
    report = WeakEquivalenceReport(True, len(reps_x), len(reps_y), matched)
    if len(image) != len(reps_x):
        report.passed = False
        report.reason = "pi0 not injective"
    elif len(image) != len(reps_y):
        report.passed = False
        report.reason = "pi0 not surjective"
    for r in reps_x:
        gx = pi1(x, r, limit)
        gy = pi1(y, f.comp[0][r], limit)
        hom = induced_map(f, gx, gy)
        ok = len(set(hom)) == len(hom) == gy.order
        report.pi1.append((r, f.comp[0][r], gx.order, gy.order, ok))
        if not ok and report.passed:
            report.passed = False
            report.reason = f"pi1 not bijective at {r!r}"
    return report
