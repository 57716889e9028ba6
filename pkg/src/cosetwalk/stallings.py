"""Stallings foldings for finitely generated subgroups of free groups."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .errors import EmptyAlphabet
from .groups import LETTERS, FreeGroup

INFINITE = math.inf

SLC_YES_FINITE_INDEX = "SLC_yes_finite_index"
SLC_YES_TRIVIAL_OR_Z = "SLC_yes_trivial_or_Z"
SLC_NO_RANK_GE2 = "SLC_no_rank_ge2_infinite_index"


@dataclass
class StallingsGraph:
    """Folded core graph; vertex 0 is the basepoint.

    ``out[v][i]`` is the target of the edge labelled by generator ``i``
    (1-based) leaving ``v``; ``inn[v][i]`` is the source of the edge labelled
    ``i`` entering ``v``.
    """

    rank: int
    out: list
    inn: list

    @property
    def num_vertices(self):
        return len(self.out)

    @property
    def num_edges(self):
        return sum(len(d) for d in self.out)

    def edges(self):
        for u, d in enumerate(self.out):
            for i, v in sorted(d.items()):
                yield u, i, v

    def is_folded(self):
        # dict-based adjacency cannot hold duplicate labels; check consistency
        for u, d in enumerate(self.out):
            for i, v in d.items():
                if self.inn[v].get(i) != u:
                    return False
        return True

    def is_complete(self):
        r = self.rank
        return all(len(o) == r and len(n) == r for o, n in zip(self.out, self.inn))

    def step(self, v, c):
        """Follow letter byte ``c`` from core vertex ``v``; None if absent."""
        if c < 128:
            return self.out[v].get(c)
        return self.inn[v].get(256 - c)

    def accepts(self, word: bytes):
        v = 0
        for c in word:
            v = self.step(v, c)
            if v is None:
                return False
        return v == 0

    def read(self, state, word: bytes):
        """Read ``word`` from ``state`` in the completed (infinite) Schreier
        automaton: states are (core vertex, reduced tail off the core)."""
        v, tail = state
        for c in word:
            if tail:
                if tail[-1] + c == 256:
                    tail = tail[:-1]
                else:
                    tail = tail + bytes([c])
            else:
                w = self.step(v, c)
                if w is None:
                    tail = bytes([c])
                else:
                    v = w
        return (v, tail)

    def to_dot(self, name="H"):
        lines = [f"digraph {name} {{", "  rankdir=LR;", '  0 [shape=doublecircle];']
        for u, i, v in self.edges():
            lines.append(f'  {u} -> {v} [label="{LETTERS[i - 1]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class _UnionFind:
    def __init__(self):
        self.parent = []

    def add(self):
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return a
        keep, drop = min(a, b), max(a, b)
        self.parent[drop] = keep
        return keep


def fold(rank: int, generators) -> StallingsGraph:
    """Folded, trimmed core graph of <generators> in F_rank."""
    if rank < 1:
        raise EmptyAlphabet("free group of rank 0 has no Stallings graph")
    model = FreeGroup(rank)
    words = [model.parse(w) if isinstance(w, str) else bytes(w) for w in generators]
    for w in words:
        model.check(w)
    uf = _UnionFind()
    base = uf.add()
    raw_edges = []  # (u, label, v) with positive labels
    for w in words:
        if not w:
            continue
        prev = base
        for pos, c in enumerate(w):
            nxt = base if pos == len(w) - 1 else uf.add()
            if c < 128:
                raw_edges.append((prev, c, nxt))
            else:
                raw_edges.append((nxt, 256 - c, prev))
            prev = nxt
    # fold to a fixed point; merges always keep the smaller vertex id
    changed = True
    while changed:
        changed = False
        out, inn = {}, {}
        for u, i, v in raw_edges:
            u, v = uf.find(u), uf.find(v)
            w = out.get((u, i))
            if w is not None and uf.find(w) != v:
                uf.union(w, v)
                changed = True
                break
            x = inn.get((v, i))
            if x is not None and uf.find(x) != u:
                uf.union(x, u)
                changed = True
                break
            out[(u, i)] = v
            inn[(v, i)] = u
    edges = sorted({(uf.find(u), i, uf.find(v)) for u, i, v in raw_edges})
    # trim hanging trees (never the basepoint)
    alive = set(uf.find(x) for x in range(len(uf.parent)))
    while True:
        degree = {v: 0 for v in alive}
        for u, _, v in edges:
            degree[u] += 1
            degree[v] += 1
        dead = {v for v, d in degree.items() if d <= 1 and v != uf.find(base)}
        if not dead:
            break
        alive -= dead
        edges = [e for e in edges if e[0] in alive and e[2] in alive]
    # renumber breadth-first from the basepoint in generator order
    root = uf.find(base)
    adj_out, adj_in = {}, {}
    for u, i, v in edges:
        adj_out[(u, i)] = v
        adj_in[(v, i)] = u
    order = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for i in range(1, rank + 1):
            for nb in (adj_out.get((u, i)), adj_in.get((u, i))):
                if nb is not None and nb not in order:
                    order[nb] = len(order)
                    queue.append(nb)
    out = [dict() for _ in order]
    inn = [dict() for _ in order]
    for u, i, v in edges:
        out[order[u]][i] = order[v]
        inn[order[v]][i] = order[u]
    return StallingsGraph(rank, out, inn)


def rank_index(graph: StallingsGraph):
    """(rank, index) with index = INFINITE unless the automaton is complete."""
    rank = graph.num_edges - graph.num_vertices + 1
    index = graph.num_vertices if graph.is_complete() else INFINITE
    return rank, index


def classify_pair_free(n: int, generators):
    """Trichotomy for f.g. H <= F_n: finite index, trivial or cyclic, or
    rank >= 2 with infinite index (not in SLC_subexp)."""
    if n < 2:
        raise ValueError("classification needs n >= 2")
    graph = fold(n, generators)
    rank, index = rank_index(graph)
    if index != INFINITE:
        verdict = SLC_YES_FINITE_INDEX
    elif rank <= 1:
        verdict = SLC_YES_TRIVIAL_OR_Z
    else:
        verdict = SLC_NO_RANK_GE2
    return {"verdict": verdict, "rank": rank,
            "index": "infinite" if index == INFINITE else index,
            "vertices": graph.num_vertices, "edges": graph.num_edges}
