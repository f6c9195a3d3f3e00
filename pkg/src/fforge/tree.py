"""Immutable labelled trees, the constructors used throughout the package,
and purely combinatorial queries on them.

Vertex labels are 1-based at every public boundary.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadLabel, BadParam, InputError, NotALeaf, NotATree, TooSmall


@dataclass(frozen=True)
class Tree:
    """Undirected tree on vertices ``1..n``.

    ``adjacency[v - 1]`` is the sorted tuple of neighbours of vertex ``v``.
    Instances are only produced by validating constructors, so every
    ``Tree`` satisfies the tree invariants.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check(v)
        return self.adjacency[v - 1]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(1, self.n + 1) for v in self.adjacency[u - 1] if u < v]

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def _check(self, v: int) -> None:
        if not (isinstance(v, int) and 1 <= v <= self.n):
            raise BadLabel(f"vertex {v!r} outside 1..{self.n}")

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, edges={self.edges()})"


@dataclass(frozen=True)
class RoseParams:
    """Rose tree parameters: left branch ``s``, right branch ``t``, star leaves ``p``."""

    s: int
    t: int
    p: int

    def __post_init__(self):
        if self.s < 1 or self.t < 1 or self.p < 0:
            raise BadParam(f"rose tree needs s,t >= 1 and p >= 0, got {self}")

    @property
    def n(self) -> int:
        return self.s + self.t + self.p + 2

    @property
    def center(self) -> int:
        return self.s + self.t + 2

    @property
    def attach(self) -> int:
        """Path vertex joined to the star center."""
        return self.s + 1

    @property
    def star_leaves(self) -> range:
        return range(self.s + self.t + 3, self.s + self.t + self.p + 3)


def from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> Tree:
    """Validate an edge list on vertices ``1..n`` and build the tree."""
    if not isinstance(n, int) or n < 1:
        raise BadParam(f"vertex count must be a positive integer, got {n!r}")
    edges = [tuple(e) for e in edges]
    if len(edges) != n - 1:
        raise NotATree(f"a tree on {n} vertices has {n - 1} edges, got {len(edges)}")
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj: list[list[int]] = [[] for _ in range(n)]
    for e in edges:
        if len(e) != 2:
            raise InputError(f"edge {e!r} is not a pair")
        u, v = e
        for w in (u, v):
            if not (isinstance(w, int) and 1 <= w <= n):
                raise BadLabel(f"vertex {w!r} outside 1..{n}")
        if u == v:
            raise NotATree(f"self-loop at {u}")
        ru, rv = find(u), find(v)
        if ru == rv:
            raise NotATree(f"edge ({u},{v}) closes a cycle or repeats an edge")
        parent[ru] = rv
        adj[u - 1].append(v)
        adj[v - 1].append(u)
    # n-1 edges without a cycle is necessarily connected
    return Tree(n, tuple(tuple(sorted(a)) for a in adj))


def from_parents(parents: Sequence[int]) -> Tree:
    """Tree from a 0-based parent array (``-1`` marks the root)."""
    n = len(parents)
    return from_edge_list(n, [(i + 1, q + 1) for i, q in enumerate(parents) if q >= 0])


def build_path(n: int) -> Tree:
    if n < 1:
        raise BadParam(f"path needs n >= 1, got {n}")
    return from_edge_list(n, [(i, i + 1) for i in range(1, n)])


def build_star(p: int) -> Tree:
    """Star with center 1 and leaves ``2..p+1``."""
    if p < 1:
        raise BadParam(f"star needs p >= 1, got {p}")
    return from_edge_list(p + 1, [(1, i) for i in range(2, p + 2)])


def build_rose(params: RoseParams | tuple[int, int, int]) -> Tree:
    """Rose tree: path ``1..s+t+1`` whose vertex ``s+1`` is joined to the
    center ``c = s+t+2`` of a star with leaves ``c+1..c+p``."""
    if not isinstance(params, RoseParams):
        params = RoseParams(*params)
    s, t = params.s, params.t
    c = params.center
    edges = [(i, i + 1) for i in range(1, s + t + 1)]
    edges.append((s + 1, c))
    edges.extend((c, leaf) for leaf in params.star_leaves)
    return from_edge_list(params.n, edges)


def build_starlike(n: int, p: int) -> Tree:
    """Path ``1..n+1`` whose end ``n+1`` also carries ``p`` pendant leaves."""
    if n < 1 or p < 1:
        raise BadParam(f"star-like tree needs n >= 1 and p >= 1, got ({n}, {p})")
    hub = n + 1
    edges = [(i, i + 1) for i in range(1, n + 1)]
    edges.extend((hub, hub + k) for k in range(1, p + 1))
    return from_edge_list(n + 1 + p, edges)


def bfs_distances(tree: Tree, source: int) -> list[int]:
    """Distances from ``source``; index ``v - 1`` holds the distance to ``v``."""
    tree._check(source)
    dist = [-1] * tree.n
    dist[source - 1] = 0
    queue = deque([source])
    adj = tree.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u - 1] + 1
        for w in adj[u - 1]:
            if dist[w - 1] < 0:
                dist[w - 1] = du
                queue.append(w)
    return dist


def distance(tree: Tree, u: int, v: int) -> int:
    tree._check(v)
    return bfs_distances(tree, u)[v - 1]


def _farthest(dist: list[int]) -> int:
    best = max(dist)
    return dist.index(best) + 1


def diameter(tree: Tree) -> int:
    """Exact diameter by double BFS sweep."""
    a = _farthest(bfs_distances(tree, 1))
    return max(bfs_distances(tree, a))


def leaves(tree: Tree) -> frozenset[int]:
    if tree.n == 1:
        return frozenset({1})
    return frozenset(v for v in tree.vertices() if len(tree.adjacency[v - 1]) == 1)


def add_pendant(tree: Tree, v: int) -> Tree:
    """Attach a new vertex ``n+1`` to ``v``."""
    tree._check(v)
    return from_edge_list(tree.n + 1, tree.edges() + [(v, tree.n + 1)])


def remove_leaf(tree: Tree, v: int) -> Tree:
    """Delete leaf ``v`` and close the gap in the labels (order preserving)."""
    tree._check(v)
    if tree.n < 2:
        raise TooSmall("cannot remove a vertex from a single-vertex tree")
    if len(tree.adjacency[v - 1]) != 1:
        raise NotALeaf(f"vertex {v} has degree {len(tree.adjacency[v - 1])}")

    def relabel(w):
        return w - 1 if w > v else w

    edges = [(relabel(a), relabel(b)) for a, b in tree.edges() if v not in (a, b)]
    return from_edge_list(tree.n - 1, edges)


def centers(tree: Tree) -> list[int]:
    """The one or two central vertices, found by repeatedly stripping leaves."""
    n = tree.n
    if n <= 2:
        return list(tree.vertices())
    deg = list(tree.degrees())
    layer = [v for v in tree.vertices() if deg[v - 1] == 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for u in layer:
            for w in tree.adjacency[u - 1]:
                deg[w - 1] -= 1
                if deg[w - 1] == 1:
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def _rooted_code(tree: Tree, root: int) -> bytes:
    # iterative post-order AHU: each vertex gets "(" + sorted child codes + ")"
    parent = {root: 0}
    order = [root]
    for u in order:
        for w in tree.adjacency[u - 1]:
            if w != parent[u]:
                parent[w] = u
                order.append(w)
    codes: dict[int, list[bytes]] = {u: [] for u in order}
    for u in reversed(order):
        code = b"(" + b"".join(sorted(codes[u])) + b")"
        if u == root:
            return code
        codes[parent[u]].append(code)
    raise AssertionError("unreachable")


def canonical_code(tree: Tree) -> bytes:
    """Isomorphism-invariant AHU code rooted at the tree center.

    For a bicentral tree both centers are tried and the smaller code kept.
    """
    return min(_rooted_code(tree, c) for c in centers(tree))


def parse_edge_list(text: str) -> Tree:
    """Parse the edge-list text format: first data line ``n``, then ``u v`` lines.

    Blank lines and lines starting with ``#`` are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append((lineno, [int(tok) for tok in line.split()]))
        except ValueError:
            raise InputError(f"line {lineno}: expected integers, got {raw!r}") from None
    if not rows:
        raise InputError("empty edge-list file")
    lineno, first = rows[0]
    if len(first) != 1:
        raise InputError(f"line {lineno}: first line must hold only the vertex count")
    edges = []
    for lineno, vals in rows[1:]:
        if len(vals) != 2:
            raise InputError(f"line {lineno}: expected 'u v', got {vals}")
        edges.append((vals[0], vals[1]))
    return from_edge_list(first[0], edges)


def read_edge_list(path: str | os.PathLike) -> Tree:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def format_edge_list(tree: Tree) -> str:
    lines = [str(tree.n)] + [f"{u} {v}" for u, v in tree.edges()]
    return "\n".join(lines) + "\n"


def write_edge_list(tree: Tree, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(tree))
