"""Undirected graph core: construction, identifier assignment, BFS oracles.

Everything downstream (forests, phase engine, simulator, verifiers) goes
through the primitives in this module.  All types are immutable after
construction and all operations are pure functions, so they are safe to call
from parallel workers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Structurally invalid graph, identifier assignment, or input file."""


def default_bits(n: int) -> int:
    """Identifier width for an n-node graph: ceil(log2(max(n, 2))), at least 1."""
    return max(1, (max(n, 2) - 1).bit_length())


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes 0..n-1.

    Neighbor lists are sorted ascending; this is the determinism anchor for
    every tie-breaking rule built on top.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    edge_count: int

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterable[tuple[int, int]]:
        """Yield each undirected edge once, as (u, v) with u < v, sorted."""
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        # Neighbor lists are sorted; linear scan is fine at desk scale.
        return v in self.adj[u]


@dataclass(frozen=True)
class IdAssignment:
    """Distinct b-bit identifiers, indexed by node. Requires 2**b >= n."""

    b: int
    ids: tuple[int, ...]

    def bit(self, node: int, p: int) -> int:
        """Bit p of the node's identifier, 0-based from the most significant."""
        if not 0 <= p < self.b:
            raise GraphError(f"bit index {p} out of range for b={self.b}")
        return (self.ids[node] >> (self.b - 1 - p)) & 1


@dataclass(frozen=True)
class DistMap:
    """Hop distances from a source set inside an induced subgraph.

    ``dist``, ``parent`` and ``origin`` are indexed by node; unreachable nodes
    (including nodes outside the alive set) carry None.  Sources have
    dist 0, parent None, origin themselves.
    """

    dist: tuple[int | None, ...]
    parent: tuple[int | None, ...]
    origin: tuple[int | None, ...]

    def reachable(self, v: int) -> bool:
        return self.dist[v] is not None


def build_graph(
    n: int,
    edges: Iterable[tuple[int, int]],
    ids: Sequence[int] | None = None,
    b: int | None = None,
) -> tuple[Graph, IdAssignment]:
    """Build a validated Graph plus its identifier assignment.

    Duplicate edge pairs are collapsed.  Self-loops, out-of-range endpoints,
    colliding identifiers and identifiers not fitting in b bits are rejected.
    Without explicit ids, node k gets identifier k and b = default_bits(n).
    """
    if n <= 0:
        raise GraphError(f"node count must be positive, got {n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    adj = tuple(tuple(sorted(s)) for s in nbrs)
    edge_count = sum(len(a) for a in adj) // 2
    g = Graph(n=n, adj=adj, edge_count=edge_count)

    if ids is None:
        if b is not None and (1 << b) < n:
            raise GraphError(f"2^b < n: b={b}, n={n}")
        width = b if b is not None else default_bits(n)
        assignment = IdAssignment(b=width, ids=tuple(range(n)))
    else:
        id_list = tuple(int(x) for x in ids)
        if len(id_list) != n:
            raise GraphError(f"expected {n} identifiers, got {len(id_list)}")
        if len(set(id_list)) != n:
            raise GraphError("identifier collision")
        width = b if b is not None else max(default_bits(n), max(id_list).bit_length())
        if (1 << width) < n:
            raise GraphError(f"2^b < n: b={width}, n={n}")
        for node, value in enumerate(id_list):
            if not 0 <= value < (1 << width):
                raise GraphError(f"identifier {value} of node {node} needs more than {width} bits")
        assignment = IdAssignment(b=width, ids=id_list)
    return g, assignment


def _check_alive_sources(g: Graph, alive: set[int], sources: set[int]) -> None:
    for v in alive:
        if not 0 <= v < g.n:
            raise GraphError(f"alive node {v} out of range")
    if not sources <= alive:
        bad = min(sources - alive)
        raise GraphError(f"source {bad} not in alive set")


def multi_source_bfs(
    g: Graph,
    alive: Iterable[int],
    sources: Iterable[int],
    ids: IdAssignment | None = None,
) -> DistMap:
    """BFS distances from a source set within the subgraph induced by ``alive``.

    Parent tie rule: the parent of v is the alive neighbor w with
    dist(w) = dist(v) - 1 of minimum identifier; origin(v) is inherited from
    the parent.  With ``ids=None`` the identifier of node k is k, so ties fall
    back to the minimum node index.
    """
    alive_set = set(alive)
    source_set = set(sources)
    _check_alive_sources(g, alive_set, source_set)

    dist: list[int | None] = [None] * g.n
    parent: list[int | None] = [None] * g.n
    origin: list[int | None] = [None] * g.n

    frontier = sorted(source_set)
    for s in frontier:
        dist[s] = 0
        origin[s] = s

    key = (lambda v: v) if ids is None else (lambda v: ids.ids[v])

    layer = frontier
    d = 0
    while layer:
        nxt: list[int] = []
        for u in layer:
            for w in g.adj[u]:
                if w in alive_set and dist[w] is None:
                    dist[w] = d + 1
                    nxt.append(w)
        nxt = sorted(set(nxt))
        for v in nxt:
            best = None
            for w in g.adj[v]:
                if w in alive_set and dist[w] == d and (best is None or key(w) < key(best)):
                    best = w
            parent[v] = best
            origin[v] = origin[best]
        layer = nxt
        d += 1

    return DistMap(dist=tuple(dist), parent=tuple(parent), origin=tuple(origin))


def connected_components(g: Graph, alive: Iterable[int]) -> list[list[int]]:
    """Partition of the alive set into components of the induced subgraph.

    Components are emitted in order of their minimum node index, each sorted.
    """
    alive_set = set(alive)
    for v in alive_set:
        if not 0 <= v < g.n:
            raise GraphError(f"alive node {v} out of range")
    seen: set[int] = set()
    out: list[list[int]] = []
    for start in sorted(alive_set):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if w in alive_set and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def induced_diameter(g: Graph, nodes: Iterable[int]) -> int | None:
    """Diameter of the subgraph induced by ``nodes``; None when disconnected.

    Exact all-pairs answer via one BFS per node.  Deliberately brute force:
    this is the oracle other code gets checked against.
    """
    node_set = set(nodes)
    if not node_set:
        raise GraphError("induced_diameter of empty node set")
    worst = 0
    for s in node_set:
        dm = multi_source_bfs(g, node_set, [s])
        for v in node_set:
            dv = dm.dist[v]
            if dv is None:
                return None
            worst = max(worst, dv)
    return worst


def parse_edge_list(text: str) -> tuple[Graph, IdAssignment]:
    """Parse the edge-list text format.

    Line 1: ``n m``.  Next m lines: ``u v`` (0-based endpoints).  Optionally
    followed by exactly n lines ``id k`` assigning identifier k to nodes
    0..n-1 in order.  Malformed input is rejected with the offending line
    number.
    """
    lines = text.splitlines()
    entries = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    if not entries:
        raise GraphError("line 1: empty input, expected 'n m' header")
    ln_no, header = entries[0]
    parts = header.split()
    if len(parts) != 2:
        raise GraphError(f"line {ln_no}: expected 'n m' header, got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphError(f"line {ln_no}: non-integer header {header!r}") from None
    if n <= 0 or m < 0:
        raise GraphError(f"line {ln_no}: invalid sizes n={n} m={m}")
    if len(entries) - 1 < m:
        raise GraphError(f"line {entries[-1][0]}: expected {m} edge lines, found {len(entries) - 1}")

    edges: list[tuple[int, int]] = []
    for ln_no, body in entries[1 : 1 + m]:
        parts = body.split()
        if len(parts) != 2:
            raise GraphError(f"line {ln_no}: expected 'u v', got {body!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {ln_no}: non-integer edge {body!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {ln_no}: edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise GraphError(f"line {ln_no}: self-loop at node {u}")
        edges.append((u, v))

    rest = entries[1 + m :]
    ids: list[int] | None = None
    if rest:
        if len(rest) != n:
            raise GraphError(f"line {rest[0][0]}: identifier group must have exactly {n} 'id k' lines, found {len(rest)}")
        ids = []
        for ln_no, body in rest:
            parts = body.split()
            if len(parts) != 2 or parts[0] != "id":
                raise GraphError(f"line {ln_no}: expected 'id k', got {body!r}")
            try:
                ids.append(int(parts[1]))
            except ValueError:
                raise GraphError(f"line {ln_no}: non-integer identifier {body!r}") from None

    return build_graph(n, edges, ids=ids)


def write_edge_list(g: Graph, ids: IdAssignment | None = None) -> str:
    """Render the edge-list text format; identifier group only if non-default."""
    out = [f"{g.n} {g.edge_count}"]
    out.extend(f"{u} {v}" for u, v in g.edges())
    if ids is not None and tuple(ids.ids) != tuple(range(g.n)):
        out.extend(f"id {k}" for k in ids.ids)
    return "\n".join(out) + "\n"
