"""Rooted forests over graph nodes: BFS construction, rehang, subtree deletion.

Forest edits have value semantics at the public API (``rehang_subtree`` and
``delete_subtrees`` return fresh forests).  The phase engine owns private
copies and uses the in-place variants; both paths run the same mutation code.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph, IdAssignment, multi_source_bfs


class ForestError(ValueError):
    """Invalid forest edit or query."""


@dataclass
class RootedForest:
    """Forest of rooted trees on a subset of graph nodes.

    ``parent[v]`` is None for roots and for non-members; membership is
    authoritative in ``member``.  ``depth[v]`` counts hops to the root and
    ``root_of[v]`` names it.  ``children`` mirrors ``parent``.  ``tree_size``
    maps each root to its member count.
    """

    n: int
    member: list[bool]
    parent: list[int | None]
    depth: list[int | None]
    root_of: list[int | None]
    children: list[list[int]]
    tree_size: dict[int, int]

    def copy(self) -> "RootedForest":
        return RootedForest(
            n=self.n,
            member=list(self.member),
            parent=list(self.parent),
            depth=list(self.depth),
            root_of=list(self.root_of),
            children=[list(c) for c in self.children],
            tree_size=dict(self.tree_size),
        )

    def members(self) -> list[int]:
        return [v for v in range(self.n) if self.member[v]]

    def roots(self) -> list[int]:
        return sorted(self.tree_size)

    def member_count(self) -> int:
        return sum(self.tree_size.values())

    # -- internal mutators: callers must uphold preconditions ---------------

    def _collect_subtree(self, v: int) -> list[int]:
        out = [v]
        stack = [v]
        while stack:
            u = stack.pop()
            for c in self.children[u]:
                out.append(c)
                stack.append(c)
        return out

    def _rehang_inplace(self, v: int, new_parent: int) -> list[int]:
        """Reattach subtree(v) under new_parent; returns the moved nodes."""
        moved = self._collect_subtree(v)
        new_root = self.root_of[new_parent]
        old_root = self.root_of[v]
        delta = self.depth[new_parent] + 1 - self.depth[v]
        old_parent = self.parent[v]
        if old_parent is not None:
            self.children[old_parent].remove(v)
        else:
            # v was a root; its tree is absorbed wholesale.
            del self.tree_size[v]
        self.parent[v] = new_parent
        self.children[new_parent].append(v)
        for u in moved:
            self.depth[u] += delta
            self.root_of[u] = new_root
        self.tree_size[new_root] += len(moved)
        if old_parent is not None:
            self.tree_size[old_root] -= len(moved)
        return moved

    def _delete_subtree_inplace(self, v: int) -> list[int]:
        """Remove subtree(v) from the forest; returns the removed nodes."""
        gone = self._collect_subtree(v)
        old_parent = self.parent[v]
        old_root = self.root_of[v]
        if old_parent is not None:
            self.children[old_parent].remove(v)
            self.tree_size[old_root] -= len(gone)
        else:
            del self.tree_size[v]
        for u in gone:
            self.member[u] = False
            self.parent[u] = None
            self.depth[u] = None
            self.root_of[u] = None
            self.children[u] = []
        return gone


def bfs_forest(g: Graph, alive, terminals, ids: IdAssignment | None = None) -> RootedForest:
    """BFS forest of G[alive] rooted at the terminal set.

    Parent choice follows the multi_source_bfs tie rule (minimum-identifier
    neighbor one layer closer).  Rejects when some alive node is unreachable
    from the terminals.
    """
    alive_set = set(alive)
    term_set = set(terminals)
    dm = multi_source_bfs(g, alive_set, term_set, ids)
    for v in alive_set:
        if dm.dist[v] is None:
            raise ForestError(f"alive node {v} unreachable from terminals")
    member = [False] * g.n
    parent: list[int | None] = [None] * g.n
    depth: list[int | None] = [None] * g.n
    root_of: list[int | None] = [None] * g.n
    children: list[list[int]] = [[] for _ in range(g.n)]
    tree_size: dict[int, int] = {t: 0 for t in term_set}
    for v in sorted(alive_set):
        member[v] = True
        parent[v] = dm.parent[v]
        depth[v] = dm.dist[v]
        root_of[v] = dm.origin[v]
        tree_size[dm.origin[v]] += 1
        if dm.parent[v] is not None:
            children[dm.parent[v]].append(v)
    return RootedForest(
        n=g.n, member=member, parent=parent, depth=depth,
        root_of=root_of, children=children, tree_size=tree_size,
    )


def subtree_nodes(f: RootedForest, v: int) -> list[int]:
    """All nodes of the subtree rooted at v (v included), sorted."""
    if not f.member[v]:
        raise ForestError(f"node {v} is not a forest member")
    return sorted(f._collect_subtree(v))


def rehang_subtree(f: RootedForest, v: int, new_parent: int, g: Graph) -> RootedForest:
    """New forest with subtree(v) reattached under new_parent.

    new_parent must be a member of a different tree and a graph neighbor
    of v; attaching below v itself would create a cycle and is rejected.
    """
    if not f.member[v]:
        raise ForestError(f"node {v} is not a forest member")
    if not f.member[new_parent]:
        raise ForestError(f"new parent {new_parent} is not a forest member")
    if f.root_of[new_parent] == f.root_of[v]:
        raise ForestError(f"new parent {new_parent} is in the same tree as {v}")
    if not g.has_edge(v, new_parent):
        raise ForestError(f"new parent {new_parent} is not a graph neighbor of {v}")
    if new_parent in f._collect_subtree(v):
        raise ForestError(f"new parent {new_parent} lies inside the subtree of {v}")
    out = f.copy()
    out._rehang_inplace(v, new_parent)
    return out


def delete_subtrees(f: RootedForest, vs) -> RootedForest:
    """New forest with the subtrees rooted at ``vs`` removed.

    The subtrees must be pairwise disjoint; overlap is rejected.
    """
    roots = list(vs)
    for v in roots:
        if not f.member[v]:
            raise ForestError(f"node {v} is not a forest member")
    seen: set[int] = set()
    for v in roots:
        sub = f._collect_subtree(v)
        if seen.intersection(sub):
            raise ForestError("overlapping subtrees in delete set")
        seen.update(sub)
    out = f.copy()
    for v in roots:
        out._delete_subtree_inplace(v)
    return out


def audit_depths(f: RootedForest) -> None:
    """Re-derive every member's depth by walking parent links; raise on drift.

    Rehang arithmetic is the step most prone to off-by-one errors, so debug
    runs re-check the incrementally maintained depths structurally.
    """
    for v in range(f.n):
        if not f.member[v]:
            continue
        hops = 0
        u = v
        while f.parent[u] is not None:
            u = f.parent[u]
            hops += 1
            if hops > f.n:
                raise ForestError(f"parent cycle reached from node {v}")
        if hops != f.depth[v]:
            raise ForestError(f"depth drift at node {v}: stored {f.depth[v]}, walked {hops}")
        if u != f.root_of[v]:
            raise ForestError(f"root drift at node {v}: stored {f.root_of[v]}, walked {u}")
        if (f.depth[v] == 0) != (f.parent[v] is None):
            raise ForestError(f"root flag drift at node {v}")
    total = sum(1 for v in range(f.n) if f.member[v])
    if total != f.member_count():
        raise ForestError("tree_size totals disagree with membership")
