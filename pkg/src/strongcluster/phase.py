"""Centralized reference executor for one clustering phase.

A phase runs t = 2*b^2 propose/grow/delete steps over a rooted BFS forest.
Terminal trees are colored by one identifier bit of their root: bit value 0
is red, 1 is blue.  Red trees only grow; blue subtrees adjacent to red nodes
either join a red tree wholesale or are deleted.  All decisions within a step
read only the step's starting forest, so resolution order does not matter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .forest import RootedForest, bfs_forest
from .graph import Graph, IdAssignment


class PhaseError(ValueError):
    """Phase precondition violation."""


def step_budget(b: int) -> int:
    """Number of steps per phase."""
    return 2 * b * b


@dataclass(frozen=True)
class Proposal:
    """One blue subtree offering to join a red tree.

    ``attach_at`` is the proposer's minimum-identifier red neighbor; the
    target tree is the one containing it.  ``weight`` is the proposer's
    subtree size at the start of the step.
    """

    proposer: int
    weight: int
    attach_at: int
    target_root: int


@dataclass(frozen=True)
class StepTrace:
    """Record of one step: who proposed, which trees grew, who was deleted.

    ``red_sizes`` holds the pre-step size of every red tree that received at
    least one proposal.  ``snapshot`` (debug runs only) maps each post-step
    member to (is_red, depth, root).
    """

    j: int
    proposals: tuple[Proposal, ...]
    grows: tuple[int, ...]
    declines: tuple[int, ...]
    deleted: tuple[int, ...]
    max_depth: int
    red_sizes: dict[int, int] = field(default_factory=dict)
    snapshot: dict[int, tuple[bool, int, int]] | None = None

    def log_line(self) -> str:
        props = ",".join(f"{p.proposer}:{p.weight}→{p.target_root}" for p in self.proposals)
        grow = ",".join(str(r) for r in self.grows)
        decline = ",".join(str(r) for r in self.declines)
        return (
            f"step {self.j}: proposals=[{props}] grow=[{grow}] "
            f"decline=[{decline}] deleted={len(self.deleted)} maxdepth={self.max_depth}"
        )


@dataclass
class PhaseState:
    """Forest plus phase/step coordinates; colors derive from the root bit."""

    p: int
    j: int
    forest: RootedForest
    ids: IdAssignment

    @property
    def t(self) -> int:
        return step_budget(self.ids.b)

    def is_red(self, v: int) -> bool:
        root = self.forest.root_of[v]
        if root is None:
            raise PhaseError(f"node {v} is not a forest member")
        return self.ids.bit(root, self.p) == 0


@dataclass(frozen=True)
class PhaseResult:
    """Outcome of one phase: survivors, surviving terminals, final forest.

    ``f0_depth`` keeps the starting BFS depth of every phase-input node
    (None for non-members); step-level depth claims are checked against it.
    """

    p: int
    b: int
    alive_in: tuple[int, ...]
    terminals_in: tuple[int, ...]
    survivors: tuple[int, ...]
    terminals_out: tuple[int, ...]
    deleted: tuple[int, ...]
    final_forest: RootedForest
    step_traces: tuple[StepTrace, ...]
    f0_depth: tuple[int | None, ...]


def split_terminals(ids: IdAssignment, q: Iterable[int], p: int) -> tuple[set[int], set[int]]:
    """Split terminals by bit p of their identifier: (bit 0 -> red, bit 1 -> blue)."""
    if p >= ids.b:
        raise PhaseError(f"phase index {p} out of range for b={ids.b}")
    red, blue = set(), set()
    for q_node in q:
        (red if ids.bit(q_node, p) == 0 else blue).add(q_node)
    return red, blue


def _red_flags(st: PhaseState) -> list[bool]:
    f = st.forest
    return [
        bool(f.member[v] and st.ids.bit(f.root_of[v], st.p) == 0)
        for v in range(f.n)
    ]


def _candidates_from_scratch(g: Graph, st: PhaseState, red: list[bool]) -> set[int]:
    """Blue members with at least one red graph neighbor."""
    f = st.forest
    out = set()
    for v in range(g.n):
        if f.member[v] and not red[v]:
            for w in g.adj[v]:
                if red[w]:
                    out.add(v)
                    break
    return out


def _proposals_from_candidates(
    g: Graph,
    ids: IdAssignment,
    f: RootedForest,
    red: list[bool],
    candidates: set[int],
) -> list[Proposal]:
    """Proposers are candidates with no candidate strict ancestor.

    Ancestors live in the same blue tree, so a red-adjacent ancestor is
    itself a candidate; the walk memoizes per-path results.
    """
    memo: dict[int, bool] = {}

    def weak_status(u: int) -> bool:
        # True iff u or some ancestor of u is a candidate.
        path = []
        cur: int | None = u
        while cur is not None and cur not in memo:
            path.append(cur)
            cur = f.parent[cur]
        val = memo[cur] if cur is not None else False
        for node in reversed(path):
            val = val or (node in candidates)
            memo[node] = val
        return memo[u]

    out: list[Proposal] = []
    for v in sorted(candidates, key=lambda x: ids.ids[x]):
        par = f.parent[v]
        if par is not None and weak_status(par):
            continue
        attach = min((w for w in g.adj[v] if red[w]), key=lambda x: ids.ids[x])
        weight = len(f._collect_subtree(v))
        out.append(Proposal(proposer=v, weight=weight, attach_at=attach, target_root=f.root_of[attach]))
    return out


def compute_propose_set(g: Graph, st: PhaseState) -> list[Proposal]:
    """Propose set of the current step, sorted by proposer identifier."""
    red = _red_flags(st)
    candidates = _candidates_from_scratch(g, st, red)
    return _proposals_from_candidates(g, st.ids, st.forest, red, candidates)


def grow_decisions(
    proposals: Iterable[Proposal],
    red_tree_sizes: Mapping[int, int],
    b: int,
) -> dict[int, bool]:
    """Per targeted red root: True (grow) iff 2b * sum(weights) >= tree size.

    Exact integer comparison; equality grows.  Roots receiving no proposals
    are absent from the result.
    """
    totals: dict[int, int] = {}
    for pr in proposals:
        if pr.target_root not in red_tree_sizes:
            raise PhaseError(f"no size for targeted root {pr.target_root}")
        totals[pr.target_root] = totals.get(pr.target_root, 0) + pr.weight
    return {r: 2 * b * w >= red_tree_sizes[r] for r, w in totals.items()}


def _apply_edits(
    g: Graph,
    f: RootedForest,
    proposals: list[Proposal],
    decisions: Mapping[int, bool],
) -> tuple[list[int], list[int]]:
    """Mutate f per the step's decisions; returns (recolored, deleted) nodes.

    Proposer subtrees are pairwise disjoint and attach points sit in red
    trees untouched by deletions, so applying in proposal order is safe.
    """
    recolored: list[int] = []
    deleted: list[int] = []
    for pr in proposals:
        if decisions[pr.target_root]:
            recolored.extend(f._rehang_inplace(pr.proposer, pr.attach_at))
        else:
            deleted.extend(f._delete_subtree_inplace(pr.proposer))
    return recolored, deleted


def apply_step(g: Graph, st: PhaseState) -> tuple[PhaseState, StepTrace]:
    """One step, value-semantic: returns the successor state and its trace."""
    if st.j >= st.t:
        raise PhaseError(f"step {st.j} exceeds budget t={st.t}")
    red = _red_flags(st)
    candidates = _candidates_from_scratch(g, st, red)
    proposals = _proposals_from_candidates(g, st.ids, st.forest, red, candidates)
    red_sizes = {pr.target_root: st.forest.tree_size[pr.target_root] for pr in proposals}
    decisions = grow_decisions(proposals, red_sizes, st.ids.b)
    nf = st.forest.copy()
    _, deleted = _apply_edits(g, nf, proposals, decisions)
    max_depth = max((nf.depth[v] for v in range(nf.n) if nf.member[v]), default=0)
    trace = StepTrace(
        j=st.j,
        proposals=tuple(proposals),
        grows=tuple(sorted(r for r, ok in decisions.items() if ok)),
        declines=tuple(sorted(r for r, ok in decisions.items() if not ok)),
        deleted=tuple(sorted(deleted)),
        max_depth=max_depth,
        red_sizes=red_sizes,
    )
    return PhaseState(p=st.p, j=st.j + 1, forest=nf, ids=st.ids), trace


class _DepthTally:
    """Multiset of member depths with cheap running max."""

    def __init__(self, f: RootedForest):
        self.counts: dict[int, int] = {}
        self.max = 0
        for v in range(f.n):
            if f.member[v]:
                self.add(f.depth[v])

    def add(self, d: int) -> None:
        self.counts[d] = self.counts.get(d, 0) + 1
        if d > self.max:
            self.max = d

    def remove(self, d: int) -> None:
        self.counts[d] -= 1
        if not self.counts[d]:
            del self.counts[d]
        while self.max and self.max not in self.counts:
            self.max -= 1

    def current_max(self) -> int:
        return self.max if self.counts else 0


def run_phase(
    g: Graph,
    alive: Iterable[int],
    q: Iterable[int],
    p: int,
    ids: IdAssignment,
    debug: bool = False,
) -> PhaseResult:
    """Run one full phase: BFS forest, then t = 2b^2 steps.

    Once the propose set is empty nothing can change in later steps (red
    adjacency only appears through recoloring, which only proposals cause),
    so the loop stops early and pads the remaining traces as empty.  Debug
    runs additionally assert the step-level depth/growth/immutability claims
    and audit incremental state against recomputation.
    """
    alive_set = set(alive)
    q_set = set(q)
    if not q_set <= alive_set:
        raise PhaseError("terminals must be alive")
    if p >= ids.b:
        raise PhaseError(f"phase index {p} out of range for b={ids.b}")
    b = ids.b
    t = step_budget(b)

    f = bfs_forest(g, alive_set, q_set, ids)
    f0_depth = tuple(f.depth)
    red = [f.member[v] and ids.bit(f.root_of[v], p) == 0 for v in range(g.n)]

    red_nbr_count = [0] * g.n
    for v in range(g.n):
        if red[v]:
            for w in g.adj[v]:
                red_nbr_count[w] += 1
    candidates = {v for v in range(g.n) if f.member[v] and not red[v] and red_nbr_count[v] > 0}

    tally = _DepthTally(f)
    traces: list[StepTrace] = []
    declined_seen: dict[int, int] = {}
    declined_freeze: dict[int, list[tuple[int, int]]] = {}

    def snapshot() -> dict[int, tuple[bool, int, int]]:
        return {
            v: (red[v], f.depth[v], f.root_of[v])
            for v in range(g.n)
            if f.member[v]
        }

    j = 0
    while j < t and candidates:
        proposals = _proposals_from_candidates(g, ids, f, red, candidates)
        assert proposals, "nonempty candidate set must yield a proposer"
        red_sizes = {pr.target_root: f.tree_size[pr.target_root] for pr in proposals}
        decisions = grow_decisions(proposals, red_sizes, b)

        deleted_step: list[int] = []
        recolored_step: list[int] = []
        for pr in proposals:
            if decisions[pr.target_root]:
                delta = f.depth[pr.attach_at] + 1 - f.depth[pr.proposer]
                moved = f._rehang_inplace(pr.proposer, pr.attach_at)
                for u in moved:
                    tally.remove(f.depth[u] - delta)
                    tally.add(f.depth[u])
                recolored_step.extend(moved)
            else:
                doomed = f._collect_subtree(pr.proposer)
                for u in doomed:
                    tally.remove(f.depth[u])
                f._delete_subtree_inplace(pr.proposer)
                deleted_step.extend(doomed)

        for u in recolored_step:
            red[u] = True
            candidates.discard(u)
            for w in g.adj[u]:
                red_nbr_count[w] += 1
                if f.member[w] and not red[w]:
                    candidates.add(w)
        for u in deleted_step:
            candidates.discard(u)

        trace = StepTrace(
            j=j,
            proposals=tuple(proposals),
            grows=tuple(sorted(r for r, ok in decisions.items() if ok)),
            declines=tuple(sorted(r for r, ok in decisions.items() if not ok)),
            deleted=tuple(sorted(deleted_step)),
            max_depth=tally.current_max(),
            red_sizes=red_sizes,
            snapshot=snapshot() if debug else None,
        )
        traces.append(trace)

        for r in trace.declines:
            assert r not in declined_seen, f"tree {r} declined twice"
            declined_seen[r] = j
            if debug:
                declined_freeze[r] = sorted(
                    (v, f.depth[v]) for v in range(g.n) if f.member[v] and f.root_of[v] == r
                )

        if debug:
            _debug_step_checks(g, f, ids, p, j, f0_depth, red, candidates, trace, declined_freeze)
        j += 1

    final_max = tally.current_max()
    shared_snapshot = snapshot() if debug else None
    while len(traces) < t:
        traces.append(
            StepTrace(
                j=len(traces), proposals=(), grows=(), declines=(), deleted=(),
                max_depth=final_max, red_sizes={}, snapshot=shared_snapshot,
            )
        )

    survivors = tuple(f.members())
    terminals_out = tuple(f.roots())
    deleted_all = tuple(sorted(alive_set.difference(survivors)))
    assert set(terminals_out) <= q_set
    assert not set(survivors) & set(deleted_all)
    assert set(survivors) | set(deleted_all) == alive_set
    return PhaseResult(
        p=p,
        b=b,
        alive_in=tuple(sorted(alive_set)),
        terminals_in=tuple(sorted(q_set)),
        survivors=survivors,
        terminals_out=terminals_out,
        deleted=deleted_all,
        final_forest=f,
        step_traces=tuple(traces),
        f0_depth=f0_depth,
    )


def _debug_step_checks(
    g: Graph,
    f: RootedForest,
    ids: IdAssignment,
    p: int,
    j: int,
    f0_depth: tuple[int | None, ...],
    red: list[bool],
    candidates: set[int],
    trace: StepTrace,
    declined_freeze: dict[int, list[tuple[int, int]]],
) -> None:
    from .forest import audit_depths

    audit_depths(f)
    for v in range(g.n):
        if not f.member[v]:
            continue
        if red[v]:
            assert f.depth[v] <= f0_depth[v] + 2 * (j + 1), f"red depth claim broken at {v}"
        else:
            assert f.depth[v] == f0_depth[v], f"blue depth changed at {v}"
    # Accepted trees grew by the guaranteed factor.
    b = ids.b
    for r in trace.grows:
        before = trace.red_sizes[r]
        after = f.tree_size[r]
        assert 2 * b * after >= (2 * b + 1) * before, f"growth factor broken at root {r}"
    # Declined trees are frozen and separated from blue nodes.
    for r, frozen in declined_freeze.items():
        now = sorted((v, f.depth[v]) for v in range(g.n) if f.member[v] and f.root_of[v] == r)
        assert now == frozen, f"declined tree {r} changed after declining"
        for v, _ in frozen:
            for w in g.adj[v]:
                assert not (f.member[w] and not red[w]), (
                    f"declined tree {r} still touches blue node {w}"
                )
    # Incremental candidate bookkeeping agrees with recomputation.
    rebuilt = set()
    for v in range(g.n):
        if f.member[v] and not red[v] and any(red[w] for w in g.adj[v]):
            rebuilt.add(v)
    assert candidates == rebuilt, "candidate set drifted from recomputation"
    # Every proposer subtree left the blue forest this step.
    for pr in trace.proposals:
        assert (not f.member[pr.proposer]) or red[pr.proposer]
