"""Independent brute-force verification of every guarantee the executors claim.

All checks are built from graph primitives (BFS, components, all-pairs
diameters) and the recorded traces; they never call into the phase engine or
the simulator, so they stay meaningful as an oracle for both.  A failing
check always carries a concrete witness.  Witnesses name nodes by identifier
when an assignment is supplied, by index otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2

from .cluster import Clustering, Decomposition
from .graph import Graph, IdAssignment, connected_components, induced_diameter, multi_source_bfs
from .phase import PhaseResult


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None


@dataclass(frozen=True)
class Report:
    checks: tuple[CheckResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            suffix = f" ({c.witness})" if c.witness else ""
            lines.append(f"[{tag}] {c.name}{suffix}")
        verdict = "OK" if self.all_pass else "FAILED"
        lines.append(f"=> {verdict}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "all_pass": self.all_pass,
            "checks": [
                {"name": c.name, "pass": c.passed, "witness": c.witness}
                for c in self.checks
            ],
        }


class _Names:
    def __init__(self, ids: IdAssignment | None):
        self.ids = ids

    def __call__(self, v: int) -> str:
        if self.ids is None:
            return f"node {v}"
        return f"node id {self.ids.ids[v]} (index {v})"


def check_ruling(
    g: Graph,
    alive,
    q,
    r_bound: int,
    ids: IdAssignment | None = None,
) -> Report:
    """Every alive node must sit within r_bound hops of q inside G[alive]."""
    name = _Names(ids)
    alive_set = set(alive)
    dm = multi_source_bfs(g, alive_set, set(q))
    worst_v, worst_d = None, -1
    for v in alive_set:
        d = dm.dist[v]
        if d is None:
            return Report((CheckResult("ruling-radius", False, f"{name(v)} unreachable from terminals"),))
        if d > worst_d:
            worst_v, worst_d = v, d
    ok = worst_d <= r_bound
    witness = None if worst_v is None else f"farthest {name(worst_v)} at distance {worst_d}, bound {r_bound}"
    return Report((CheckResult("ruling-radius", ok, witness if not ok else None),))


def check_clustering(
    g: Graph,
    clustering: Clustering,
    b: int,
    ids: IdAssignment | None = None,
) -> Report:
    """Structural validity of a clustering: the full claim list, with witnesses."""
    name = _Names(ids)
    checks: list[CheckResult] = []
    diameter_bound = 8 * b**3

    seen: dict[int, int] = {}
    overlap_witness = None
    for idx, (_, members) in enumerate(clustering.clusters):
        for v in members:
            if v in seen:
                overlap_witness = f"{name(v)} in clusters {seen[v]} and {idx}"
                break
            seen[v] = idx
        if overlap_witness:
            break
    checks.append(CheckResult("clusters-disjoint", overlap_witness is None, overlap_witness))

    covered = clustering.covered()
    total = covered + len(clustering.unclustered)
    need = ceil(total / 2) if total else 0
    checks.append(
        CheckResult(
            "coverage-at-least-half",
            covered >= need,
            None if covered >= need else f"covered {covered} of {total}, need {need}",
        )
    )

    conn_witness = None
    diam_witness = None
    for t, members in clustering.clusters:
        comps = connected_components(g, members)
        if len(comps) != 1:
            conn_witness = f"cluster of terminal {name(t)} splits into {len(comps)} components"
            break
        d = induced_diameter(g, members)
        if d is None or d > diameter_bound:
            diam_witness = f"cluster of terminal {name(t)} has diameter {d}, bound {diameter_bound}"
            break
    checks.append(CheckResult("clusters-connected", conn_witness is None, conn_witness))
    checks.append(CheckResult("cluster-diameter", diam_witness is None, diam_witness))

    owner = {v: i for i, (_, members) in enumerate(clustering.clusters) for v in members}
    adj_witness = None
    for u, v in g.edges():
        cu, cv = owner.get(u), owner.get(v)
        if cu is not None and cv is not None and cu != cv:
            adj_witness = f"edge {name(u)} -- {name(v)} joins clusters {cu} and {cv}"
            break
    checks.append(CheckResult("clusters-non-adjacent", adj_witness is None, adj_witness))

    term_witness = None
    seen_terms: set[int] = set()
    for t, members in clustering.clusters:
        if t not in members:
            term_witness = f"terminal {name(t)} outside its own cluster"
            break
        if t in seen_terms:
            term_witness = f"terminal {name(t)} owns two clusters"
            break
        seen_terms.add(t)
    checks.append(CheckResult("one-terminal-per-cluster", term_witness is None, term_witness))

    stray = set(clustering.unclustered) & set(owner)
    checks.append(
        CheckResult(
            "unclustered-disjoint",
            not stray,
            None if not stray else f"{name(min(stray))} both clustered and unclustered",
        )
    )
    return Report(tuple(checks))


def check_step_invariants(
    g: Graph,
    phase: PhaseResult,
    ids: IdAssignment | None = None,
) -> Report:
    """Step-level claims from the recorded traces of one phase.

    Depth and immutability claims need debug snapshots; when absent, those
    entries report pass=True vacuously with a note, while the arithmetic
    claims (growth, blame accounting) always run.
    """
    name = _Names(ids)
    checks: list[CheckResult] = []
    b = phase.b
    have_snapshots = all(tr.snapshot is not None for tr in phase.step_traces)

    depth_witness = None
    if have_snapshots:
        for tr in phase.step_traces:
            for v, (is_red, depth, _) in tr.snapshot.items():
                d0 = phase.f0_depth[v]
                if is_red:
                    if depth > d0 + 2 * (tr.j + 1):
                        depth_witness = f"step {tr.j}: red {name(v)} depth {depth} > {d0} + {2 * (tr.j + 1)}"
                        break
                elif depth != d0:
                    depth_witness = f"step {tr.j}: blue {name(v)} depth {depth} != starting {d0}"
                    break
            if depth_witness:
                break
    checks.append(
        CheckResult(
            "step-depth-claims" if have_snapshots else "step-depth-claims (no snapshots, skipped)",
            depth_witness is None,
            depth_witness,
        )
    )

    growth_witness = None
    if have_snapshots:
        for tr in phase.step_traces:
            for r in tr.grows:
                before = tr.red_sizes[r]
                after = sum(1 for _, (_, _, root) in tr.snapshot.items() if root == r)
                if 2 * b * after < (2 * b + 1) * before:
                    growth_witness = f"step {tr.j}: tree {name(r)} grew {before} -> {after}, below factor 1+1/{2 * b}"
                    break
            if growth_witness:
                break
    checks.append(CheckResult("accepted-tree-growth", growth_witness is None, growth_witness))

    blame_witness = None
    declines_seen: set[int] = set()
    total_deleted = 0
    for tr in phase.step_traces:
        total_deleted += len(tr.deleted)
        declined_weight: dict[int, int] = {}
        for pr in tr.proposals:
            if pr.target_root in tr.declines:
                declined_weight[pr.target_root] = declined_weight.get(pr.target_root, 0) + pr.weight
        step_deleted = sum(declined_weight.values())
        if step_deleted != len(tr.deleted):
            blame_witness = f"step {tr.j}: {len(tr.deleted)} deletions but {step_deleted} blamed"
            break
        for r, w in declined_weight.items():
            if r in declines_seen:
                blame_witness = f"tree {name(r)} blamed in two steps"
                break
            declines_seen.add(r)
            if 2 * b * w >= tr.red_sizes[r]:
                blame_witness = f"step {tr.j}: tree {name(r)} blamed by {w} >= size {tr.red_sizes[r]} / {2 * b}"
                break
        if blame_witness:
            break
    checks.append(CheckResult("blame-ledger", blame_witness is None, blame_witness))

    budget_ok = 2 * b * total_deleted <= len(phase.alive_in)
    checks.append(
        CheckResult(
            "phase-deletion-budget",
            budget_ok,
            None if budget_ok else f"deleted {total_deleted} of {len(phase.alive_in)} with b={b}",
        )
    )

    freeze_witness = None
    if have_snapshots:
        declined_at: dict[int, int] = {}
        for tr in phase.step_traces:
            for r in tr.declines:
                declined_at[r] = tr.j
        for r, j0 in declined_at.items():
            baseline = None
            for tr in phase.step_traces[j0:]:
                tree = sorted((v, s[1]) for v, s in tr.snapshot.items() if s[2] == r)
                if baseline is None:
                    baseline = tree
                elif tree != baseline:
                    freeze_witness = f"tree {name(r)} changed at step {tr.j} after declining at {j0}"
                    break
            if freeze_witness:
                break
            tr0 = phase.step_traces[j0]
            for v, s in tr0.snapshot.items():
                if s[2] != r:
                    continue
                for w in g.adj[v]:
                    ws = tr0.snapshot.get(w)
                    if ws is not None and not ws[0]:
                        freeze_witness = f"declined tree {name(r)} member {name(v)} touches blue {name(w)}"
                        break
                if freeze_witness:
                    break
            if freeze_witness:
                break
    checks.append(CheckResult("declined-tree-frozen", freeze_witness is None, freeze_witness))

    return Report(tuple(checks))


def check_decomposition(
    g: Graph,
    d: Decomposition,
    b: int,
    ids: IdAssignment | None = None,
) -> Report:
    """Replay the decomposition color by color against residual graphs."""
    name = _Names(ids)
    checks: list[CheckResult] = []
    n = g.n
    diameter_bound = 8 * b**3

    uncolored = [v for v in range(n) if not 0 <= d.color[v] < d.colors_used]
    checks.append(
        CheckResult(
            "all-nodes-colored",
            not uncolored,
            None if not uncolored else f"{name(uncolored[0])} uncolored",
        )
    )

    bound = ceil(log2(n)) + 1 if n > 1 else 1
    checks.append(
        CheckResult(
            "color-count",
            d.colors_used <= bound,
            None if d.colors_used <= bound else f"{d.colors_used} colors, bound {bound}",
        )
    )

    replay_witness = None
    if not uncolored:
        remaining = set(range(n))
        for c in range(d.colors_used):
            color_class = {v for v in remaining if d.color[v] == c}
            if not color_class:
                replay_witness = f"color {c} clusters nothing"
                break
            misplaced = [v for v in range(n) if d.color[v] == c and v not in remaining]
            if misplaced:
                replay_witness = f"{name(misplaced[0])} colored {c} but already clustered"
                break
            if 2 * len(color_class) < len(remaining):
                replay_witness = (
                    f"color {c} covers {len(color_class)} of {len(remaining)} remaining"
                )
                break
            for comp in connected_components(g, color_class):
                diam = induced_diameter(g, comp)
                if diam is None or diam > diameter_bound:
                    replay_witness = (
                        f"color {c} cluster at {name(comp[0])} has diameter {diam}, bound {diameter_bound}"
                    )
                    break
                for v in comp:
                    for w in g.adj[v]:
                        if w in color_class and w not in comp:
                            replay_witness = f"color {c} clusters at {name(v)} and {name(w)} are adjacent"
                            break
                    if replay_witness:
                        break
                if replay_witness:
                    break
            if replay_witness:
                break
            remaining -= color_class
        if replay_witness is None and remaining:
            replay_witness = f"{name(min(remaining))} never clustered"
    checks.append(CheckResult("per-color-clusterings", replay_witness is None, replay_witness))
    return Report(tuple(checks))


def check_mis(g: Graph, s, ids: IdAssignment | None = None) -> Report:
    """Independence and maximality of a node set, brute force."""
    name = _Names(ids)
    chosen = set(s)
    indep_witness = None
    for u, v in g.edges():
        if u in chosen and v in chosen:
            indep_witness = f"edge {name(u)} -- {name(v)} inside the set"
            break
    max_witness = None
    for v in range(g.n):
        if v not in chosen and not any(w in chosen for w in g.adj[v]):
            max_witness = f"{name(v)} could still join"
            break
    return Report(
        (
            CheckResult("independent", indep_witness is None, indep_witness),
            CheckResult("maximal", max_witness is None, max_witness),
        )
    )
