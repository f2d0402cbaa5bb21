"""Full clustering runs, iterated network decomposition, and the MIS demo.

``strong_cluster`` composes b phases, threading the surviving node set and
terminal set from phase to phase.  ``network_decomposition`` repeats the
clustering on the unclustered remainder until every node is colored; the
identifier assignment (and so b) stays fixed across iterations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .graph import Graph, GraphError, IdAssignment, connected_components, induced_diameter
from .phase import PhaseResult, run_phase

if TYPE_CHECKING:
    from .sim import RoundStats


@dataclass(frozen=True)
class Clustering:
    """Non-adjacent connected clusters, each owning exactly one terminal.

    ``n`` counts the clustered universe (the alive set the run started
    from), so coverage claims stay meaningful on residual graphs.
    """

    n: int
    b: int
    clusters: tuple[tuple[int, tuple[int, ...]], ...]
    unclustered: tuple[int, ...]
    ruling_radius_bound: int

    @property
    def diameter_bound(self) -> int:
        return 2 * self.ruling_radius_bound

    def covered(self) -> int:
        return sum(len(members) for _, members in self.clusters)

    def covered_nodes(self) -> set[int]:
        return {v for _, members in self.clusters for v in members}

    def to_json_dict(self, g: Graph) -> dict:
        observed = 0
        for _, members in self.clusters:
            d = induced_diameter(g, members)
            observed = max(observed, d if d is not None else -1)
        return {
            "n": self.n,
            "b": self.b,
            "coverage": self.covered(),
            "clusters": [
                {"terminal": t, "nodes": list(members)} for t, members in self.clusters
            ],
            "unclustered": list(self.unclustered),
            "diameter_bound": self.diameter_bound,
            "max_diameter_observed": observed,
        }


@dataclass(frozen=True)
class Decomposition:
    """Complete coloring where each color class induces a valid clustering."""

    colors_used: int
    color: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {"colors": self.colors_used, "color_of": list(self.color)}


@dataclass(frozen=True)
class ClusterRun:
    """One clustering execution: the clustering plus per-phase evidence.

    ``rounds`` is populated by the simulated backend only.
    """

    clustering: Clustering
    phases: tuple[PhaseResult, ...]
    rounds: "RoundStats | None" = None


def clustering_from_survivors(
    g: Graph,
    b: int,
    alive_in: Iterable[int],
    survivors: Iterable[int],
    terminals: Iterable[int],
) -> Clustering:
    """Assemble the final clustering: components of the survivor set.

    Each component must contain exactly one terminal; anything else means the
    executor broke a separation or ruling guarantee, so it is an error here
    rather than a report entry.
    """
    alive_set = set(alive_in)
    surv = set(survivors)
    term_set = set(terminals)
    comps = connected_components(g, surv)
    clusters = []
    for comp in comps:
        owners = [t for t in comp if t in term_set]
        if len(owners) != 1:
            raise GraphError(f"component {comp[:8]}... holds {len(owners)} terminals")
        clusters.append((owners[0], tuple(comp)))
    return Clustering(
        n=len(alive_set),
        b=b,
        clusters=tuple(clusters),
        unclustered=tuple(sorted(alive_set - surv)),
        ruling_radius_bound=4 * b**3,
    )


def strong_cluster(
    g: Graph,
    ids: IdAssignment,
    backend: str = "reference",
    alive: Iterable[int] | None = None,
    debug: bool = False,
) -> ClusterRun:
    """Cluster at least half the (alive) nodes into non-adjacent low-diameter clusters.

    ``backend="reference"`` runs the centralized phase engine;
    ``backend="simulated"`` runs the synchronous message-passing executor and
    attaches its round statistics.  Both produce identical clusterings.
    """
    if backend == "simulated":
        from .sim import run_protocol

        clustering, stats, phases = run_protocol(g, ids, alive=alive)
        return ClusterRun(clustering=clustering, phases=tuple(phases), rounds=stats)
    if backend != "reference":
        raise GraphError(f"unknown backend {backend!r}")

    alive_set = set(range(g.n)) if alive is None else set(alive)
    q = set(alive_set)
    phases: list[PhaseResult] = []
    for p in range(ids.b):
        res = run_phase(g, alive_set, q, p, ids, debug=debug)
        phases.append(res)
        alive_set = set(res.survivors)
        q = set(res.terminals_out)
    start = set(range(g.n)) if alive is None else set(alive)
    clustering = clustering_from_survivors(g, ids.b, start, alive_set, q)
    return ClusterRun(clustering=clustering, phases=tuple(phases))


def network_decomposition(
    g: Graph,
    ids: IdAssignment,
    backend: str = "reference",
) -> tuple[Decomposition, tuple[ClusterRun, ...]]:
    """Color every node by repeatedly clustering the unclustered remainder.

    Each iteration clusters at least half of what is left, so the color count
    stays within ceil(log2 n) + 1.
    """
    remaining = set(range(g.n))
    color: list[int] = [-1] * g.n
    runs: list[ClusterRun] = []
    c = 0
    while remaining:
        run = strong_cluster(g, ids, backend=backend, alive=remaining)
        covered = run.clustering.covered_nodes()
        if not covered:
            raise GraphError("clustering made no progress; decomposition cannot finish")
        for v in covered:
            color[v] = c
        remaining -= covered
        runs.append(run)
        c += 1
    return Decomposition(colors_used=c, color=tuple(color)), tuple(runs)


def mis_via_decomposition(g: Graph, ids: IdAssignment, d: Decomposition) -> list[int]:
    """Maximal independent set built color class by color class.

    Within each cluster of the current color, nodes join greedily in
    ascending identifier order unless a neighbor already joined.  Same-color
    clusters are non-adjacent, so their greedy passes cannot interact.
    """
    chosen: set[int] = set()
    for c in range(d.colors_used):
        color_class = [v for v in range(g.n) if d.color[v] == c]
        for comp in connected_components(g, color_class):
            for v in sorted(comp, key=lambda x: ids.ids[x]):
                if not any(w in chosen for w in g.adj[v]):
                    chosen.add(v)
    return sorted(chosen)
