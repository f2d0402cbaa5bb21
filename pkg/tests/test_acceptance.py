"""Acceptance suite: one test per criterion, each printing its verdict line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The corpus is defined in
conftest.py; heavyweight sweeps are computed once in session fixtures and
shared across criteria.
"""

from __future__ import annotations

import itertools
import time
from math import ceil, log2

import pytest

from conftest import corpus_entries
from strongcluster.cluster import (
    mis_via_decomposition,
    network_decomposition,
    strong_cluster,
)
from strongcluster.graph import build_graph, connected_components, multi_source_bfs
from strongcluster.phase import Proposal
from strongcluster.sim import message_bit_budget, round_budget, run_protocol
from strongcluster.verify import (
    check_clustering,
    check_decomposition,
    check_mis,
    check_step_invariants,
)

FULL_MAX_N = 4096
SIM_MAX_N = 512
DEBUG_MAX_N = 128


@pytest.fixture(scope="session")
def full_runs():
    """Reference clusterings of the whole corpus, with the sweep wall time."""
    t0 = time.time()
    out = [
        (name, g, ids, strong_cluster(g, ids).clustering)
        for name, g, ids in corpus_entries(FULL_MAX_N)
    ]
    return out, time.time() - t0


@pytest.fixture(scope="session")
def sim_runs():
    """Simulated runs beside fresh reference runs for every corpus graph n <= 512."""
    out = []
    for name, g, ids in corpus_entries(SIM_MAX_N):
        clustering, stats, phases = run_protocol(g, ids)
        ref = strong_cluster(g, ids)
        out.append((name, g, ids, clustering, stats, phases, ref))
    return out


@pytest.fixture(scope="session")
def decompositions():
    return [
        (name, g, ids, network_decomposition(g, ids)[0])
        for name, g, ids in corpus_entries(FULL_MAX_N)
    ]


def test_c01_coverage(full_runs):
    runs, elapsed = full_runs
    for name, g, ids, clustering in runs:
        need = ceil(clustering.n / 2)
        assert clustering.covered() >= need, (
            f"{name}: covered {clustering.covered()} < {need}"
        )
    assert elapsed < 600, f"corpus sweep took {elapsed:.0f}s, budget 600s"
    print(f"\nACCEPTANCE C1 coverage >= n/2 on {len(runs)} corpus graphs "
          f"({elapsed:.0f}s sweep): PASS")


def test_c02_cluster_diameter(full_runs):
    from strongcluster.graph import induced_diameter

    runs, _ = full_runs
    observed_worst = 0
    for name, g, ids, clustering in runs:
        bound = 8 * ids.b**3
        radius_bound = 4 * ids.b**3
        for terminal, members in clustering.clusters:
            # The terminal's eccentricity inside the cluster certifies
            # diameter <= 2 * radius; small clusters additionally get the
            # exact all-pairs diameter.
            dm = multi_source_bfs(g, members, [terminal])
            dists = [dm.dist[v] for v in members]
            assert all(d is not None for d in dists), (
                f"{name}: cluster of terminal {terminal} disconnected"
            )
            ecc = max(dists)
            assert ecc <= radius_bound, (
                f"{name}: terminal eccentricity {ecc} > {radius_bound}"
            )
            if len(members) <= 256:
                diam = induced_diameter(g, members)
                assert diam is not None and diam <= bound, (
                    f"{name}: diameter {diam} > {bound}"
                )
                observed_worst = max(observed_worst, diam)
            else:
                observed_worst = max(observed_worst, ecc)
    print(f"\nACCEPTANCE C2 cluster diameter <= 8b^3 (worst observed distance "
          f"{observed_worst}): PASS")


def test_c03_separation(full_runs):
    runs, _ = full_runs
    for name, g, ids, clustering in runs:
        owner: dict[int, int] = {}
        for idx, (terminal, members) in enumerate(clustering.clusters):
            assert terminal in members, f"{name}: terminal outside cluster"
            comps = connected_components(g, members)
            assert len(comps) == 1, f"{name}: cluster {idx} disconnected"
            for v in members:
                assert v not in owner, f"{name}: node {v} in two clusters"
                owner[v] = idx
        for u, v in g.edges():
            cu, cv = owner.get(u), owner.get(v)
            assert cu is None or cv is None or cu == cv, (
                f"{name}: edge ({u},{v}) joins clusters {cu} and {cv}"
            )
    print(f"\nACCEPTANCE C3 separation/connectivity/terminals on {len(runs)} "
          f"graphs: PASS")


def test_c04_phase_invariants():
    checked_phases = 0
    for name, g, ids, in corpus_entries(SIM_MAX_N, id_seeds=(None, 11, 22)):
        n, b = g.n, ids.b
        debug = n <= DEBUG_MAX_N
        run = strong_cluster(g, ids, debug=debug)
        alive = set(range(n))
        for p, phase in enumerate(run.phases):
            assert 2 * b * len(phase.deleted) <= n, (
                f"{name}: phase {p} deleted {len(phase.deleted)} > n/(2b)"
            )
            alive -= set(phase.deleted)
            dm = multi_source_bfs(g, alive, set(phase.terminals_out))
            limit = 4 * b * b * (p + 1)
            for v in alive:
                assert dm.dist[v] is not None and dm.dist[v] <= limit, (
                    f"{name}: phase {p} ruling radius broken at {v}"
                )
            if debug:
                report = check_step_invariants(g, phase, ids)
                assert report.all_pass, f"{name} phase {p}:\n{report.to_text()}"
            checked_phases += 1
        assert 2 * len(alive) >= n, f"{name}: final survivors below half"
    print(f"\nACCEPTANCE C4 per-phase deletion/ruling/step invariants over "
          f"{checked_phases} phases: PASS")


def test_c05_backend_equivalence(sim_runs):
    for name, g, ids, clustering, stats, phases, ref in sim_runs:
        assert clustering == ref.clustering, f"{name}: backends disagree"
        for sp, rp in zip(phases, ref.phases):
            assert sp.survivors == rp.survivors, f"{name}: phase {rp.p} survivors differ"
            assert sp.terminals_out == rp.terminals_out, f"{name}: phase {rp.p} terminals differ"
            assert sp.final_forest.parent == rp.final_forest.parent, (
                f"{name}: phase {rp.p} forests differ"
            )
    print(f"\nACCEPTANCE C5 backend equivalence on {len(sim_runs)} graphs "
          f"(n <= {SIM_MAX_N}): PASS")


def test_c06_round_accounting(sim_runs):
    for name, g, ids, clustering, stats, _, _ in sim_runs:
        assert stats.rounds == round_budget(g.n, ids.b), f"{name}: round count drift"
        assert stats.max_message_bits <= message_bit_budget(ids.b), (
            f"{name}: oversized message"
        )
    g, ids = build_graph(2, [(0, 1)])
    _, stats, _ = run_protocol(g, ids)
    assert stats.rounds == 61
    print(f"\nACCEPTANCE C6 exact round accounting ({len(sim_runs)} runs, "
          f"K2 = 61 rounds): PASS")


def test_c07_round_scaling():
    from strongcluster.gen import FamilySpec, generate

    ratios = []
    for exp in range(4, 13):
        n = 1 << exp
        g, ids = generate(FamilySpec("path", n=n))
        _, stats, _ = run_protocol(g, ids)
        assert stats.rounds == round_budget(n, ids.b)
        ratios.append((n, stats.rounds / ids.b**6))
    bound = max(r for _, r in ratios)
    assert bound <= 61
    for (_, a), (_, b_) in zip(ratios, ratios[1:]):
        assert b_ <= a * 1.10, "rounds/b^6 trend increased beyond tolerance"
    print(f"\nACCEPTANCE C7 rounds/b^6 bounded by {bound:.2f}, non-increasing "
          f"across n=16..4096 (measured rounds): PASS")


def test_c08_decomposition(decompositions):
    for name, g, ids, d in decompositions:
        bound = (ceil(log2(g.n)) + 1) if g.n > 1 else 1
        assert d.colors_used <= bound, f"{name}: {d.colors_used} colors > {bound}"
        if g.n <= SIM_MAX_N:
            report = check_decomposition(g, d, ids.b, ids)
            assert report.all_pass, f"{name}:\n{report.to_text()}"
    print(f"\nACCEPTANCE C8 decomposition colors <= ceil(log2 n)+1 on "
          f"{len(decompositions)} graphs: PASS")


def test_c09_mis(decompositions):
    for name, g, ids, d in decompositions:
        s = mis_via_decomposition(g, ids, d)
        report = check_mis(g, s, ids)
        assert report.all_pass, f"{name}:\n{report.to_text()}"
    print(f"\nACCEPTANCE C9 MIS independence/maximality on "
          f"{len(decompositions)} graphs: PASS")


def _connected(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    return len({find(v) for v in range(n)}) == 1


def test_c10_exhaustive_small_graphs():
    t0 = time.time()
    total = 0
    for n in range(1, 7):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            if not _connected(n, edges):
                continue
            g, ids = build_graph(n, edges)
            run = strong_cluster(g, ids)
            report = check_clustering(g, run.clustering, ids.b, ids)
            assert report.all_pass, (
                f"n={n} edges={edges}:\n{report.to_text()}"
            )
            total += 1
    elapsed = time.time() - t0
    assert elapsed < 120, f"exhaustive sweep took {elapsed:.0f}s, budget 120s"
    print(f"\nACCEPTANCE C10 exhaustive sweep of {total} connected graphs "
          f"(n <= 6) in {elapsed:.0f}s: PASS")


def test_c11_hand_traces():
    g, ids = build_graph(2, [(0, 1)])
    ref = strong_cluster(g, ids)
    phase = ref.phases[0]
    assert phase.step_traces[0].proposals == (
        Proposal(proposer=1, weight=1, attach_at=0, target_root=0),
    )
    assert phase.step_traces[0].grows == (0,)
    assert phase.step_traces[1].proposals == ()
    assert phase.terminals_out == (0,)
    assert phase.deleted == ()
    assert ref.clustering.clusters == ((0, (0, 1)),)

    g, ids = build_graph(3, [(0, 1), (1, 2)])
    ref = strong_cluster(g, ids)
    p0, p1 = ref.phases
    assert p0.step_traces[0].proposals == (
        Proposal(proposer=2, weight=1, attach_at=1, target_root=1),
    )
    assert p0.step_traces[0].grows == (1,)
    assert p0.terminals_out == (0, 1)
    assert p0.final_forest.root_of == [0, 1, 1]
    assert p1.step_traces[0].proposals == (
        Proposal(proposer=1, weight=2, attach_at=0, target_root=0),
    )
    assert p1.terminals_out == (0,)
    assert p1.final_forest.depth == [0, 1, 2]
    assert ref.clustering.clusters == ((0, (0, 1, 2)),)

    sim_clustering, stats, sim_phases = run_protocol(g, ids)
    assert sim_clustering == ref.clustering
    assert [ph.terminals_out for ph in sim_phases] == [(0, 1), (0,)]
    print("\nACCEPTANCE C11 hand-trace fixtures (K2, P3): PASS")
