from collections import deque

import pytest

from strongcluster.graph import (
    GraphError,
    build_graph,
    connected_components,
    default_bits,
    induced_diameter,
    multi_source_bfs,
    parse_edge_list,
    write_edge_list,
)
from strongcluster.gen import splitmix_at


def bfs_oracle(adj, alive, source):
    """Plain one-source BFS, kept independent of the library under test."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w in alive and w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def random_graph(n, edge_prob_q, seed):
    """Seeded graph via the package PRNG; q is a per-pair keep threshold in 1/64ths."""
    edges = []
    k = 0
    for u in range(n):
        for v in range(u + 1, n):
            if splitmix_at(seed, k) % 64 < edge_prob_q:
                edges.append((u, v))
            k += 1
    return build_graph(n, edges)


def test_build_smallest_nontrivial():
    g, ids = build_graph(2, [(0, 1)])
    assert g.adj[0] == (1,)
    assert g.adj[1] == (0,)
    assert ids.b == 1
    assert ids.ids == (0, 1)


def test_build_single_node():
    g, ids = build_graph(1, [])
    assert g.n == 1 and g.edge_count == 0
    assert ids.b == 1


def test_build_collapses_duplicates():
    g, _ = build_graph(3, [(0, 1), (1, 0), (1, 2)])
    assert g.edge_count == 2
    assert g.adj[1] == (0, 2)


def test_build_rejects_self_loop():
    with pytest.raises(GraphError):
        build_graph(2, [(1, 1)])


def test_build_rejects_id_collision():
    with pytest.raises(GraphError):
        build_graph(2, [(0, 1)], ids=[3, 3])


def test_build_rejects_oversized_id():
    with pytest.raises(GraphError):
        build_graph(2, [(0, 1)], ids=[0, 4], b=2)


def test_build_rejects_small_bits():
    with pytest.raises(GraphError):
        build_graph(8, [], b=2)


@pytest.mark.parametrize("n,b", [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (1024, 10), (1025, 11)])
def test_default_bits(n, b):
    assert default_bits(n) == b


def test_bfs_path_distances():
    g, _ = build_graph(3, [(0, 1), (1, 2)])
    dm = multi_source_bfs(g, {0, 1, 2}, {0})
    assert dm.dist == (0, 1, 2)
    assert dm.parent == (None, 0, 1)
    assert dm.origin == (0, 0, 0)


def test_bfs_tie_rule_prefers_min_identifier():
    g, _ = build_graph(3, [(0, 1), (1, 2)])
    dm = multi_source_bfs(g, {0, 1, 2}, {0, 2})
    assert dm.dist == (0, 1, 0)
    assert dm.parent[1] == 0
    assert dm.origin[1] == 0


def test_bfs_tie_rule_follows_permuted_identifiers():
    # Same shape, but node 2 now carries the smaller identifier.
    g, ids = build_graph(3, [(0, 1), (1, 2)], ids=[2, 1, 0])
    dm = multi_source_bfs(g, {0, 1, 2}, {0, 2}, ids)
    assert dm.parent[1] == 2
    assert dm.origin[1] == 2


def test_bfs_unreachable_component():
    g, _ = build_graph(4, [(0, 1), (2, 3)])
    dm = multi_source_bfs(g, {0, 1, 2, 3}, {0})
    assert dm.dist[2] is None and dm.dist[3] is None
    assert dm.origin[2] is None


def test_bfs_rejects_source_outside_alive():
    g, _ = build_graph(2, [(0, 1)])
    with pytest.raises(GraphError):
        multi_source_bfs(g, {0}, {1})


def test_bfs_matches_per_source_oracle_on_random_graphs():
    for seed in range(8):
        n = 8 * (seed + 1)
        g, _ = random_graph(n, 3, seed)
        alive = set(v for v in range(n) if v % 7 != 3)
        sources = set(v for v in alive if v % 5 == 0)
        if not sources:
            continue
        dm = multi_source_bfs(g, alive, sources)
        per_source = [bfs_oracle(g.adj, alive, s) for s in sources]
        for v in alive:
            expect = min((d[v] for d in per_source if v in d), default=None)
            assert dm.dist[v] == expect


def test_bfs_matches_oracle_exhaustively_on_tiny_graphs():
    # All graphs on up to 5 labeled nodes, two source patterns each.
    import itertools

    for n in range(2, 6):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            g, _ = build_graph(n, edges)
            alive = set(range(n))
            for sources in ({0}, {0, n - 1}):
                dm = multi_source_bfs(g, alive, sources)
                per_source = [bfs_oracle(g.adj, alive, s) for s in sources]
                for v in alive:
                    expect = min((d[v] for d in per_source if v in d), default=None)
                    assert dm.dist[v] == expect


def test_components_k2():
    g, _ = build_graph(2, [(0, 1)])
    assert connected_components(g, {0, 1}) == [[0, 1]]


def test_components_isolated_nodes():
    g, _ = build_graph(2, [])
    assert connected_components(g, {0, 1}) == [[0], [1]]


def test_components_middle_removed():
    g, _ = build_graph(3, [(0, 1), (1, 2)])
    assert connected_components(g, {0, 2}) == [[0], [2]]


def test_components_partition_property():
    for seed in range(6):
        g, _ = random_graph(24, 4, seed + 100)
        alive = set(range(0, 24, 1)) - {5, 11}
        comps = connected_components(g, alive)
        flat = [v for c in comps for v in c]
        assert sorted(flat) == sorted(alive)
        assert len(set(flat)) == len(flat)
        assert [c[0] for c in comps] == sorted(c[0] for c in comps)


def test_diameter_triangle():
    g, _ = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert induced_diameter(g, {0, 1, 2}) == 1


def test_diameter_path():
    g, _ = build_graph(3, [(0, 1), (1, 2)])
    assert induced_diameter(g, {0, 1, 2}) == 2


def test_diameter_disconnected_induced():
    g, _ = build_graph(3, [(0, 1), (1, 2)])
    assert induced_diameter(g, {0, 2}) is None


def test_diameter_rejects_empty():
    g, _ = build_graph(1, [])
    with pytest.raises(GraphError):
        induced_diameter(g, set())


def test_diameter_monotone_under_added_edges():
    base, _ = build_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
    more, _ = build_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)])
    s = {0, 1, 2, 3, 4, 5}
    assert induced_diameter(more, s) <= induced_diameter(base, s)


def test_edge_list_roundtrip():
    g, ids = build_graph(4, [(0, 1), (1, 2), (2, 3)], ids=[3, 2, 1, 0])
    text = write_edge_list(g, ids)
    g2, ids2 = parse_edge_list(text)
    assert g2.adj == g.adj
    assert ids2.ids == ids.ids


def test_edge_list_default_ids_omitted():
    g, ids = build_graph(2, [(0, 1)])
    assert write_edge_list(g, ids) == "2 1\n0 1\n"


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("2\n0 1\n", 1),
        ("2 1\n0\n", 2),
        ("2 1\n0 x\n", 2),
        ("2 2\n0 1\n", 2),
        ("2 1\n0 2\n", 2),
        ("2 1\n1 1\n", 2),
        ("2 1\n0 1\nid 0\n", 3),
        ("2 1\n0 1\nid 0\nidx 1\n", 4),
    ],
)
def test_edge_list_rejects_with_line_number(text, line):
    with pytest.raises(GraphError, match=f"line {line}"):
        parse_edge_list(text)
