import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from distlabel import (
    Graph,
    bounded_distances,
    cartesian_product,
    complete_graph,
    cycle_graph,
    diameter,
    graph_from_edges,
    graph_power,
    hamming_graph,
    hypercube,
    induced_subgraph,
    path_graph,
    product_distance,
    star_graph,
)
from distlabel.jsonio import graph_from_json, read_dimacs, write_dimacs

from oracles import all_distances, to_nx


@st.composite
def small_graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, chosen)


def test_graph_rejects_bad_input():
    with pytest.raises(ValueError):
        Graph(0)
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])


def test_duplicate_edges_collapse():
    g = Graph(3, [(0, 1), (1, 0), (0, 1)])
    assert g.num_edges == 1
    assert g.edges() == [(0, 1)]


@pytest.mark.parametrize("make, n, m", [
    (lambda: complete_graph(5), 5, 10),
    (lambda: path_graph(4), 4, 3),
    (lambda: cycle_graph(6), 6, 6),
    (lambda: star_graph(4), 4, 3),
    (lambda: hypercube(4), 16, 32),
    (lambda: hamming_graph([3, 3]), 9, 18),
])
def test_generator_sizes(make, n, m):
    g = make()
    assert (g.n, g.num_edges) == (n, m)


def test_cycle_needs_three_vertices():
    with pytest.raises(ValueError):
        cycle_graph(2)


def test_hamming_19_2_2_2_order():
    H = hamming_graph([19, 2, 2, 2])
    assert H.n == 152
    assert all(H.degree(v) == 18 + 3 for v in range(H.n))


def test_row_major_codec():
    H = hamming_graph([3, 2, 2])
    assert H.encode((2, 1, 0)) == 10
    assert H.decode(10) == (2, 1, 0)
    for v in range(H.n):
        assert H.encode(H.decode(v)) == v
    with pytest.raises(ValueError):
        H.encode((3, 0, 0))


def test_product_matches_networkx():
    a, b = path_graph(3), cycle_graph(4)
    mine = cartesian_product([a, b])
    theirs = nx.cartesian_product(to_nx(a), to_nx(b))
    relabel = {(x, y): x * 4 + y for x, y in theirs.nodes()}
    expected = {tuple(sorted((relabel[u], relabel[v]))) for u, v in theirs.edges()}
    assert set(mine.edges()) == expected


def test_product_distance_is_sum_of_factor_distances():
    H = cartesian_product([path_graph(3), cycle_graph(5), complete_graph(2)])
    ref = all_distances(H)
    for u in range(0, H.n, 7):
        row = H.distance_row(u)
        for v in range(H.n):
            assert row[v] == ref[u][v]
            assert product_distance(H, u, v) == ref[u][v]


def test_product_distance_disconnected_factor():
    H = cartesian_product([Graph(2), complete_graph(2)])
    assert product_distance(H, (0, 0), (1, 0)) == math.inf
    assert H.distance_row(0)[H.encode((1, 0))] == -1


def test_cartesian_product_needs_factors():
    with pytest.raises(ValueError):
        cartesian_product([])


@given(small_graphs(), st.integers(0, 6), st.integers(0, 4))
def test_bounded_distances_agree_with_bfs(G, src, cutoff):
    src = src % G.n
    ref = all_distances(G)[src]
    got = bounded_distances(G, src, cutoff)
    assert got == {v: d for v, d in ref.items() if d <= cutoff}


@given(small_graphs(), st.integers(1, 4))
def test_power_matches_networkx(G, l):
    P = graph_power(G, l)
    ref = nx.power(to_nx(G), l) if G.num_edges else to_nx(G)
    assert set(P.edges()) == {tuple(sorted(e)) for e in ref.edges()}


def test_power_rejects_zero():
    with pytest.raises(ValueError):
        graph_power(path_graph(3), 0)


@given(small_graphs())
def test_diameter(G):
    g = to_nx(G)
    expected = nx.diameter(g) if nx.is_connected(g) else math.inf
    assert diameter(G) == expected


def test_hypercube_diameter():
    assert diameter(hypercube(5)) == 5
    assert diameter(hamming_graph([19, 2, 2])) == 3


def test_induced_subgraph_maps_back():
    G = cycle_graph(6)
    K, back = induced_subgraph(G, [4, 0, 5])
    assert back == [0, 4, 5]
    assert set(K.edges()) == {(1, 2), (0, 2)}
    with pytest.raises(ValueError):
        induced_subgraph(G, [])


def test_json_round_trip_plain_and_product():
    g = graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], name="C4")
    assert graph_from_json(g.to_json()) == g
    H = hamming_graph([3, 2])
    back = graph_from_json(H.to_json())
    assert back == H and back.orders == (3, 2)


def test_product_json_with_wrong_edges_rejected():
    data = hamming_graph([2, 2]).to_json()
    data["edges"] = data["edges"][:-1]
    with pytest.raises(ValueError):
        graph_from_json(data)


def test_dimacs_round_trip():
    text = "c tiny\np edge 4 3\ne 1 2\ne 2 3\ne 3 4\n"
    g = read_dimacs(text)
    assert g == path_graph(4)
    assert read_dimacs(write_dimacs(g)) == g


@pytest.mark.parametrize("text", ["e 1 2\n", "p edge 3 1\nx 1 2\n", "c only\n", "p\n"])
def test_dimacs_errors(text):
    with pytest.raises(ValueError):
        read_dimacs(text)


def test_distance_matrix_symmetric():
    D = hypercube(3).distance_matrix()
    assert np.array_equal(D, D.T)
    assert D.max() == 3
