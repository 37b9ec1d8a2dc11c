import math

import pytest
from hypothesis import given, settings, strategies as st

from distlabel import (
    Graph,
    UnresolvedError,
    certificate_check,
    chromatic_exact,
    complete_graph,
    cycle_graph,
    hamming_graph,
    lambda_exact,
    nlambda_exact,
    nsigma_exact,
    path_graph,
    sigma_exact,
    star_graph,
    verify_cyclic,
    verify_linear,
)
from distlabel.solver import all_invariants, feasible_linear, max_clique, nsigma_window

from oracles import brute_chromatic, brute_lambda, brute_nlambda, brute_nsigma, brute_sigma
from test_graphs import small_graphs

H21 = "2,1"


@pytest.mark.parametrize("G, value", [(path_graph(3), 3), (cycle_graph(4), 4), (star_graph(4), 4)])
def test_lambda_21_known(G, value):
    res = lambda_exact(G, H21)
    assert res.value == value
    assert verify_linear(G, H21, res.witness).passed


def test_c4_all_variants():
    C4 = cycle_graph(4)
    assert sigma_exact(C4, H21).value == 5
    assert nlambda_exact(C4, H21).value == math.inf
    assert nsigma_exact(C4, H21).value == math.inf
    assert nlambda_exact(C4, H21).to_json()["value"] == "infinity"


def test_sigma_witness_is_cyclic():
    res = sigma_exact(cycle_graph(5), H21)
    assert res.witness.mode == "cyclic" and res.witness.k == res.value + 1
    assert verify_cyclic(cycle_graph(5), H21, res.witness).passed


def test_complete_graph_no_hole_impossible():
    for q in range(2, 6):
        assert nlambda_exact(complete_graph(q), "2,1,1").value == math.inf


@pytest.mark.parametrize("h1", [1, 2, 3])
@pytest.mark.parametrize("q", [2, 3, 4, 5, 6])
def test_complete_graph_lambda(h1, q):
    assert lambda_exact(complete_graph(q), h1).value == h1 * (q - 1)


def test_oracle_mode_agrees():
    for G in (path_graph(3), cycle_graph(4), complete_graph(3)):
        for fn in (lambda_exact, sigma_exact, nlambda_exact, nsigma_exact):
            assert fn(G, H21).value == fn(G, H21, oracle=True).value


def test_budget_exhaustion_raises_unresolved():
    with pytest.raises(UnresolvedError) as info:
        lambda_exact(hamming_graph([3, 3]), "2,1", budget=5)
    exc = info.value
    assert exc.invariant == "lambda" and exc.lo <= exc.hi


def test_nonmonotone_h_rejected():
    with pytest.raises(ValueError):
        lambda_exact(path_graph(3), "1,2")


def test_feasible_linear():
    assert feasible_linear(path_graph(3), H21, 3) is not None
    assert feasible_linear(path_graph(3), H21, 2) is None


def test_nsigma_window():
    assert nsigma_window(4, 2) == 7
    assert nsigma_window(4, 0) == 6


def test_disconnected_graph():
    G = Graph(4, [(0, 1), (2, 3)])
    assert lambda_exact(G, H21).value == 2
    assert nlambda_exact(G, H21).value == brute_nlambda(G, (2, 1))


def test_single_vertex():
    G = Graph(1)
    inv = all_invariants(G, H21)
    assert {k: r.value for k, r in inv.items()} == {"lambda": 0, "sigma": 0, "nlambda": 0, "nsigma": 0}


@settings(max_examples=40)
@given(small_graphs(max_n=5), st.sampled_from([(1,), (2, 1), (1, 1), (2, 1, 1), (3, 1)]))
def test_against_exhaustive_enumeration(G, h):
    inv = all_invariants(G, h)
    assert inv["lambda"].value == brute_lambda(G, h)
    assert inv["sigma"].value == brute_sigma(G, h)
    assert inv["nlambda"].value == brute_nlambda(G, h)
    assert inv["nsigma"].value == brute_nsigma(G, h, G.n + h[0])


@settings(max_examples=30)
@given(small_graphs(max_n=6))
def test_chromatic_against_enumeration(G):
    res = chromatic_exact(G)
    assert res.value == brute_chromatic(G)
    labels = res.witness.labels
    assert all(labels[u] != labels[v] for u, v in G.edges())


def test_max_clique():
    assert len(max_clique(complete_graph(5))) == 5
    assert len(max_clique(cycle_graph(5))) == 2


def test_certificate_check():
    H = hamming_graph([19, 2, 2, 2])
    S = [v for v in range(H.n) if H.decode(v)[3] == 0]
    cert = certificate_check(H, S, 3)
    assert cert.accepted and cert.order == 76 and cert.diameter == 3 and cert.bound == 75
    assert not certificate_check(H, range(H.n), 3).accepted
    assert certificate_check(H, range(H.n), 3).bound is None
    with pytest.raises(ValueError):
        certificate_check(H, [], 3)


def test_certificate_disconnected_set_rejected():
    cert = certificate_check(path_graph(5), [0, 4], 10)
    assert not cert.accepted and cert.to_json()["diameter"] == "infinity"


def test_solve_result_json():
    res = lambda_exact(path_graph(3), H21)
    data = res.to_json()
    assert data["invariant"] == "lambda" and data["value"] == 3
    assert data["witness"]["mode"] == "linear"
