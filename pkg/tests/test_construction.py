import numpy as np
import pytest
from hypothesis import given, strategies as st

from distlabel import (
    HVector,
    complete_graph,
    cycle_graph,
    hamming_graph,
    no_hole_cyclic,
    path_graph,
    verify_cyclic,
    verify_linear,
)
from distlabel.construction import (
    ConstructionContext,
    ConstructionStuck,
    OffsetSet,
    case1_filter_psi,
    choose_offset,
    construct_labelling,
    decode,
    encode,
    order_blocked,
    phi_evaluate,
    radix_spec,
    relabel,
    residue,
    residue_class_order,
    slice_pair_ok,
    translation_reach,
)

from oracles import violations


def test_radix_spec_suffix_products():
    spec = radix_spec(3, 2, 2)
    assert spec.suffix == (12, 4, 2, 1)
    assert spec.modulus == 12 and spec.l == 3
    assert radix_spec([3, 2, 2]) == spec


def test_encode_decode_examples():
    spec = radix_spec(3, 2, 2)
    assert encode(spec, (2, 1, 0)) == 10
    assert decode(spec, 10) == (2, 1, 0)
    with pytest.raises(ValueError):
        encode(spec, (3, 0, 0))
    with pytest.raises(ValueError):
        decode(spec, 12)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4), st.data())
def test_encode_decode_bijection(radices, data):
    spec = radix_spec(radices)
    value = data.draw(st.integers(0, spec.modulus - 1))
    assert encode(spec, decode(spec, value)) == value


@pytest.mark.parametrize("x, ql, r", [(0, 2, 0), (7, 3, 1), (5, 1, 0)])
def test_residue(x, ql, r):
    assert residue(x, ql) == r


def _ctx_322():
    return ConstructionContext.build([complete_graph(3), complete_graph(2)], complete_graph(2), 2)


def test_phi_evaluate_examples():
    ctx = _ctx_322()
    A = OffsetSet((3, 2))
    assert phi_evaluate(ctx, A, (2, 1, 0)) == 10
    A.append((1, 1))
    assert phi_evaluate(ctx, A, (2, 0, 1)) == 3
    with pytest.raises(ValueError):
        phi_evaluate(ctx, OffsetSet((3, 2)), (0, 0, 1))


def test_offset_set_validation():
    A = OffsetSet((3, 2))
    with pytest.raises(ValueError):
        A.append((3, 0))
    with pytest.raises(ValueError):
        OffsetSet((3, 2), [(1, 0)])


def test_slice_pair_ok_examples():
    ctx = _ctx_322()
    A = OffsetSet((3, 2))
    assert slice_pair_ok(ctx, A, (0, 0, 0), (2, 1, 0))
    A.append((0, 0))
    # same prefix, adjacent slices, equal offsets: labels 1 apart but q_l = 2 needed
    assert not slice_pair_ok(ctx, A, (1, 0, 1), (1, 0, 0))
    with pytest.raises(ValueError):
        slice_pair_ok(ctx, A, (1, 0, 1), (1, 0, 1))


def test_slice_pair_ok_far_pairs_vacuous():
    ctx = ConstructionContext.build([path_graph(4), path_graph(4)], complete_graph(2), 1)
    A = OffsetSet((4, 4), [(0, 0), (0, 0)])
    # distance 3 + 3 + 1 = 7 > l = 3
    assert slice_pair_ok(ctx, A, (0, 0, 1), (3, 3, 0))


def test_psi_filter():
    ctx = ConstructionContext.build([complete_graph(19), complete_graph(2)],
                                    hamming_graph([2, 2]), 2)
    a = (4, 1)
    assert not case1_filter_psi(ctx, a, a)
    assert not case1_filter_psi(ctx, a, (4, 0))  # psi = 1 * q_l
    assert not case1_filter_psi(ctx, a, (3, 0))  # psi = N_1 - q_l
    assert case1_filter_psi(ctx, a, (3, 1))
    assert case1_filter_psi(ctx, a, (5, 1))
    rejected = sum(not case1_filter_psi(ctx, a, (z1, z2)) for z1 in range(19) for z2 in range(2))
    assert rejected == 3


def test_psi_filter_agrees_with_direct_check():
    # a Case-1 pair (same prefix, different slices) can only fail if the filter rejects
    ctx = ConstructionContext.build([complete_graph(7), complete_graph(2)], complete_graph(3), 2)
    base = OffsetSet((7, 2))
    for z1 in range(7):
        for z2 in range(2):
            A = OffsetSet((7, 2), [(0, 0), (z1, z2)])
            for p1 in range(7):
                for p2 in range(2):
                    if not slice_pair_ok(ctx, A, (p1, p2, 1), (p1, p2, 0)):
                        assert not case1_filter_psi(ctx, base[0], (z1, z2))


def test_minimum_order_factor_moved_last():
    ctx = ConstructionContext.build([complete_graph(2), complete_graph(5), complete_graph(4)],
                                    complete_graph(2), 2)
    assert ctx.permutation == (2, 1, 0)
    assert ctx.spec.radices == (4, 5, 2, 2)


def test_context_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ConstructionContext.build([complete_graph(3)], complete_graph(2), 1)
    with pytest.raises(ValueError):
        ConstructionContext.build([complete_graph(3), complete_graph(2)], complete_graph(2), 3)


def test_hamming_19_2_2_2():
    c = construct_labelling([complete_graph(19), complete_graph(2)], hamming_graph([2, 2]), 2)
    assert c.value == 75 and c.modulus == 76
    trace = c.trace_json()
    assert len(trace["offsets"]) == 4 and trace["offsets"][0] == [0, 0]
    # at least 38 - 36 = 2 survivors at each step
    assert all(s >= 2 for s in trace["candidates_surviving_per_t"])
    rep = verify_cyclic(c.H, "2,1,1", c.labelling)
    assert rep.passed and rep.no_hole


def test_slice_zero_labels_are_multiples_of_ql():
    c = construct_labelling([complete_graph(19), complete_graph(2)], hamming_graph([2, 2]), 2)
    H = c.H
    zero = c.slice_order[0]
    slice0 = [v for v in range(H.n) if H.decode(v)[-1] == zero]
    labels = sorted(c.labelling.labels[v] for v in slice0)
    assert labels == list(range(0, 76, 2))


def test_labels_reported_on_original_coordinates():
    factors = [complete_graph(2), complete_graph(13)]
    c = construct_labelling(factors, complete_graph(2), 2)
    assert c.permutation == (1, 0)
    assert c.H.orders == (2, 13, 2)
    assert verify_cyclic(c.H, "2,1,1", c.labelling).passed
    assert verify_linear(c.H, "2,1,1", c.labelling.as_linear()).span == c.value


def test_construction_is_deterministic():
    args = ([complete_graph(10), complete_graph(2)], hamming_graph([2]), 2)
    assert construct_labelling(*args).labelling == construct_labelling(*args).labelling


def test_surjective_onto_modulus():
    c = construct_labelling([complete_graph(13), complete_graph(3)], complete_graph(2), 2)
    assert sorted(set(c.labelling.labels)) == list(range(c.modulus))
    assert no_hole_cyclic(c.labelling)


def test_equal_residue_adjacent_slices_are_unseparable():
    # row-major K2 x K2: slices 0 and 2 are adjacent and share residue 0 mod 2
    ctx = ConstructionContext.build([complete_graph(19), complete_graph(2)],
                                    hamming_graph([2, 2]), 2)
    reach = translation_reach(ctx)
    assert reach == 2
    assert order_blocked(hamming_graph([2, 2]), 2, reach, 3) == (0, 2)
    A = OffsetSet((19, 2), [(0, 0), (1, 0)])
    with pytest.raises(ConstructionStuck) as info:
        choose_offset(ctx, A)
    assert info.value.t == 2 and len(info.value.failures) == 38
    with pytest.raises(ConstructionStuck):
        construct_labelling([complete_graph(19), complete_graph(2)], hamming_graph([2, 2]), 2,
                            slice_order=[0, 1, 2, 3])


def test_residue_class_order_separates_classes():
    G = hamming_graph([3, 3])
    order = residue_class_order(G, 3, 1)
    assert sorted(order) == list(range(9))
    G2 = relabel(G, order)
    D = G2.distance_matrix()
    for x in range(9):
        for y in range(x + 3, 9, 3):
            assert D[x, y] >= 2
    assert residue_class_order(complete_graph(4), 2, 1) is None


def test_explicit_slice_order_validated():
    with pytest.raises(ValueError):
        construct_labelling([complete_graph(19), complete_graph(2)], hamming_graph([2, 2]), 2,
                            slice_order=[0, 1, 1, 3])


def test_psi_filter_option_still_valid():
    c = construct_labelling([complete_graph(19), complete_graph(2)], hamming_graph([2, 2]), 2,
                            use_psi_filter=True)
    assert verify_cyclic(c.H, "2,1,1", c.labelling).passed


def test_undersized_instance_is_stuck_or_valid():
    try:
        c = construct_labelling([complete_graph(2), complete_graph(2)], complete_graph(6), 2)
    except ConstructionStuck as exc:
        assert exc.t >= 1 and exc.failures
    else:
        assert verify_cyclic(c.H, "2,1,1", c.labelling).passed


def test_hypercube_and_ternary_hamming():
    q8 = construct_labelling([complete_graph(2)] * 6, hamming_graph([2, 2]), 2)
    assert q8.value == 127
    h73 = construct_labelling([complete_graph(3)] * 5, hamming_graph([3, 3]), 3)
    assert h73.value == 728


def test_matches_bruteforce_verifier_small():
    c = construct_labelling([complete_graph(10), complete_graph(2)], complete_graph(2), 2)
    labels = c.labelling.labels
    assert violations(c.H, (2, 1, 1), labels, k=c.modulus) == []


def test_cycle_last_factor_given_order_works():
    c = construct_labelling([complete_graph(19), complete_graph(2)], cycle_graph(4), 2)
    assert c.slice_order_kind == "given"
    assert c.slice_order == (0, 1, 2, 3)
    assert np.array_equal(np.sort(np.unique(c.labelling.labels)), np.arange(76))
