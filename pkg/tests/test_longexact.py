"""Length-n exact sequences, resolutions, syzygies, classification."""

import random

import pytest

from extcalc.algebra import compose, identity_hom, make_hom, trivial_algebra
from extcalc.canonical import canonical_form
from extcalc.enumext import enumerate_ext1
from extcalc.errors import (
    ArityError,
    EndpointMismatchError,
    NotExactError,
    NotNormalError,
    UnsupportedVarietyError,
    ValidationError,
)
from extcalc.limits import Limits
from extcalc.longexact import (
    ExactSequence,
    sequence_from_ses,
    splice,
    validate_exact_sequence,
)
from extcalc.resolution import (
    build_resolution,
    coboundaries,
    cocycles,
    ext_via_resolution,
    yoneda_class_of,
)
from extcalc.ses import split_ses, validate_ses
from extcalc.syzygy import classify_extn, pullback_reduce, syzygy, syzygy_ses
from extcalc.varieties import (
    cyclic_group,
    cyclic_module,
    group_variety,
    klein_module,
    sym3,
)
from extcalc.zmodlin import (
    additive_order,
    free_module,
    free_rank,
    generator_elements,
    hom_from_generator_images,
    min_preimages,
    minimal_generators,
    module_span,
    require_modules,
    zero_module,
)

Z2M = cyclic_module(4, 2)
Z4M = cyclic_module(4, 4)
V4M = klein_module(4)
ZERO = zero_module(4)


def worked_sequence():
    """0 -> Z2 -> Z4 -> Z4 -> Z2 -> 0 with both middle maps times-2."""
    f3 = make_hom(Z2M, Z4M, (0, 2))
    f2 = make_hom(Z4M, Z4M, (0, 2, 0, 2))
    f1 = make_hom(Z4M, Z2M, (0, 1, 0, 1))
    return validate_exact_sequence((f3, f2, f1))


def nonsplit_seq():
    return sequence_from_ses(
        validate_ses(make_hom(Z2M, Z4M, (0, 2)), make_hom(Z4M, Z2M, (0, 1, 0, 1)))
    )


def split_seq():
    return sequence_from_ses(split_ses(Z2M, Z2M))


# ---------------------------------------------------------------------------
# validate_exact_sequence


def test_worked_length_two_sequence():
    seq = worked_sequence()
    assert seq.n == 2
    assert seq.kernel_object.size == 2
    assert seq.base.size == 2
    assert [a.size for a in seq.middle_objects()] == [4, 4]
    # both factorizations pass through the two element image {0, 2}
    assert [m.cod.size for m in seq.monos] == [4, 4, 2]
    assert [m.dom.size for m in seq.monos] == [2, 2, 2]
    assert tuple(seq.monos[1].map) == (0, 2)
    assert len(seq.junctions) == 2


def test_single_ses_roundtrip():
    e = validate_ses(make_hom(Z2M, Z4M, (0, 2)), make_hom(Z4M, Z2M, (0, 1, 0, 1)))
    seq = sequence_from_ses(e)
    assert seq.n == 1
    assert seq.maps == (e.k, e.q)
    assert len(seq.junctions) == 1


def test_junctions_reuse_factorizations():
    seq = worked_sequence()
    for j, e in enumerate(seq.junctions):
        assert e.k.map == seq.monos[j].map
        assert e.q.map == seq.epis[j + 1].map


def test_map_by_subscript_counts_from_the_base():
    seq = worked_sequence()
    assert seq.map_by_subscript(1).map == (0, 1, 0, 1)
    assert seq.map_by_subscript(3).map == (0, 2)
    with pytest.raises(IndexError):
        seq.map_by_subscript(0)
    with pytest.raises(IndexError):
        seq.map_by_subscript(4)


def test_rejects_single_map():
    with pytest.raises(ArityError):
        validate_exact_sequence((make_hom(Z2M, Z4M, (0, 2)),))


def test_rejects_non_composable_chain():
    f3 = make_hom(Z2M, Z4M, (0, 2))
    f1 = make_hom(Z2M, Z2M, (0, 1))
    with pytest.raises(EndpointMismatchError):
        validate_exact_sequence((f3, f1))


def test_rejects_nonsurjective_last_map():
    # zero middle map next to an injective-but-not-surjective final map
    f3 = identity_hom(Z2M)
    f2 = make_hom(Z2M, Z2M, (0, 0))
    f1 = make_hom(Z2M, Z4M, (0, 2))
    with pytest.raises(NotExactError) as info:
        validate_exact_sequence((f3, f2, f1))
    assert info.value.position == 1


def test_rejects_broken_middle_exactness():
    f3 = make_hom(Z2M, Z4M, (0, 2))
    f2 = make_hom(Z4M, Z4M, (0, 0, 0, 0))
    f1 = make_hom(Z4M, Z2M, (0, 1, 0, 1))
    with pytest.raises(NotExactError) as info:
        validate_exact_sequence((f3, f2, f1))
    assert info.value.position == 2


def test_rejects_non_normal_image():
    # a transposition subgroup of sym3 is not normal
    Z2 = cyclic_group(2)
    S3 = sym3()
    one = trivial_algebra(group_variety())
    k = make_hom(Z2, S3, (0, 1))
    q = make_hom(S3, one, (0,) * 6)
    with pytest.raises(NotNormalError) as info:
        validate_exact_sequence((k, q))
    assert info.value.position == 2


# ---------------------------------------------------------------------------
# splice


def test_splice_reproduces_worked_sequence():
    a, b = nonsplit_seq(), nonsplit_seq()
    s = splice(a, b)
    assert s.n == 2
    assert s.maps == worked_sequence().maps


def test_splice_endpoint_mismatch():
    a = sequence_from_ses(split_ses(Z4M, Z2M))
    with pytest.raises(EndpointMismatchError):
        splice(nonsplit_seq(), a)


def test_splice_mixed_orders_validate():
    for a, b in [(nonsplit_seq(), split_seq()), (split_seq(), nonsplit_seq())]:
        s = splice(a, b)
        assert isinstance(s, ExactSequence)
        assert s.n == 2
        assert s.kernel_object.size == 2 and s.base.size == 2


def test_splice_is_associative_on_maps():
    a, b, c = nonsplit_seq(), split_seq(), nonsplit_seq()
    left = splice(splice(a, b), c)
    right = splice(a, splice(b, c))
    assert left.maps == right.maps
    assert left.n == 3


# ---------------------------------------------------------------------------
# module utilities


def test_minimal_generators():
    assert minimal_generators(Z4M) == (1,)
    assert minimal_generators(Z2M) == (1,)
    assert minimal_generators(V4M) == (1, 2)
    assert minimal_generators(ZERO) == ()


def test_module_span_and_order():
    assert module_span(Z4M, ()) == frozenset({0})
    assert module_span(Z4M, (2,)) == frozenset({0, 2})
    assert [additive_order(Z4M, x) for x in range(4)] == [1, 4, 2, 4]


def test_free_module_shapes():
    assert free_module(4, 0).size == 1
    assert free_module(4, 2).size == 16
    assert generator_elements(4, 2) == (1, 4)
    assert free_rank(free_module(4, 2), 4) == 2
    assert free_rank(Z4M, 4) == 1
    assert free_rank(ZERO, 4) == 0


def test_hom_from_generator_images():
    h = hom_from_generator_images(Z4M, Z4M, (2,))
    assert h.map == (0, 2, 0, 2)
    P = free_module(4, 2)
    g = hom_from_generator_images(P, Z2M, (1, 0))
    # (u, v) with index u + 4v maps to u mod 2
    assert all(g.map[u + 4 * v] == u % 2 for u in range(4) for v in range(4))
    with pytest.raises(ValidationError):
        hom_from_generator_images(Z4M, Z4M, (1, 2))


def test_min_preimages():
    h = make_hom(Z4M, Z2M, (0, 1, 0, 1))
    assert min_preimages(h, (0, 1, 1)) == (0, 1, 1)
    with pytest.raises(ValidationError):
        min_preimages(make_hom(Z2M, Z4M, (0, 2)), (1,))


def test_require_modules_rejects_groups():
    with pytest.raises(UnsupportedVarietyError):
        require_modules(cyclic_group(2))
    assert require_modules(Z2M) == 4


# ---------------------------------------------------------------------------
# resolutions and the cohomological oracle


def test_periodic_resolution_of_z2():
    res = build_resolution(Z2M, 4)
    assert res.ranks == (1, 1, 1, 1, 1)
    assert res.matrices == (((2,),), ((2,),), ((2,),), ((2,),))
    assert res.augmentation.map == (0, 1, 0, 1)


def test_boundary_composites_vanish():
    for Q in (Z2M, Z4M, V4M):
        res = build_resolution(Q, 3)
        if res.boundaries:
            assert all(v == 0 for v in compose(res.augmentation, res.boundaries[0]).map)
        for i in range(len(res.boundaries) - 1):
            comp = compose(res.boundaries[i], res.boundaries[i + 1])
            assert all(v == 0 for v in comp.map)


def test_ext_orders_for_cyclic_pairs():
    for n in (1, 2, 3):
        order, reps = ext_via_resolution(Z2M, Z2M, n)
        assert order == 2
        assert reps == [(0,), (1,)]
    for n in (1, 2):
        assert ext_via_resolution(Z4M, Z2M, n)[0] == 1
        assert ext_via_resolution(Z2M, Z4M, n)[0] == 1
        assert ext_via_resolution(Z4M, Z4M, n)[0] == 1


def test_ext_orders_for_klein_pairs():
    assert ext_via_resolution(V4M, Z2M, 1)[0] == 4
    assert ext_via_resolution(Z2M, V4M, 1)[0] == 4
    assert ext_via_resolution(V4M, V4M, 1)[0] == 16
    assert ext_via_resolution(V4M, Z4M, 1)[0] == 1
    assert ext_via_resolution(Z4M, V4M, 1)[0] == 1


def test_ext_degree_one_agrees_with_enumeration():
    pairs = [(Z2M, Z2M), (Z2M, Z4M), (Z4M, Z2M), (V4M, Z2M), (Z2M, V4M), (V4M, V4M)]
    for Q, K in pairs:
        order, _ = ext_via_resolution(Q, K, 1)
        forms = enumerate_ext1(Q, K, limits=Limits(max_carrier=16, max_nodes=10_000_000))
        assert order == len(forms)


def test_ext_order_ignores_generator_shuffles():
    for seed in range(4):
        res = build_resolution(V4M, 3, rng=random.Random(seed))
        assert res.ranks == build_resolution(V4M, 3).ranks
        assert ext_via_resolution(V4M, Z2M, 2, resolution=res)[0] == 4


def test_reps_are_sorted_cocycles_with_zero_first():
    res = build_resolution(V4M, 3)
    order, reps = ext_via_resolution(V4M, Z2M, 2, resolution=res)
    assert reps == sorted(reps)
    assert reps[0] == (0,) * res.ranks[2]
    Z = cocycles(res, Z2M, 2)
    assert set(reps) <= set(Z)
    assert order * len(coboundaries(res, Z2M, 2)) == len(Z)


def test_ext_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        ext_via_resolution(Z2M, Z2M, 0)
    shallow = build_resolution(Z2M, 1)
    with pytest.raises(ValidationError):
        ext_via_resolution(Z2M, Z2M, 2, resolution=shallow)
    with pytest.raises(UnsupportedVarietyError):
        ext_via_resolution(cyclic_group(2), cyclic_group(2), 1)


# ---------------------------------------------------------------------------
# yoneda classes


def test_split_towers_are_zero():
    seq = split_seq()
    for _ in range(3):
        assert yoneda_class_of(seq) == (0,)
        seq = splice(seq, split_seq())


def test_worked_sequence_is_the_nonzero_class():
    res = build_resolution(Z2M, 3)
    _, reps = ext_via_resolution(Z2M, Z2M, 2, resolution=res)
    cls = yoneda_class_of(worked_sequence(), res)
    assert cls == (1,)
    assert cls in reps and cls != reps[0]


def test_degree_one_classes_separate_split_from_nonsplit():
    assert yoneda_class_of(split_seq()) == (0,)
    assert yoneda_class_of(nonsplit_seq()) == (1,)


def test_splice_with_a_split_factor_is_zero():
    # the composition product with a zero class vanishes
    res = build_resolution(Z2M, 4)
    assert yoneda_class_of(splice(nonsplit_seq(), split_seq()), res) == (0,)
    assert yoneda_class_of(splice(split_seq(), nonsplit_seq()), res) == (0,)
    assert yoneda_class_of(splice(nonsplit_seq(), nonsplit_seq()), res) == (1,)


def test_yoneda_rejects_foreign_resolution():
    res = build_resolution(Z4M, 3)
    with pytest.raises(ValidationError):
        yoneda_class_of(worked_sequence(), res)


# ---------------------------------------------------------------------------
# syzygies


def test_syzygy_of_z2():
    s = syzygy(Z2M)
    assert s.P.size == 4
    assert s.p.map == (0, 1, 0, 1)
    assert sorted(s.w.map) == [0, 2]
    assert s.Omega.size == 2
    assert s.generators == (1,)


def test_syzygy_of_free_and_zero():
    s = syzygy(Z4M)
    assert s.P.size == 4 and s.Omega.size == 1
    z = syzygy(ZERO)
    assert z.P.size == 1 and z.Omega.size == 1 and z.generators == ()


def test_syzygy_of_klein():
    s = syzygy(V4M)
    assert s.P.size == 16
    assert s.Omega.size == 4
    assert s.generators == (1, 2)
    e = syzygy_ses(s)
    assert e.k.map == s.w.map and e.q.map == s.p.map


def test_syzygy_rejects_groups():
    with pytest.raises(UnsupportedVarietyError):
        syzygy(cyclic_group(4))


# ---------------------------------------------------------------------------
# pullback reduction


def test_reduce_worked_sequence_to_nonsplit_ses():
    e = worked_sequence()
    s = syzygy(Z2M)
    r = pullback_reduce(e, s)
    assert r.n == 1
    assert r.kernel_object.size == 2
    assert r.base.size == 2
    mid = r.middle_objects()[0]
    assert sorted(additive_order(mid, x) for x in range(mid.size)) == [1, 2, 4, 4]


def test_reduce_keeps_the_kernel_object():
    e = worked_sequence()
    r = pullback_reduce(e, syzygy(Z2M))
    assert r.kernel_object == e.kernel_object
    k0 = make_hom(ZERO, Z2M, (0,))
    e0 = splice(
        sequence_from_ses(validate_ses(k0, identity_hom(Z2M))), nonsplit_seq()
    )
    r0 = pullback_reduce(e0, syzygy(Z2M))
    assert r0.kernel_object.size == 1


def test_reduce_rejects_short_or_mismatched_input():
    with pytest.raises(ValidationError):
        pullback_reduce(nonsplit_seq(), syzygy(Z2M))
    with pytest.raises(EndpointMismatchError):
        pullback_reduce(worked_sequence(), syzygy(Z4M))


def test_reduce_then_splice_recovers_the_class():
    e = worked_sequence()
    s = syzygy(Z2M)
    res = build_resolution(Z2M, 4)
    back = splice(pullback_reduce(e, s), sequence_from_ses(syzygy_ses(s)))
    assert yoneda_class_of(back, res) == yoneda_class_of(e, res)


def test_reduce_splice_invariant_across_module_pairs():
    """Every class over Z/4 with |K|, |Q| <= 4 survives the round trip."""
    lim = Limits(max_carrier=16, max_nodes=10_000_000)
    mods = (ZERO, Z2M, Z4M, V4M)
    for Q in mods:
        res = build_resolution(Q, 4)
        for K in mods:
            for n in (2, 3):
                result = classify_extn(Q, K, n, limits=lim)
                s = syzygy(Q)
                ses_s = sequence_from_ses(syzygy_ses(s))
                for e in result.representatives:
                    back = splice(pullback_reduce(e, s), ses_s)
                    assert yoneda_class_of(back, res) == yoneda_class_of(e, res)


# ---------------------------------------------------------------------------
# classification


def test_classify_cyclic_pair_matches_oracle():
    res = build_resolution(Z2M, 4)
    for n in (1, 2, 3):
        result = classify_extn(Z2M, Z2M, n)
        order, reps = ext_via_resolution(Z2M, Z2M, n, resolution=res)
        assert result.complete
        assert len(result) == order == 2
        assert list(result.class_keys) == reps
        for seq in result.representatives:
            assert seq.n == n
            assert seq.kernel_object.size == 2 and seq.base.size == 2


def test_classify_sweep_matches_oracle():
    lim = Limits(max_carrier=16, max_nodes=10_000_000)
    mods = (ZERO, Z2M, Z4M, V4M)
    for Q in mods:
        res = build_resolution(Q, 4)
        for K in mods:
            for n in (2, 3):
                result = classify_extn(Q, K, n, limits=lim)
                order, reps = ext_via_resolution(Q, K, n, resolution=res)
                assert result.complete
                assert len(result) == order
                keys = {yoneda_class_of(e, res) for e in result.representatives}
                assert keys == set(reps)


def test_classify_degree_one_wraps_enumeration():
    forms = enumerate_ext1(Z2M, Z2M)
    result = classify_extn(Z2M, Z2M, 1)
    assert result.complete and len(result) == len(forms)
    for form, seq in zip(forms, result.representatives):
        e = validate_ses(seq.maps[0], seq.maps[1])
        assert canonical_form(e).code == form.code


def test_classify_free_base_is_trivial():
    for n in (1, 2, 3):
        result = classify_extn(Z4M, Z2M, n)
        assert len(result) == 1 and result.complete


def test_classify_groups_degree_two_is_partial():
    Z2 = cyclic_group(2)
    result = classify_extn(Z2, Z2, 2)
    assert not result.complete
    assert result.class_keys is None
    assert len(result) == 2
    for seq in result.representatives:
        assert seq.n == 2
        assert seq.kernel_object.size == 2 and seq.base.size == 2
    one = classify_extn(Z2, Z2, 1)
    assert one.complete and len(one) == 2


def test_classify_rejects_bad_input():
    with pytest.raises(ValidationError):
        classify_extn(Z2M, Z2M, 0)
    with pytest.raises(ValidationError):
        classify_extn(cyclic_group(2), Z2M, 1)
