import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from aec import values as V
from aec.errors import InvalidSourceWitness, NonSquareProduct, UnsupportedSpec
from aec.reductions import (
    PARTITION,
    PRODUCT_PARTITION,
    PRODUCT_PARTITION_HALF,
    SPECS,
    THREE_PARTITION_3,
    SourceInstance,
    check_source,
    check_source_witness,
    cross_domain_ok,
    decide_source,
    evaluate_witness,
    find_spec,
    reduce,
    solve_reduced,
    source_space,
    specs_for_tag,
    trivial_no_instance,
    verify_reduction,
    witness_backward,
    witness_forward,
)


def S(kind, *vals):
    return SourceInstance(kind, vals)


@pytest.mark.parametrize(
    "source,yes",
    [(S(PARTITION, 1, 2, 3), True), (S(PARTITION, 1, 2, 4), False), (S(PRODUCT_PARTITION, 2, 3, 6), True),
     (S(PRODUCT_PARTITION, 1), True), (S(PRODUCT_PARTITION_HALF, 1, 4, 2, 2), True),
     (S(PRODUCT_PARTITION_HALF, 1, 1, 1, 4), False), (S(THREE_PARTITION_3, 1, 2, 3, 2, 2, 2), True),
     (S(THREE_PARTITION_3, 1, 1, 1, 1, 1, 4), False)],
)
def test_decide_source(source, yes):
    blocks = decide_source(source)
    assert (blocks is not None) == yes
    if blocks is not None:
        assert check_source_witness(source, blocks)
        assert 0 in blocks[0]


def test_source_validation():
    with pytest.raises(ValueError):
        S(PARTITION, 0, 1)
    with pytest.raises(ValueError):
        S(PRODUCT_PARTITION_HALF, 1, 2, 3)
    with pytest.raises(ValueError):
        S(THREE_PARTITION_3, 1, 2)
    with pytest.raises(ValueError):
        S("subset-sum", 1)
    s = S(PARTITION, 3, 1)
    assert SourceInstance.from_json(s.to_json()) == s


def test_registry():
    assert find_spec("+-", "np").tag == "2.8"
    assert find_spec("÷", "ep").source == PRODUCT_PARTITION_HALF
    assert {s.source for s in specs_for_tag("3")} == {PARTITION, PRODUCT_PARTITION, PRODUCT_PARTITION_HALF}
    assert len(specs_for_tag("2.7")) == 2
    with pytest.raises(UnsupportedSpec):
        find_spec("+", "np")
    with pytest.raises(UnsupportedSpec):
        specs_for_tag("9.9")
    with pytest.raises(UnsupportedSpec):
        reduce(S(PARTITION, 1, 1), find_spec("*/", "np"))


def test_reduce_product_partition_half_with_plus_times():
    inst = reduce(S(PRODUCT_PARTITION_HALF, 1, 4, 2, 2), find_spec("+*", "np"))
    assert [V.format_value(v) for v in inst.values] == ["x", "4*x", "2*x", "2*x"]
    assert V.format_value(inst.target) == "8*x^2"
    assert inst.variant == "np" and inst.ops == ("+", "*")


def test_reduce_partition_is_plain_rational():
    inst = reduce(S(PARTITION, 1, 2, 3), find_spec("+-", "np"))
    assert inst.domain == "rat" and inst.target == 0
    ep = reduce(S(PARTITION, 1, 2, 3, 4, 5), find_spec("+-", "ep"))
    assert ep.shape.to_json() == [[[None, None], None], [None, None]]


def test_non_square_product():
    with pytest.raises(NonSquareProduct):
        reduce(S(PRODUCT_PARTITION_HALF, 1, 2, 3, 5), find_spec("+*", "np"))
    inst = trivial_no_instance(find_spec("+*", "np"))
    assert solve_reduced(inst) is None


def test_forward_rejects_bad_blocks():
    s = S(PARTITION, 1, 2, 3)
    with pytest.raises(InvalidSourceWitness):
        witness_forward(s, find_spec("+-", "np"), ((0,), (1, 2)))


def test_round_trip_example_2_8():
    s = S(PARTITION, 1, 2, 3)
    spec = find_spec("+-", "np")
    inst = reduce(s, spec)
    w = witness_forward(s, spec, ((0, 1), (2,)))
    assert evaluate_witness(w, inst.values) == 0
    assert check_source_witness(s, witness_backward(inst, spec, w, s))


def test_known_defect_of_plus_times_divide():
    # {1,1,1,4} has no equal-product halves, yet one product group with
    # divisions hits the generated target.
    s = S(PRODUCT_PARTITION_HALF, 1, 1, 1, 4)
    spec = find_spec("+*/", "np")
    assert decide_source(s) is None
    res = check_source(spec, s)
    assert res.reduced_yes is True
    assert res.problems
    inst = reduce(s, spec)
    w = solve_reduced(inst)
    assert V.equals(evaluate_witness(w, inst.values), inst.target)


# small sources for every registered construction
_BOUNDS = {PARTITION: (4, 6), PRODUCT_PARTITION: (4, 6), PRODUCT_PARTITION_HALF: (4, 5), THREE_PARTITION_3: (6, 4)}


@st.composite
def spec_and_source(draw):
    spec = draw(st.sampled_from(SPECS))
    max_n, max_value = _BOUNDS[spec.source]
    space = source_space(spec.source, max_n, max_value)
    return spec, draw(st.sampled_from(space))


@settings(max_examples=150, deadline=None)
@given(spec_and_source())
def test_forward_backward_round_trip(pair):
    spec, s = pair
    blocks = decide_source(s)
    assume(blocks is not None)
    inst = reduce(s, spec)
    w = witness_forward(s, spec, blocks)
    assert V.equals(evaluate_witness(w, inst.values), inst.target)
    assert check_source_witness(s, witness_backward(inst, spec, w, s))
    if inst.domain == "fun":
        assert cross_domain_ok(inst, w)


@settings(max_examples=120, deadline=None)
@given(spec_and_source())
def test_decisions_agree_except_known_defect(pair):
    spec, s = pair
    try:
        inst = reduce(s, spec)
    except NonSquareProduct:
        assert decide_source(s) is None
        return
    source_yes = decide_source(s) is not None
    reduced_yes = solve_reduced(inst) is not None
    if spec.tag == "2.1" and reduced_yes and not source_yes:
        return
    assert source_yes == reduced_yes


def test_verify_report_shape_and_determinism():
    spec = find_spec("+-", "np")
    one = verify_reduction(spec, max_n=4, max_value=4)
    two = verify_reduction(spec, max_n=4, max_value=4, threads=2)
    assert one == two
    assert one["ok"] and one["counts"]["agree"] == one["counts"]["checked"] == one["counts"]["sources"]
    assert "millis" not in one


def test_verify_reports_the_defect():
    rep = verify_reduction(find_spec("+*/", "np"), max_n=4, max_value=4)
    assert not rep["ok"]
    assert [1, 1, 1, 4] in [c["source"] for c in rep["counterexamples"]]


def test_sampling_is_seeded():
    a = source_space(PARTITION, 7, 5, samples=20, seed=3)
    b = source_space(PARTITION, 7, 5, samples=20, seed=3)
    assert a == b
    assert all(isinstance(s, SourceInstance) for s in a)
    assert len(a) > 0
