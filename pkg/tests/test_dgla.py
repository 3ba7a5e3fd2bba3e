import pytest
from sympy.polys.domains import QQ

from gcdeform.artin import ArtinHom, MElement, small_extension_chain, truncate
from gcdeform.cartan import lie_bracket, random_vf
from gcdeform.dgla import (FDGLA, ConcreteDGLA, deligne_equivalent, deligne_pi0, element, gauge_act, gauge_bch,
                           lift_along_chain, mc_check, obstruction_lift)
from gcdeform.errors import ContextMismatchError, DomainError, SchemaError
from gcdeform_tools import fixtures


@pytest.fixture
def arrow():
    """u in degree 0, v in degree 1, du = v."""
    return FDGLA.build(["u", "v"], [0, 1], {"u": {"v": 1}})


@pytest.fixture
def twisted():
    """p in degree 0 acting on degree-1 elements by [p, a] = b."""
    return FDGLA.build(["p", "a", "b"], [0, 1, 1], None, [("p", "a", {"b": 1})])


def test_build_rejects_bad_structure():
    with pytest.raises(DomainError):
        FDGLA.build(["a", "b"], [0, 0], {"a": {"b": 1}})
    with pytest.raises(DomainError):
        FDGLA.build(["a", "b", "c"], [0, 1, 2], {"a": {"b": 1}, "b": {"c": 1}})
    with pytest.raises(DomainError):
        FDGLA.lie(["a"], [("a", "a", {"a": 1})])
    with pytest.raises(DomainError):
        FDGLA.lie(["e1", "e2", "e3"], [("e1", "e2", {"e3": 1}), ("e1", "e3", {"e1": 1})])
    with pytest.raises(DomainError):
        FDGLA.build(["a"], [1], {"z": {"a": 1}})


def test_json_round_trip(twisted):
    assert FDGLA.from_json(twisted.to_json()) == twisted
    with pytest.raises(SchemaError) as err:
        FDGLA.from_json({"basis": []})
    assert err.value.path == "/dgla/basis"
    with pytest.raises(SchemaError) as err:
        FDGLA.from_json({"basis": [{"name": "a", "degree": 0}], "d": {"a": {"a": 1}}})
    assert err.value.path == "/dgla"


def test_cohomology(arrow):
    g = fixtures.obstructed_dgla()
    assert g.cohomology(1).dim == 1
    assert g.cohomology(2).dim == 1
    assert g.cohomology(5).dim == 0
    assert arrow.cohomology(0).dim == 0
    assert arrow.cohomology(1).dim == 0
    assert arrow.d_preimage(1, [QQ(0), QQ(1)]) == [QQ(1), QQ(0)]


def test_mc_residual_over_growing_algebras():
    g, x = fixtures.obstructed_element(2)
    assert mc_check(g, x)
    _, y = fixtures.obstructed_element(3)
    verdict = mc_check(g, y)
    assert not verdict
    assert verdict.witness == element(g, truncate(3), {(2,): {"c": "1/2"}})
    with pytest.raises(DomainError):
        mc_check(g, element(g, truncate(2), {(1,): {"c": 1}}))


def test_obstructed_lift():
    g, x = fixtures.obstructed_element(2)
    (ext,) = small_extension_chain(ArtinHom.projection(truncate(3), truncate(2)))
    result = obstruction_lift(g, ext, x)
    assert not result
    assert result.obstruction == (QQ(0), QQ(1, 2))
    assert len(result.obstruction_class) == 1
    assert result.obstruction_class[0]


def test_unobstructed_lift_along_chain(arrow):
    x = element(arrow, truncate(2), {(1,): {"v": 1}})
    result, done = lift_along_chain(arrow, ArtinHom.projection(truncate(4), truncate(2)), x)
    assert result.lifted
    assert done == 2
    assert result.element.algebra == truncate(4)
    assert mc_check(arrow, result.element)


def test_gauge_action(arrow):
    A = truncate(2)
    y = element(arrow, A, {(1,): {"u": 1}})
    zero = MElement(A, arrow.dim)
    assert gauge_act(arrow, y, zero) == element(arrow, A, {(1,): {"v": -1}})
    with pytest.raises(DomainError):
        gauge_act(arrow, zero + element(arrow, A, {(1,): {"v": 1}}), zero)
    with pytest.raises(ContextMismatchError):
        gauge_act(arrow, y, MElement(truncate(3), arrow.dim))


def test_gauge_bch_is_sum_when_abelian(arrow):
    A = truncate(3)
    y = element(arrow, A, {(1,): {"u": 1}})
    z = element(arrow, A, {(1,): {"u": 2}, (2,): {"u": 1}})
    assert gauge_bch(arrow, y, z) == y + z


def test_deligne_classes(arrow, twisted):
    assert deligne_pi0(arrow, truncate(3)).kind == "single"
    line = FDGLA.abelian(["a"], [1])
    classes = deligne_pi0(line, truncate(3))
    assert classes.kind == "abelian"
    assert classes.dim == 2
    assert len(classes.representatives) == 2
    assert deligne_pi0(twisted, truncate(2)).dim is None


def test_deligne_equivalence_abelian(arrow):
    A = truncate(2)
    zero = MElement(A, arrow.dim)
    target = element(arrow, A, {(1,): {"v": 3}})
    y = deligne_equivalent(arrow, zero, target)
    assert gauge_act(arrow, y, zero) == target
    line = FDGLA.abelian(["a"], [1])
    assert deligne_equivalent(line, MElement(A, 1), element(line, A, {(1,): {"a": 1}})) is None


def test_deligne_equivalence_second_order(twisted):
    A = truncate(3)
    x = element(twisted, A, {(1,): {"a": 1}})
    reachable = element(twisted, A, {(1,): {"a": 1}, (2,): {"b": 5}})
    y = deligne_equivalent(twisted, x, reachable)
    assert gauge_act(twisted, y, x) == reachable
    assert deligne_equivalent(twisted, x, element(twisted, A, {(1,): {"a": 1}, (2,): {"a": 1}})) is None


def test_deligne_equivalence_needs_small_algebra(twisted):
    A = truncate(4)
    zero = MElement(A, twisted.dim)
    with pytest.raises(DomainError):
        deligne_equivalent(twisted, zero, zero)


def test_concrete_dgla(r2, rng):
    fields = ConcreteDGLA("vector fields", lie_bracket)
    assert fields.verify([random_vf(r2, rng, 2) for _ in range(3)])
    product = ConcreteDGLA("product", lambda a, b: a * b)
    verdict = product.verify([r2.poly("x"), r2.poly("y")])
    assert not verdict
    assert "antisymmetric" in verdict.detail
    assert fields.mc_check(r2.zero)
    with pytest.raises(DomainError):
        fields.gauge(r2.zero, r2.one)
