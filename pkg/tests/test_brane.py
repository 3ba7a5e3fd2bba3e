import pytest
from sympy.polys.domains import QQ, QQ_I

from gcdeform.brane import (CoordSubmanifold, HermData, NerveCover, brane_compatible, brane_frame, canonical_lift,
                            classify, cohomology, delta_l, delta_l_on_lifts, evaluate_on_lifts, ext_count,
                            form_from_vector, gen_tangent_membership, k_frame, lwl_check, make_brane, normal_mu,
                            normal_preimage, preserves_tb, submanifold)
from gcdeform.cartan import Chart, DiffForm, VectorField
from gcdeform.courant import GenSection
from gcdeform.errors import DomainError, IncompatibleError, NotClosedError
from gcdeform.gcs import AlgebroidForm
from gcdeform_tools import fixtures


def test_submanifold_restrict_and_lift(r2):
    z = submanifold(r2, ["x"])
    assert z.retained == (0,) and z.normal == (1,)
    assert z.restrict(r2.poly("x^2 + x*y + 3")) == z.chart.poly("x^2 + 3")
    assert z.vanishes_on(r2.poly("x*y"))
    assert not z.vanishes_on(r2.poly("x*y + x"))
    assert z.lift(z.chart.poly("x^2")) == r2.poly("x^2")
    assert len(z.grid()) == 3
    assert all(p[1] == QQ(0) for p in z.grid())


def test_submanifold_rejects(r2, eps2):
    with pytest.raises(DomainError):
        CoordSubmanifold(r2, ())
    with pytest.raises(DomainError):
        CoordSubmanifold(r2, (0, 0))
    with pytest.raises(DomainError):
        CoordSubmanifold(r2.with_artin(eps2), (0,))


def test_forms_and_fields_through_submanifold(r2):
    z = submanifold(r2, [0])
    form = DiffForm.one_form(r2, [r2.poly("x + y"), r2.poly("x")])
    assert z.restrict_form(form) == DiffForm.one_form(z.chart, [z.chart.poly("x")])
    lifted = z.lift_vf(VectorField.of(z.chart, [z.chart.poly("x")]))
    assert lifted.comps == (r2.poly("x"), r2.zero)
    assert z.restrict_vf(lifted).comps == (z.chart.poly("x"),)


def test_nerve_closure(triangle):
    assert triangle.edges() == ((0, 1), (0, 2), (1, 2))
    assert triangle.triangles() == ((0, 1, 2),)
    tree, roots = triangle.spanning_tree()
    assert tree == [(0, 1), (0, 2)]
    assert roots == [0]


def test_nerve_components_and_rejects():
    _, roots = NerveCover.nerve(3, [(0, 1)]).spanning_tree()
    assert roots == [0, 2]
    with pytest.raises(DomainError):
        NerveCover.nerve(0)
    with pytest.raises(DomainError):
        NerveCover.nerve(2, [(0, 5)])


def test_herm_data_validation(triangle, two_chart):
    line = Chart(("x",))
    assert HermData.build(two_chart, line, {(0, 1): line.one}, {}).validate()
    bad_d = HermData.build(two_chart, line, {(0, 1): line.poly("x")}, {}).validate()
    assert not bad_d
    assert bad_d.witness == (0, 1)
    half = HermData.build(triangle, line, {(0, 1): line.poly("1/2")}, {}).validate()
    assert not half
    assert half.witness == (0, 1, 2)
    with pytest.raises(DomainError):
        HermData.build(two_chart, line, {(0, 2): line.one}, {})


def test_make_brane_validates_herm(two_chart):
    _, brane = fixtures.lagrangian_line()
    zc = brane.z.chart
    herm = HermData.build(two_chart, zc, {(0, 1): zc.poly("x")}, {})
    with pytest.raises(DomainError):
        make_brane(brane.z, herm)


def test_curvature_must_agree(two_chart):
    z = submanifold(Chart(("x", "y", "s", "t")), ["x", "y"])
    zc = z.chart
    herm = HermData.build(two_chart, zc, {}, {0: DiffForm.one_form(zc, [zc.zero, zc.poly("x")])})
    with pytest.raises(NotClosedError):
        herm.curvature()


def test_tangent_membership(lagrangian):
    _, brane = lagrangian
    ch = brane.ambient
    assert len(k_frame(brane)) == ch.n
    assert gen_tangent_membership(brane, GenSection.basis(ch, 0))
    assert not gen_tangent_membership(brane, GenSection.basis(ch, 1))
    assert gen_tangent_membership(brane, GenSection.basis(ch, 3))
    assert not gen_tangent_membership(brane, GenSection.basis(ch, 2))


def test_compatibility_verdicts(lagrangian, complex_pair, curved_complex_pair):
    for gc, brane in (lagrangian, complex_pair, curved_complex_pair):
        assert brane_compatible(brane, gc)
        assert preserves_tb(brane, gc)
    gc, brane = fixtures.incompatible_brane()
    verdict = brane_compatible(brane, gc)
    assert not verdict
    assert verdict.detail == "Q_J does not vanish on Z"
    with pytest.raises(IncompatibleError):
        brane_frame(brane, gc)


def test_lagrangian_with_respect_to_leaves(lagrangian, complex_pair):
    for gc, brane in (lagrangian, complex_pair):
        assert lwl_check(brane, gc)


def test_lagrangian_cohomology(lagrangian):
    gc, brane = lagrangian
    frame = brane_frame(brane, gc)
    assert frame.rank == 1
    assert cohomology(brane, gc, 0, 3, frame=frame).dim == 1
    assert cohomology(brane, gc, 1, 3, frame=frame).dim == 0
    assert cohomology(brane, gc, 1, 3, "naive", frame=frame).dim == 1


def test_complex_brane_cohomology_matches_ext(complex_pair):
    gc, brane = complex_pair
    frame = brane_frame(brane, gc)
    assert frame.rank == 2
    naive = cohomology(brane, gc, 1, 2, "naive", frame=frame)
    assert naive.dim == ext_count(brane, gc, 2) == 6
    assert cohomology(brane, gc, 1, 2, frame=frame).dim == 3


def test_classify_recovers_representatives(complex_pair):
    gc, brane = complex_pair
    frame = brane_frame(brane, gc)
    coh = cohomology(brane, gc, 1, 1, "naive", frame=frame)
    for i, rep in enumerate(coh.basis):
        alpha = form_from_vector(frame, 1, coh.labels, rep)
        assert classify(coh, alpha) == [QQ_I.one if j == i else QQ_I.zero for j in range(coh.dim)]


def test_cohomology_argument_checks(lagrangian):
    gc, brane = lagrangian
    with pytest.raises(DomainError):
        cohomology(brane, gc, 1, 2, "weird")
    with pytest.raises(DomainError):
        cohomology(brane, gc, 3, 2)
    with pytest.raises(DomainError):
        ext_count(brane, gc, 2)


def test_delta_l_squares_to_zero(complex_pair, rng):
    gc, brane = complex_pair
    frame = brane_frame(brane, gc)
    zc = brane.z.chart
    for _ in range(3):
        f = AlgebroidForm.function(zc, frame.rank, zc.random_poly(rng, 3))
        assert not delta_l(frame, delta_l(frame, f))


def pair_value(form, xs, ys):
    zc = form.chart
    total = zc.zero
    for a, f in enumerate(xs):
        for b, g in enumerate(ys):
            total += zc.mul(zc.mul(f, g), form.coeff((a, b)))
    return total


def test_delta_l_matches_cartan_formula_on_lifts(complex_pair, rng):
    gc, brane = complex_pair
    frame = brane_frame(brane, gc)
    zc = brane.z.chart
    for _ in range(3):
        xs = [zc.random_poly(rng, 1) for _ in range(frame.rank)]
        ys = [zc.random_poly(rng, 1) for _ in range(frame.rank)]
        x, y = canonical_lift(frame, xs), canonical_lift(frame, ys)
        f = AlgebroidForm.function(zc, frame.rank, zc.random_poly(rng, 2))
        assert delta_l_on_lifts(frame, f, x) == evaluate_on_lifts(frame, delta_l(frame, f), [x])
        alpha = fixtures.random_algebroid_form(zc, frame.rank, rng, 2)
        expected = zc.zero
        for a, c in enumerate(xs):
            expected += zc.mul(c, alpha.coeff((a,)))
        assert evaluate_on_lifts(frame, alpha, [x]) == expected
        assert delta_l_on_lifts(frame, alpha, x, y) == pair_value(delta_l(frame, alpha), xs, ys)


def test_canonical_lift_needs_one_coefficient_per_frame_element(complex_pair, rng):
    gc, brane = complex_pair
    frame = brane_frame(brane, gc)
    zc = brane.z.chart
    with pytest.raises(DomainError):
        canonical_lift(frame, [zc.one] * (frame.rank + 1))
    alpha = fixtures.random_algebroid_form(zc, frame.rank, rng, 1)
    with pytest.raises(DomainError):
        delta_l_on_lifts(frame, alpha, canonical_lift(frame, [zc.one] * frame.rank))


def test_normal_preimage_inverts_mu(complex_pair, rng):
    gc, brane = complex_pair
    frame = brane_frame(brane, gc)
    for _ in range(3):
        alpha = fixtures.random_algebroid_form(brane.z.chart, frame.rank, rng, 2)
        assert normal_mu(frame, normal_preimage(frame, alpha)) == alpha
