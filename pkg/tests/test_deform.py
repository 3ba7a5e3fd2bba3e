import pytest
from sympy.polys.domains import QQ_I

from gcdeform.artin import truncate
from gcdeform.brane import NerveCover
from gcdeform.cartan import DiffForm, VectorField
from gcdeform.courant import GenSection, SymElement, sym_from_lie
from gcdeform.deform import (BraneDeformation, BundleDeformation, DescentDatum, Equivalence, KKKElement, RElement,
                             apply_equivalence, brane_act, bundle_act, chi, deformation_equivalent,
                             descent_reassemble, descent_validate, equiv_compose, equiv_holds, equiv_inverse,
                             first_order_class, first_order_section, induced, induced_first_order,
                             is_compatible_deformation, kkk_check, mu_r, normalize_transitions, psi_apply, r_bracket,
                             realize, restrict_to_cover, sigma_morphism, transport_deformation, trivialize)
from gcdeform.errors import ContextMismatchError, DomainError, InsolubleError
from gcdeform_tools import fixtures


def unit(i, n):
    return tuple(QQ_I.one if j == i else QQ_I.zero for j in range(n))


@pytest.fixture
def line_over_eps(two_chart):
    _, brane = fixtures.lagrangian_line(two_chart)
    return brane, brane.herm.chart.with_artin(truncate(2))


def translated_line(eps2):
    """The Lagrangian line pushed to y = eps."""
    gc, brane = fixtures.lagrangian_line()
    xa = brane.ambient.with_artin(eps2)
    shift = GenSection(VectorField.of(xa, [xa.zero, xa.artin_gen("eps")]), DiffForm.zero(xa, 1))
    return gc, brane, induced(brane, sym_from_lie(shift))


def test_bundle_deformation_validation(line_over_eps, eps2):
    brane, ch = line_over_eps
    eps_x = ch.poly("eps*x")
    with pytest.raises(DomainError):
        BundleDeformation.build(brane.herm, eps2, {(0, 2): eps_x})
    with pytest.raises(DomainError):
        BundleDeformation.build(brane.herm, eps2, {(0, 1): ch.poly("x")})
    with pytest.raises(ContextMismatchError):
        BundleDeformation.build(brane.herm, eps2, u={0: DiffForm.zero(brane.herm.chart, 1)})
    broken = BundleDeformation.build(brane.herm, eps2, {(0, 1): eps_x})
    assert broken.validate().witness == (0, 1)
    fixed = BundleDeformation.build(brane.herm, eps2, {(0, 1): eps_x}, {1: DiffForm.one_form(ch, [ch.poly("eps")])})
    assert fixed.validate()
    assert fixed.f_of((1, 0)) == -eps_x


def test_normalize_transitions_kills_f(line_over_eps, eps2):
    brane, ch = line_over_eps
    lhat = BundleDeformation.build(brane.herm, eps2, {(0, 1): ch.poly("eps*x")},
                                   {1: DiffForm.one_form(ch, [ch.poly("eps")])})
    g, normalized = normalize_transitions(lhat)
    assert g == {0: ch.zero, 1: ch.poly("eps*x")}
    assert normalized == BundleDeformation.zero(brane.herm, eps2)


def test_normalize_transitions_on_a_hollow_cycle(eps2):
    cover = NerveCover.nerve(3, [(0, 1), (1, 2), (0, 2)])
    _, brane = fixtures.lagrangian_line(cover)
    ch = brane.herm.chart.with_artin(eps2)
    lhat = BundleDeformation.build(brane.herm, eps2, {(0, 2): ch.poly("eps")})
    assert lhat.validate()
    with pytest.raises(InsolubleError) as err:
        normalize_transitions(lhat)
    assert err.value.simplex == (1, 2)


def test_bundle_act(line_over_eps, eps2):
    brane, ch = line_over_eps
    lhat = BundleDeformation.zero(brane.herm, eps2)
    assert bundle_act(SymElement.identity(ch), lhat) == lhat
    u = DiffForm.one_form(ch, [ch.poly("eps*x")])
    moved = bundle_act(SymElement(u, VectorField.zero(ch)), lhat)
    assert moved.u_of(0) == -u
    assert moved.validate()


def test_brane_deformation_rejects_bad_images(lagrangian, eps2):
    _, brane = lagrangian
    trivial = BraneDeformation.trivial(brane, eps2)
    zc = trivial.chart
    with pytest.raises(DomainError):
        BraneDeformation(brane, (zc.coord(0),), trivial.bundle)
    with pytest.raises(DomainError):
        BraneDeformation(brane, (zc.coord(0), zc.one), trivial.bundle)


def test_induced_translation_is_realized(eps2):
    _, brane, bhat = translated_line(eps2)
    zc = bhat.chart
    assert bhat.rho == (zc.coord(0), zc.artin_gen("eps"))
    real = realize(bhat)
    assert not real.tau
    assert real.xi == VectorField.of(bhat.ambient_chart, [bhat.ambient_chart.zero, bhat.ambient_chart.poly("eps")])
    assert first_order_section(bhat) == GenSection.basis(brane.ambient, 1)


def test_brane_act_checks_algebra(lagrangian, eps2):
    _, brane = lagrangian
    bhat = BraneDeformation.trivial(brane, eps2)
    with pytest.raises(ContextMismatchError):
        brane_act(bhat, SymElement.identity(brane.ambient.with_artin(truncate(3))))


def test_translated_lagrangian_stays_compatible(eps2):
    gc, _, bhat = translated_line(eps2)
    assert is_compatible_deformation(bhat, gc)


def test_complex_deformations(complex_pair, eps2):
    gc, brane = complex_pair
    lhat = BundleDeformation.zero(brane.herm, eps2)
    zc = lhat.chart
    t1, t2 = zc.poly("eps*t1"), zc.poly("eps*t2")
    holomorphic = BraneDeformation(brane, (zc.coord(0), zc.coord(1), t1, t2), lhat)
    assert is_compatible_deformation(holomorphic, gc)
    skew = BraneDeformation(brane, (zc.coord(0), zc.coord(1), t1, zc.zero), lhat)
    verdict = is_compatible_deformation(skew, gc)
    assert not verdict
    assert verdict.detail == "deformed Q_J does not vanish on Z"


def test_compatibility_rechoices(eps2):
    gc, brane, bhat = translated_line(eps2)
    xa = bhat.ambient_chart
    with pytest.raises(DomainError):
        is_compatible_deformation(bhat, gc, zeta=VectorField.of(xa, [xa.poly("eps"), xa.zero]))
    zeta = VectorField.of(xa, [xa.poly("eps*y"), xa.zero])
    assert is_compatible_deformation(bhat, gc, zeta=zeta)


def test_first_order_round_trip(complex_pair, eps2):
    gc, brane = complex_pair
    for i in range(3):
        bhat = induced_first_order(brane, gc, unit(i, 3), 2, eps2)
        assert first_order_class(bhat, gc, 2).coordinates == unit(i, 3)
    with pytest.raises(DomainError):
        induced_first_order(brane, gc, unit(0, 2), 2, eps2)
    with pytest.raises(DomainError):
        induced_first_order(brane, gc, unit(0, 3), 2, truncate(3))


def test_deformation_equivalence(complex_pair, eps2):
    gc, brane = complex_pair
    first = induced_first_order(brane, gc, unit(0, 3), 2, eps2)
    again = induced_first_order(brane, gc, unit(0, 3), 2, eps2)
    other = induced_first_order(brane, gc, unit(1, 3), 2, eps2)
    assert deformation_equivalent(first, again, gc, 2)
    assert not deformation_equivalent(first, other, gc, 2)


def test_translated_line_is_trivial_in_cohomology(eps2):
    gc, _, bhat = translated_line(eps2)
    assert first_order_class(bhat, gc, 3).coordinates == ()


def test_equivalence_round_trip(eps2):
    _, _, bhat = translated_line(eps2)
    zc = bhat.chart
    eq = Equivalence.build(VectorField.of(zc, [zc.poly("eps*x")]), {0: zc.poly("eps*x^2")},
                           ambient=bhat.ambient_chart)
    target = apply_equivalence(eq, bhat)
    assert equiv_holds(eq, bhat, target)
    back = equiv_inverse(eq)
    assert apply_equivalence(back, target) == bhat
    loop = equiv_compose(eq, back)
    assert not loop.tau
    assert loop.g == ()
    assert loop.z.is_identity()


def test_equivalence_validation(eps2):
    _, brane, bhat = translated_line(eps2)
    zc = bhat.chart
    with pytest.raises(DomainError):
        Equivalence.build(VectorField.of(zc, [zc.poly("x")]), {}, ambient=bhat.ambient_chart)
    with pytest.raises(DomainError):
        Equivalence.build(VectorField.zero(zc), {})
    other = BraneDeformation.trivial(brane, truncate(3))
    with pytest.raises(ContextMismatchError):
        psi_apply(Equivalence.identity(bhat), other)


def test_r_bracket_with_curvature(curved_complex_pair):
    _, brane = curved_complex_pair
    zc = brane.z.chart
    a = RElement(VectorField.basis(zc, 0), zc.zero)
    b = RElement(VectorField.basis(zc, 1), zc.zero)
    out = r_bracket(brane.F, a, b)
    assert not out.xi
    assert out.f == zc.one
    h = RElement(VectorField.zero(zc), zc.poly("t1^2"))
    assert mu_r(brane.F, h) == GenSection(VectorField.zero(zc), DiffForm.one_form(zc, [zc.poly("-2*t1"), zc.zero]))


def kkk_element(brane, eps2, f="eps*x^2", normal="0"):
    xa = brane.ambient.with_artin(eps2)
    zc = brane.z.chart_on(eps2)
    ambient = GenSection(VectorField.of(xa, [xa.poly("eps"), xa.poly(normal)]),
                         DiffForm.one_form(xa, [xa.poly("-2*eps*x"), xa.zero]))
    return KKKElement(ambient, RElement(VectorField.of(zc, [zc.poly("eps")]), zc.poly(f)))


def test_kkk_membership(lagrangian, eps2):
    _, brane = lagrangian
    assert kkk_check(brane, kkk_element(brane, eps2))
    assert kkk_check(brane, kkk_element(brane, eps2, f="0")).witness == "form"
    assert kkk_check(brane, kkk_element(brane, eps2, normal="eps")).witness == "normal"


def test_sigma_morphism_connects_actions(lagrangian, eps2):
    _, brane = lagrangian
    y = kkk_element(brane, eps2)
    eq = sigma_morphism(brane, y)
    zc = brane.z.chart_on(eps2)
    assert eq.g_of(0) == zc.poly("eps*x^2")
    trivial = BraneDeformation.trivial(brane, eps2)
    assert equiv_holds(eq, trivial, induced(brane, chi(y)))
    with pytest.raises(DomainError):
        sigma_morphism(brane, kkk_element(brane, eps2, f="0"))


def test_trivialize_translation(eps2):
    gc, brane, bhat = translated_line(eps2)
    triv = trivialize(bhat, gc)
    xa = bhat.ambient_chart
    assert triv.x == GenSection(VectorField.of(xa, [xa.zero, xa.poly("eps")]), DiffForm.zero(xa, 1))
    assert triv.holomorphic
    assert equiv_holds(triv.equivalence, bhat, induced(brane, sym_from_lie(triv.x)))


def test_trivialize_tangential_motion(lagrangian, eps2):
    gc, brane = lagrangian
    lhat = BundleDeformation.zero(brane.herm, eps2)
    zc = lhat.chart
    bhat = BraneDeformation(brane, (zc.poly("x + eps*x"), zc.zero), lhat)
    triv = trivialize(bhat, gc)
    assert not triv.x
    assert triv.equivalence.tau == VectorField.of(zc, [zc.poly("-eps*x")])


def test_descent_on_consistent_data(lagrangian, eps2, two_chart):
    _, brane = lagrangian
    bhat = BraneDeformation.trivial(brane, eps2)
    datum = restrict_to_cover(bhat, two_chart)
    assert descent_validate(datum)
    glob, phi = descent_reassemble(datum)
    assert glob == bhat
    assert set(phi) == {0, 1}


def test_broken_descent_reports_violations():
    datum = fixtures.broken_descent()
    verdict = descent_validate(datum)
    assert not verdict
    assert verdict.witness == [("edge", (0, 2)), ("triangle", (0, 1, 2))]
    with pytest.raises(InsolubleError) as err:
        descent_reassemble(datum)
    assert err.value.simplex == (0, 2)


def test_descent_datum_shape(lagrangian, eps2, two_chart):
    _, brane = lagrangian
    bhat = BraneDeformation.trivial(brane, eps2)
    with pytest.raises(DomainError):
        DescentDatum.build(two_chart, {0: bhat}, {(0, 1): Equivalence.identity(bhat)})
    with pytest.raises(DomainError):
        DescentDatum.build(two_chart, {0: bhat, 1: bhat}, {})


def test_transport_gauge_and_refine(lagrangian, eps2, two_chart):
    _, brane = lagrangian
    bhat = BraneDeformation.trivial(brane, eps2)
    zc = brane.z.chart
    moved = transport_deformation(bhat, "gauge", {0: zc.poly("x^2")}).deformation
    assert moved.brane.herm.a_of(0) == DiffForm.one_form(zc, [zc.poly("2*x")])
    refined = transport_deformation(bhat, "refine", (two_chart, (0, 0))).deformation
    assert refined.brane.cover == two_chart
    with pytest.raises(DomainError):
        transport_deformation(bhat, "refine", (two_chart, (0, 1)))
    with pytest.raises(DomainError):
        transport_deformation(bhat, "rotate", None)


def test_transport_btransform(lagrangian, eps2):
    gc, brane = lagrangian
    bhat = BraneDeformation.trivial(brane, eps2)
    amb = brane.ambient
    out = transport_deformation(bhat, "btransform", DiffForm.one_form(amb, [amb.poly("y"), amb.zero]), gc)
    assert out.gc is not None
    assert out.gc.endo != gc.endo
    assert not out.deformation.brane.herm.a_of(0)
