import pytest

from gcdeform.artin import one_param_decompose, truncate
from gcdeform.cartan import DiffForm, VectorField, d_function, ext_d, lie_derivative, random_form
from gcdeform.courant import (GenEndo, GenSection, SymElement, b_transform, courant_bracket, dorfman, endo_action,
                              endo_b_transform, exp_path, exp_split, ghat_act, ghat_bracket, inverse_split,
                              one_param_family, pairing, random_section, sym_act_endo, sym_act_function,
                              sym_act_section, sym_exp_section, sym_from_lie, sym_inverse, sym_log, sym_mul)
from gcdeform.errors import ContextMismatchError, DomainError, NotClosedError


def sections(chart, rng, count, degree=2, **kw):
    return [random_section(chart, rng, degree, **kw) for _ in range(count)]


def test_dorfman_leibniz(r4, rng):
    for _ in range(3):
        x, y, z = sections(r4, rng, 3)
        assert dorfman(x, dorfman(y, z)) == dorfman(dorfman(x, y), z) + dorfman(y, dorfman(x, z))


def test_dorfman_symmetric_part_is_exact(r4, rng):
    x, y = sections(r4, rng, 2)
    total = dorfman(x, y) + dorfman(y, x)
    assert not total.vf
    assert total.form == d_function(r4, pairing(x, y) * 2)


def test_courant_bracket_is_skew(r4, rng):
    x, y = sections(r4, rng, 2)
    assert courant_bracket(x, y) == -courant_bracket(y, x)


def test_pairing_invariance(r4, rng):
    x, y, z = sections(r4, rng, 3)
    assert x.vf.apply(pairing(y, z)) == pairing(dorfman(x, y), z) + pairing(y, dorfman(x, z))


def test_closed_b_transform_is_automorphism(r4, rng):
    B = ext_d(random_form(r4, rng, 1, 2))
    x, y = sections(r4, rng, 2)
    assert b_transform(B, dorfman(x, y)) == dorfman(b_transform(B, x), b_transform(B, y))


def test_b_transform_preconditions(r4):
    x1 = r4.coord(0)
    open_form = DiffForm.from_dict(r4, 2, {(1, 2): x1})
    with pytest.raises(NotClosedError):
        b_transform(open_form, GenSection.zero(r4))
    with pytest.raises(DomainError):
        b_transform(DiffForm.basis(r4, (0,)), GenSection.zero(r4))


def test_ghat_action_is_lie_action(r4, rng):
    x, y, s = sections(r4, rng, 3)
    assert ghat_act(ghat_bracket(x, y), s) == ghat_act(x, ghat_act(y, s)) - ghat_act(y, ghat_act(x, s))


def test_group_law(r2, eps3, rng):
    ch = r2.with_artin(eps3)
    for _ in range(3):
        x, y, z = sections(ch, rng, 3, degree=1, m_valued=True)
        gx, gy, gz = sym_from_lie(x), sym_from_lie(y), sym_from_lie(z)
        assert sym_mul(sym_mul(gx, gy), gz) == sym_mul(gx, sym_mul(gy, gz))
        assert sym_mul(gx, sym_inverse(gx)).is_identity()
        assert sym_mul(SymElement.identity(ch), gx) == gx
        assert sym_log(gx) == x


def test_factored_action_matches_series(r2, eps3, rng):
    ch = r2.with_artin(eps3)
    for _ in range(3):
        x = random_section(ch, rng, 1, m_valued=True)
        s, t = sections(ch, rng, 2, degree=1)
        g = sym_from_lie(x)
        assert sym_act_section(g, s) == sym_exp_section(x, s)
        assert pairing(sym_act_section(g, s), sym_act_section(g, t)) == sym_act_function(g, pairing(s, t))


def test_split_round_trip(r2, eps3, rng):
    ch = r2.with_artin(eps3)
    x = random_section(ch, rng, 2, m_valued=True)
    path = exp_path(x.vf, x.form)
    assert path.coefficient(0) == x.form
    assert path.coefficient(1) == lie_derivative(x.vf, x.form)
    a_xi, xi = exp_split(x.vf, x.form)
    assert xi == x.vf
    assert inverse_split(xi, a_xi) == x.form


def test_one_param_family_recovers_generator(r2, eps3, rng):
    ch = r2.with_artin(eps3)
    for _ in range(3):
        x = random_section(ch, rng, 2, m_valued=True)
        factors = one_param_family(x)
        assert len(factors) == 2
        assert not factors[0].coefficient(1).vf
        assert one_param_decompose(factors, ghat_bracket) == x


def test_sym_element_needs_maximal_ideal(r2, eps2):
    ch = r2.with_artin(eps2)
    with pytest.raises(DomainError):
        SymElement(DiffForm.one_form(ch, [ch.one, ch.zero]), VectorField.zero(ch))
    g = SymElement.identity(ch)
    assert sym_mul(g, g).is_identity()
    with pytest.raises(ContextMismatchError):
        sym_mul(g, SymElement.identity(r2.with_artin(truncate(3))))
    with pytest.raises(ContextMismatchError):
        sym_act_section(g, GenSection.zero(r2))


def test_endomorphisms(r2, rng):
    with pytest.raises(DomainError):
        GenEndo(r2, ((r2.one,),))
    ident = GenEndo.identity(r2)
    s = random_section(r2, rng, 2)
    assert ident.apply(s) == s
    B = DiffForm.basis(r2, (0, 1), r2.poly("x*y"))
    forward, back = endo_b_transform(B), endo_b_transform(-B)
    assert forward.compose(back) == ident
    assert forward.block("J") == ident.block("J")
    assert forward.apply(s) == b_transform(B, s)


def test_endo_action_is_first_order_conjugation(r2, eps2, rng):
    ch = r2.with_artin(eps2)
    size = 2 * r2.n
    F = GenEndo(r2, tuple(tuple(r2.random_poly(rng, 1) for _ in range(size)) for _ in range(size)))
    x = random_section(ch, rng, 1, m_valued=True)
    assert sym_act_endo(sym_from_lie(x), F) == F.lift(ch) + endo_action(x, F)
