import pytest
from sympy.polys.domains import QQ_I

from gcdeform import ring as R
from gcdeform.cartan import Chart, DiffForm, ext_d, random_form
from gcdeform.courant import GenEndo, GenSection, adjoint_u, ghat_bracket, random_section
from gcdeform.errors import DomainError, NotClosedError
from gcdeform.gcs import (AlgebroidForm, GCStructure, almost_check, b_transform_gc, delta_L, delta_L_function,
                          family_generators, gen_hamiltonian, hamiltonian_after_b, hamiltonian_witness,
                          is_gen_holomorphic, is_integrable,
                          is_regular, l_frame, make_complex_gc, make_symplectic_gc, mu, nijenhuis, r_section,
                          real_hamiltonian_pair, standard_chart, standard_complex_matrix, standard_gc, type_at)
from gcdeform_tools import fixtures

SMALL_MODELS = [(m, n) for m in range(3) for n in range(3) if 0 < m + n <= 3]


def test_standard_chart_labels():
    assert standard_chart(1, 1).coords == ("x1", "y1", "t1", "t2")
    assert standard_chart(0, 2).coords == ("t1", "t2", "t3", "t4")
    with pytest.raises(DomainError):
        standard_chart(0, 0)


@pytest.mark.parametrize("m, n", SMALL_MODELS)
def test_standard_models_are_integrable(m, n):
    gc = standard_gc(m, n)
    assert almost_check(gc)
    assert is_integrable(gc)
    assert type_at(gc, [0] * gc.n) == n
    assert is_regular(gc)


@pytest.mark.parametrize("m, n", [(1, 0), (0, 1), (1, 1)])
def test_b_transform_preserves_integrability(m, n, rng):
    gc = standard_gc(m, n)
    B = ext_d(random_form(gc.chart, rng, 1, 2))
    moved = b_transform_gc(gc, B)
    assert almost_check(moved)
    assert is_integrable(moved)


def test_b_transform_needs_closed_form():
    gc = standard_gc(2, 0)
    ch = gc.chart
    with pytest.raises(NotClosedError):
        b_transform_gc(gc, DiffForm.from_dict(ch, 2, {(1, 2): ch.coord(0)}))


def test_nonintegrable_structure():
    gc = fixtures.nonintegrable_gc()
    assert almost_check(gc)
    verdict = is_integrable(gc)
    assert not verdict
    i, j, residual = verdict.witness
    assert i < j
    assert residual
    a, b = GenSection.basis(gc.chart, 0), GenSection.basis(gc.chart, 2)
    assert nijenhuis(gc, a, b)


def test_almost_check_rejects_identity(r2):
    verdict = almost_check(GCStructure(GenEndo.identity(r2)))
    assert not verdict
    assert verdict.detail == "J^2 != -1"


def test_complex_constructor_validation(r2):
    with pytest.raises(DomainError):
        make_complex_gc(Chart(("a", "b", "c")), [[0] * 3] * 3)
    with pytest.raises(DomainError):
        make_complex_gc(r2, [[r2.zero, r2.one], [r2.one, r2.zero]])


def test_symplectic_constructor_validation(r2, r4):
    with pytest.raises(DomainError):
        make_symplectic_gc(r2, DiffForm.basis(r2, (0, 1), r2.poly("x")))
    with pytest.raises(DomainError):
        make_symplectic_gc(r4, DiffForm.basis(r4, (0, 1)))
    with pytest.raises(DomainError):
        make_symplectic_gc(r2, DiffForm.basis(r2, (0,)))


def test_standard_complex_fixture_matches_model():
    gc, _ = fixtures.complex_brane()
    ch = gc.chart
    same = make_complex_gc(ch, standard_complex_matrix(ch, [(0, 1), (2, 3)]))
    assert gc.endo == same.endo
    assert standard_gc(0, 2).endo == same.endo


def test_l_frame_pairs_with_conjugate():
    for m, n in ((1, 0), (0, 1), (1, 1)):
        gc = standard_gc(m, n)
        frame = l_frame(gc)
        assert frame.rank == gc.n
        assert R.rank(frame.dual_matrix(), frame.rank, QQ_I) == frame.rank


def test_dolbeault_squares_to_zero(rng):
    gc = standard_gc(1, 1)
    frame = l_frame(gc)
    for _ in range(3):
        f = gc.chart.random_poly(rng, 3, complex_coeffs=True)
        assert not delta_L(frame, delta_L_function(frame, f))


def test_holomorphic_translations_and_scalings():
    gc = standard_gc(0, 1)
    ch = gc.chart
    translation = GenSection.basis(ch, 0)
    assert is_gen_holomorphic(gc, translation)
    stretch = GenSection.of(ch, [ch.coord(0), ch.zero], [ch.zero, ch.zero])
    verdict = is_gen_holomorphic(gc, stretch)
    assert not verdict
    assert verdict.variation
    assert verdict.dolbeault


def test_holomorphy_checks_agree_on_random_sections(rng):
    gc = standard_gc(1, 1)
    for _ in range(4):
        is_gen_holomorphic(gc, random_section(gc.chart, rng, 2))


def test_hamiltonian_closure(rng):
    gc = standard_gc(1, 1)
    ch = gc.chart
    for k in range(4):
        f = ch.random_poly(rng, 2, complex_coeffs=k % 2 == 0)
        g = ch.random_poly(rng, 2, complex_coeffs=k > 1)
        lhs = ghat_bracket(gen_hamiltonian(gc, f), gen_hamiltonian(gc, g))
        assert lhs == gen_hamiltonian(gc, hamiltonian_witness(gc, f, g))
        assert is_gen_holomorphic(gc, gen_hamiltonian(gc, f))


def test_real_hamiltonian_pair_sums(rng):
    gc = standard_gc(1, 1)
    f = gc.chart.random_poly(rng, 2, complex_coeffs=True)
    real, imag = real_hamiltonian_pair(gc, f)
    assert real + imag == gen_hamiltonian(gc, f)


def test_adjoint_of_hamiltonian_is_hamiltonian_after_b(rng):
    gc = standard_gc(1, 1)
    ch = gc.chart
    for _ in range(4):
        f = ch.random_poly(rng, 2)
        u = random_form(ch, rng, 1, 1)
        x_f = gen_hamiltonian(gc, f)
        iota = ch.zero
        for c, b in zip(x_f.vf.comps, u.comps()):
            iota += ch.mul(c, b)
        shifted = f - ch.scale(iota, QQ_I(0, 1))
        assert adjoint_u(u, x_f) == gen_hamiltonian(hamiltonian_after_b(gc, u), shifted)


def test_mu_on_frame_conjugates():
    gc = standard_gc(1, 0)
    frame = l_frame(gc)
    alpha = mu(frame, frame.conjugates[0])
    assert alpha.degree == 1
    assert alpha


def test_algebroid_form_validation(r2):
    with pytest.raises(DomainError):
        AlgebroidForm.from_dict(r2, 2, 1, {(2,): r2.one})
    alpha = AlgebroidForm.from_dict(r2, 2, 2, {(1, 0): r2.one})
    assert alpha.coeff((0, 1)) == -r2.one
    with pytest.raises(DomainError):
        alpha + AlgebroidForm.zero(r2, 2, 1)


def test_r_family():
    ch = standard_chart(1, 0)
    x, y = ch.coord(0), ch.coord(1)
    s = r_section(ch, 1, [x], [x * x])
    assert s.vf.comps[1] == x
    with pytest.raises(DomainError):
        r_section(ch, 1, [y], [ch.zero])
    assert len(family_generators(ch, 1, 1)) == 4
    assert len(family_generators(ch, 1, 2, "S")) == 6
