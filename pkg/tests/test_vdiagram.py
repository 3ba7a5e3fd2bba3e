import random

import pytest
from sympy.polys.domains import QQ, QQ_I

from gcdeform import config
from gcdeform.artin import truncate
from gcdeform.brane import NerveCover
from gcdeform.courant import GenSection, endo_action
from gcdeform.deform import descent_validate, kkk_check
from gcdeform.errors import DomainError, InsolubleError
from gcdeform.vdiagram import (DeligneDescent, SectionSpace, build_V, deligne_descent_check,
                               deligne_descent_complete, descent_deligne_bijection, h2_total, kkk_times_artin,
                               phi_injective, phi_map, section_times_artin)
from gcdeform_tools import fixtures


def unit(i, n):
    return [QQ(1) if j == i else QQ(0) for j in range(n)]


@pytest.fixture(scope="module")
def line_v():
    cover = fixtures.two_chart_cover()
    gc, brane = fixtures.lagrangian_line(cover)
    return build_V(brane, gc, cover, 1)


@pytest.fixture(scope="module")
def line_v2():
    cover = fixtures.two_chart_cover()
    gc, brane = fixtures.lagrangian_line(cover)
    return build_V(brane, gc, cover, 2)


def test_section_space_coordinates(r2):
    space = SectionSpace(r2, 1)
    assert space.size == 12
    v = unit(5, space.size)
    assert space.flatten(space.section(v)) == v
    assert space.flatten(GenSection.of(r2, [r2.poly("x^2"), r2.zero], [r2.zero, r2.zero])) is None
    assert space.flatten(GenSection.of(r2, [r2.poly("I*x"), r2.zero], [r2.zero, r2.zero])) is None


def test_build_V_arguments(lagrangian, two_chart):
    gc, brane = lagrangian
    with pytest.raises(DomainError):
        build_V(brane, gc, two_chart, -1)
    with pytest.raises(DomainError):
        build_V(brane, gc, two_chart, 1, max_level=1)


def test_truncated_pieces(line_v):
    dims = line_v.dims
    assert dims["T"] and dims["H"] and dims["K"]
    assert dims["H"] <= dims["T"]
    J = line_v.gc.endo
    for i in range(dims["T"]):
        assert not endo_action(line_v.t_section(unit(i, dims["T"])), J)
    for i in range(dims["K"]):
        assert kkk_check(line_v.brane, line_v.kkk_element(unit(i, dims["K"])))
    assert dict(line_v.closure)["H"]


def test_split_assemble(line_v):
    rng = random.Random(config.seed())
    for k in range(3):
        vec = [QQ(rng.randint(-3, 3)) for _ in range(line_v.total.dim(k))]
        parts = line_v.split(k, vec)
        assert line_v.assemble(k, parts["H"], parts["K"], parts["T"]) == vec
    with pytest.raises(DomainError):
        line_v.split(1, [])


def test_phi_is_injective(line_v2):
    verdict = phi_injective(line_v2)
    assert verdict
    assert verdict.witness["rank"] == h2_total(line_v2).dim


def test_phi_ignores_coboundaries_and_shifts(line_v2, rng):
    V = line_v2
    width = V.total.dim(1)
    zch = V.brane.z.chart
    for rep in h2_total(V).basis:
        base = phi_map(V, rep).coordinates
        for _ in range(3):
            b = [QQ(rng.randint(-2, 2)) for _ in range(width)]
            moved = [p + q for p, q in zip(rep, V.total.apply(1, b))]
            shift = fixtures.random_algebroid_form(zch, V.frame.rank, rng, V.degree)
            assert phi_map(V, moved, shift).coordinates == base


def deligne_inputs(V):
    artin = truncate(2)
    y = kkk_times_artin(V, unit(0, V.dims["K"]), artin, (1,))
    x = section_times_artin(V, unit(0, V.dims["T"]), artin, (1,))
    return artin, y, x


def test_deligne_descent_gives_brane_descent(line_v):
    _, y, x = deligne_inputs(line_v)
    datum = deligne_descent_complete(line_v.cover, {(0, 1): y}, x)
    assert deligne_descent_check(line_v.brane, line_v.gc, datum)
    assert descent_validate(descent_deligne_bijection(line_v.brane, line_v.gc, datum))


def test_deligne_descent_violations(line_v):
    artin, _, x = deligne_inputs(line_v)
    zero = kkk_times_artin(line_v, [QQ(0)] * line_v.dims["K"], artin, (1,))
    datum = DeligneDescent.build(line_v.cover, {(0, 1): zero}, {0: x, 1: x * QQ_I(2)})
    verdict = deligne_descent_check(line_v.brane, line_v.gc, datum)
    assert not verdict
    assert verdict.witness == ("edge", (0, 1))
    with pytest.raises(DomainError):
        descent_deligne_bijection(line_v.brane, line_v.gc, datum)
    with pytest.raises(DomainError):
        DeligneDescent.build(line_v.cover, {}, {0: x, 1: x})


def test_deligne_completion_needs_connected_cover(line_v):
    _, _, x = deligne_inputs(line_v)
    with pytest.raises(InsolubleError):
        deligne_descent_complete(NerveCover.nerve(2), {}, x)
