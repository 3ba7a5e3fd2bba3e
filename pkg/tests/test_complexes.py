import pytest
from sympy.polys.domains import QQ

from gcdeform.brane import NerveCover
from gcdeform.complexes import (BisemiCx, CochainComplex, SemiCx, SemiCxMap, bisemi_layout, cech_semicx, identity,
                                is_chain_map, nerve_coface, tot, tot_bisemi, tot_map)
from gcdeform.errors import ComplexError, DomainError


def cohomology_dims(cx):
    return [cx.cohomology(k).dim for k in range(cx.exact_through + 1)]


def test_complex_validation():
    with pytest.raises(DomainError):
        CochainComplex.build([1, -1], [[]])
    with pytest.raises(DomainError):
        CochainComplex.build([1, 1], [])
    with pytest.raises(DomainError):
        CochainComplex.build([1, 2], [[[1]]])
    with pytest.raises(ComplexError):
        CochainComplex.build([1, 1, 1], [[[1]], [[1]]])


def test_cohomology_of_small_complex():
    cx = CochainComplex.build([2, 2], [[[1, 0], [0, 0]]])
    assert cohomology_dims(cx) == [1, 1]
    exact = CochainComplex.build([1, 2, 1], [[[1], [0]], [[0, 1]]])
    assert cohomology_dims(exact) == [0, 0, 0]
    with pytest.raises(DomainError):
        cx.cohomology(2)


def test_preimage():
    cx = CochainComplex.build([2, 2], [[[1, 0], [0, 0]]])
    b = cx.preimage(1, [QQ(3), QQ(0)])
    assert cx.apply(0, b) == [QQ(3), QQ(0)]
    assert cx.preimage(1, [QQ(0), QQ(1)]) is None
    assert cx.preimage(0, [QQ(1), QQ(0)]) is None
    assert cx.is_cocycle(1, [QQ(0), QQ(1)])


def test_nerve_coface_drops_vertices(two_chart):
    assert nerve_coface(two_chart, 0, 0, 1) == [[QQ(0), QQ(1)]]
    assert nerve_coface(two_chart, 0, 1, 1) == [[QQ(1), QQ(0)]]


@pytest.mark.parametrize("simplices, expected", [
    ([(0, 1)], [1, 0]),
    ([(0, 1, 2)], [1, 0, 0]),
    ([(0, 1), (1, 2), (0, 2)], [1, 1]),
    ([(0, 1), (2, 3)], [2, 0]),
])
def test_cech_cohomology_of_nerves(simplices, expected):
    vertices = 1 + max(v for s in simplices for v in s)
    total = tot(cech_semicx(NerveCover.nerve(vertices, simplices)))
    assert cohomology_dims(total) == expected


def test_cech_with_fibre(two_chart, triangle):
    assert tot(cech_semicx(two_chart, 2)).cohomology(0).dim == 2
    assert tot(cech_semicx(triangle, 1)).dims == (3, 3, 1)


def test_semicx_validation():
    line = CochainComplex.build([1, 1], [[[1]]])
    with pytest.raises(DomainError):
        SemiCx.build([line, line], [[[[[1]], [[1]]]]])
    with pytest.raises(ComplexError):
        SemiCx.build([line, line], [[[[[1]], [[0]]], [[[1]], [[1]]]]])
    with pytest.raises(DomainError):
        SemiCx.build([], [])


def test_truncated_row_limits_exactness(two_chart):
    V = cech_semicx(two_chart)
    cut = SemiCx.build(V.levels, V.cofaces, truncated=True)
    assert tot(cut).exact_through == 0


def test_identity_map_induces_identity(triangle):
    V = cech_semicx(triangle)
    f = SemiCxMap.build(V, V, [[identity(lv.dim(0))] for lv in V.levels])
    mats = tot_map(f)
    T = tot(V)
    assert is_chain_map(mats, T, T)
    assert all(m == identity(n) for m, n in zip(mats, T.dims))


def test_map_must_commute_with_cofaces(two_chart):
    V = cech_semicx(two_chart)
    doubled = [[QQ(2) if i == j else QQ(0) for j in range(2)] for i in range(2)]
    with pytest.raises(ComplexError):
        SemiCxMap.build(V, V, [[doubled], [identity(1)]])


def test_bisemicosimplicial_totalization(two_chart):
    row = cech_semicx(two_chart)
    ident = [[identity(lv.dim(0))] for lv in row.levels]
    V = BisemiCx.build([row, row], [[ident, ident]])
    total = tot_bisemi(V)
    assert total.dims == (2, 3, 1)
    assert cohomology_dims(total) == [1, 1, 0]
    layout = bisemi_layout(V)
    assert layout[0] == [((0, 0), 0, 2)]
    assert layout[1] == [((1, 0), 0, 1), ((0, 1), 1, 2)]
