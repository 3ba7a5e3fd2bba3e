"""
Named fixture models shared by ``selftest`` and the test suite.

Builders return library objects and read no files; the random ones draw from
the generator they are handed.
"""

import random
from typing import Optional, Tuple

from gcdeform.artin import ArtinAlgebra, make_artin, truncate
from gcdeform.brane import Brane, HermData, NerveCover, make_brane, submanifold, trivial_brane
from gcdeform.cartan import Chart, DiffForm, VectorField
from gcdeform.deform import BraneDeformation, DescentDatum, Equivalence
from gcdeform.dgla import FDGLA, element
from gcdeform.gcs import (AlgebroidForm, GCStructure, make_complex_gc, make_symplectic_gc, standard_chart,
                          standard_complex_matrix, standard_gc, standard_symplectic_form)


def two_chart_cover() -> NerveCover:
    return NerveCover.nerve(2, [(0, 1)])


def triangle_cover() -> NerveCover:
    return NerveCover.nerve(3, [(0, 1, 2)])


def standard_model(m: int, n: int, cover: Optional[NerveCover] = None) -> Tuple[GCStructure, Brane]:
    """X_0^{m,n} with Z_0 = {y = 0} and trivial line bundle data."""
    gc = standard_gc(m, n)
    ch = gc.chart
    retained = [i for i, name in enumerate(ch.coords) if not name.startswith("y")]
    return gc, trivial_brane(submanifold(ch, retained), cover)


def lagrangian_line(cover: Optional[NerveCover] = None) -> Tuple[GCStructure, Brane]:
    """Z = {y = 0} in (R^2, dy ^ dx)."""
    ch = Chart(("x", "y"))
    gc = make_symplectic_gc(ch, standard_symplectic_form(ch, [(0, 1)]))
    return gc, trivial_brane(submanifold(ch, ["x"]), cover)


def complex_brane(curved: bool = False, cover: Optional[NerveCover] = None) -> Tuple[GCStructure, Brane]:
    """C x {0} in C^2 on t1..t4; ``curved`` puts F = dt1 ^ dt2 on Z."""
    ch = standard_chart(0, 2)
    gc = make_complex_gc(ch, standard_complex_matrix(ch, [(0, 1), (2, 3)]))
    z = submanifold(ch, ["t1", "t2"])
    cover = cover or NerveCover.single()
    if not curved:
        return gc, trivial_brane(z, cover)
    zc = z.chart
    a = DiffForm.from_dict(zc, 1, {(1,): zc.coord(0)})
    return gc, make_brane(z, HermData.uniform(cover, a))


def incompatible_brane() -> Tuple[GCStructure, Brane]:
    """Lagrangian plane {y1 = y2 = 0} in symplectic R^4 carrying F = dx1 ^ dx2."""
    gc = standard_gc(2, 0)
    ch = gc.chart
    z = submanifold(ch, ["x1", "x2"])
    zc = z.chart
    a = DiffForm.from_dict(zc, 1, {(1,): zc.coord(0)})
    return gc, make_brane(z, HermData.uniform(NerveCover.single(), a))


def nonintegrable_gc() -> GCStructure:
    """J d1 = d2, J d2 = -d1, J d3 = d4 + x1 d2, J d4 = -d3 + x1 d1 on R^4."""
    ch = Chart(("x1", "x2", "x3", "x4"))
    x1 = ch.coord(0)
    jm = [[ch.zero] * 4 for _ in range(4)]
    jm[1][0] = ch.one
    jm[0][1] = -ch.one
    jm[3][2] = ch.one
    jm[1][2] = x1
    jm[2][3] = -ch.one
    jm[0][3] = x1
    return make_complex_gc(ch, jm)


def obstructed_dgla() -> FDGLA:
    """a in degree 1, c in degree 2, d = 0, [a, a] = c."""
    return FDGLA.build(["a", "c"], [1, 2], None, [("a", "a", {"c": 1})])


def obstructed_element(order: int = 2):
    """eps a over R[eps]/eps^order."""
    g = obstructed_dgla()
    return g, element(g, truncate(order), {(1,): {"a": 1}})


def dual_numbers_2() -> ArtinAlgebra:
    """R[eps, delta]/(eps^2, delta^2, eps delta)."""
    return make_artin(("eps", "delta"), ((2, 0), (0, 2), (1, 1)))


def broken_descent() -> DescentDatum:
    """Trivial first-order deformation of the Lagrangian line on the triangle cover,
    with the (0, 2) morphism replaced by a gauge by eps x."""
    _, brane = lagrangian_line()
    bhat = BraneDeformation.trivial(brane, truncate(2))
    zc = bhat.chart
    ident = Equivalence.identity(bhat)
    bad = Equivalence.build(VectorField.zero(zc), {0: zc.times_artin(zc.coord(0), (1,))}, ambient=bhat.ambient_chart)
    cover = triangle_cover()
    morphisms = {e: (bad if e == (0, 2) else ident) for e in cover.edges()}
    return DescentDatum.build(cover, {v: bhat for v in cover.vertices()}, morphisms)


def random_algebroid_form(chart: Chart, rank: int, rng: random.Random, degree: int) -> AlgebroidForm:
    return AlgebroidForm.from_dict(chart, rank, 1, {(i,): chart.random_poly(rng, degree) for i in range(rank)})
