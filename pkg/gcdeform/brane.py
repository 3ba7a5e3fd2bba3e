"""
Branes on coordinate subspaces.

- ``CoordSubmanifold``: Z = {y^I = 0}; ``restrict`` (rho), ``lift`` (pi^*),
  ``vanishes_on`` (membership in I^Z).
- ``NerveCover`` / ``HermData`` / ``Brane``: line-bundle cocycle data and the
  curvature F.
- Checks: ``gen_tangent_membership``, ``in_KB``, ``brane_compatible``,
  ``preserves_tb``, ``lwl_check``.
- ``BraneFrame``: constant frames of T_B (x) C, of l = +i part, and of a normal
  complement; ``normal_mu``, ``delta_l``, ``brane_bracket``.
- ``cohomology``: truncated Lie algebroid cohomology, stable or naive.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, islice, product
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I

from . import ring as R
from .artin import REALS, ArtinAlgebra
from .cartan import Chart, DiffForm, VectorField, _check_same, contract, ext_d, pullback_restrict
from .courant import GenSection, dorfman, pairing
from .errors import DomainError, IncompatibleError, NotClosedError
from .gcs import AlgebroidForm, GCStructure, ce_differential
from .results import CheckResult, Cohomology

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


@dataclass(frozen=True)
class CoordSubmanifold:
    ambient: Chart
    retained: Tuple[int, ...]

    def __post_init__(self):
        if self.ambient.artin != REALS:
            raise DomainError("submanifolds are declared on a chart without Artin generators")
        if len(set(self.retained)) != len(self.retained) or any(i < 0 or i >= self.ambient.n for i in self.retained):
            raise DomainError(f"bad retained indices {self.retained}")
        if not self.retained:
            raise DomainError("Z must keep at least one coordinate")

    @property
    def normal(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.ambient.n) if i not in self.retained)

    @property
    def dim(self) -> int:
        return len(self.retained)

    @cached_property
    def chart(self) -> Chart:
        return Chart(tuple(self.ambient.coords[i] for i in self.retained))

    def chart_on(self, artin: ArtinAlgebra) -> Chart:
        return self.chart if artin == REALS else Chart(self.chart.coords, artin)

    def ambient_on(self, artin: ArtinAlgebra) -> Chart:
        return self.ambient if artin == REALS else self.ambient.with_artin(artin)

    def restrict(self, p, source: Optional[Chart] = None):
        """Set the normal coordinates to zero; result lives on Z (same Artin generators)."""
        source = source or self.ambient
        source.check(p)
        target = self.chart_on(source.artin)
        n = source.n
        normal = self.normal
        out = {}
        for mono, c in p.iterterms():
            if any(mono[i] for i in normal):
                continue
            m = tuple(mono[i] for i in self.retained) + tuple(mono[n:])
            out[m] = c
        return target.ring.from_dict(out) if out else target.zero

    def lift(self, p, target: Optional[Chart] = None):
        target = target or self.ambient
        return target.transfer(p, self.chart_on(target.artin))

    def vanishes_on(self, p, source: Optional[Chart] = None) -> bool:
        return not self.restrict(p, source)

    def restrict_form(self, form: DiffForm) -> DiffForm:
        """Pullback i^* to Z."""
        return pullback_restrict(form, self.chart_on(form.chart.artin), self.retained)

    def lift_form(self, form: DiffForm, target: Optional[Chart] = None) -> DiffForm:
        """pi^* of a form on Z, indices carried to the retained positions."""
        target = target or self.ambient_on(form.chart.artin)
        if not form.terms:
            return DiffForm(target, form.degree, ())
        return DiffForm.from_dict(target, form.degree,
                                  {tuple(self.retained[i] for i in idx): self.lift(c, target) for idx, c in form.terms})

    def restrict_vf(self, xi: VectorField) -> VectorField:
        """Tangential part of xi along Z, as a vector field on Z."""
        ch = self.chart_on(xi.chart.artin)
        return VectorField(ch, tuple(self.restrict(xi.comps[i], xi.chart) for i in self.retained))

    def lift_vf(self, xi: VectorField, target: Optional[Chart] = None) -> VectorField:
        target = target or self.ambient_on(xi.chart.artin)
        comps = [target.zero] * target.n
        for k, i in enumerate(self.retained):
            comps[i] = self.lift(xi.comps[k], target)
        return VectorField(target, tuple(comps))

    def restrict_section(self, s: GenSection) -> Tuple:
        """All 2n components of s restricted to Z."""
        return tuple(self.restrict(p, s.chart) for p in s.vector())

    def grid(self, values: Sequence = (0, 1, -1), limit: int = 27) -> List[Tuple]:
        """Ambient points of Z from a rational grid (normal coordinates zero)."""
        pts = []
        for vals in islice(product(values, repeat=self.dim), limit):
            p = [QQ(0)] * self.ambient.n
            for i, v in zip(self.retained, vals):
                p[i] = QQ.convert(v)
            pts.append(tuple(p))
        return pts


def submanifold(ambient: Chart, retained: Sequence) -> CoordSubmanifold:
    """Retained coordinates given by index or label."""
    idx = tuple(ambient.index(r) if isinstance(r, str) else int(r) for r in retained)
    return CoordSubmanifold(ambient, idx)


# ---------------------------------------------------------------------------
# covers and line bundle data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NerveCover:
    n_vertices: int
    simplices: Tuple[Simplex, ...]

    @classmethod
    def nerve(cls, n_vertices: int, simplices: Sequence[Sequence[int]] = ()) -> "NerveCover":
        """Downward closure of the given simplices; every vertex is included."""
        if n_vertices < 1:
            raise DomainError("a cover needs at least one chart")
        closed = {(v,) for v in range(n_vertices)}
        for s in simplices:
            s = tuple(sorted(set(int(v) for v in s)))
            if any(v < 0 or v >= n_vertices for v in s):
                raise DomainError(f"simplex {s} uses an unknown vertex")
            for k in range(1, len(s) + 1):
                closed.update(combinations(s, k))
        return cls(n_vertices, tuple(sorted(closed, key=lambda t: (len(t), t))))

    @classmethod
    def single(cls) -> "NerveCover":
        return cls.nerve(1)

    def vertices(self) -> Tuple[int, ...]:
        return tuple(range(self.n_vertices))

    def of_dim(self, k: int) -> Tuple[Simplex, ...]:
        return tuple(s for s in self.simplices if len(s) == k + 1)

    def edges(self) -> Tuple[Simplex, ...]:
        return self.of_dim(1)

    def triangles(self) -> Tuple[Simplex, ...]:
        return self.of_dim(2)

    def spanning_tree(self) -> Tuple[List[Tuple[int, int]], List[int]]:
        """BFS tree edges (parent, child) from vertex 0 and the list of roots per component."""
        adjacent: Dict[int, List[int]] = {v: [] for v in self.vertices()}
        for a, b in self.edges():
            adjacent[a].append(b)
            adjacent[b].append(a)
        seen, tree, roots = set(), [], []
        for root in self.vertices():
            if root in seen:
                continue
            roots.append(root)
            seen.add(root)
            queue = [root]
            while queue:
                v = queue.pop(0)
                for w in sorted(adjacent[v]):
                    if w not in seen:
                        seen.add(w)
                        tree.append((v, w))
                        queue.append(w)
        return tree, roots


def _is_integer_constant(chart: Chart, p) -> bool:
    if not chart.is_constant(p):
        return False
    c = chart.constant_value(p)
    return not c.y and c.x.denominator == 1


@dataclass(frozen=True)
class HermData:
    """c on edges, a on vertices, all on the chart of Z."""

    cover: NerveCover
    chart: Chart
    c: Tuple[Tuple[Simplex, object], ...]
    a: Tuple[Tuple[int, DiffForm], ...]

    @classmethod
    def build(cls, cover: NerveCover, chart: Chart, c: Dict[Simplex, object], a: Dict[int, DiffForm]) -> "HermData":
        cc = []
        for e in cover.edges():
            cc.append((e, chart.check(c.get(e, chart.zero))))
        unknown = set(c) - set(cover.edges())
        if unknown:
            raise DomainError(f"c given on non-edges {sorted(unknown)}")
        aa = []
        for v in cover.vertices():
            form = a.get(v, DiffForm.zero(chart, 1))
            _check_same(chart, form.chart)
            if form.degree != 1:
                raise DomainError("a_I must be 1-forms")
            aa.append((v, form))
        return cls(cover, chart, tuple(cc), tuple(aa))

    @classmethod
    def trivial(cls, cover: NerveCover, chart: Chart) -> "HermData":
        return cls.build(cover, chart, {}, {})

    @classmethod
    def uniform(cls, cover: NerveCover, a: DiffForm) -> "HermData":
        return cls.build(cover, a.chart, {}, {v: a for v in cover.vertices()})

    def c_of(self, edge: Simplex):
        return dict(self.c).get(tuple(edge), self.chart.zero)

    def a_of(self, v: int) -> DiffForm:
        return dict(self.a)[v]

    def validate(self) -> CheckResult:
        ch = self.chart
        for i, j, k in self.cover.triangles():
            s = self.c_of((j, k)) - self.c_of((i, k)) + self.c_of((i, j))
            if not _is_integer_constant(ch, s):
                return CheckResult(False, (i, j, k), "c is not an integer cocycle")
        for i, j in self.cover.edges():
            if self.a_of(j) - self.a_of(i) != ext_d(DiffForm.function(ch, self.c_of((i, j)))):
                return CheckResult(False, (i, j), "a_J - a_I != dc_IJ")
        return CheckResult(True)

    def curvature(self) -> DiffForm:
        forms = [ext_d(a) for _, a in self.a]
        if any(f != forms[0] for f in forms[1:]):
            raise NotClosedError("local curvatures da_I do not agree")
        return forms[0]


@dataclass(frozen=True)
class Brane:
    z: CoordSubmanifold
    herm: HermData

    @property
    def cover(self) -> NerveCover:
        return self.herm.cover

    @cached_property
    def F(self) -> DiffForm:
        return self.herm.curvature()

    @property
    def ambient(self) -> Chart:
        return self.z.ambient


def make_brane(z: CoordSubmanifold, herm: HermData) -> Brane:
    _check_same(z.chart, herm.chart)
    verdict = herm.validate()
    if not verdict:
        raise DomainError(f"Herm data invalid at {verdict.witness}: {verdict.detail}")
    return Brane(z, herm)


def trivial_brane(z: CoordSubmanifold, cover: Optional[NerveCover] = None) -> Brane:
    return make_brane(z, HermData.trivial(cover or NerveCover.single(), z.chart))


# ---------------------------------------------------------------------------
# generalized tangent bundle and compatibility
# ---------------------------------------------------------------------------

def k_frame(brane: Brane, chart: Optional[Chart] = None, F: Optional[DiffForm] = None) -> List[GenSection]:
    """(d/dx^i, i(d/dx^i)F~) for retained i and (0, dy^I) for normal I.

    Together with sections vanishing on Z these span K^B over functions.
    """
    z = brane.z
    ch = chart or z.ambient
    F = brane.F if F is None else F
    Ft = z.lift_form(F, ch)
    frame = []
    for i in z.retained:
        xi = VectorField.basis(ch, i)
        form = contract(xi, Ft) if Ft.terms else DiffForm.zero(ch, 1)
        frame.append(GenSection(xi, form))
    for i in z.normal:
        frame.append(GenSection(VectorField.zero(ch), DiffForm.basis(ch, (i,))))
    return frame


def gen_tangent_membership(brane: Brane, x: GenSection) -> bool:
    """x|_Z lies in T(Z, F): xi tangent to Z and i^*a = i(xi)F."""
    z = brane.z
    for i in z.normal:
        if not z.vanishes_on(x.vf.comps[i], x.chart):
            return False
    xi_z = z.restrict_vf(x.vf)
    pulled = [z.restrict(x.form.comps()[i], x.chart) for i in z.retained]
    F = brane.F
    if xi_z.chart != F.chart:
        F = DiffForm(xi_z.chart, 2, tuple((k, xi_z.chart.transfer(v, F.chart)) for k, v in F.terms))
    expected = contract(xi_z, F).comps()
    return tuple(pulled) == tuple(expected)


def in_KB(brane: Brane, x: GenSection) -> bool:
    return gen_tangent_membership(brane, x)


def brane_compatible(brane: Brane, gc: GCStructure) -> CheckResult:
    """Q_J(k, k') = <J k, k'> vanishes on Z for all frame pairs of K^B."""
    z = brane.z
    frame = k_frame(brane)
    images = [gc.apply(k) for k in frame]
    for a, jk in enumerate(images):
        for b, k2 in enumerate(frame):
            if not z.vanishes_on(pairing(jk, k2)):
                logger.debug("compatibility fails on frame pair (%d, %d)", a, b)
                return CheckResult(False, (a, b), "Q_J does not vanish on Z")
    return CheckResult(True)


def preserves_tb(brane: Brane, gc: GCStructure) -> CheckResult:
    """J maps the frame of T(Z, F) into T(Z, F)."""
    for a, k in enumerate(k_frame(brane)):
        if not gen_tangent_membership(brane, gc.apply(k)):
            return CheckResult(False, a, "J leaves T(Z,F)")
    return CheckResult(True)


def lwl_check(brane: Brane, gc: GCStructure, points: Optional[Sequence[Sequence]] = None) -> CheckResult:
    """T_zZ cap S_z is Lagrangian in S_z = P(T*X) at sampled points of Z."""
    z = brane.z
    ch = z.ambient
    n = ch.n
    points = z.grid() if points is None else points
    ranks = set()
    for point in points:
        where = {i: QQ.convert(v) for i, v in enumerate(point)}
        P = [[ch.constant_value(ch.evaluate(e, where)) for e in row] for row in gc.P]
        rk = R.rank(P, n, QQ_I)
        ranks.add(rk)
        if len(ranks) > 1:
            raise DomainError(f"irregular point {tuple(point)}: rank of P changes along Z")
        normal_rows = [P[i] for i in z.normal]
        K = R.kernel(normal_rows, n, QQ_I) if normal_rows else [[QQ_I.one if i == j else QQ_I.zero for j in range(n)]
                                                                 for i in range(n)]
        W = [R.mat_vec(P, a, QQ_I) for a in K]
        dim_w = len(R.span_basis(W, n, QQ_I)) if W else 0
        for a in K:
            Pa = R.mat_vec(P, a, QQ_I)
            for b in K:
                if sum((x * y for x, y in zip(b, Pa)), QQ_I.zero):
                    return CheckResult(False, tuple(point), "T Z cap S is not isotropic")
        if 2 * dim_w != rk:
            return CheckResult(False, tuple(point), f"T Z cap S has dimension {dim_w}, expected {rk // 2}")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# the Lie algebroid l
# ---------------------------------------------------------------------------

class _FrameSolver:
    """Coefficients of polynomial vectors against a constant frame, through pivot rows."""

    def __init__(self, vectors: Sequence[Sequence]):
        self.vectors = [[QQ_I.convert(c) for c in v] for v in vectors]
        k = len(self.vectors)
        length = len(self.vectors[0])
        _, pivots = R.rref(self.vectors, length, QQ_I)
        if len(pivots) != k:
            raise DomainError("frame vectors are linearly dependent")
        self.rows = list(pivots)
        sub = [[self.vectors[j][r] for j in range(k)] for r in self.rows]
        self.inverse = R.inverse(sub, QQ_I)

    def solve(self, chart: Chart, comps: Sequence) -> List:
        k = len(self.vectors)
        picked = [comps[r] for r in self.rows]
        coeffs = []
        for i in range(k):
            total = chart.zero
            for j in range(k):
                if self.inverse[i][j] and picked[j]:
                    total += chart.scale(picked[j], self.inverse[i][j])
            coeffs.append(total)
        for r, comp in enumerate(comps):
            rebuilt = chart.zero
            for j in range(k):
                if self.vectors[j][r] and coeffs[j]:
                    rebuilt += chart.scale(coeffs[j], self.vectors[j][r])
            if rebuilt != comp:
                raise DomainError("vector is not in the span of the frame")
        return coeffs


@dataclass(frozen=True)
class BraneFrame:
    brane: Brane
    gc: GCStructure
    tb: Tuple[GenSection, ...]
    l: Tuple[GenSection, ...]
    l_in_tb: Tuple[Tuple, ...]
    normal: Tuple[GenSection, ...]
    normal_matrix: Tuple[Tuple, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.l)

    @property
    def z(self) -> CoordSubmanifold:
        return self.brane.z

    def z_chart(self, artin: ArtinAlgebra = REALS) -> Chart:
        return self.z.chart_on(artin)

    def anchors(self, chart: Optional[Chart] = None) -> List[VectorField]:
        chart = chart or self.z.chart
        out = []
        for s in self.l:
            vf = self.z.restrict_vf(s.vf)
            out.append(VectorField(chart, tuple(chart.transfer(c, vf.chart) for c in vf.comps)))
        return out

    @cached_property
    def _tb_solver(self) -> _FrameSolver:
        ch = self.z.ambient
        return _FrameSolver([[ch.constant_value(p) for p in s.vector()] for s in self.tb])

    @cached_property
    def _l_solver(self) -> _FrameSolver:
        return _FrameSolver(self.l_in_tb)

    def tb_coordinates(self, chart: Chart, comps: Sequence) -> List:
        return self._tb_solver.solve(chart, comps)

    def l_coordinates(self, chart: Chart, comps: Sequence) -> List:
        """Coefficients on Z of a restricted section of l against the l frame."""
        return self._l_solver.solve(chart, self._tb_solver.solve(chart, comps))


def brane_frame(brane: Brane, gc: GCStructure) -> BraneFrame:
    if not gc.is_constant():
        raise DomainError("brane frames need a constant-coefficient GC structure")
    if not all(brane.z.chart.is_constant(c) for _, c in brane.F.terms):
        raise DomainError("brane frames need constant curvature")
    verdict = brane_compatible(brane, gc)
    if not verdict:
        raise IncompatibleError(f"brane is not compatible (frame pair {verdict.witness})")
    ch = brane.ambient
    tb = k_frame(brane)
    solver = _FrameSolver([[ch.constant_value(p) for p in s.vector()] for s in tb])
    M = []
    for s in tb:
        M.append([ch.constant_value(c) for c in solver.solve(ch, gc.apply(s).vector())])
    M = R.transpose(M, len(tb))
    n = len(tb)
    shifted = [[M[i][j] - (QQ_I(0, 1) if i == j else QQ_I.zero) for j in range(n)] for i in range(n)]
    coords = R.kernel(shifted, n, QQ_I)
    if len(coords) != n // 2:
        raise DomainError(f"l has rank {len(coords)}, expected {n // 2}")
    l_sections = []
    for v in coords:
        total = GenSection.zero(ch)
        for c, s in zip(v, tb):
            if c:
                total = total + s * c
        l_sections.append(total)
    normal = [GenSection(VectorField.basis(ch, i), DiffForm.zero(ch, 1)) for i in brane.z.normal]
    normal += [GenSection(VectorField.zero(ch), DiffForm.basis(ch, (i,))) for i in brane.z.retained]
    real_rows = []
    for nv in normal:
        row = []
        for s in l_sections:
            v = ch.constant_value(pairing(nv, s) * 2)
            row += [v.x, v.y]
        real_rows.append(row)
    if R.rank(real_rows, len(real_rows[0]) if real_rows else 0) != len(normal):
        raise DomainError("normal complement does not pair nondegenerately with l")
    logger.debug("brane frame: rank T_B %d, rank l %d", n, len(l_sections))
    return BraneFrame(brane, gc, tuple(tb), tuple(l_sections), tuple(tuple(v) for v in coords), tuple(normal),
                      tuple(tuple(r) for r in real_rows))


def normal_mu(frame: BraneFrame, x: GenSection) -> AlgebroidForm:
    """mu q(x)(l_a) = rho(2 <x, l_a>), a function on Z per frame element."""
    z = frame.z
    zch = z.chart_on(x.chart.artin)
    vals = {(a,): z.restrict(pairing(x, s.lift(x.chart)) * 2, x.chart) for a, s in enumerate(frame.l)}
    return AlgebroidForm.from_dict(zch, frame.rank, 1, vals)


def normal_preimage(frame: BraneFrame, alpha: AlgebroidForm) -> GenSection:
    """Real section x = sum pi^*(g_N) n_N with normal_mu(x) = alpha."""
    if alpha.degree != 1:
        raise DomainError("normal_preimage takes an algebroid 1-form")
    z = frame.z
    zch = alpha.chart
    amb = z.ambient_on(zch.artin)
    r = frame.rank
    count = len(frame.normal)
    cols = [list(row) for row in frame.normal_matrix]
    system = R.transpose(cols, 2 * r)
    monos = set()
    for a in range(r):
        monos.update(alpha.coeff((a,)).keys())
    g = [zch.zero] * count
    for mono in sorted(monos):
        rhs = []
        for a in range(r):
            c = QQ_I.convert(alpha.coeff((a,)).get(mono, QQ_I.zero))
            rhs += [c.x, c.y]
        sol = R.solve(system, count, rhs)
        if sol is None:
            raise DomainError("algebroid form has no normal preimage")
        for k, v in enumerate(sol):
            if v:
                g[k] += zch.ring.term_new(mono, QQ_I.convert(v))
    total = GenSection.zero(amb)
    for gk, nv in zip(g, frame.normal):
        if gk:
            total = total + nv.lift(amb).times(z.lift(gk, amb))
    return total


def delta_l(frame: BraneFrame, alpha: AlgebroidForm) -> AlgebroidForm:
    if alpha.degree > frame.rank:
        raise DomainError("form degree exceeds the rank of l")
    return ce_differential(frame.anchors(alpha.chart), alpha)


def brane_bracket(frame: BraneFrame, x: GenSection, y: GenSection) -> List:
    """l-coordinates on Z of r([[x~, y~]]) for lifts x~, y~ of sections of l."""
    z = frame.z
    zch = z.chart_on(x.chart.artin)
    restricted = z.restrict_section(dorfman(x, y))
    return frame.l_coordinates(zch, restricted)


def canonical_lift(frame: BraneFrame, coeffs: Sequence) -> GenSection:
    """pi^*(f_a) l_a for functions f_a on Z."""
    z = frame.z
    if len(coeffs) != frame.rank:
        raise DomainError("one coefficient per frame element is required")
    amb = z.ambient
    total = GenSection.zero(amb)
    for f, s in zip(coeffs, frame.l):
        if f:
            total = total + s.times(z.lift(f, amb))
    return total


def evaluate_on_lifts(frame: BraneFrame, alpha: AlgebroidForm, sections: Sequence[GenSection]):
    """alpha(s_1, ..., s_k) on Z for ambient lifts of sections of l (degree 0 or 1)."""
    z = frame.z
    zch = alpha.chart
    if alpha.degree == 0:
        return alpha.coeff(())
    if alpha.degree != 1 or len(sections) != 1:
        raise DomainError("evaluation implemented in degrees 0 and 1")
    coeffs = frame.l_coordinates(zch, z.restrict_section(sections[0]))
    total = zch.zero
    for a, f in enumerate(coeffs):
        if f:
            total += zch.mul(f, alpha.coeff((a,)))
    return total


def delta_l_on_lifts(frame: BraneFrame, alpha: AlgebroidForm, x: GenSection, y: Optional[GenSection] = None):
    """Cartan formula for delta_l evaluated on lifts:

    degree 0: rho(x) f; degree 1: rho(x)a(y) - rho(y)a(x) - a([x,y]_B).
    """
    z = frame.z
    zch = alpha.chart
    rx = z.restrict_vf(x.vf)
    if alpha.degree == 0:
        return rx.apply(alpha.coeff(()))
    if y is None:
        raise DomainError("degree-1 evaluation needs two sections")
    ry = z.restrict_vf(y.vf)
    bracket = brane_bracket(frame, x, y)
    a_bracket = zch.zero
    for a, f in enumerate(bracket):
        if f:
            a_bracket += zch.mul(f, alpha.coeff((a,)))
    return (rx.apply(evaluate_on_lifts(frame, alpha, [y])) - ry.apply(evaluate_on_lifts(frame, alpha, [x]))
            - a_bracket)


# ---------------------------------------------------------------------------
# truncated cohomology
# ---------------------------------------------------------------------------

def form_labels(frame: BraneFrame, k: int, degree: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    if k < 0 or k > frame.rank or degree < 0:
        return []
    monos = R.monomials_up_to(frame.z.dim, degree)
    return [(idx, tuple(m)) for idx in combinations(range(frame.rank), k) for m in monos]


def form_vector(alpha: AlgebroidForm, labels: Sequence) -> List:
    index = {lab: i for i, lab in enumerate(labels)}
    vec = [QQ_I.zero] * len(labels)
    for idx, c in alpha.terms:
        for mono, coeff in c.iterterms():
            key = (idx, tuple(mono))
            if key not in index:
                raise DomainError(f"term {key} lies outside the truncated cochain space")
            vec[index[key]] = coeff
    return vec


def form_from_vector(frame: BraneFrame, k: int, labels: Sequence, vec: Sequence) -> AlgebroidForm:
    zch = frame.z.chart
    coeffs: Dict[Tuple[int, ...], object] = {}
    for (idx, mono), c in zip(labels, vec):
        if c:
            coeffs[idx] = coeffs.get(idx, zch.zero) + zch.ring.term_new(mono, QQ_I.convert(c))
    return AlgebroidForm.from_dict(zch, frame.rank, k, coeffs)


def _delta_matrix(frame: BraneFrame, k: int, src_degree: int, tgt_degree: int):
    src = form_labels(frame, k, src_degree)
    tgt = form_labels(frame, k + 1, tgt_degree)
    cols = []
    for i in range(len(src)):
        unit = [QQ_I.one if j == i else QQ_I.zero for j in range(len(src))]
        cols.append(form_vector(delta_l(frame, form_from_vector(frame, k, src, unit)), tgt))
    return src, tgt, cols


def cohomology(brane: Brane, gc: GCStructure, k: int, degree: int, filtration: str = "stable",
               frame: Optional[BraneFrame] = None) -> Cohomology:
    """H^k of (Lambda l^v, delta_l) with coefficients of degree <= D.

    ``stable``: boundaries come from (k-1)-cochains of degree <= D+1.
    ``naive``: both cocycles and boundaries in degree <= D.
    """
    if filtration not in ("stable", "naive"):
        raise DomainError(f"unknown filtration {filtration!r}")
    frame = frame or brane_frame(brane, gc)
    if k < 0 or k > frame.rank:
        raise DomainError(f"degree {k} out of range 0..{frame.rank}")
    labels, _, cols = _delta_matrix(frame, k, degree, degree)
    rows = R.transpose(cols, len(form_labels(frame, k + 1, degree))) if cols else []
    n = len(labels)
    cocycles = R.kernel(rows, n, QQ_I) if rows else [[QQ_I.one if i == j else QQ_I.zero for j in range(n)]
                                                     for i in range(n)]
    prev = degree + 1 if filtration == "stable" else degree
    boundaries: List[List] = []
    if k > 0:
        _, _, bcols = _delta_matrix(frame, k - 1, prev, degree)
        boundaries = R.span_basis(bcols, n, QQ_I)
    dim, reps = R.quotient_dim(boundaries, cocycles, n, QQ_I)
    logger.debug("H^%d (%s, D=%d): cochains %d, cocycles %d, boundaries %d", k, filtration, degree, n,
                 len(cocycles), len(boundaries))
    return Cohomology(k, dim, tuple(tuple(v) for v in reps), len(cocycles),
                      tuple(tuple(v) for v in boundaries), filtration, tuple(labels))


def classify(coh: Cohomology, alpha: AlgebroidForm) -> List:
    """Coordinates of [alpha] against the representatives of ``coh``."""
    vec = form_vector(alpha, coh.labels)
    basis = [list(v) for v in coh.basis] + [list(v) for v in coh.coboundaries]
    sol = R.coordinates(basis, vec, QQ_I)
    if sol is None:
        raise DomainError("form is not a cocycle of the truncated complex")
    return sol[:coh.dim]


def ext_count(brane: Brane, gc: GCStructure, degree: int) -> int:
    """dim of H^0(O_NZ) + H^0(Omega^1_Z) in holomorphic polynomial degree <= D."""
    if gc.kind != "complex":
        raise DomainError("the Ext count is defined for complex structures")
    a = brane.z.dim // 2
    b = (brane.ambient.n - brane.z.dim) // 2
    return (a + b) * comb(degree + a, a)
