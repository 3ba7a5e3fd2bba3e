"""
Generalized complex structures on a polynomial chart.

- Constructors: ``make_complex_gc``, ``make_symplectic_gc``, ``standard_gc``,
  ``product_gc``, ``b_transform_gc``, ``sym_act_gc``.
- Checks: ``almost_check``, ``nijenhuis`` / ``is_integrable``, ``type_at``,
  ``is_regular``.
- The +i eigenbundle: ``l_frame``, ``mu``, ``delta_L`` (constant coefficients).
- Symmetries: ``is_gen_holomorphic``, ``gen_hamiltonian``,
  ``hamiltonian_witness`` (alias ``hamiltonian_bracket_witness``).
- Standard-model families ``r_section`` / ``s_section`` and their generators.

The block form is J(xi, a) = (J xi + P a, sigma xi + K a).
"""

import logging
from dataclasses import dataclass
from itertools import combinations, islice, product
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I

from . import ring as R
from .cartan import REALS, Chart, DiffForm, VectorField, _check_same, _sort_sign, ext_d
from .courant import (GenEndo, GenSection, SymElement, courant_bracket, endo_action,
                      endo_b_transform, pairing, sym_act_endo)
from .errors import ConsistencyError, DomainError, NotClosedError
from .results import CheckResult

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]


@dataclass(frozen=True)
class GCStructure:
    endo: GenEndo
    kind: str = "matrix"

    @property
    def chart(self) -> Chart:
        return self.endo.chart

    @property
    def n(self) -> int:
        return self.chart.n

    def apply(self, s: GenSection) -> GenSection:
        if s.chart != self.chart:
            return self.lift(s.chart).apply(s)
        return self.endo.apply(s)

    def block(self, name: str) -> List[List]:
        return self.endo.block(name)

    @property
    def P(self) -> List[List]:
        return self.block("P")

    @property
    def K(self) -> List[List]:
        return self.block("K")

    def lift(self, chart: Chart) -> "GCStructure":
        if chart == self.chart:
            return self
        return GCStructure(self.endo.lift(chart), self.kind)

    def is_constant(self) -> bool:
        return self.endo.is_constant()


def _sub_chart_check(chart: Chart):
    if chart.artin != REALS:
        raise DomainError("GC structures are built on charts without Artin generators")


def make_complex_gc(chart: Chart, jcx: Sequence[Sequence]) -> GCStructure:
    """jcx[i][j] is the i-th component of J(d/dx^j); result is diag(-J, J^T)."""
    _sub_chart_check(chart)
    n = chart.n
    if n % 2:
        raise DomainError("an almost complex structure needs even dimension")
    jm = [[chart.check(jcx[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            sq = chart.zero
            for k in range(n):
                if jm[i][k] and jm[k][j]:
                    sq += chart.mul(jm[i][k], jm[k][j])
            if sq != (-chart.one if i == j else chart.zero):
                raise DomainError("J_cx does not square to -1")
    zero = [[chart.zero] * n for _ in range(n)]
    neg = [[-jm[i][j] for j in range(n)] for i in range(n)]
    dual = [[jm[j][i] for j in range(n)] for i in range(n)]
    return GCStructure(GenEndo.from_blocks(chart, neg, zero, zero, dual), "complex")


def standard_complex_matrix(chart: Chart, pairs: Sequence[Tuple[int, int]]) -> List[List]:
    """J d/dt_a = d/dt_b and J d/dt_b = -d/dt_a for each pair (a, b)."""
    n = chart.n
    jm = [[chart.zero] * n for _ in range(n)]
    for a, b in pairs:
        jm[b][a] = chart.one
        jm[a][b] = -chart.one
    return jm


def make_symplectic_gc(chart: Chart, omega: DiffForm) -> GCStructure:
    """J = [[0, -W^-1], [W, 0]] with W xi = i(xi) omega; omega constant and nondegenerate."""
    _sub_chart_check(chart)
    _check_same(chart, omega.chart)
    if omega.degree != 2:
        raise DomainError("omega must be a 2-form")
    if chart.n > 2 and ext_d(omega):
        raise NotClosedError("omega is not closed")
    n = chart.n
    if not all(chart.is_constant(c) for _, c in omega.terms):
        raise DomainError("only constant symplectic forms are supported")
    w = [[chart.constant_value(omega.coeff((j, i))) for j in range(n)] for i in range(n)]
    if R.rank(w, n, QQ_I) != n:
        raise DomainError("omega is degenerate")
    winv = R.inverse(w, QQ_I)
    zero = [[chart.zero] * n for _ in range(n)]
    P = [[chart.const(-winv[i][j]) for j in range(n)] for i in range(n)]
    sigma = [[chart.const(w[i][j]) for j in range(n)] for i in range(n)]
    return GCStructure(GenEndo.from_blocks(chart, zero, P, sigma, zero), "symplectic")


def standard_symplectic_form(chart: Chart, pairs: Sequence[Tuple[int, int]]) -> DiffForm:
    """sum dy^i ^ dx^i for (x index, y index) pairs."""
    return DiffForm.from_dict(chart, 2, {(y, x): chart.one for x, y in pairs})


def standard_chart(m: int, n: int) -> Chart:
    if m < 0 or n < 0 or m + n == 0:
        raise DomainError("standard models need m, n >= 0 and m + n >= 1")
    coords = tuple(f"x{i}" for i in range(1, m + 1)) + tuple(f"y{i}" for i in range(1, m + 1))
    coords += tuple(f"t{i}" for i in range(1, 2 * n + 1))
    return Chart(coords)


def product_gc(first: GCStructure, second: GCStructure) -> GCStructure:
    """Block product on the disjoint union of coordinates."""
    c1, c2 = first.chart, second.chart
    if set(c1.coords) & set(c2.coords):
        raise DomainError("product_gc needs disjoint coordinate labels")
    chart = Chart(c1.coords + c2.coords)
    n1, n2 = c1.n, c2.n
    n = n1 + n2
    size = 2 * n
    rows = [[chart.zero] * size for _ in range(size)]
    for src, offset, nk in ((first, 0, n1), (second, n1, n2)):
        pos = [offset + i for i in range(nk)] + [n + offset + i for i in range(nk)]
        for i, row in enumerate(src.endo.rows):
            for j, entry in enumerate(row):
                if entry:
                    rows[pos[i]][pos[j]] = chart.transfer(entry, src.chart)
    kind = first.kind if first.kind == second.kind else "product"
    return GCStructure(GenEndo(chart, tuple(tuple(r) for r in rows)), kind)


def standard_gc(m: int, n: int) -> GCStructure:
    """X_0^{m,n}: standard symplectic R^{2m} times standard complex C^n."""
    chart = standard_chart(m, n)
    parts = []
    if m:
        sym_chart = Chart(chart.coords[:2 * m])
        pairs = [(i, m + i) for i in range(m)]
        parts.append(make_symplectic_gc(sym_chart, standard_symplectic_form(sym_chart, pairs)))
    if n:
        cx_chart = Chart(chart.coords[2 * m:])
        pairs = [(2 * k, 2 * k + 1) for k in range(n)]
        parts.append(make_complex_gc(cx_chart, standard_complex_matrix(cx_chart, pairs)))
    gc = parts[0] if len(parts) == 1 else product_gc(parts[0], parts[1])
    logger.debug("standard model (%d, %d) on %s", m, n, chart.coords)
    return gc


def b_transform_gc(gc: GCStructure, B: DiffForm) -> GCStructure:
    """e^B J e^{-B}."""
    return GCStructure(endo_b_transform(B).compose(gc.endo).compose(endo_b_transform(-B)), gc.kind)


def sym_act_gc(g: SymElement, gc: GCStructure) -> GCStructure:
    return GCStructure(sym_act_endo(g, gc.endo), gc.kind)


def almost_check(gc: GCStructure) -> CheckResult:
    """J^2 = -1 and <Jx, Jy> = <x, y> on constant basis sections."""
    ch = gc.chart
    square = gc.endo.compose(gc.endo) + GenEndo.identity(ch)
    if square:
        return CheckResult(False, square, "J^2 != -1")
    size = 2 * ch.n
    images = [gc.apply(GenSection.basis(ch, j)) for j in range(size)]
    for i in range(size):
        for j in range(i, size):
            lhs = pairing(images[i], images[j])
            rhs = pairing(GenSection.basis(ch, i), GenSection.basis(ch, j))
            if lhs != rhs:
                return CheckResult(False, (i, j), "pairing not preserved")
    return CheckResult(True)


def nijenhuis(gc: GCStructure, a: GenSection, b: GenSection) -> GenSection:
    """[JA,JB] - J[JA,B] - J[A,JB] - [A,B], all Courant brackets."""
    ja, jb = gc.apply(a), gc.apply(b)
    return (courant_bracket(ja, jb) - gc.apply(courant_bracket(ja, b))
            - gc.apply(courant_bracket(a, jb)) - courant_bracket(a, b))


def is_integrable(gc: GCStructure) -> CheckResult:
    ch = gc.chart
    size = 2 * ch.n
    basis = [GenSection.basis(ch, j) for j in range(size)]
    for i, j in combinations(range(size), 2):
        residual = nijenhuis(gc, basis[i], basis[j])
        if residual:
            logger.debug("Nijenhuis tensor nonzero on basis pair (%d, %d)", i, j)
            return CheckResult(False, (i, j, residual), "Nijenhuis tensor does not vanish")
    return CheckResult(True)


def poisson_of(gc: GCStructure) -> List[List]:
    P = gc.P
    n = gc.n
    for i in range(n):
        for j in range(n):
            if P[i][j] != -P[j][i]:
                raise DomainError("P block is not skew-symmetric")
    return P


def _evaluated(chart: Chart, block: List[List], point: Sequence) -> List[List]:
    where = {i: QQ.convert(v) for i, v in enumerate(point)}
    return [[chart.constant_value(chart.evaluate(e, where)) for e in row] for row in block]


def type_at(gc: GCStructure, point: Sequence) -> int:
    """n/2 - rank(P(point))/2 for a chart of dimension n."""
    if len(point) != gc.n:
        raise DomainError("point dimension differs from the chart")
    rk = R.rank(_evaluated(gc.chart, poisson_of(gc), point), gc.n, QQ_I)
    return (gc.n - rk) // 2


def grid_points(dim: int, values: Sequence = (0, 1, -1), limit: int = 64) -> List[Tuple]:
    return list(islice(product(values, repeat=dim), limit))


def is_regular(gc: GCStructure, points: Optional[Sequence[Sequence]] = None) -> CheckResult:
    """Rank of P constant over a rational grid; witness is {type: first point}."""
    points = grid_points(gc.n) if points is None else points
    seen: Dict[int, Tuple] = {}
    for p in points:
        seen.setdefault(type_at(gc, p), tuple(p))
    return CheckResult(len(seen) <= 1, seen)


# ---------------------------------------------------------------------------
# L and its Dolbeault complex
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebroidForm:
    """Component form on a rank-r frame; indices refer to frame positions."""

    chart: Chart
    rank: int
    degree: int
    terms: Tuple[Tuple[Index, object], ...]

    @classmethod
    def from_dict(cls, chart: Chart, rank: int, degree: int, coeffs: Dict[Sequence[int], object]) -> "AlgebroidForm":
        acc: Dict[Index, object] = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree or any(i < 0 or i >= rank for i in idx):
                raise DomainError(f"bad algebroid index {idx}")
            sign, key = _sort_sign(idx)
            if not sign or not c:
                continue
            term = c if sign > 0 else -c
            acc[key] = acc[key] + term if key in acc else term
        return cls(chart, rank, degree, tuple(sorted((k, v) for k, v in acc.items() if v)))

    @classmethod
    def zero(cls, chart: Chart, rank: int, degree: int) -> "AlgebroidForm":
        return cls(chart, rank, degree, ())

    @classmethod
    def function(cls, chart: Chart, rank: int, f) -> "AlgebroidForm":
        return cls.from_dict(chart, rank, 0, {(): f})

    def as_dict(self) -> Dict[Index, object]:
        return dict(self.terms)

    def coeff(self, idx: Sequence[int]):
        sign, key = _sort_sign(tuple(idx))
        if not sign:
            return self.chart.zero
        c = self.as_dict().get(key, self.chart.zero)
        return c if sign > 0 else -c

    def _same(self, other: "AlgebroidForm"):
        _check_same(self.chart, other.chart)
        if (self.rank, self.degree) != (other.rank, other.degree):
            raise DomainError("algebroid forms of different shape")

    def __add__(self, other: "AlgebroidForm") -> "AlgebroidForm":
        self._same(other)
        acc = self.as_dict()
        for k, v in other.terms:
            acc[k] = acc[k] + v if k in acc else v
        return AlgebroidForm(self.chart, self.rank, self.degree, tuple(sorted((k, v) for k, v in acc.items() if v)))

    def __neg__(self) -> "AlgebroidForm":
        return AlgebroidForm(self.chart, self.rank, self.degree, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other: "AlgebroidForm") -> "AlgebroidForm":
        return self + (-other)

    def __mul__(self, c) -> "AlgebroidForm":
        ch = self.chart
        return AlgebroidForm(ch, self.rank, self.degree,
                             tuple((k, v) for k, v in ((k, ch.scale(v, c)) for k, v in self.terms) if v))

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def map(self, fn) -> "AlgebroidForm":
        return AlgebroidForm.from_dict(self.chart, self.rank, self.degree, {k: fn(v) for k, v in self.terms})


def ce_differential(anchors: Sequence[VectorField], alpha: AlgebroidForm) -> AlgebroidForm:
    """Chevalley-Eilenberg differential for a frame of pairwise bracket-free sections.

    (d alpha)(e_a0..e_ak) = sum_r (-1)^r rho(e_ar) alpha(..omit ar..).
    """
    ch = alpha.chart
    if len(anchors) != alpha.rank:
        raise DomainError("one anchor per frame element is required")
    acc: Dict[Index, object] = {}
    for idx, c in alpha.terms:
        for a in range(alpha.rank):
            if a in idx:
                continue
            dc = anchors[a].apply(c)
            if not dc:
                continue
            before = sum(1 for i in idx if i < a)
            key = tuple(sorted(idx + (a,)))
            term = dc if before % 2 == 0 else -dc
            acc[key] = acc[key] + term if key in acc else term
    return AlgebroidForm(ch, alpha.rank, alpha.degree + 1, tuple(sorted((k, v) for k, v in acc.items() if v)))


@dataclass(frozen=True)
class LFrame:
    """Constant frame of the +i eigenbundle L; the conjugates span L-bar."""

    chart: Chart
    sections: Tuple[GenSection, ...]

    @property
    def rank(self) -> int:
        return len(self.sections)

    @property
    def conjugates(self) -> Tuple[GenSection, ...]:
        ch = self.chart
        return tuple(s.map(ch.conj) for s in self.sections)

    def anchors(self, chart: Optional[Chart] = None) -> List[VectorField]:
        chart = chart or self.chart
        return [s.lift(chart).vf for s in self.sections]

    def dual_matrix(self) -> List[List]:
        """2<lbar_a, l_b>; invertible because L-bar pairs perfectly with L."""
        ch = self.chart
        bars = self.conjugates
        return [[ch.constant_value(pairing(bars[a], self.sections[b]) * 2) for b in range(self.rank)]
                for a in range(self.rank)]


def _constant_matrix(endo: GenEndo) -> List[List]:
    if not endo.is_constant():
        raise DomainError("operation supports constant-coefficient structures only")
    ch = endo.chart
    return [[ch.constant_value(e) for e in row] for row in endo.rows]


def eigen_frame(chart: Chart, matrix: Sequence[Sequence], expected: int) -> List[GenSection]:
    """Constant sections spanning ker(matrix - i), in canonical kernel form."""
    size = len(matrix)
    shifted = [[QQ_I.convert(matrix[i][j]) - (QQ_I(0, 1) if i == j else QQ_I.zero) for j in range(size)]
               for i in range(size)]
    vectors = R.kernel(shifted, size, QQ_I)
    if len(vectors) != expected:
        raise DomainError(f"+i eigenspace has dimension {len(vectors)}, expected {expected}")
    return [GenSection.from_vector(chart, [chart.const(c) for c in v]) for v in vectors]


def l_frame(gc: GCStructure) -> LFrame:
    ch = gc.chart
    sections = eigen_frame(ch, _constant_matrix(gc.endo), ch.n)
    for a, b in combinations(range(len(sections)), 2):
        if pairing(sections[a], sections[b]):
            raise DomainError("+i eigenbundle is not isotropic")
    for s in sections:
        if pairing(s, s):
            raise DomainError("+i eigenbundle is not isotropic")
    return LFrame(ch, tuple(sections))


def mu(frame: LFrame, x: GenSection) -> AlgebroidForm:
    """mu(x)(l_a) = 2 <x, l_a>."""
    ch = x.chart
    vals = {(a,): pairing(x, s.lift(ch)) * 2 for a, s in enumerate(frame.sections)}
    return AlgebroidForm.from_dict(ch, frame.rank, 1, vals)


def delta_L(frame: LFrame, alpha: AlgebroidForm) -> AlgebroidForm:
    if alpha.degree > 1:
        raise DomainError("delta_L is provided in degrees 0 and 1")
    return ce_differential(frame.anchors(alpha.chart), alpha)


def delta_L_function(frame: LFrame, f) -> AlgebroidForm:
    return delta_L(frame, AlgebroidForm.function(frame.chart, frame.rank, f))


@dataclass(frozen=True)
class HolomorphyResult:
    ok: bool
    dolbeault: AlgebroidForm
    variation: GenEndo

    def __bool__(self) -> bool:
        return self.ok


def is_gen_holomorphic(gc: GCStructure, x: GenSection, frame: Optional[LFrame] = None) -> HolomorphyResult:
    """delta_L mu(x) and x.J, computed independently; they must vanish together."""
    frame = frame or l_frame(gc)
    dolbeault = ce_differential(frame.anchors(x.chart), mu(frame, x))
    variation = endo_action(x, gc.endo)
    if bool(dolbeault) != bool(variation):
        raise ConsistencyError("delta_L mu(x) and x.J disagree on vanishing")
    return HolomorphyResult(not variation, dolbeault, variation)


# ---------------------------------------------------------------------------
# Hamiltonian fields
# ---------------------------------------------------------------------------

def _vf_from_matrix(chart: Chart, matrix: List[List], form: DiffForm) -> VectorField:
    comps = form.comps()
    return VectorField(chart, tuple(sum((chart.mul(matrix[i][j], comps[j]) for j in range(chart.n)), chart.zero)
                                    for i in range(chart.n)))


def _form_from_matrix(chart: Chart, matrix: List[List], form: DiffForm) -> DiffForm:
    comps = form.comps()
    return DiffForm.one_form(chart, [sum((chart.mul(matrix[i][j], comps[j]) for j in range(chart.n)), chart.zero)
                                     for i in range(chart.n)])


def _pairing_vf_form(chart: Chart, xi: VectorField, a: DiffForm):
    return sum((chart.mul(c, b) for c, b in zip(xi.comps, a.comps())), chart.zero)


def gen_hamiltonian(gc: GCStructure, f) -> GenSection:
    """x_f = Re(J(0, df) - (0, i df)) = (P df_R, K df_R + df_I)."""
    ch = gc.chart
    f = ch.check(f)
    dfr = ext_d(DiffForm.function(ch, ch.real_part(f)))
    dfi = ext_d(DiffForm.function(ch, ch.imag_part(f)))
    return GenSection(_vf_from_matrix(ch, gc.P, dfr), _form_from_matrix(ch, gc.K, dfr) + dfi)


def real_hamiltonian_pair(gc: GCStructure, f) -> Tuple[GenSection, GenSection]:
    """(x_{f_R}, x_{i f_I}); their sum is x_f."""
    ch = gc.chart
    return (gen_hamiltonian(gc, ch.real_part(f)), gen_hamiltonian(gc, ch.scale(ch.imag_part(f), QQ_I(0, 1))))


def hamiltonian_witness(gc: GCStructure, f, g):
    """h with [x_f, x_g] = x_h for the semidirect bracket.

    Real parts contribute i(P df)dg + i i(P df) K dg; a real/imaginary pair
    contributes i i(P df_R) dg_I - i i(P dg_R) df_I; imaginary pairs nothing.
    """
    ch = gc.chart
    I = QQ_I(0, 1)
    dfr = ext_d(DiffForm.function(ch, ch.real_part(f)))
    dfi = ext_d(DiffForm.function(ch, ch.imag_part(f)))
    dgr = ext_d(DiffForm.function(ch, ch.real_part(g)))
    dgi = ext_d(DiffForm.function(ch, ch.imag_part(g)))
    pdf = _vf_from_matrix(ch, gc.P, dfr)
    pdg = _vf_from_matrix(ch, gc.P, dgr)
    h = _pairing_vf_form(ch, pdf, dgr)
    h += ch.scale(_pairing_vf_form(ch, pdf, _form_from_matrix(ch, gc.K, dgr)), I)
    h += ch.scale(_pairing_vf_form(ch, pdf, dgi), I)
    h -= ch.scale(_pairing_vf_form(ch, pdg, dfi), I)
    return h


hamiltonian_bracket_witness = hamiltonian_witness


# ---------------------------------------------------------------------------
# the R and S families on X_0^{m,n}
# ---------------------------------------------------------------------------

def _x_only(chart: Chart, m: int, p) -> bool:
    return all(not any(mono[m:chart.n]) for mono in p.keys())


def r_section(chart: Chart, m: int, xi: Sequence, a: Sequence) -> GenSection:
    """(xi^I(x) d/dy^I, a_i(x) dx^i) on a chart whose first 2m coordinates are x, y."""
    return _family_section(chart, m, xi, a, vf_offset=m, form_offset=0)


def s_section(chart: Chart, m: int, eta: Sequence, b: Sequence) -> GenSection:
    """(eta^i(x) d/dx^i, b_I(x) dy^I)."""
    return _family_section(chart, m, eta, b, vf_offset=0, form_offset=m)


def _family_section(chart: Chart, m: int, vf_coeffs, form_coeffs, vf_offset: int, form_offset: int) -> GenSection:
    if len(vf_coeffs) != m or len(form_coeffs) != m:
        raise DomainError("one coefficient per symplectic pair is required")
    vf = [chart.zero] * chart.n
    form = [chart.zero] * chart.n
    for k in range(m):
        for p in (vf_coeffs[k], form_coeffs[k]):
            if not _x_only(chart, m, chart.check(p)):
                raise DomainError("family coefficients must depend on x only")
        vf[vf_offset + k] = vf_coeffs[k]
        form[form_offset + k] = form_coeffs[k]
    return GenSection.of(chart, vf, form)


def family_generators(chart: Chart, m: int, degree: int, which: str = "R") -> List[GenSection]:
    """Monomial-times-direction generators of R or S up to the given x-degree."""
    build = r_section if which == "R" else s_section
    zeros = [chart.zero] * m
    gens = []
    for exps in R.monomials_up_to(m, degree):
        mono = chart.monomial(tuple(exps) + (0,) * (chart.n - m))
        for k in range(m):
            unit = [mono if j == k else chart.zero for j in range(m)]
            gens.append(build(chart, m, unit, zeros))
            gens.append(build(chart, m, zeros, unit))
    return gens


def hamiltonian_after_b(gc: GCStructure, u: DiffForm) -> GCStructure:
    """The structure e^{du} J e^{-du} that conjugated Hamiltonians refer to."""
    return b_transform_gc(gc, ext_d(u))
