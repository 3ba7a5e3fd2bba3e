"""
The standard Courant algebroid TX + T*X on a polynomial chart.

Sections are pairs (vector field, 1-form). The formal symmetry group is kept
in the factored shape e^{(0,u)} e^{(xi,0)}; products and inverses stay in that
shape through ``bch``.
"""

import logging
import random
from dataclasses import dataclass
from math import factorial
from typing import Callable, List, Sequence, Tuple

from sympy.polys.domains import QQ

from .artin import TimePoly, bch, nilpotent_exp, time_integral
from .cartan import (Chart, DiffForm, VectorField, _check_same, contract, d_function, ext_d,
                     exp_vf_action, lie_bracket, lie_derivative, lie_derivative_power_series,
                     random_form, random_vf)
from .errors import ContextMismatchError, DomainError, NotClosedError

logger = logging.getLogger(__name__)

HALF = QQ(1, 2)


@dataclass(frozen=True)
class GenSection:
    vf: VectorField
    form: DiffForm

    def __post_init__(self):
        _check_same(self.vf.chart, self.form.chart)
        if self.form.degree != 1:
            raise DomainError("the form part of a section must be a 1-form")

    @property
    def chart(self) -> Chart:
        return self.vf.chart

    @property
    def order(self) -> int:
        return self.chart.order

    @classmethod
    def zero(cls, chart: Chart) -> "GenSection":
        return cls(VectorField.zero(chart), DiffForm.zero(chart, 1))

    @classmethod
    def of(cls, chart: Chart, vf: Sequence, form: Sequence) -> "GenSection":
        return cls(VectorField.of(chart, vf), DiffForm.one_form(chart, form))

    @classmethod
    def from_vector(cls, chart: Chart, comps: Sequence) -> "GenSection":
        n = chart.n
        return cls.of(chart, comps[:n], comps[n:])

    @classmethod
    def basis(cls, chart: Chart, j: int, coeff=None) -> "GenSection":
        """j < n: d/dx^j; otherwise dx^{j-n}."""
        n = chart.n
        if j < n:
            return cls(VectorField.basis(chart, j, coeff), DiffForm.zero(chart, 1))
        return cls(VectorField.zero(chart), DiffForm.basis(chart, (j - n,), coeff))

    def vector(self) -> Tuple:
        return tuple(self.vf.comps) + tuple(self.form.comps())

    def __add__(self, other: "GenSection") -> "GenSection":
        return GenSection(self.vf + other.vf, self.form + other.form)

    def __neg__(self) -> "GenSection":
        return GenSection(-self.vf, -self.form)

    def __sub__(self, other: "GenSection") -> "GenSection":
        return self + (-other)

    def __mul__(self, c) -> "GenSection":
        return GenSection(self.vf * c, self.form * c)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.vf) or bool(self.form)

    def times(self, f) -> "GenSection":
        return GenSection(self.vf.times(f), self.form.times(f))

    def map(self, fn: Callable) -> "GenSection":
        return GenSection(self.vf.map(fn), self.form.map(fn))

    def lift(self, chart: Chart) -> "GenSection":
        """Same section read on a chart with the same coordinates and more Artin generators."""
        if chart == self.chart:
            return self
        return GenSection.from_vector(chart, [chart.transfer(p, self.chart) for p in self.vector()])


def random_section(chart: Chart, rng: random.Random, degree: int, **kw) -> GenSection:
    return GenSection(random_vf(chart, rng, degree, **kw), random_form(chart, rng, 1, degree, **kw))


def pairing(x: GenSection, y: GenSection):
    """<(xi,a),(eta,b)> = (i(xi)b + i(eta)a)/2."""
    _check_same(x.chart, y.chart)
    ch = x.chart
    total = ch.zero
    for xi, b in zip(x.vf.comps, y.form.comps()):
        total += ch.mul(xi, b)
    for eta, a in zip(y.vf.comps, x.form.comps()):
        total += ch.mul(eta, a)
    return total * HALF


def _iota(xi: VectorField, form: DiffForm) -> DiffForm:
    if form.degree == 0:
        raise DomainError("cannot contract with a function")
    return contract(xi, form)


def dorfman(x: GenSection, y: GenSection) -> GenSection:
    """[[(xi,a),(eta,b)]] = ([xi,eta], L_xi b - i(eta) da)."""
    _check_same(x.chart, y.chart)
    form = lie_derivative(x.vf, y.form)
    if x.chart.n > 1:
        form = form - _iota(y.vf, ext_d(x.form))
    return GenSection(lie_bracket(x.vf, y.vf), form)


def courant_bracket(x: GenSection, y: GenSection) -> GenSection:
    """The skew bracket: dorfman(x, y) - (0, d<x,y>)."""
    out = dorfman(x, y)
    return GenSection(out.vf, out.form - d_function(x.chart, pairing(x, y)))


def ghat_bracket(x: GenSection, y: GenSection) -> GenSection:
    """Semidirect bracket on g + Omega^1: ([xi,eta], L_xi b - L_eta a)."""
    _check_same(x.chart, y.chart)
    return GenSection(lie_bracket(x.vf, y.vf), lie_derivative(x.vf, y.form) - lie_derivative(y.vf, x.form))


def ghat_act(x: GenSection, s: GenSection) -> GenSection:
    """Infinitesimal action of g-hat on sections; same formula as the Dorfman bracket."""
    return dorfman(x, s)


def b_transform(B: DiffForm, x: GenSection, check_closed: bool = True) -> GenSection:
    """(xi, a) -> (xi, a - i(xi)B) for a closed 2-form B."""
    if B.degree != 2:
        raise DomainError("B-transforms need a 2-form")
    if check_closed and B.chart.n > 2 and ext_d(B):
        raise NotClosedError("B-transform by a non-closed 2-form")
    return GenSection(x.vf, x.form - contract(x.vf, B))


def adjoint_u(u: DiffForm, x: GenSection) -> GenSection:
    """Ad_{e^u}(xi, a) = (xi, a - L_xi u)."""
    return GenSection(x.vf, x.form - lie_derivative(x.vf, u))


# ---------------------------------------------------------------------------
# the formal group e^{g-hat (x) m}
# ---------------------------------------------------------------------------

def _split_coeffs(order: int) -> List:
    return [QQ(1, factorial(k + 1)) for k in range(order + 1)]


def _inverse_split_coeffs(order: int) -> List:
    """Series inverse of sum_k t^k/(k+1)!."""
    c = [QQ(1)]
    for n in range(1, order + 1):
        c.append(-sum((c[n - k] * QQ(1, factorial(k + 1)) for k in range(1, n + 1)), QQ(0)))
    return c


def exp_path(xi: VectorField, a: DiffForm) -> TimePoly:
    """t -> e^{t L_xi} a as a polynomial in t; finite because xi is nilpotent."""
    terms, term = {}, a
    for k in range(xi.chart.order + 1):
        if not term:
            break
        terms[k] = term * QQ(1, factorial(k))
        term = lie_derivative(xi, term)
    return TimePoly(terms, DiffForm.zero(a.chart, a.degree))


def exp_split(xi: VectorField, a: DiffForm) -> Tuple[DiffForm, VectorField]:
    """(a^xi, xi) with e^{(xi,a)} = e^{(0,a^xi)} e^{(xi,0)}; a^xi = int_0^1 e^{t xi} a dt."""
    _check_same(xi.chart, a.chart)
    return time_integral(exp_path(xi, a)), xi


def inverse_split(xi: VectorField, b: DiffForm) -> DiffForm:
    """The unique a with a^xi = b."""
    return lie_derivative_power_series(xi, b, _inverse_split_coeffs(xi.chart.order))


@dataclass(frozen=True)
class SymElement:
    """g = e^{(0,u)} e^{(xi,0)} with u, xi valued in the maximal ideal."""

    u: DiffForm
    xi: VectorField

    def __post_init__(self):
        _check_same(self.u.chart, self.xi.chart)
        ch = self.u.chart
        if self.u.degree != 1:
            raise DomainError("u must be a 1-form")
        if not all(ch.is_m_valued(c) for _, c in self.u.terms) or not all(ch.is_m_valued(c) for c in self.xi.comps):
            raise DomainError("group elements need coefficients in the maximal ideal")

    @property
    def chart(self) -> Chart:
        return self.u.chart

    @classmethod
    def identity(cls, chart: Chart) -> "SymElement":
        return cls(DiffForm.zero(chart, 1), VectorField.zero(chart))

    def is_identity(self) -> bool:
        return not self.u and not self.xi


def sym_from_lie(x: GenSection) -> SymElement:
    u, xi = exp_split(x.vf, x.form)
    return SymElement(u, xi)


def sym_log(g: SymElement) -> GenSection:
    return GenSection(g.xi, inverse_split(g.xi, g.u))


def sym_mul(g: SymElement, h: SymElement) -> SymElement:
    """(u, xi)(u', xi') = (u + e^{L_xi} u', bch(xi, xi'))."""
    if g.chart != h.chart:
        raise ContextMismatchError("group elements over different charts")
    return SymElement(g.u + exp_vf_action(g.xi, h.u), bch(g.xi, h.xi, lie_bracket, g.chart.order))


def sym_inverse(g: SymElement) -> SymElement:
    return SymElement(-exp_vf_action(-g.xi, g.u), -g.xi)


def sym_act_function(g: SymElement, f):
    return exp_vf_action(g.xi, f)


def sym_act_section(g: SymElement, s: GenSection) -> GenSection:
    if g.chart != s.chart:
        raise ContextMismatchError("group element and section over different charts")
    tau = exp_vf_action(g.xi, s.vf)
    c = exp_vf_action(g.xi, s.form)
    if g.u and s.chart.n > 1:
        c = c - contract(tau, ext_d(g.u))
    return GenSection(tau, c)


def sym_exp_section(x: GenSection, s: GenSection) -> GenSection:
    """e^x acting through the infinitesimal action, without the factored form."""
    return nilpotent_exp(lambda w: ghat_act(x, w), s, x.chart.order + 1)


def one_param_family(x: GenSection) -> List[TimePoly]:
    """Factors of t -> e^{tx} = e^{(0,(ta)^{t xi})} e^{(t xi, 0)} as formal-time Lie elements."""
    ch = x.chart
    zero = GenSection.zero(ch)
    terms = {}
    term = x.form
    for k in range(ch.order + 1):
        if not term:
            break
        terms[k + 1] = GenSection(VectorField.zero(ch), term * QQ(1, factorial(k + 1)))
        term = lie_derivative(x.vf, term)
    return [TimePoly(terms, zero), TimePoly({1: GenSection(x.vf, DiffForm.zero(ch, 1))}, zero)]


# ---------------------------------------------------------------------------
# endomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenEndo:
    """2n x 2n polynomial matrix acting on (xi^1..xi^n, a_1..a_n)."""

    chart: Chart
    rows: Tuple[Tuple, ...]

    def __post_init__(self):
        size = 2 * self.chart.n
        if len(self.rows) != size or any(len(r) != size for r in self.rows):
            raise DomainError(f"endomorphism must be {size}x{size}")

    @property
    def size(self) -> int:
        return 2 * self.chart.n

    @classmethod
    def identity(cls, chart: Chart) -> "GenEndo":
        size = 2 * chart.n
        return cls(chart, tuple(tuple(chart.one if i == j else chart.zero for j in range(size)) for i in range(size)))

    @classmethod
    def zero(cls, chart: Chart) -> "GenEndo":
        size = 2 * chart.n
        return cls(chart, tuple(tuple(chart.zero for _ in range(size)) for _ in range(size)))

    @classmethod
    def from_map(cls, chart: Chart, fn: Callable[[GenSection], GenSection]) -> "GenEndo":
        """Matrix of a function-linear map from its values on constant basis sections."""
        size = 2 * chart.n
        cols = [fn(GenSection.basis(chart, j)).vector() for j in range(size)]
        return cls(chart, tuple(tuple(cols[j][i] for j in range(size)) for i in range(size)))

    @classmethod
    def from_blocks(cls, chart: Chart, J, P, sigma, K) -> "GenEndo":
        n = chart.n
        rows = []
        for i in range(n):
            rows.append(tuple(J[i][j] for j in range(n)) + tuple(P[i][j] for j in range(n)))
        for i in range(n):
            rows.append(tuple(sigma[i][j] for j in range(n)) + tuple(K[i][j] for j in range(n)))
        return cls(chart, tuple(rows))

    def block(self, name: str) -> List[List]:
        n = self.chart.n
        r0, c0 = {"J": (0, 0), "P": (0, n), "sigma": (n, 0), "K": (n, n)}[name]
        return [[self.rows[r0 + i][c0 + j] for j in range(n)] for i in range(n)]

    def apply(self, s: GenSection) -> GenSection:
        _check_same(self.chart, s.chart)
        ch = self.chart
        vec = s.vector()
        out = []
        for row in self.rows:
            total = ch.zero
            for a, b in zip(row, vec):
                if a and b:
                    total += ch.mul(a, b)
            out.append(total)
        return GenSection.from_vector(ch, out)

    def compose(self, other: "GenEndo") -> "GenEndo":
        """self o other."""
        _check_same(self.chart, other.chart)
        ch = self.chart
        size = self.size
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                total = ch.zero
                for k in range(size):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a and b:
                        total += ch.mul(a, b)
                row.append(total)
            rows.append(tuple(row))
        return GenEndo(ch, tuple(rows))

    def __add__(self, other: "GenEndo") -> "GenEndo":
        _check_same(self.chart, other.chart)
        return GenEndo(self.chart, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> "GenEndo":
        return GenEndo(self.chart, tuple(tuple(-a for a in r) for r in self.rows))

    def __sub__(self, other: "GenEndo") -> "GenEndo":
        return self + (-other)

    def __mul__(self, c) -> "GenEndo":
        return GenEndo(self.chart, tuple(tuple(self.chart.scale(a, c) for a in r) for r in self.rows))

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return any(a for r in self.rows for a in r)

    def lift(self, chart: Chart) -> "GenEndo":
        """Same matrix read on a chart that adds Artin generators."""
        return GenEndo(chart, tuple(tuple(chart.transfer(a, self.chart) for a in r) for r in self.rows))

    def map(self, fn: Callable) -> "GenEndo":
        return GenEndo(self.chart, tuple(tuple(fn(a) for a in r) for r in self.rows))

    def is_constant(self) -> bool:
        return all(self.chart.is_constant(a) for r in self.rows for a in r)


def endo_b_transform(B: DiffForm) -> GenEndo:
    """Matrix of e^B."""
    return GenEndo.from_map(B.chart, lambda s: b_transform(B, s))


def sym_act_endo(g: SymElement, F: GenEndo) -> GenEndo:
    """(g.F)(s) = g.F(g^{-1}.s), read off on constant basis sections."""
    ch = g.chart
    if F.chart != ch:
        F = F.lift(ch)
    inv = sym_inverse(g)
    return GenEndo.from_map(ch, lambda s: sym_act_section(g, F.apply(sym_act_section(inv, s))))


def endo_action(x: GenSection, F: GenEndo) -> GenEndo:
    """Infinitesimal x.F: s -> x.(F s) - F(x.s); function-linear."""
    ch = x.chart
    if F.chart != ch:
        F = F.lift(ch)
    return GenEndo.from_map(ch, lambda s: ghat_act(x, F.apply(s)) - F.apply(ghat_act(x, s)))
