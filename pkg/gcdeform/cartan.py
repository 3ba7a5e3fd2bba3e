"""
Formal exterior calculus on R^n with polynomial coefficients.

- ``Chart``: coordinate labels, optionally extended by Artin generators. All
  coefficients live in one sparse ring over QQ_I and are reduced modulo the
  Artin ideal after every product.
- ``VectorField`` / ``DiffForm``: immutable values with +, -, scalar *.
- ``lie_bracket``, ``ext_d``, ``contract``, ``lie_derivative``, ``wedge``,
  ``substitute``, ``pullback_restrict``, ``exp_vf_action``.

Contraction acts on the first slot: i(d/dx)(dx^dy) = dy.
"""

import logging
import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I

from . import ring as R
from .artin import REALS, ArtinAlgebra, TimePoly, nilpotent_exp, time_integral  # noqa: F401
from .errors import ContextMismatchError, DomainError

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]


@dataclass(frozen=True)
class Chart:
    coords: Tuple[str, ...]
    artin: ArtinAlgebra = REALS

    def __post_init__(self):
        if len(set(self.coords)) != len(self.coords):
            raise DomainError(f"coordinate labels must be distinct: {self.coords}")
        if set(self.coords) & set(self.artin.gens):
            raise ContextMismatchError("coordinate labels collide with Artin generators")
        if not self.coords:
            raise DomainError("a chart needs at least one coordinate")

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def order(self) -> int:
        return self.artin.nilpotency_order

    @cached_property
    def ring(self):
        return R.poly_ring(self.coords + self.artin.gens, QQ_I)

    @property
    def zero(self):
        return self.ring.zero

    @property
    def one(self):
        return self.ring.one

    def with_artin(self, artin: ArtinAlgebra) -> "Chart":
        return Chart(self.coords, artin)

    def index(self, label: str) -> int:
        try:
            return self.coords.index(label)
        except ValueError:
            raise DomainError(f"unknown coordinate {label!r}") from None

    def coord(self, i: int):
        return self.ring.gens[i]

    def artin_gen(self, name: str):
        return self.ring.gens[self.n + self.artin.gens.index(name)]

    def const(self, c):
        return self.ring.ground_new(QQ_I.convert(c))

    def poly(self, text) -> "object":
        return R.parse_poly(text, self.ring)

    def reduce(self, p):
        if not self.artin.relations:
            return p
        n = self.n
        out = self.ring.zero
        for mono, c in p.iterterms():
            if not self.artin.in_ideal(mono[n:]):
                out[mono] = c
        return out

    def mul(self, p, q):
        return self.reduce(p * q)

    def scale(self, p, c):
        c = QQ_I.convert(c)
        return p.mul_ground(c) if c else self.ring.zero

    def partial(self, p, i: int):
        out = self.ring.zero
        for mono, c in p.iterterms():
            e = mono[i]
            if e:
                m = mono[:i] + (e - 1,) + mono[i + 1:]
                out[m] = c * e
        return out

    def check(self, p):
        if p.ring != self.ring:
            raise ContextMismatchError(f"polynomial lives in {p.ring}, expected {self.ring}")
        return p

    def transfer(self, p, source: "Chart"):
        """Rename-by-label map from ``source``; missing labels must not occur."""
        if source == self:
            return p
        names = source.coords + source.artin.gens
        targets = self.coords + self.artin.gens
        pos = []
        for name in names:
            pos.append(targets.index(name) if name in targets else None)
        width = len(targets)
        out = self.ring.zero
        for mono, c in p.iterterms():
            m = [0] * width
            for j, e in enumerate(mono):
                if not e:
                    continue
                if pos[j] is None:
                    raise ContextMismatchError(f"variable {names[j]!r} has no counterpart")
                m[pos[j]] = e
            m = tuple(m)
            out[m] = out.get(m, QQ_I.zero) + c
        return self.reduce(self.ring.from_dict({k: v for k, v in out.items() if v}))

    def is_m_valued(self, p) -> bool:
        n = self.n
        return all(sum(mono[n:]) > 0 for mono in p.keys())

    def artin_part(self, p, mono) -> "object":
        """Coefficient polynomial (in coordinates) of an Artin monomial."""
        n = self.n
        out = self.ring.zero
        for m, c in p.iterterms():
            if tuple(m[n:]) == tuple(mono):
                out[m[:n] + (0,) * (len(m) - n)] = c
        return out

    def artin_monomials(self, p) -> List[Tuple[int, ...]]:
        n = self.n
        return sorted({tuple(m[n:]) for m in p.keys()})

    def times_artin(self, p, mono):
        n = self.n
        out = self.ring.zero
        for m, c in p.iterterms():
            out[m[:n] + tuple(a + b for a, b in zip(m[n:], mono))] = c
        return self.reduce(out)

    def conj(self, p):
        return self.ring.from_dict({m: R.conj(c) for m, c in p.iterterms()})

    def real_part(self, p):
        return self.ring.from_dict({m: QQ_I(c.x, 0) for m, c in p.iterterms() if c.x})

    def imag_part(self, p):
        return self.ring.from_dict({m: QQ_I(c.y, 0) for m, c in p.iterterms() if c.y})

    def is_real(self, p) -> bool:
        return all(not c.y for c in p.values())

    def evaluate(self, p, point: Dict[int, "QQ.dtype"]):
        """Substitute rational values for some coordinates; returns a polynomial."""
        out = self.ring.zero
        for mono, c in p.iterterms():
            coeff = c
            m = list(mono)
            for i, v in point.items():
                if m[i]:
                    coeff = coeff * QQ_I.convert(QQ.convert(v) ** m[i])
                    m[i] = 0
            m = tuple(m)
            out[m] = out.get(m, QQ_I.zero) + coeff
        return self.ring.from_dict({k: v for k, v in out.items() if v})

    def constant_value(self, p):
        if any(sum(m) for m in p.keys()):
            raise DomainError(f"expected a constant, got {R.poly_str(p)}")
        return QQ_I.convert(p.get((0,) * self.ring.ngens, QQ_I.zero))

    def is_constant(self, p) -> bool:
        return not any(sum(m) for m in p.keys())

    def coord_degree(self, p) -> int:
        n = self.n
        return max((sum(m[:n]) for m in p.keys()), default=-1)

    def monomial(self, exps: Sequence[int]):
        return self.ring.term_new(tuple(exps) + (0,) * len(self.artin.gens), QQ_I.one)

    def random_poly(self, rng: random.Random, degree: int, complex_coeffs: bool = False,
                    density: float = 0.6, m_valued: bool = False):
        """Random polynomial with small integer coefficients (test and selftest helper)."""
        out = self.ring.zero
        artin_monos = list(self.artin.maximal_ideal_basis) if m_valued else [self.artin.one]
        for exps in R.monomials_up_to(self.n, degree):
            for am in artin_monos:
                if rng.random() > density:
                    continue
                re_part = rng.randint(-3, 3)
                im_part = rng.randint(-3, 3) if complex_coeffs else 0
                if re_part or im_part:
                    out[tuple(exps) + tuple(am)] = QQ_I(re_part, im_part)
        return out


def _check_same(a: Chart, b: Chart):
    if a != b:
        raise ContextMismatchError(f"chart mismatch: {a.coords}/{a.artin.label()} vs {b.coords}/{b.artin.label()}")


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    comps: Tuple

    def __post_init__(self):
        if len(self.comps) != self.chart.n:
            raise DomainError("vector field component count differs from chart dimension")

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, tuple(chart.zero for _ in range(chart.n)))

    @classmethod
    def basis(cls, chart: Chart, i: int, coeff=None) -> "VectorField":
        c = chart.one if coeff is None else coeff
        return cls(chart, tuple(c if j == i else chart.zero for j in range(chart.n)))

    @classmethod
    def of(cls, chart: Chart, comps: Iterable) -> "VectorField":
        return cls(chart, tuple(chart.reduce(chart.check(c)) for c in comps))

    @property
    def order(self) -> int:
        return self.chart.order

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_same(self.chart, other.chart)
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, tuple(-a for a in self.comps))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def __mul__(self, c) -> "VectorField":
        return VectorField(self.chart, tuple(self.chart.scale(a, c) for a in self.comps))

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return any(self.comps)

    def times(self, f) -> "VectorField":
        """Multiply by a function."""
        return VectorField(self.chart, tuple(self.chart.mul(f, a) for a in self.comps))

    def apply(self, f):
        """xi(f) = sum xi^i d_i f."""
        ch = self.chart
        total = ch.zero
        for i, c in enumerate(self.comps):
            if c:
                total += ch.mul(c, ch.partial(f, i))
        return total

    def map(self, fn) -> "VectorField":
        return VectorField(self.chart, tuple(fn(a) for a in self.comps))


def _sort_sign(idx: Sequence[int]) -> Tuple[int, Index]:
    """Sign of the sorting permutation, 0 if an index repeats."""
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


@dataclass(frozen=True)
class DiffForm:
    chart: Chart
    degree: int
    terms: Tuple[Tuple[Index, object], ...]

    @classmethod
    def from_dict(cls, chart: Chart, degree: int, coeffs: Dict[Sequence[int], object]) -> "DiffForm":
        if degree < 0 or degree > chart.n:
            raise DomainError(f"form degree {degree} out of range for dimension {chart.n}")
        acc: Dict[Index, object] = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DomainError("index length differs from form degree")
            if any(i < 0 or i >= chart.n for i in idx):
                raise DomainError(f"form index {idx} out of range")
            sign, key = _sort_sign(idx)
            if not sign or not c:
                continue
            c = chart.check(c)
            acc[key] = acc[key] + (c if sign > 0 else -c) if key in acc else (c if sign > 0 else -c)
        terms = tuple(sorted((k, chart.reduce(v)) for k, v in acc.items() if v))
        return cls(chart, degree, tuple((k, v) for k, v in terms if v))

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "DiffForm":
        return cls(chart, degree, ())

    @classmethod
    def function(cls, chart: Chart, f) -> "DiffForm":
        return cls.from_dict(chart, 0, {(): f})

    @classmethod
    def one_form(cls, chart: Chart, comps: Sequence) -> "DiffForm":
        return cls.from_dict(chart, 1, {(i,): c for i, c in enumerate(comps)})

    @classmethod
    def basis(cls, chart: Chart, idx: Sequence[int], coeff=None) -> "DiffForm":
        return cls.from_dict(chart, len(idx), {tuple(idx): chart.one if coeff is None else coeff})

    @property
    def order(self) -> int:
        return self.chart.order

    def as_dict(self) -> Dict[Index, object]:
        return dict(self.terms)

    def coeff(self, idx: Sequence[int]):
        sign, key = _sort_sign(tuple(idx))
        if not sign:
            return self.chart.zero
        c = self.as_dict().get(key, self.chart.zero)
        return c if sign > 0 else -c

    def comps(self) -> Tuple:
        """Components of a 1-form."""
        if self.degree != 1:
            raise DomainError("comps() is only defined for 1-forms")
        d = self.as_dict()
        return tuple(d.get((i,), self.chart.zero) for i in range(self.chart.n))

    def as_function(self):
        if self.degree != 0:
            raise DomainError("not a function")
        return self.as_dict().get((), self.chart.zero)

    def _same(self, other: "DiffForm"):
        _check_same(self.chart, other.chart)
        if self.degree != other.degree:
            raise DomainError(f"degree mismatch {self.degree} vs {other.degree}")

    def __add__(self, other: "DiffForm") -> "DiffForm":
        self._same(other)
        acc = self.as_dict()
        for k, v in other.terms:
            acc[k] = acc[k] + v if k in acc else v
        return DiffForm(self.chart, self.degree, tuple(sorted((k, v) for k, v in acc.items() if v)))

    def __neg__(self) -> "DiffForm":
        return DiffForm(self.chart, self.degree, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + (-other)

    def __mul__(self, c) -> "DiffForm":
        return DiffForm(self.chart, self.degree,
                        tuple((k, v) for k, v in ((k, self.chart.scale(v, c)) for k, v in self.terms) if v))

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def times(self, f) -> "DiffForm":
        ch = self.chart
        return DiffForm(ch, self.degree, tuple((k, v) for k, v in ((k, ch.mul(f, v)) for k, v in self.terms) if v))

    def map(self, fn) -> "DiffForm":
        return DiffForm.from_dict(self.chart, self.degree, {k: fn(v) for k, v in self.terms})


def lie_bracket(xi: VectorField, eta: VectorField) -> VectorField:
    """[xi, eta]^i = xi(eta^i) - eta(xi^i)."""
    _check_same(xi.chart, eta.chart)
    return VectorField(xi.chart, tuple(xi.apply(b) - eta.apply(a) for a, b in zip(xi.comps, eta.comps)))


def ext_d(form: DiffForm) -> DiffForm:
    ch = form.chart
    if form.degree >= ch.n:
        return DiffForm(ch, form.degree + 1, ())
    acc: Dict[Index, object] = {}
    for idx, c in form.terms:
        for j in range(ch.n):
            if j in idx:
                continue
            dc = ch.partial(c, j)
            if not dc:
                continue
            before = sum(1 for i in idx if i < j)
            key = tuple(sorted(idx + (j,)))
            term = dc if before % 2 == 0 else -dc
            acc[key] = acc[key] + term if key in acc else term
    return DiffForm(ch, form.degree + 1, tuple(sorted((k, v) for k, v in acc.items() if v)))


def d_function(chart: Chart, f) -> DiffForm:
    return ext_d(DiffForm.function(chart, f))


def _contract(xi: VectorField, form: DiffForm) -> DiffForm:
    ch = form.chart
    acc: Dict[Index, object] = {}
    for idx, c in form.terms:
        for r, i in enumerate(idx):
            comp = xi.comps[i]
            if not comp:
                continue
            term = ch.mul(comp, c)
            if r % 2:
                term = -term
            key = idx[:r] + idx[r + 1:]
            acc[key] = acc[key] + term if key in acc else term
    return DiffForm(ch, form.degree - 1, tuple(sorted((k, v) for k, v in acc.items() if v)))


def contract(xi: VectorField, form: DiffForm) -> DiffForm:
    """i(xi) on forms of degree >= 1, first-slot convention."""
    _check_same(xi.chart, form.chart)
    if form.degree == 0:
        raise DomainError("cannot contract a vector field with a function")
    return _contract(xi, form)


def lie_derivative(xi: VectorField, form: DiffForm) -> DiffForm:
    """Cartan's formula d i(xi) + i(xi) d; on functions, xi(f)."""
    _check_same(xi.chart, form.chart)
    if form.degree == 0:
        return DiffForm.function(form.chart, xi.apply(form.as_function()))
    out = ext_d(_contract(xi, form))
    if form.degree < form.chart.n:
        out = out + _contract(xi, ext_d(form))
    return out


def wedge(alpha: DiffForm, beta: DiffForm) -> DiffForm:
    _check_same(alpha.chart, beta.chart)
    ch = alpha.chart
    deg = alpha.degree + beta.degree
    if deg > ch.n:
        return DiffForm(ch, deg, ())
    acc: Dict[Index, object] = {}
    for ia, a in alpha.terms:
        for ib, b in beta.terms:
            sign, key = _sort_sign(ia + ib)
            if not sign:
                continue
            term = ch.mul(a, b)
            term = term if sign > 0 else -term
            acc[key] = acc[key] + term if key in acc else term
    return DiffForm(ch, deg, tuple(sorted((k, v) for k, v in acc.items() if v)))


def exp_vf_action(xi: VectorField, obj):
    """e^{L_xi} on a polynomial, a form or a vector field (via ad)."""
    order = xi.chart.order + 1
    if isinstance(obj, DiffForm):
        return nilpotent_exp(lambda w: lie_derivative(xi, w), obj, order)
    if isinstance(obj, VectorField):
        return nilpotent_exp(lambda v: lie_bracket(xi, v), obj, order)
    return nilpotent_exp(lambda p: xi.apply(p), xi.chart.check(obj), order)


def lie_derivative_power_series(xi: VectorField, obj, coeffs: Sequence) -> object:
    """sum_k coeffs[k] L_xi^k obj, stopping when the iterate vanishes."""
    if isinstance(obj, DiffForm):
        step = lambda w: lie_derivative(xi, w)  # noqa: E731
    elif isinstance(obj, VectorField):
        step = lambda v: lie_bracket(xi, v)  # noqa: E731
    else:
        step = xi.apply
        obj = xi.chart.check(obj)
    scale = (lambda t, c: t * c) if isinstance(obj, (DiffForm, VectorField)) else xi.chart.scale
    total = scale(obj, coeffs[0])
    term = obj
    for c in coeffs[1:]:
        term = step(term)
        if not term:
            break
        total = total + scale(term, c)
    return total


def compose_poly(p, source: Chart, target: Chart, images: Sequence):
    """Substitute images (polys on ``target``) for the coordinates of ``source``.

    Artin generators pass through by name.
    """
    if len(images) != source.n:
        raise DomainError("one image per source coordinate is required")
    n = source.n
    art_pos = [target.n + target.artin.gens.index(g) if g in target.artin.gens else None
               for g in source.artin.gens]
    powers: Dict[Tuple[int, int], object] = {}

    def power(i, e):
        key = (i, e)
        if key not in powers:
            powers[key] = target.one if e == 0 else target.mul(power(i, e - 1), images[i])
        return powers[key]

    total = target.zero
    width = target.ring.ngens
    for mono, c in p.iterterms():
        am = [0] * width
        for j, e in enumerate(mono[n:]):
            if e:
                if art_pos[j] is None:
                    raise ContextMismatchError(f"Artin generator {source.artin.gens[j]!r} missing on target")
                am[art_pos[j]] = e
        term = target.ring.term_new(tuple(am), c)
        for i in range(n):
            if mono[i]:
                term = target.mul(term, power(i, mono[i]))
        total += term
    return target.reduce(total)


def substitute(form: DiffForm, target: Chart, images: Sequence) -> DiffForm:
    """Pullback of a form along the polynomial map given by coordinate images."""
    source = form.chart
    if form.degree == 0:
        return DiffForm.function(target, compose_poly(form.as_function(), source, target, images))
    differentials = [d_function(target, img) for img in images]
    out = DiffForm.zero(target, form.degree)
    for idx, c in form.terms:
        piece = DiffForm.function(target, compose_poly(c, source, target, images))
        for i in idx:
            piece = wedge(piece, differentials[i])
        out = out + piece
    return out


def pullback_restrict(form: DiffForm, target: Chart, retained: Sequence[int]) -> DiffForm:
    """Pullback to the coordinate subspace where non-retained coordinates vanish."""
    images = []
    for i in range(form.chart.n):
        images.append(target.coord(list(retained).index(i)) if i in retained else target.zero)
    return substitute(form, target, images)


def random_vf(chart: Chart, rng: random.Random, degree: int, **kw) -> VectorField:
    return VectorField(chart, tuple(chart.random_poly(rng, degree, **kw) for _ in range(chart.n)))


def random_form(chart: Chart, rng: random.Random, k: int, degree: int, **kw) -> DiffForm:
    return DiffForm.from_dict(chart, k, {idx: chart.random_poly(rng, degree, **kw)
                                         for idx in combinations(range(chart.n), k)})
