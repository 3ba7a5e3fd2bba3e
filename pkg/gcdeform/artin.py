"""
Local Artin algebras presented by monomial ideals, and nilpotent exponentials.

- ``ArtinAlgebra``: R[gens]/(monomials) with a finite monomial basis.
- ``ArtinHom`` / ``SmallExtension`` / ``small_extension_chain``.
- ``MElement``: elements of m (x) V for a finite-dimensional vector space V.
- ``bch``, ``nilpotent_exp``, ``exp_action``: exact because every series
  stops at the nilpotency order.
- ``TimePoly``, ``time_integral``, ``one_param_decompose``: polynomials in a
  formal time variable with values in any of the above.

Artin elements are plain dicts {exponent tuple: QQ}.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from . import ring as R
from .errors import ContextMismatchError, DomainError, NotHomomorphismError

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Element = Dict[Monomial, "QQ.dtype"]


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _minimal(relations) -> Tuple[Monomial, ...]:
    rels = sorted(set(tuple(r) for r in relations), key=lambda m: (sum(m), m))
    keep: List[Monomial] = []
    for r in rels:
        if not any(_divides(k, r) for k in keep):
            keep.append(r)
    return tuple(sorted(keep))


@dataclass(frozen=True)
class ArtinAlgebra:
    """R[gens] modulo a monomial ideal. Build with ``make_artin``."""

    gens: Tuple[str, ...]
    relations: Tuple[Monomial, ...]

    def in_ideal(self, mono: Monomial) -> bool:
        return any(_divides(r, mono) for r in self.relations)

    @cached_property
    def basis(self) -> Tuple[Monomial, ...]:
        k = len(self.gens)
        zero = (0,) * k
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for mono in frontier:
                for i in range(k):
                    cand = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                    if cand not in seen and not self.in_ideal(cand):
                        seen.add(cand)
                        nxt.append(cand)
            frontier = nxt
        return tuple(sorted(seen, key=lambda m: (sum(m), tuple(-e for e in m))))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def maximal_ideal_basis(self) -> Tuple[Monomial, ...]:
        return tuple(m for m in self.basis if sum(m))

    @property
    def nilpotency_order(self) -> int:
        """Least N with m^N = 0."""
        return max(sum(m) for m in self.basis) + 1

    @property
    def one(self) -> Monomial:
        return (0,) * len(self.gens)

    def gen(self, name: str) -> Element:
        i = self.gens.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(self.gens)))
        return self.reduce({mono: QQ(1)})

    def reduce(self, elem: Element) -> Element:
        return {m: c for m, c in elem.items() if c and not self.in_ideal(m)}

    def mul(self, a: Element, b: Element) -> Element:
        out: Element = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                if self.in_ideal(m):
                    continue
                out[m] = out.get(m, QQ(0)) + ca * cb
        return {m: c for m, c in out.items() if c}

    def add(self, a: Element, b: Element, scale=1) -> Element:
        out = dict(a)
        for m, c in b.items():
            out[m] = out.get(m, QQ(0)) + QQ.convert(scale) * c
        return {m: c for m, c in out.items() if c}

    def power(self, a: Element, n: int) -> Element:
        out: Element = {self.one: QQ(1)}
        for _ in range(n):
            out = self.mul(out, a)
        return out

    def coords(self, elem: Element) -> List:
        return [QQ.convert(elem.get(m, 0)) for m in self.basis]

    def from_coords(self, vec: Sequence) -> Element:
        return {m: QQ.convert(c) for m, c in zip(self.basis, vec) if c}

    def is_in_m(self, elem: Element) -> bool:
        return not elem.get(self.one)

    def label(self) -> str:
        if not self.gens:
            return "R"
        rels = ", ".join(
            "*".join(f"{g}^{e}" if e > 1 else g for g, e in zip(self.gens, r) if e) or "1"
            for r in self.relations
        )
        return f"R[{', '.join(self.gens)}]/({rels})"


def make_artin(gens: Sequence[str], relations: Sequence[Sequence[int]]) -> ArtinAlgebra:
    """Validate a monomial presentation and return the Artin algebra."""
    gens = tuple(gens)
    if len(set(gens)) != len(gens):
        raise DomainError(f"duplicate Artin generators in {gens}")
    rels = []
    for r in relations:
        r = tuple(int(e) for e in r)
        if len(r) != len(gens) or any(e < 0 for e in r):
            raise DomainError(f"relation {r} is not an exponent vector over {gens}")
        rels.append(r)
    if any(not sum(r) for r in rels):
        raise DomainError("1 lies in the ideal; the quotient is the zero ring")
    for i, g in enumerate(gens):
        if not any(r[i] and sum(r) == r[i] for r in rels):
            raise DomainError(f"generator {g!r} is not nilpotent: the quotient basis is infinite")
    algebra = ArtinAlgebra(gens, _minimal(rels))
    logger.debug("artin algebra %s has dim %d", algebra.label(), algebra.dim)
    return algebra


def truncate(n: int, gen: str = "eps") -> ArtinAlgebra:
    """R[eps]/(eps^n); n = 1 gives R."""
    if n < 1:
        raise DomainError("truncation order must be at least 1")
    return make_artin((gen,), ((n,),))


REALS = ArtinAlgebra((), ())


def quotient_by_monomial(algebra: ArtinAlgebra, mono: Monomial) -> ArtinAlgebra:
    if sum(mono) == 0:
        raise DomainError("cannot quotient by the unit")
    return ArtinAlgebra(algebra.gens, _minimal(algebra.relations + (tuple(mono),)))


@dataclass(frozen=True)
class ArtinHom:
    """Unital algebra map given by generator images (elements of the target)."""

    source: ArtinAlgebra
    target: ArtinAlgebra
    images: Tuple[Tuple[Tuple[Monomial, "QQ.dtype"], ...], ...]

    @classmethod
    def build(cls, source: ArtinAlgebra, target: ArtinAlgebra, images: Dict[str, Element]) -> "ArtinHom":
        packed = []
        for g in source.gens:
            img = target.reduce(dict(images.get(g, {})))
            if not target.is_in_m(img):
                raise DomainError(f"image of {g!r} is not in the maximal ideal of the target")
            packed.append(tuple(sorted(img.items())))
        hom = cls(source, target, tuple(packed))
        for rel in source.relations:
            if hom._monomial_image(rel):
                raise DomainError(f"relation {rel} does not map to zero")
        return hom

    @classmethod
    def projection(cls, source: ArtinAlgebra, target: ArtinAlgebra) -> "ArtinHom":
        """Generators map to the generator of the same name, or to 0."""
        images = {g: (target.gen(g) if g in target.gens else {}) for g in source.gens}
        return cls.build(source, target, images)

    def image(self, gen_index: int) -> Element:
        return dict(self.images[gen_index])

    def _monomial_image(self, mono: Monomial) -> Element:
        out: Element = {self.target.one: QQ(1)}
        for i, e in enumerate(mono):
            if e:
                out = self.target.mul(out, self.target.power(self.image(i), e))
        return out

    def apply(self, elem: Element) -> Element:
        out: Element = {}
        for mono, c in elem.items():
            out = self.target.add(out, self._monomial_image(mono), c)
        return out

    def matrix(self) -> List[List]:
        """Rows indexed by target basis, columns by source basis."""
        cols = [self.target.coords(self._monomial_image(m)) for m in self.source.basis]
        return R.transpose(cols, self.target.dim) if cols else []

    def is_surjective(self) -> bool:
        return R.rank(self.matrix(), self.source.dim) == self.target.dim

    def kernel(self) -> List[Element]:
        return [self.source.from_coords(v) for v in R.kernel(self.matrix(), self.source.dim)]

    def compose(self, first: "ArtinHom") -> "ArtinHom":
        """self o first."""
        if first.target != self.source:
            raise ContextMismatchError("homomorphisms are not composable")
        images = {g: self.apply(first.image(i)) for i, g in enumerate(first.source.gens)}
        return ArtinHom.build(first.source, self.target, images)

    def same_as(self, other: "ArtinHom") -> bool:
        return (self.source == other.source and self.target == other.target
                and all(self.image(i) == other.image(i) for i in range(len(self.source.gens))))

    def section(self) -> List[Element]:
        """A linear right inverse on the target basis (requires surjectivity)."""
        mat = self.matrix()
        out = []
        for j in range(self.target.dim):
            rhs = [QQ(1) if i == j else QQ(0) for i in range(self.target.dim)]
            sol = R.solve(mat, self.source.dim, rhs)
            if sol is None:
                raise DomainError("homomorphism is not surjective")
            out.append(self.source.from_coords(sol))
        return out

    def lift(self, elem: Element) -> Element:
        sec = self.section()
        out: Element = {}
        for c, s in zip(self.target.coords(elem), sec):
            out = self.source.add(out, s, c)
        return out


@dataclass(frozen=True)
class SmallExtension:
    hom: ArtinHom
    kernel_generator: Tuple[Tuple[Monomial, "QQ.dtype"], ...]

    @classmethod
    def build(cls, hom: ArtinHom, kernel_generator: Element) -> "SmallExtension":
        src = hom.source
        if not hom.is_surjective():
            raise DomainError("a small extension needs a surjective homomorphism")
        ker = hom.kernel()
        kvec = src.coords(kernel_generator)
        if len(ker) != 1 or R.coordinates([src.coords(ker[0])], kvec) is None or R.is_zero_vector(kvec):
            raise DomainError("kernel is not spanned by the given generator")
        for m in src.maximal_ideal_basis:
            if src.mul({m: QQ(1)}, kernel_generator):
                raise DomainError("kernel is not annihilated by the maximal ideal")
        return cls(hom, tuple(sorted(src.reduce(kernel_generator).items())))

    @property
    def generator(self) -> Element:
        return dict(self.kernel_generator)


def small_extension_chain(hom: ArtinHom) -> List[SmallExtension]:
    """Factor a surjection into small extensions, killing one top monomial at a time."""
    if not hom.is_surjective():
        raise DomainError("small_extension_chain needs a surjective homomorphism")
    src = hom.source
    kernel_vecs = [src.coords(k) for k in hom.kernel()]
    if not kernel_vecs:
        return []
    kernel_monos = [m for m in src.basis if R.coordinates(kernel_vecs, src.coords({m: QQ(1)})) is not None]
    if len(kernel_monos) != len(kernel_vecs):
        raise DomainError("kernel is not spanned by monomials; only monomial quotients are supported")
    kernel_monos.sort(key=lambda m: (-sum(m), m))
    chain: List[SmallExtension] = []
    current = src
    for mono in kernel_monos[:-1]:
        smaller = quotient_by_monomial(current, mono)
        link = ArtinHom.projection(current, smaller)
        chain.append(SmallExtension.build(link, {mono: QQ(1)}))
        current = smaller
    images = {g: hom.image(i) for i, g in enumerate(src.gens)}
    last = ArtinHom.build(current, hom.target, images)
    chain.append(SmallExtension.build(last, {kernel_monos[-1]: QQ(1)}))
    logger.debug("small extension chain of length %d", len(chain))
    return chain


def compose_chain(chain: Sequence[SmallExtension]) -> ArtinHom:
    hom = chain[0].hom
    for link in chain[1:]:
        hom = link.hom.compose(hom)
    return hom


# ---------------------------------------------------------------------------
# m (x) V
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MElement:
    """An element of m (x) QQ^dim, stored per maximal-ideal monomial."""

    algebra: ArtinAlgebra
    dim: int
    comps: Tuple[Tuple[Monomial, Tuple], ...] = field(default=())

    @classmethod
    def from_dict(cls, algebra: ArtinAlgebra, dim: int, comps: Dict[Monomial, Sequence]) -> "MElement":
        packed = []
        for mono, vec in comps.items():
            mono = tuple(mono)
            if len(mono) != len(algebra.gens):
                raise ContextMismatchError("monomial does not match the Artin generators")
            if not sum(mono):
                raise DomainError("MElement components must lie in the maximal ideal")
            if algebra.in_ideal(mono):
                continue
            vec = tuple(QQ.convert(v) for v in vec)
            if len(vec) != dim:
                raise DomainError("vector length mismatch")
            if any(vec):
                packed.append((mono, vec))
        return cls(algebra, dim, tuple(sorted(packed)))

    @classmethod
    def single(cls, algebra: ArtinAlgebra, dim: int, mono: Monomial, vec: Sequence) -> "MElement":
        return cls.from_dict(algebra, dim, {mono: vec})

    @property
    def order(self) -> int:
        return self.algebra.nilpotency_order

    def as_dict(self) -> Dict[Monomial, Tuple]:
        return dict(self.comps)

    def _check(self, other: "MElement"):
        if self.algebra != other.algebra or self.dim != other.dim:
            raise ContextMismatchError("MElements live over different algebras or spaces")

    def __add__(self, other: "MElement") -> "MElement":
        self._check(other)
        out = self.as_dict()
        for m, v in other.comps:
            cur = out.get(m, (QQ(0),) * self.dim)
            out[m] = tuple(a + b for a, b in zip(cur, v))
        return MElement.from_dict(self.algebra, self.dim, out)

    def __neg__(self) -> "MElement":
        return self * -1

    def __sub__(self, other: "MElement") -> "MElement":
        return self + (-other)

    def __mul__(self, scalar) -> "MElement":
        s = QQ.convert(scalar)
        return MElement.from_dict(self.algebra, self.dim, {m: tuple(s * a for a in v) for m, v in self.comps})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.comps)

    def map(self, linear: Callable[[Tuple], Sequence], dim: Optional[int] = None) -> "MElement":
        dim = self.dim if dim is None else dim
        return MElement.from_dict(self.algebra, dim, {m: linear(v) for m, v in self.comps})

    def bracket(self, other: "MElement", vec_bracket: Callable[[Tuple, Tuple], Sequence]) -> "MElement":
        self._check(other)
        out: Dict[Monomial, List] = {}
        for ma, va in self.comps:
            for mb, vb in other.comps:
                m = tuple(x + y for x, y in zip(ma, mb))
                if self.algebra.in_ideal(m):
                    continue
                w = vec_bracket(va, vb)
                cur = out.setdefault(m, [QQ(0)] * self.dim)
                for i, c in enumerate(w):
                    cur[i] += c
        return MElement.from_dict(self.algebra, self.dim, out)

    def layer(self, degree: int) -> "MElement":
        """Components whose monomial has the given total degree."""
        return MElement(self.algebra, self.dim, tuple((m, v) for m, v in self.comps if sum(m) == degree))


# ---------------------------------------------------------------------------
# exponentials
# ---------------------------------------------------------------------------

def _order_of(x, order: Optional[int]) -> int:
    if order is not None:
        return order
    found = getattr(x, "order", None)
    if found is None:
        raise DomainError("cannot infer the nilpotency order; pass order=")
    return found


def nilpotent_exp(op: Callable, v, order: int):
    """sum_k op^k(v)/k!, which must terminate within ``order`` steps."""
    total = v
    term = v
    for k in range(1, order + 1):
        term = op(term)
        if not term:
            return total
        total = total + term * QQ(1, factorial(k))
    if op(term):
        raise DomainError("exponential series did not terminate; the operator is not nilpotent")
    return total


def exp_action(x, v, action: Callable, order: Optional[int] = None):
    """e^x v = v + x.v + x.(x.v)/2 + ..."""
    return nilpotent_exp(lambda w: action(x, w), v, _order_of(x, order) + 1)


Word = Tuple[int, ...]


def _fa_mul(a: Dict[Word, "QQ.dtype"], b: Dict[Word, "QQ.dtype"], cap: int) -> Dict[Word, "QQ.dtype"]:
    out: Dict[Word, "QQ.dtype"] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            if len(wa) + len(wb) > cap:
                continue
            w = wa + wb
            out[w] = out.get(w, QQ(0)) + ca * cb
    return {w: c for w, c in out.items() if c}


@lru_cache(maxsize=None)
def bch_coefficients(cap: int) -> Tuple[Tuple[Word, "QQ.dtype"], ...]:
    """Coefficients of log(e^X e^Y) in the free associative algebra, words of length <= cap.

    Letter 0 is X and letter 1 is Y.
    """
    one = {(): QQ(1)}

    def exp_letter(letter):
        out, term = dict(one), dict(one)
        for k in range(1, cap + 1):
            term = _fa_mul(term, {(letter,): QQ(1, k)}, cap)
            for w, c in term.items():
                out[w] = out.get(w, QQ(0)) + c
        return out

    prod = _fa_mul(exp_letter(0), exp_letter(1), cap)
    z = {w: c for w, c in prod.items() if w}
    log: Dict[Word, "QQ.dtype"] = {}
    power = dict(one)
    for k in range(1, cap + 1):
        power = _fa_mul(power, z, cap)
        sign = QQ(1 if k % 2 else -1, k)
        for w, c in power.items():
            log[w] = log.get(w, QQ(0)) + sign * c
    return tuple(sorted((w, c) for w, c in log.items() if c))


def bch(x, y, bracket: Callable, order: Optional[int] = None):
    """z with e^x e^y = e^z, through the right-normed Dynkin map.

    ``x`` and ``y`` must support +, scalar * and truthiness; the result is
    exact because brackets of ``order`` or more factors vanish.
    """
    n = _order_of(x, order)
    cap = max(n - 1, 1)
    letters = (x, y)
    nested: Dict[Word, object] = {}

    def right_normed(word: Word):
        if word in nested:
            return nested[word]
        if len(word) == 1:
            val = letters[word[0]]
        else:
            tail = right_normed(word[1:])
            val = bracket(letters[word[0]], tail) if tail else tail
        nested[word] = val
        return val

    total = x + y
    for word, coeff in bch_coefficients(cap):
        if len(word) < 2:
            continue
        term = right_normed(word)
        if term:
            total = total + term * (coeff * QQ(1, len(word)))
    return total


# ---------------------------------------------------------------------------
# formal time
# ---------------------------------------------------------------------------

class TimePoly:
    """sum_n v_n t^n with values in any additive space."""

    def __init__(self, terms: Dict[int, object], zero):
        self.zero = zero
        self.terms = {n: v for n, v in terms.items() if v}

    @property
    def order(self) -> int:
        for v in self.terms.values():
            found = getattr(v, "order", None)
            if found is not None:
                return found
        return getattr(self.zero, "order", 1)

    def __add__(self, other: "TimePoly") -> "TimePoly":
        out = dict(self.terms)
        for n, v in other.terms.items():
            out[n] = out[n] + v if n in out else v
        return TimePoly(out, self.zero)

    def __neg__(self) -> "TimePoly":
        return self * -1

    def __sub__(self, other: "TimePoly") -> "TimePoly":
        return self + (-other)

    def __mul__(self, scalar) -> "TimePoly":
        return TimePoly({n: v * scalar for n, v in self.terms.items()}, self.zero)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, n: int):
        return self.terms.get(n, self.zero)

    def derivative(self) -> "TimePoly":
        return TimePoly({n - 1: v * n for n, v in self.terms.items() if n}, self.zero)

    def apply(self, linear: Callable) -> "TimePoly":
        return TimePoly({n: linear(v) for n, v in self.terms.items()}, linear(self.zero))

    def evaluate_one(self):
        total = self.zero
        for v in self.terms.values():
            total = total + v
        return total


def time_integral(p: TimePoly):
    """Termwise integral over [0, 1]: b t^n contributes b/(n+1)."""
    total = p.zero
    for n, v in sorted(p.terms.items()):
        total = total + v * QQ(1, n + 1)
    return total


def time_bracket(bracket: Callable) -> Callable[[TimePoly, TimePoly], TimePoly]:
    def lifted(a: TimePoly, b: TimePoly) -> TimePoly:
        out: Dict[int, object] = {}
        for n, v in a.terms.items():
            for k, w in b.terms.items():
                term = bracket(v, w)
                if term:
                    out[n + k] = out[n + k] + term if n + k in out else term
        return TimePoly(out, a.zero)

    return lifted


def one_param_decompose(factors: Sequence[TimePoly], bracket: Callable, order: Optional[int] = None):
    """Return x with e^{X_1(t)} ... e^{X_k(t)} = e^{tx}, or raise NotHomomorphismError."""
    if not factors:
        raise DomainError("empty family")
    lifted = time_bracket(bracket)
    n = order if order is not None else max(f.order for f in factors)
    total = factors[0]
    for f in factors[1:]:
        total = bch(total, f, lifted, order=n)
    stray = [k for k in total.terms if k != 1]
    if stray:
        raise NotHomomorphismError(f"family has t-powers {sorted(stray)} beyond t^1")
    return total.coefficient(1)
