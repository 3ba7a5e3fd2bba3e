"""
Finite-dimensional DGLAs and their deformation functors.

- ``FDGLA``: graded basis, differential and bracket structure constants over QQ,
  axioms verified at construction.
- ``mc_check`` / ``gauge_act`` / ``gauge_bch``: Maurer-Cartan elements of
  g (x) m and the gauge action of g^0 (x) m.
- ``deligne_pi0`` / ``deligne_equivalent``: isomorphism classes of the Deligne
  groupoid where they are computable, and a gauge-witness search otherwise.
- ``obstruction_lift`` / ``lift_along_chain``: lifting MC elements along small
  extensions; the obstruction is a class in H^2(g) (x) I.
- ``ConcreteDGLA``: a Lie algebra of sections regarded as a DGLA in degree 0,
  axioms spot-checked on samples.

Elements of g (x) m are ``artin.MElement`` instances of dimension ``g.dim``.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from . import ring as R
from .artin import ArtinAlgebra, ArtinHom, MElement, SmallExtension, bch, small_extension_chain
from .complexes import CochainComplex, identity
from .errors import ConsistencyError, ContextMismatchError, DomainError, SchemaError
from .results import CheckResult, Cohomology

logger = logging.getLogger(__name__)


def _sign(p: int) -> int:
    return -1 if p % 2 else 1


@dataclass(frozen=True)
class FDGLA:
    """Basis e_0..e_{N-1} with degrees; d[j] and bracket[(i, j)] are sparse {k: c}."""

    labels: Tuple[str, ...]
    degrees: Tuple[int, ...]
    d: Tuple[Tuple[Tuple[int, "QQ.dtype"], ...], ...]
    brackets: Tuple[Tuple[Tuple[int, int], Tuple[Tuple[int, "QQ.dtype"], ...]], ...]

    @classmethod
    def build(cls, labels: Sequence[str], degrees: Sequence[int],
              d: Optional[Mapping[str, Mapping[str, Any]]] = None,
              brackets: Optional[Sequence[Tuple[str, str, Mapping[str, Any]]]] = None) -> "FDGLA":
        """Brackets may be given for either order; the other follows by graded antisymmetry."""
        labels = tuple(labels)
        degrees = tuple(int(k) for k in degrees)
        if len(labels) != len(degrees) or len(set(labels)) != len(labels):
            raise DomainError("labels must be distinct and match the degrees")
        pos = {name: i for i, name in enumerate(labels)}

        def index(name: str) -> int:
            if name not in pos:
                raise DomainError(f"unknown basis element {name!r}")
            return pos[name]

        def sparse(images: Mapping[str, Any]) -> Dict[int, "QQ.dtype"]:
            out = {}
            for name, c in images.items():
                c = R.to_qq(c, name)
                if c:
                    out[index(name)] = c
            return out

        dmap = [dict() for _ in labels]
        for name, images in (d or {}).items():
            dmap[index(name)] = sparse(images)
        table: Dict[Tuple[int, int], Dict[int, "QQ.dtype"]] = {}
        for a, b, images in brackets or ():
            i, j = index(a), index(b)
            value = sparse(images)
            mirrored = {k: -_sign(degrees[i] * degrees[j]) * c for k, c in value.items()}
            for key, val in (((i, j), value), ((j, i), mirrored)):
                if key in table and table[key] != val:
                    raise DomainError(f"bracket [{labels[key[0]]}, {labels[key[1]]}] violates graded antisymmetry")
                table[key] = val
        g = cls(labels, degrees,
                tuple(tuple(sorted(m.items())) for m in dmap),
                tuple(sorted((k, tuple(sorted(v.items()))) for k, v in table.items() if v)))
        g.verify()
        logger.debug("FDGLA of dimension %d, degrees %s", g.dim, sorted(set(degrees)))
        return g

    @classmethod
    def abelian(cls, labels: Sequence[str], degrees: Sequence[int],
                d: Optional[Mapping[str, Mapping[str, Any]]] = None) -> "FDGLA":
        return cls.build(labels, degrees, d, ())

    @classmethod
    def lie(cls, labels: Sequence[str], brackets: Sequence[Tuple[str, str, Mapping[str, Any]]]) -> "FDGLA":
        """A Lie algebra concentrated in degree 0."""
        return cls.build(labels, [0] * len(labels), None, brackets)

    @classmethod
    def from_json(cls, data: Mapping, path: str = "/dgla") -> "FDGLA":
        if not isinstance(data, Mapping):
            raise SchemaError("expected an object", path)
        basis = data.get("basis")
        if not isinstance(basis, list) or not basis:
            raise SchemaError("expected a non-empty list", f"{path}/basis")
        labels, degrees = [], []
        for i, entry in enumerate(basis):
            if not isinstance(entry, Mapping) or not isinstance(entry.get("name"), str) \
                    or not isinstance(entry.get("degree"), int):
                raise SchemaError("expected {name: str, degree: int}", f"{path}/basis/{i}")
            labels.append(entry["name"])
            degrees.append(entry["degree"])
        d = data.get("d", {})
        if not isinstance(d, Mapping) or not all(isinstance(v, Mapping) for v in d.values()):
            raise SchemaError("expected {name: {name: coefficient}}", f"{path}/d")
        brackets = []
        for i, entry in enumerate(data.get("bracket", [])):
            if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[2], Mapping)):
                raise SchemaError("expected [name, name, {name: coefficient}]", f"{path}/bracket/{i}")
            brackets.append(tuple(entry))
        try:
            return cls.build(labels, degrees, d, brackets)
        except SchemaError:
            raise
        except DomainError as exc:
            raise SchemaError(str(exc), path) from exc

    def to_json(self) -> Dict:
        out = {"basis": [{"name": n, "degree": k} for n, k in zip(self.labels, self.degrees)],
               "d": {self.labels[j]: {self.labels[k]: R.qq_str(c) for k, c in img}
                     for j, img in enumerate(self.d) if img},
               "bracket": [[self.labels[i], self.labels[j], {self.labels[k]: R.qq_str(c) for k, c in img}]
                           for (i, j), img in self.brackets if i <= j]}
        return out

    # -- structure ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, name: str) -> int:
        return self.labels.index(name)

    def indices(self, k: int) -> Tuple[int, ...]:
        return tuple(i for i, deg in enumerate(self.degrees) if deg == k)

    @property
    def is_abelian(self) -> bool:
        return not self.brackets

    @cached_property
    def _table(self) -> Dict[Tuple[int, int], Tuple]:
        return dict(self.brackets)

    def basis_vector(self, i: int) -> List:
        return [QQ(1) if j == i else QQ(0) for j in range(self.dim)]

    def d_vec(self, v: Sequence) -> List:
        out = [QQ(0)] * self.dim
        for j, c in enumerate(v):
            if c:
                for k, a in self.d[j]:
                    out[k] += c * a
        return out

    def bracket_vec(self, u: Sequence, v: Sequence) -> List:
        out = [QQ(0)] * self.dim
        table = self._table
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b:
                    for k, c in table.get((i, j), ()):
                        out[k] += a * b * c
        return out

    def degree_of(self, v: Sequence) -> Optional[int]:
        """The common degree of the support of v, or None for 0; DomainError if mixed."""
        found = {self.degrees[i] for i, c in enumerate(v) if c}
        if len(found) > 1:
            raise DomainError("vector is not homogeneous")
        return found.pop() if found else None

    def verify(self):
        """d of degree +1 with d^2 = 0, graded antisymmetry, Leibniz and graded Jacobi."""
        n = self.dim
        basis = [self.basis_vector(i) for i in range(n)]
        for j in range(n):
            for k, _ in self.d[j]:
                if self.degrees[k] != self.degrees[j] + 1:
                    raise DomainError(f"d({self.labels[j]}) does not have degree {self.degrees[j] + 1}")
            if any(self.d_vec(self.d_vec(basis[j]))):
                raise DomainError(f"d^2 != 0 on {self.labels[j]}")
        table = self._table
        for (i, j), img in table.items():
            for k, _ in img:
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise DomainError(f"[{self.labels[i]}, {self.labels[j]}] is not of degree "
                                      f"{self.degrees[i] + self.degrees[j]}")
            back = dict(table.get((j, i), ()))
            if any(back.get(k, 0) != -_sign(self.degrees[i] * self.degrees[j]) * c for k, c in img):
                raise DomainError(f"graded antisymmetry fails on ({self.labels[i]}, {self.labels[j]})")
        br = self.bracket_vec
        for i in range(n):
            a, da, p = basis[i], self.d_vec(basis[i]), self.degrees[i]
            for j in range(n):
                b, q = basis[j], self.degrees[j]
                ab = br(a, b)
                rhs = [x + _sign(p) * y for x, y in zip(br(da, b), br(a, self.d_vec(b)))]
                if self.d_vec(ab) != rhs:
                    raise DomainError(f"Leibniz rule fails on ({self.labels[i]}, {self.labels[j]})")
                for k in range(n):
                    c = basis[k]
                    lhs = br(a, br(b, c))
                    right = [x + _sign(p * q) * y for x, y in zip(br(ab, c), br(b, br(a, c)))]
                    if lhs != right:
                        raise DomainError(f"graded Jacobi fails on "
                                          f"({self.labels[i]}, {self.labels[j]}, {self.labels[k]})")

    def complex(self) -> Tuple[CochainComplex, int]:
        """(g, d) as a cochain complex shifted to start in degree 0, and the shift."""
        low, high = min(self.degrees), max(self.degrees)
        blocks = [self.indices(k) for k in range(low, high + 1)]
        maps = []
        for k in range(len(blocks) - 1):
            src, tgt = blocks[k], blocks[k + 1]
            rows = [[QQ(0)] * len(src) for _ in tgt]
            where = {t: r for r, t in enumerate(tgt)}
            for c, j in enumerate(src):
                for t, a in self.d[j]:
                    rows[where[t]][c] = a
            maps.append(rows)
        return CochainComplex.build([len(b) for b in blocks], maps), low

    def cohomology(self, k: int) -> Cohomology:
        """H^k(g, d) in the coordinates of the full basis."""
        cx, low = self.complex()
        if not low <= k < low + len(cx.dims):
            return Cohomology(k, 0, (), 0)
        local = cx.cohomology(k - low)
        idx = self.indices(k)

        def embed(vec):
            out = [QQ(0)] * self.dim
            for i, c in zip(idx, vec):
                out[i] = c
            return tuple(out)

        return Cohomology(k, local.dim, tuple(embed(v) for v in local.basis), local.cocycle_dim,
                          tuple(embed(v) for v in local.coboundaries), labels=tuple(self.labels))

    def d_preimage(self, k: int, v: Sequence) -> Optional[List]:
        """u in g^{k-1} with du = v, or None."""
        src = self.indices(k - 1)
        if not src:
            return None if any(v) else [QQ(0)] * self.dim
        cols = [self.d_vec(self.basis_vector(j)) for j in src]
        sol = R.solve(R.transpose(cols, self.dim), len(src), list(v))
        if sol is None:
            return None
        out = [QQ(0)] * self.dim
        for j, c in zip(src, sol):
            out[j] = c
        return out


# ---------------------------------------------------------------------------
# g (x) m
# ---------------------------------------------------------------------------

def element(g: FDGLA, algebra: ArtinAlgebra, comps: Mapping[Tuple[int, ...], Mapping[str, Any]]) -> MElement:
    """Build sum_mono mono (x) v_mono from named coordinates."""
    out = {}
    for mono, coords in comps.items():
        vec = [QQ(0)] * g.dim
        for name, c in coords.items():
            vec[g.index(name)] = R.to_qq(c, name)
        out[tuple(mono)] = vec
    return MElement.from_dict(algebra, g.dim, out)


def _require_degree(g: FDGLA, x: MElement, k: int, what: str):
    if x.dim != g.dim:
        raise ContextMismatchError(f"{what} does not live in this DGLA")
    for _, v in x.comps:
        deg = g.degree_of(v)
        if deg is not None and deg != k:
            raise DomainError(f"{what} must have degree {k}, found degree {deg}")


def differential(g: FDGLA, x: MElement) -> MElement:
    return x.map(g.d_vec)


def bracket(g: FDGLA, x: MElement, y: MElement) -> MElement:
    return x.bracket(y, g.bracket_vec)


def mc_residual(g: FDGLA, x: MElement) -> MElement:
    return differential(g, x) + bracket(g, x, x) * QQ(1, 2)


def mc_check(g: FDGLA, x: MElement) -> CheckResult:
    """dx + [x,x]/2 = 0; the residual is the witness."""
    _require_degree(g, x, 1, "a Maurer-Cartan element")
    residual = mc_residual(g, x)
    return CheckResult(not residual, residual, "" if not residual else "dx + [x,x]/2 != 0")


def gauge_act(g: FDGLA, y: MElement, x: MElement) -> MElement:
    """e^y . x = x + sum_n ad_y^n([y,x] - dy)/(n+1)!."""
    _require_degree(g, y, 0, "a gauge element")
    _require_degree(g, x, 1, "a Maurer-Cartan element")
    if y.algebra != x.algebra:
        raise ContextMismatchError("gauge element and MC element over different Artin algebras")
    total = x
    term = bracket(g, y, x) - differential(g, y)
    n = 0
    while term:
        total = total + term * QQ(1, factorial(n + 1))
        term = bracket(g, y, term)
        n += 1
        if n > y.order:
            raise DomainError("gauge series did not terminate")
    return total


def gauge_bch(g: FDGLA, y: MElement, z: MElement) -> MElement:
    """w with e^w = e^y e^z in the gauge group."""
    return bch(y, z, lambda a, b: bracket(g, a, b))


# ---------------------------------------------------------------------------
# Deligne groupoid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeligneClasses:
    """``kind`` is "single", "abelian" or "tester"; ``dim`` is None for testers."""

    kind: str
    dim: Optional[int]
    representatives: Tuple[MElement, ...] = ()
    detail: str = ""


def deligne_pi0(g: FDGLA, algebra: ArtinAlgebra) -> DeligneClasses:
    h1 = g.cohomology(1)
    if not g.indices(1) or h1.dim == 0:
        return DeligneClasses("single", 1, (MElement(algebra, g.dim),),
                              "every Maurer-Cartan element is gauge equivalent to 0")
    if g.is_abelian:
        reps = tuple(MElement.single(algebra, g.dim, mono, v)
                     for mono in algebra.maximal_ideal_basis for v in h1.basis)
        return DeligneClasses("abelian", h1.dim * len(algebra.maximal_ideal_basis), reps,
                              "classes are H^1(g) (x) m")
    return DeligneClasses("tester", None, (), "use deligne_equivalent for pairwise tests")


def _flatten(x: MElement, monos: Sequence[Tuple[int, ...]]) -> List:
    comps = x.as_dict()
    out = []
    for m in monos:
        out.extend(comps.get(m, (QQ(0),) * x.dim))
    return out


def _affine_solve(build: Callable[[Sequence], MElement], nvars: int, monos: Sequence) -> Optional[List]:
    """Solve F(u) = 0 for an affine F by sampling its columns."""
    base = _flatten(build([QQ(0)] * nvars), monos)
    cols = []
    for i in range(nvars):
        e = [QQ(0)] * nvars
        e[i] = QQ(1)
        cols.append([a - b for a, b in zip(_flatten(build(e), monos), base)])
    if not cols:
        return [] if not any(base) else None
    return R.solve(R.transpose(cols, len(base)), nvars, [-b for b in base])


def deligne_equivalent(g: FDGLA, x: MElement, target: MElement) -> Optional[MElement]:
    """y with e^y . x = target, or None when none exists.

    Exact for abelian g over any algebra and for any g when m^3 = 0.
    """
    for name, elem in (("source", x), ("target", target)):
        if not mc_check(g, elem):
            raise DomainError(f"{name} is not a Maurer-Cartan element")
    if x.algebra != target.algebra:
        raise ContextMismatchError("elements over different Artin algebras")
    A = x.algebra
    if not g.is_abelian and A.nilpotency_order > 3:
        raise DomainError("equivalence testing needs an abelian DGLA or m^3 = 0")
    deg0 = g.indices(0)
    layer1 = [m for m in A.maximal_ideal_basis if sum(m) == 1]
    upper = [m for m in A.maximal_ideal_basis if sum(m) > 1]

    def vec0(u: Sequence) -> List:
        out = [QQ(0)] * g.dim
        for i, c in zip(deg0, u):
            out[i] = c
        return out

    size = len(deg0)
    if g.is_abelian:
        monos = list(A.maximal_ideal_basis)

        def residual(u):
            y = MElement.from_dict(A, g.dim, {m: vec0(u[k * size:(k + 1) * size]) for k, m in enumerate(monos)})
            return target - x + differential(g, y)

        sol = _affine_solve(residual, size * len(monos), monos)
        if sol is None:
            return None
        y = MElement.from_dict(A, g.dim, {m: vec0(sol[k * size:(k + 1) * size]) for k, m in enumerate(monos)})
    else:
        # layer one fixes y1 up to ker d; layer two is then affine in (ker coords, y2)
        def first(u):
            y = MElement.from_dict(A, g.dim, {m: vec0(u[k * size:(k + 1) * size]) for k, m in enumerate(layer1)})
            return (target - x + differential(g, y)).layer(1)

        base = _affine_solve(first, size * len(layer1), layer1)
        if base is None:
            return None
        free = R.kernel(R.transpose([g.d_vec(vec0(e)) for e in identity(size)], g.dim), size) if size else []
        kernel = [free for _ in layer1]
        kdims = [len(k) for k in kernel]
        s = (x.layer(1) + target.layer(1)) * QQ(1, 2)

        def y_of(u):
            comps, pos = {}, 0
            for k, m in enumerate(layer1):
                v = list(base[k * size:(k + 1) * size])
                for basis_vec in kernel[k]:
                    v = [a + u[pos] * b for a, b in zip(v, basis_vec)]
                    pos += 1
                comps[m] = vec0(v)
            for m in upper:
                comps[m] = vec0(u[pos:pos + size])
                pos += size
            return MElement.from_dict(A, g.dim, comps)

        def second(u):
            y = y_of(u)
            y1 = y.layer(1)
            y2 = y - y1
            return differential(g, y2) - bracket(g, y1, s) - (x - x.layer(1)) + (target - target.layer(1))

        sol = _affine_solve(second, sum(kdims) + size * len(upper), upper)
        if sol is None:
            return None
        y = y_of(sol)
    if gauge_act(g, y, x) != target:
        raise ConsistencyError("gauge witness does not reproduce the target element")
    return y


# ---------------------------------------------------------------------------
# obstructions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftResult:
    """``element`` is the MC lift when ``lifted``; otherwise the naive lift whose residual is k (x) obstruction."""

    lifted: bool
    element: MElement
    obstruction: Optional[Tuple] = None
    residual: Optional[MElement] = None
    obstruction_class: Tuple = field(default=())

    def __bool__(self) -> bool:
        return self.lifted


def lift_coefficients(hom: ArtinHom, x: MElement) -> MElement:
    """Lift each Artin coefficient of x through a linear section of ``hom``."""
    if x.algebra != hom.target:
        raise ContextMismatchError("element does not live over the target of the extension")
    src = hom.source
    out: Dict[Tuple[int, ...], List] = {}
    for mono, vec in x.comps:
        lifted = hom.lift({mono: QQ(1)})
        for m, c in lifted.items():
            if not sum(m):
                raise DomainError("lifted coefficient left the maximal ideal")
            cur = out.setdefault(m, [QQ(0)] * x.dim)
            for i, a in enumerate(vec):
                cur[i] += c * a
    return MElement.from_dict(src, x.dim, out)


def _kernel_component(ext: SmallExtension, r: MElement) -> Optional[List]:
    """o with r = k (x) o, where k generates the kernel."""
    k = ext.generator
    pivot = next(iter(sorted(k)))
    comps = r.as_dict()
    o = [c / k[pivot] for c in comps.get(pivot, (QQ(0),) * r.dim)]
    for m in set(k) | set(comps):
        expected = [k.get(m, QQ(0)) * a for a in o]
        if list(comps.get(m, (QQ(0),) * r.dim)) != expected:
            return None
    return o


def obstruction_lift(g: FDGLA, ext: SmallExtension, x: MElement) -> LiftResult:
    """Lift an MC element over A to A' along the small extension A' -> A."""
    if not mc_check(g, x):
        raise DomainError("only Maurer-Cartan elements can be lifted")
    naive = lift_coefficients(ext.hom, x)
    residual = mc_residual(g, naive)
    if not residual:
        return LiftResult(True, naive, None, residual)
    o = _kernel_component(ext, residual)
    if o is None:
        raise ConsistencyError("residual of a lift is not in I (x) g")
    u = g.d_preimage(2, [-c for c in o])
    if u is not None:
        k = ext.generator
        correction = MElement.from_dict(ext.hom.source, g.dim, {m: [c * a for a in u] for m, c in k.items()})
        lifted = naive + correction
        if not mc_check(g, lifted):
            raise ConsistencyError("corrected lift is not Maurer-Cartan")
        logger.debug("lifted along small extension after a degree-1 correction")
        return LiftResult(True, lifted, None, residual)
    h2 = g.cohomology(2)
    coords = R.coordinates([list(v) for v in h2.basis] + [list(v) for v in h2.coboundaries], o)
    coords = coords[:h2.dim] if coords is not None else None
    logger.debug("obstruction class %s", coords)
    return LiftResult(False, naive, tuple(o), residual, tuple(coords or ()))


def lift_along_chain(g: FDGLA, hom: ArtinHom, x: MElement) -> Tuple[LiftResult, int]:
    """Lift through every link of ``small_extension_chain(hom)``, target side first.

    Returns the last result and the number of links lifted.
    """
    chain = small_extension_chain(hom)
    current = LiftResult(True, x)
    done = 0
    for ext in reversed(chain):
        current = obstruction_lift(g, ext, current.element)
        if not current.lifted:
            break
        done += 1
    return current, done


# ---------------------------------------------------------------------------
# Lie algebras of sections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConcreteDGLA:
    """A Lie algebra of sections regarded as a DGLA concentrated in degree 0."""

    name: str
    bracket: Callable[[Any, Any], Any]

    def verify(self, samples: Sequence[Any]) -> CheckResult:
        """Antisymmetry and Jacobi on all pairs and triples of the samples."""
        br = self.bracket
        for i, a in enumerate(samples):
            for b in samples[i:]:
                if br(a, b) + br(b, a):
                    return CheckResult(False, (a, b), f"{self.name}: bracket is not antisymmetric")
        for i, a in enumerate(samples):
            for j, b in enumerate(samples[i + 1:], start=i + 1):
                for c in samples[j + 1:]:
                    if br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b)):
                        return CheckResult(False, (a, b, c), f"{self.name}: Jacobi identity fails")
        return CheckResult(True, len(samples))

    def mc_check(self, x) -> CheckResult:
        """Degree-1 part is zero, so only x = 0 is Maurer-Cartan."""
        return CheckResult(not x, x)

    def gauge(self, y, x):
        """e^y acting on the only MC element 0."""
        if x:
            raise DomainError("a DGLA concentrated in degree 0 has no nonzero Maurer-Cartan elements")
        return x
