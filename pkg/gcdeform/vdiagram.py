"""
The bisemicosimplicial diagram V of a brane, its total complex, and the map
from H^2 of that complex into brane Lie algebroid cohomology.

- ``build_V``: degree-<=D truncations of the symmetry algebra T, the Hamiltonians
  H and the fibre product K, assembled over a nerve with identity restrictions.
  Top row: nerve of T. Bottom row: H (constant) plus the nerve of K. Vertical
  cofaces: Hamiltonian inclusion and chi.
- ``phi_map`` / ``phi_injective``: normalize a 2-cocycle, glue the normal
  components and take delta_l.
- ``DeligneDescent`` / ``descent_deligne_bijection``: descent data of the
  Deligne nerve sent to brane-deformation descent data.

Real sections are coordinatized by (component, monomial) with monomial degree <= D.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property, partial
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I

from . import ring as R
from .artin import REALS, ArtinAlgebra
from .brane import (Brane, BraneFrame, NerveCover, Simplex, brane_frame, classify, cohomology, delta_l,
                    normal_mu)
from .cartan import Chart, VectorField, d_function
from .complexes import (BisemiCx, CochainComplex, SemiCx, bisemi_layout, identity, nerve_coface, simplices_of,
                        tot_bisemi, zeros)
from .courant import GenSection, endo_action, ghat_bracket, sym_from_lie, sym_inverse, sym_log, sym_mul
from .deform import (DescentDatum, KKKElement, RElement, chi, induced, kkk_bch, kkk_bracket, kkk_check, mu_r,
                     sigma_morphism)
from .dgla import ConcreteDGLA
from .errors import ConsistencyError, ContextMismatchError, DomainError, InsolubleError
from .gcs import AlgebroidForm, GCStructure, gen_hamiltonian
from .results import CheckResult, Cohomology

logger = logging.getLogger(__name__)

Key = Tuple[Any, ...]


# ---------------------------------------------------------------------------
# linear algebra on polynomial data
# ---------------------------------------------------------------------------

def _poly_entries(prefix: Key, p) -> Dict[Key, "QQ.dtype"]:
    out = {}
    for mono, c in p.iterterms():
        c = QQ_I.convert(c)
        if c.x:
            out[prefix + (tuple(mono), "re")] = c.x
        if c.y:
            out[prefix + (tuple(mono), "im")] = c.y
    return out


def _linear_kernel(nvars: int, fn: Callable[[List], Dict[Key, "QQ.dtype"]]) -> List[List]:
    """Kernel of a linear map given by its values on unit vectors."""
    columns = []
    for i in range(nvars):
        e = [QQ(0)] * nvars
        e[i] = QQ(1)
        columns.append(fn(e))
    keys = sorted({k for col in columns for k in col}, key=repr)
    if not keys:
        return identity(nvars)
    rows = [[col.get(k, QQ(0)) for col in columns] for k in keys]
    return R.kernel(rows, nvars)


class _Span:
    """A subspace of QQ^n given by a basis; coordinates by exact solve."""

    def __init__(self, basis: Sequence[Sequence], n: int, name: str):
        self.basis = [list(v) for v in basis]
        self.n = n
        self.name = name

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, v: Sequence) -> List:
        sol = R.coordinates(self.basis, v) if self.basis else ([] if R.is_zero_vector(v) else None)
        if sol is None:
            raise ConsistencyError(f"vector lies outside the truncated space {self.name}")
        return sol

    def contains(self, v: Sequence) -> bool:
        try:
            self.coords(v)
        except ConsistencyError:
            return False
        return True

    def vector(self, coords: Sequence) -> List:
        out = [QQ(0)] * self.n
        for c, b in zip(coords, self.basis):
            if c:
                out = [x + c * y for x, y in zip(out, b)]
        return out


@dataclass(frozen=True)
class SectionSpace:
    """Real generalized sections on ``chart`` with coefficients of degree <= ``degree``."""

    chart: Chart
    degree: int

    @cached_property
    def monomials(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(m) for m in R.monomials_up_to(self.chart.n, self.degree))

    @cached_property
    def labels(self) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
        return tuple((c, m) for c in range(2 * self.chart.n) for m in self.monomials)

    @property
    def size(self) -> int:
        return len(self.labels)

    def section(self, vec: Sequence) -> GenSection:
        ch = self.chart
        comps = [ch.zero] * (2 * ch.n)
        for (c, m), a in zip(self.labels, vec):
            if a:
                comps[c] += ch.scale(ch.monomial(m), a)
        return GenSection.from_vector(ch, comps)

    def flatten(self, s: GenSection) -> Optional[List]:
        """Coordinates of a real section, or None if it leaves the truncation."""
        index = {lab: i for i, lab in enumerate(self.labels)}
        out = [QQ(0)] * self.size
        n = self.chart.n
        for c, p in enumerate(s.vector()):
            for mono, coeff in p.iterterms():
                coeff = QQ_I.convert(coeff)
                key = (c, tuple(mono[:n]))
                if coeff.y or any(mono[n:]) or key not in index:
                    return None
                out[index[key]] = coeff.x
        return out


# ---------------------------------------------------------------------------
# the diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VDiagram:
    brane: Brane
    gc: GCStructure
    cover: NerveCover
    degree: int
    sections: SectionSpace
    t_basis: Tuple[Tuple, ...] = field(repr=False)
    h_incl: Tuple[Tuple, ...] = field(repr=False)
    k_basis: Tuple[Tuple, ...] = field(repr=False)
    bisemi: BisemiCx = field(repr=False)
    total: CochainComplex = field(repr=False)
    closure: Tuple[Tuple[str, bool], ...] = ()

    @property
    def dims(self) -> Dict[str, int]:
        return {"T": len(self.t_basis), "H": len(self.h_incl), "K": len(self.k_basis)}

    @cached_property
    def t_span(self) -> _Span:
        return _Span(self.t_basis, self.sections.size, "T")

    @cached_property
    def z_monomials(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(m) for m in R.monomials_up_to(self.brane.z.dim, self.degree + 1))

    @cached_property
    def k_span(self) -> _Span:
        return _Span(self.k_basis, len(self.t_basis) + len(self.z_monomials), "K")

    @cached_property
    def frame(self) -> BraneFrame:
        return brane_frame(self.brane, self.gc)

    @cached_property
    def layout(self):
        return bisemi_layout(self.bisemi)

    def t_section(self, coords: Sequence) -> GenSection:
        return self.sections.section(self.t_span.vector(coords))

    def t_coords(self, s: GenSection) -> List:
        flat = self.sections.flatten(s)
        if flat is None:
            raise ConsistencyError("section leaves the degree truncation")
        return self.t_span.coords(flat)

    def h_section(self, coords: Sequence) -> GenSection:
        t = [QQ(0)] * len(self.t_basis)
        for c, col in zip(coords, self.h_incl):
            if c:
                t = [a + c * b for a, b in zip(t, col)]
        return self.t_section(t)

    def z_function(self, coords: Sequence):
        zch = self.brane.z.chart
        out = zch.zero
        for c, m in zip(coords, self.z_monomials):
            if c:
                out += zch.scale(zch.monomial(m), c)
        return out

    def z_coords(self, f) -> List:
        index = {m: i for i, m in enumerate(self.z_monomials)}
        out = [QQ(0)] * len(self.z_monomials)
        for mono, c in f.iterterms():
            c = QQ_I.convert(c)
            if c.y or tuple(mono) not in index:
                raise ConsistencyError("function leaves the degree truncation on Z")
            out[index[tuple(mono)]] = c.x
        return out

    def kkk_element(self, coords: Sequence) -> KKKElement:
        t = len(self.t_basis)
        vec = self.k_span.vector(coords)
        ambient = self.t_section(vec[:t])
        tau = self.brane.z.restrict_vf(ambient.vf)
        return KKKElement(ambient, RElement(tau, self.z_function(vec[t:])))

    def kkk_coords(self, y: KKKElement) -> List:
        return self.k_span.coords(self.t_coords(y.ambient) + self.z_coords(y.boundary.f))

    @cached_property
    def t_dgla(self) -> ConcreteDGLA:
        return ConcreteDGLA("T", ghat_bracket)

    @cached_property
    def k_dgla(self) -> ConcreteDGLA:
        return ConcreteDGLA("K", partial(kkk_bracket, self.brane))

    # -- blocks of the total complex -----------------------------------------

    def blocks(self, k: int) -> Dict[Tuple[int, int], Tuple[int, int]]:
        """(n, m) -> (offset, size) in C^k."""
        return {key: (off, size) for key, off, size in self.layout[k]}

    def split(self, k: int, vec: Sequence) -> Dict[str, Any]:
        """C^k = (H + prod_{S_k} K) + prod_{S_{k-1}} T."""
        if len(vec) != self.total.dim(k):
            raise DomainError(f"vector is not in C^{k}")
        blocks = self.blocks(k)
        dh, dk, dt = len(self.h_incl), len(self.k_basis), len(self.t_basis)
        out: Dict[str, Any] = {"H": [], "K": {}, "T": {}}
        if (k, 0) in blocks:
            off, _ = blocks[(k, 0)]
            out["H"] = list(vec[off:off + dh])
            for s, simplex in enumerate(simplices_of(self.cover, k)):
                start = off + dh + s * dk
                out["K"][simplex] = list(vec[start:start + dk])
        if k >= 1 and (k - 1, 1) in blocks:
            off, _ = blocks[(k - 1, 1)]
            for s, simplex in enumerate(simplices_of(self.cover, k - 1)):
                start = off + s * dt
                out["T"][simplex] = list(vec[start:start + dt])
        return out

    def assemble(self, k: int, H: Sequence = (), K: Optional[Mapping] = None, T: Optional[Mapping] = None) -> List:
        """Inverse of ``split``; missing parts are zero."""
        vec = [QQ(0)] * self.total.dim(k)
        blocks = self.blocks(k)
        dh, dk, dt = len(self.h_incl), len(self.k_basis), len(self.t_basis)
        if (k, 0) in blocks:
            off, _ = blocks[(k, 0)]
            for i, c in enumerate(H):
                vec[off + i] = c
            for s, simplex in enumerate(simplices_of(self.cover, k)):
                for i, c in enumerate((K or {}).get(simplex, ())):
                    vec[off + dh + s * dk + i] = c
        if k >= 1 and (k - 1, 1) in blocks:
            off, _ = blocks[(k - 1, 1)]
            for s, simplex in enumerate(simplices_of(self.cover, k - 1)):
                for i, c in enumerate((T or {}).get(simplex, ())):
                    vec[off + s * dt + i] = c
        return vec


def _symmetry_basis(space: SectionSpace, gc: GCStructure) -> List[List]:
    J = gc.endo

    def action(vec):
        out = {}
        x = space.section(vec)
        for r, row in enumerate(endo_action(x, J).rows):
            for c, p in enumerate(row):
                out.update(_poly_entries(("endo", r, c), p))
        return out

    return _linear_kernel(space.size, action)


def _hamiltonian_basis(space: SectionSpace, gc: GCStructure, t: _Span) -> List[List]:
    """Hamiltonians of monomials and of i times monomials, in T coordinates."""
    ch = space.chart
    vectors = []
    for m in R.monomials_up_to(ch.n, space.degree + 1):
        f = ch.monomial(m)
        for g in (f, ch.scale(f, QQ_I(0, 1))):
            flat = space.flatten(gen_hamiltonian(gc, g))
            if flat is None:
                raise ConsistencyError("Hamiltonian section leaves the degree truncation")
            vectors.append(flat)
    spanned = R.span_basis(vectors, space.size) if vectors else []
    return [t.coords(v) for v in spanned]


def _kkk_basis(brane: Brane, space: SectionSpace, t: _Span, z_monos: Sequence) -> List[List]:
    """(T coords, h coords) with xi tangent to Z and rho^*(w) = i(rho xi)F - dh."""
    z = brane.z
    zch = z.chart
    nt = t.dim

    def constraints(vec):
        x = space.section(t.vector(vec[:nt]))
        h = zch.zero
        for c, m in zip(vec[nt:], z_monos):
            if c:
                h += zch.scale(zch.monomial(m), c)
        out = {}
        for k in z.normal:
            out.update(_poly_entries(("normal", k), z.restrict(x.vf.comps[k], x.chart)))
        tau = z.restrict_vf(x.vf)
        gap = z.restrict_form(x.form) - mu_r(brane.F, RElement(tau, h)).form
        for i, p in enumerate(gap.comps()):
            out.update(_poly_entries(("form", i), p))
        return out

    return _linear_kernel(nt + len(z_monos), constraints)


def _closure_report(V: "VDiagram") -> Tuple[Tuple[str, bool], ...]:
    space = V.sections
    t_closed = True
    ts = [V.t_section(e) for e in identity(len(V.t_basis))]
    for i, a in enumerate(ts):
        for b in ts[i + 1:]:
            flat = space.flatten(ghat_bracket(a, b))
            if flat is None or not V.t_span.contains(flat):
                t_closed = False
                break
        if not t_closed:
            break
    h_vectors = [V.t_span.vector(col) for col in V.h_incl]
    h_span = _Span(h_vectors, space.size, "H")
    hs = [space.section(v) for v in h_vectors]
    h_closed = True
    for i, a in enumerate(hs):
        for b in hs[i + 1:]:
            flat = space.flatten(ghat_bracket(a, b))
            if flat is None or not h_span.contains(flat):
                h_closed = False
                break
        if not h_closed:
            break
    return (("H", h_closed), ("T", t_closed))


def build_V(brane: Brane, gc: GCStructure, cover: NerveCover, degree: int, max_level: int = 3,
            check_brackets: bool = True) -> VDiagram:
    """The diagram V over ``cover`` with sections truncated at polynomial degree ``degree``."""
    if degree < 0:
        raise DomainError("degree bound must be non-negative")
    if max_level < 2:
        raise DomainError("V needs levels 0..2 for H^2 of the total complex")
    if brane.ambient.artin != REALS:
        raise ContextMismatchError("build_V works on the undeformed brane")
    brane_frame(brane, gc)
    space = SectionSpace(brane.ambient, degree)
    t_basis = _symmetry_basis(space, gc)
    t_span = _Span(t_basis, space.size, "T")
    h_incl = _hamiltonian_basis(space, gc, t_span)
    z_monos = tuple(tuple(m) for m in R.monomials_up_to(brane.z.dim, degree + 1))
    k_basis = _kkk_basis(brane, space, t_span, z_monos)
    dt, dh, dk = len(t_basis), len(h_incl), len(k_basis)
    logger.debug("V truncation D=%d: dim T %d, dim H %d, dim K %d", degree, dt, dh, dk)

    levels = max_level + 1
    top = max(len(s) for s in cover.simplices) - 1
    chi_matrix = R.transpose([list(v[:dt]) for v in k_basis], dt) if k_basis else zeros(dt, 0)
    incl_matrix = R.transpose([list(v) for v in h_incl], dt) if h_incl else zeros(dt, 0)

    def bottom_coface(n, i):
        size_in = dh + len(simplices_of(cover, n)) * dk
        size_out = dh + len(simplices_of(cover, n + 1)) * dk
        m = zeros(size_out, size_in)
        for r in range(dh):
            m[r][r] = QQ(1)
        nerve = nerve_coface(cover, n, i, dk)
        for r, row in enumerate(nerve):
            for c, a in enumerate(row):
                if a:
                    m[dh + r][dh + c] = a
        return m

    bottom = SemiCx.build(
        [CochainComplex.build([dh + len(simplices_of(cover, n)) * dk], []) for n in range(levels)],
        [[[bottom_coface(n, i)] for i in range(n + 2)] for n in range(levels - 1)],
        truncated=True)
    upper = SemiCx.build(
        [CochainComplex.build([len(simplices_of(cover, n)) * dt], []) for n in range(levels)],
        [[[nerve_coface(cover, n, i, dt)] for i in range(n + 2)] for n in range(levels - 1)],
        truncated=top >= levels)

    def vertical(i, n):
        count = len(simplices_of(cover, n))
        m = zeros(count * dt, dh + count * dk)
        for s in range(count):
            if i == 0:
                for r in range(dt):
                    for c in range(dh):
                        m[s * dt + r][c] = incl_matrix[r][c]
            else:
                for r in range(dt):
                    for c in range(dk):
                        m[s * dt + r][dh + s * dk + c] = chi_matrix[r][c]
        return m

    bisemi = BisemiCx.build([bottom, upper], [[[[vertical(i, n)] for n in range(levels)] for i in range(2)]])
    total = tot_bisemi(bisemi)
    V = VDiagram(brane, gc, cover, degree, space, tuple(tuple(v) for v in t_basis),
                 tuple(tuple(v) for v in h_incl), tuple(tuple(v) for v in k_basis), bisemi, total)
    if check_brackets:
        report = _closure_report(V)
        object.__setattr__(V, "closure", report)
        for name, ok in report:
            if not ok:
                logger.info("truncated %s is not closed under the bracket at D=%d", name, degree)
    logger.debug("Tot(V) dims %s", total.dims)
    return V


def h2_total(V: VDiagram) -> Cohomology:
    return V.total.cohomology(2)


# ---------------------------------------------------------------------------
# Phi
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiImage:
    """``coordinates`` of [zeta] in the brane H^2 basis; ``reduced`` is the normalized cocycle."""

    coordinates: Tuple
    zeta: Any
    reduced: Tuple


def _reduce_cocycle(V: VDiagram, c: Sequence) -> List:
    """Cohomologous cocycle with no H part and vanishing function parts on triangles."""
    c = list(c)
    parts = V.split(2, c)
    if any(parts["H"]):
        b = V.assemble(1, H=parts["H"])
        c = [x - y for x, y in zip(c, V.total.apply(1, b))]
        parts = V.split(2, c)
    triangles = simplices_of(V.cover, 2)
    if not triangles:
        return c
    nt = len(V.t_basis)
    nz = len(V.z_monomials)
    f = {tri: V.k_span.vector(parts["K"][tri])[nt:] for tri in triangles}
    if not any(any(v) for v in f.values()):
        return c
    edges = simplices_of(V.cover, 1)
    epos = {e: i for i, e in enumerate(edges)}
    rows, rhs = [], []
    for tri in triangles:
        a, b, g = tri
        for k in range(nz):
            row = [QQ(0)] * (len(edges) * nz)
            row[epos[(b, g)] * nz + k] += 1
            row[epos[(a, g)] * nz + k] -= 1
            row[epos[(a, b)] * nz + k] += 1
            rows.append(row)
            rhs.append(f[tri][k])
    sol = R.solve(rows, len(edges) * nz, rhs)
    if sol is None:
        raise InsolubleError("function parts on triangles are not a Cech coboundary on this cover", triangles[0])
    amb = V.brane.ambient
    z = V.brane.z
    K = {}
    for e in edges:
        g = V.z_function(sol[epos[e] * nz:(epos[e] + 1) * nz])
        lifted = z.lift(g, amb)
        y = KKKElement(GenSection(VectorField.zero(amb), d_function(amb, lifted)),
                       RElement(VectorField.zero(z.chart), -g))
        K[e] = V.kkk_coords(y)
    b = V.assemble(1, K=K)
    return [x + y for x, y in zip(c, V.total.apply(1, b))]


def phi_map(V: VDiagram, c: Sequence, shift=None) -> PhiImage:
    """[zeta] in H^2 of the brane algebroid for a 2-cocycle c of Tot(V).

    ``shift`` is an optional global algebroid 1-form added to every local
    primitive; the class does not depend on it.
    """
    if not V.total.is_cocycle(2, c):
        raise DomainError("phi_map needs a 2-cocycle of the total complex")
    reduced = _reduce_cocycle(V, c)
    parts = V.split(2, reduced)
    frame = V.frame
    zch = V.brane.z.chart
    eta = {e: normal_mu(frame, V.t_section(v)) for e, v in parts["T"].items()}
    zero = AlgebroidForm.zero(V.brane.z.chart, frame.rank, 1)
    sigma = {}
    tree, roots = V.cover.spanning_tree()
    for r in roots:
        sigma[r] = zero
    for parent, child in tree:
        if parent < child:
            sigma[child] = sigma[parent] + eta[(parent, child)]
        else:
            sigma[child] = sigma[parent] - eta[(child, parent)]
    for (a, b), value in eta.items():
        if sigma[b] - sigma[a] != value:
            raise InsolubleError("normal components do not integrate on this cover", (a, b))
    if shift is not None:
        sigma = {v: s + shift for v, s in sigma.items()}
    zetas = {v: delta_l(frame, s) for v, s in sigma.items()}
    zeta = zetas[min(zetas)]
    if any(z != zeta for z in zetas.values()):
        raise ConsistencyError("local curvature forms do not glue")
    if frame.rank < 2:
        return PhiImage((), zeta, tuple(reduced))
    coh = cohomology(V.brane, V.gc, 2, V.degree, frame=frame)
    coords = classify(coh, zeta)
    logger.debug("phi class %s", coords)
    return PhiImage(tuple(coords), zeta, tuple(reduced))


def phi_injective(V: VDiagram) -> CheckResult:
    """Images of an H^2(Tot V) basis are independent in brane H^2."""
    h2 = h2_total(V)
    frame = V.frame
    brane_dim = cohomology(V.brane, V.gc, 2, V.degree, frame=frame).dim if frame.rank >= 2 else 0
    images = [list(phi_map(V, rep).coordinates) for rep in h2.basis]
    rank = R.rank(images, brane_dim, QQ_I) if images and brane_dim else 0
    witness = {"h2_total": h2.dim, "h2_brane": brane_dim, "rank": rank}
    return CheckResult(rank == h2.dim, witness, "" if rank == h2.dim else "phi has a kernel on H^2")


# ---------------------------------------------------------------------------
# Deligne descent versus brane descent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeligneDescent:
    """Edge elements y_ab of K (x) m and chart elements x_a of T (x) m."""

    cover: NerveCover
    y: Tuple[Tuple[Simplex, KKKElement], ...]
    x: Tuple[Tuple[int, GenSection], ...]

    @classmethod
    def build(cls, cover: NerveCover, y: Mapping[Simplex, KKKElement], x: Mapping[int, GenSection]) -> "DeligneDescent":
        if set(y) != set(cover.edges()) or set(x) != set(cover.vertices()):
            raise DomainError("one K element per edge and one T element per chart are required")
        return cls(cover, tuple(sorted(y.items())), tuple(sorted(x.items())))

    def y_of(self, edge: Simplex) -> KKKElement:
        return dict(self.y)[tuple(edge)]

    def x_of(self, v: int) -> GenSection:
        return dict(self.x)[v]


def deligne_descent_check(brane: Brane, gc: GCStructure, datum: DeligneDescent) -> CheckResult:
    """y in K, x holomorphic, y_ab y_bc = y_ac and chi(y_ab) x_b = x_a."""
    for edge, y in datum.y:
        verdict = kkk_check(brane, y)
        if not verdict:
            return CheckResult(False, ("edge", edge), verdict.detail)
    for v, x in datum.x:
        if endo_action(x, gc.lift(x.chart).endo):
            return CheckResult(False, ("chart", v), "x does not preserve the GC structure")
    for a, b, c in datum.cover.triangles():
        if kkk_bch(brane, datum.y_of((a, b)), datum.y_of((b, c))) != datum.y_of((a, c)):
            return CheckResult(False, ("triangle", (a, b, c)), "cocycle condition fails")
    for a, b in datum.cover.edges():
        if sym_mul(chi(datum.y_of((a, b))), sym_from_lie(datum.x_of(b))) != sym_from_lie(datum.x_of(a)):
            return CheckResult(False, ("edge", (a, b)), "chi(y_ab) x_b != x_a")
    return CheckResult(True)


def deligne_descent_complete(cover: NerveCover, y: Mapping[Simplex, KKKElement],
                             root: GenSection) -> DeligneDescent:
    """Fill in x along a spanning tree from x at vertex 0."""
    x = {0: root}
    tree, roots = cover.spanning_tree()
    if roots != [0]:
        raise InsolubleError("the cover is disconnected", tuple(roots))
    for parent, child in tree:
        here = sym_from_lie(x[parent])
        if parent < child:
            g = sym_mul(sym_inverse(chi(y[(parent, child)])), here)
        else:
            g = sym_mul(chi(y[(child, parent)]), here)
        x[child] = sym_log(g)
    return DeligneDescent.build(cover, y, x)


def descent_deligne_bijection(brane: Brane, gc: GCStructure, datum: DeligneDescent) -> DescentDatum:
    """Objects B.e^{x_a} and morphisms Sigma(y_ab) from chart b to chart a."""
    verdict = deligne_descent_check(brane, gc, datum)
    if not verdict:
        raise DomainError(f"not a Deligne descent datum: {verdict.detail}")
    objects = {v: induced(brane, sym_from_lie(x)) for v, x in datum.x}
    morphisms = {(a, b): sigma_morphism(brane, datum.y_of((a, b)), sym_from_lie(datum.x_of(b)),
                                        sym_from_lie(datum.x_of(a)))
                 for a, b in datum.cover.edges()}
    return DescentDatum.build(datum.cover, objects, morphisms)


def kkk_times_artin(V: VDiagram, coords: Sequence, artin: ArtinAlgebra, mono: Tuple[int, ...]) -> KKKElement:
    """The truncated K element with the given coordinates, times an Artin monomial."""
    y = V.kkk_element(coords)
    z = V.brane.z
    amb = z.ambient_on(artin)
    zch = z.chart_on(artin)
    eps_amb = amb.times_artin(amb.one, mono)
    eps_z = zch.times_artin(zch.one, mono)
    tau = VectorField(zch, tuple(zch.mul(zch.transfer(c, z.chart), eps_z) for c in y.boundary.xi.comps))
    h = zch.mul(zch.transfer(y.boundary.f, z.chart), eps_z)
    return KKKElement(y.ambient.lift(amb).times(eps_amb), RElement(tau, h))


def section_times_artin(V: VDiagram, coords: Sequence, artin: ArtinAlgebra, mono: Tuple[int, ...]) -> GenSection:
    amb = V.brane.z.ambient_on(artin)
    return V.t_section(coords).lift(amb).times(amb.times_artin(amb.one, mono))
