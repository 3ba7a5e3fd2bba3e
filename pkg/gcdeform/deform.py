"""
Deformations of branes over Artin algebras.

- ``BundleDeformation`` / ``bundle_act`` / ``normalize_transitions``.
- ``BraneDeformation``: rho-hat stored by its images of the ambient
  coordinates; ``brane_act`` is the right action of the formal group.
- ``realize``: rho-hat = rho e^xi with xi = bch(pi^* tau, xi_y).
- ``is_compatible_deformation``, ``first_order_class``,
  ``induced_first_order``, ``trivialize``.
- ``Equivalence``: (tau, {g_I}, z) with psi(B) = B'.z; composition, inverse.
- ``r_bracket`` / ``mu_r`` on r(Z), ``KKKElement``, ``chi``, ``sigma_morphism``.
- Descent over covers and ``transport_deformation``.

An equivalence acts by psi(B) = (e^tau rho, e^tau c - (g_J - g_I), e^tau a - dg_I).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from .artin import ArtinAlgebra, bch
from .brane import (Brane, BraneFrame, CoordSubmanifold, HermData, NerveCover, Simplex, brane_frame,
                    classify, cohomology, delta_l, form_from_vector, k_frame, make_brane, normal_mu,
                    normal_preimage)
from .cartan import (Chart, DiffForm, VectorField, compose_poly, contract, d_function, exp_vf_action,
                     ext_d, lie_bracket, lie_derivative_power_series, substitute)
from .courant import (GenSection, SymElement, _split_coeffs, endo_action, ghat_bracket, pairing,
                      sym_from_lie, sym_inverse, sym_mul)
from .errors import (ConsistencyError, ContextMismatchError, DomainError, IncompatibleError,
                     InsolubleError)
from .gcs import AlgebroidForm, GCStructure, b_transform_gc, sym_act_gc
from .results import CheckResult, Cohomology

logger = logging.getLogger(__name__)


def _lift_form(form: DiffForm, chart: Chart) -> DiffForm:
    if form.chart == chart:
        return form
    return DiffForm(chart, form.degree, tuple((k, chart.transfer(v, form.chart)) for k, v in form.terms))


def _orient(edge: Tuple[int, int]) -> Tuple[Tuple[int, int], int]:
    a, b = edge
    return ((a, b), 1) if a < b else ((b, a), -1)


# ---------------------------------------------------------------------------
# line bundle deformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BundleDeformation:
    """c-hat = c + f and a-hat = a + u with f, u valued in the maximal ideal."""

    base: HermData
    chart: Chart
    f: Tuple[Tuple[Simplex, object], ...]
    u: Tuple[Tuple[int, DiffForm], ...]

    @classmethod
    def build(cls, base: HermData, artin: ArtinAlgebra, f: Mapping = None, u: Mapping = None) -> "BundleDeformation":
        chart = base.chart.with_artin(artin)
        f = dict(f or {})
        u = dict(u or {})
        unknown = set(f) - set(base.cover.edges())
        if unknown:
            raise DomainError(f"f given on non-edges {sorted(unknown)}")
        ff, uu = [], []
        for e in base.cover.edges():
            p = chart.check(f.get(e, chart.zero))
            if not chart.is_m_valued(p):
                raise DomainError(f"f{e} is not valued in the maximal ideal")
            ff.append((e, p))
        for v in base.cover.vertices():
            form = u.get(v, DiffForm.zero(chart, 1))
            if form.chart != chart or form.degree != 1:
                raise ContextMismatchError(f"u_{v} must be a 1-form on {chart.coords} over {artin.label()}")
            if not all(chart.is_m_valued(c) for _, c in form.terms):
                raise DomainError(f"u_{v} is not valued in the maximal ideal")
            uu.append((v, form))
        return cls(base, chart, tuple(ff), tuple(uu))

    @classmethod
    def zero(cls, base: HermData, artin: ArtinAlgebra) -> "BundleDeformation":
        return cls.build(base, artin)

    @classmethod
    def from_hat(cls, base: HermData, chart: Chart, c_hat: Mapping, a_hat: Mapping) -> "BundleDeformation":
        f = {e: c_hat[e] - chart.transfer(base.c_of(e), base.chart) for e in base.cover.edges()}
        u = {v: a_hat[v] - _lift_form(base.a_of(v), chart) for v in base.cover.vertices()}
        return cls.build(base, chart.artin, f, u)

    @property
    def artin(self) -> ArtinAlgebra:
        return self.chart.artin

    def f_of(self, edge: Simplex):
        (a, b), sign = _orient(tuple(edge))
        p = dict(self.f).get((a, b), self.chart.zero)
        return p if sign > 0 else -p

    def u_of(self, v: int) -> DiffForm:
        return dict(self.u)[v]

    def c_hat(self, edge: Simplex):
        base = self.chart.transfer(self.base.c_of(edge), self.base.chart)
        return base + dict(self.f).get(tuple(edge), self.chart.zero)

    def a_hat(self, v: int) -> DiffForm:
        return _lift_form(self.base.a_of(v), self.chart) + self.u_of(v)

    def validate(self) -> CheckResult:
        ch = self.chart
        for i, j, k in self.base.cover.triangles():
            if self.f_of((j, k)) - self.f_of((i, k)) + self.f_of((i, j)):
                return CheckResult(False, (i, j, k), "f is not a cocycle")
        for i, j in self.base.cover.edges():
            if self.u_of(j) - self.u_of(i) != d_function(ch, self.f_of((i, j))):
                return CheckResult(False, (i, j), "u_J - u_I != df_IJ")
        return CheckResult(True)


def bundle_act(x: SymElement, lhat: BundleDeformation) -> BundleDeformation:
    """(e^u e^tau).L-hat = ({e^tau c-hat}, {e^tau a-hat - u})."""
    if x.chart != lhat.chart:
        raise ContextMismatchError("group element and bundle deformation live over different algebras")
    c = {e: exp_vf_action(x.xi, lhat.c_hat(e)) for e in lhat.base.cover.edges()}
    a = {v: exp_vf_action(x.xi, lhat.a_hat(v)) - x.u for v in lhat.base.cover.vertices()}
    return BundleDeformation.from_hat(lhat.base, lhat.chart, c, a)


def _gauge_bundle(lhat: BundleDeformation, tau: Optional[VectorField], g: Mapping) -> BundleDeformation:
    ch = lhat.chart
    cover = lhat.base.cover

    def push(obj):
        return exp_vf_action(tau, obj) if tau is not None and tau else obj

    c = {}
    for i, j in cover.edges():
        c[(i, j)] = push(lhat.c_hat((i, j))) - (g.get(j, ch.zero) - g.get(i, ch.zero))
    a = {v: push(lhat.a_hat(v)) - d_function(ch, g.get(v, ch.zero)) for v in cover.vertices()}
    return BundleDeformation.from_hat(lhat.base, ch, c, a)


def normalize_transitions(lhat: BundleDeformation) -> Tuple[Dict[int, object], BundleDeformation]:
    """Solve g_J - g_I = f_IJ along a spanning tree; the gauge by g kills f."""
    ch = lhat.chart
    cover = lhat.base.cover
    tree, roots = cover.spanning_tree()
    g = {r: ch.zero for r in roots}
    for parent, child in tree:
        g[child] = g[parent] + lhat.f_of((parent, child))
    for i, j in cover.edges():
        if g[j] - g[i] != lhat.f_of((i, j)):
            logger.warning("transition normalization fails on edge %s", (i, j))
            raise InsolubleError("g_J - g_I = f_IJ has no solution on this cover", (i, j))
    return g, _gauge_bundle(lhat, None, g)


# ---------------------------------------------------------------------------
# brane deformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BraneDeformation:
    brane: Brane
    rho: Tuple
    bundle: BundleDeformation

    def __post_init__(self):
        z = self.brane.z
        ch = self.chart
        if len(self.rho) != z.ambient.n:
            raise DomainError("rho-hat needs one image per ambient coordinate")
        base = _base_images(z, ch)
        for k, (img, b) in enumerate(zip(self.rho, base)):
            if not ch.is_m_valued(ch.check(img) - b):
                raise DomainError(f"rho-hat({z.ambient.coords[k]}) does not reduce to the restriction")

    @property
    def chart(self) -> Chart:
        return self.bundle.chart

    @property
    def artin(self) -> ArtinAlgebra:
        return self.chart.artin

    @cached_property
    def ambient_chart(self) -> Chart:
        return self.brane.z.ambient_on(self.artin)

    @classmethod
    def trivial(cls, brane: Brane, artin: ArtinAlgebra) -> "BraneDeformation":
        bundle = BundleDeformation.zero(brane.herm, artin)
        return cls(brane, tuple(_base_images(brane.z, bundle.chart)), bundle)

    def rho_apply(self, p):
        """rho-hat(p) for a polynomial on the ambient chart over A."""
        return compose_poly(p, self.ambient_chart, self.chart, self.rho)

    def rho_pullback(self, form: DiffForm) -> DiffForm:
        return substitute(form, self.chart, self.rho)

    def with_bundle(self, bundle: BundleDeformation) -> "BraneDeformation":
        return BraneDeformation(self.brane, self.rho, bundle)


def _base_images(z: CoordSubmanifold, chart: Chart) -> List:
    out = []
    for k in range(z.ambient.n):
        out.append(chart.coord(z.retained.index(k)) if k in z.retained else chart.zero)
    return out


def brane_act(bhat: BraneDeformation, g: SymElement) -> BraneDeformation:
    """B-hat . (e^{(0,w)} e^{(xi,0)}) = (rho-hat e^xi, e^{-rho-hat(w)} . L-hat)."""
    if g.chart != bhat.ambient_chart:
        raise ContextMismatchError("group element and deformation live over different algebras")
    xa = bhat.ambient_chart
    rho = tuple(bhat.rho_apply(exp_vf_action(g.xi, xa.coord(k))) for k in range(xa.n))
    shift = bhat.rho_pullback(g.u)
    lhat = bhat.bundle
    a = {v: lhat.a_hat(v) + shift for v in lhat.base.cover.vertices()}
    c = {e: lhat.c_hat(e) for e in lhat.base.cover.edges()}
    return BraneDeformation(bhat.brane, rho, BundleDeformation.from_hat(lhat.base, lhat.chart, c, a))


def induced(brane: Brane, g: SymElement) -> BraneDeformation:
    """B . g for the undeformed brane."""
    return brane_act(BraneDeformation.trivial(brane, g.chart.artin), g)


@dataclass(frozen=True)
class Realization:
    tau: VectorField
    xi_y: VectorField
    xi: VectorField


def _theta_log(chart: Chart, images: Sequence) -> VectorField:
    """log of the automorphism z^p -> images[p], read on the coordinates."""
    comps = []
    for p in range(chart.n):
        total = chart.zero
        term = chart.coord(p)
        for k in range(1, chart.order + 1):
            term = compose_poly(term, chart, chart, images) - term
            if not term:
                break
            total += chart.scale(term, QQ(1 if k % 2 else -1, k))
        comps.append(total)
    return VectorField(chart, tuple(comps))


def realize(bhat: BraneDeformation) -> Realization:
    """tau = log(rho-hat pi^*), psi^I = e^{-tau} rho-hat(y^I), xi = bch(pi^* tau, psi^I d/dy^I)."""
    z = bhat.brane.z
    zch = bhat.chart
    xa = bhat.ambient_chart
    tau = _theta_log(zch, [bhat.rho[k] for k in z.retained])
    for p, k in enumerate(z.retained):
        if exp_vf_action(tau, zch.coord(p)) != bhat.rho[k]:
            raise DomainError("rho-hat restricted to pi^* is not an exponential")
    comps = [xa.zero] * xa.n
    for k in z.normal:
        comps[k] = z.lift(exp_vf_action(-tau, bhat.rho[k]), xa)
    xi_y = VectorField(xa, tuple(comps))
    xi = bch(z.lift_vf(tau, xa), xi_y, lie_bracket, xa.order)
    for k in range(xa.n):
        if z.restrict(exp_vf_action(xi, xa.coord(k)), xa) != bhat.rho[k]:
            raise DomainError(f"rho-hat is not realizable as rho e^xi (coordinate {xa.coords[k]})")
    logger.debug("realized deformation over %s", xa.artin.label())
    return Realization(tau, xi_y, xi)


def _vanishes_on_z(z: CoordSubmanifold, xi: VectorField) -> bool:
    return all(z.vanishes_on(c, xi.chart) for c in xi.comps)


def is_compatible_deformation(bhat: BraneDeformation, gc: GCStructure, zeta: Optional[VectorField] = None,
                              extra: Optional[Mapping[int, DiffForm]] = None) -> CheckResult:
    """<(g_I . J) k, k'> vanishes on Z for g_I = e^{(0, pi^* u_I)} e^{(xi, 0)} on the K^B frame.

    ``zeta`` (a vector field vanishing on Z) and ``extra`` (forms with zero
    pullback to Z) re-choose the realizing data without changing B-hat.
    """
    z = bhat.brane.z
    xa = bhat.ambient_chart
    xi = realize(bhat).xi
    if zeta is not None:
        if not _vanishes_on_z(z, zeta):
            raise DomainError("zeta must vanish on Z")
        xi = bch(zeta, xi, lie_bracket, xa.order)
    extra = dict(extra or {})
    for v, w in extra.items():
        if z.restrict_form(w):
            raise DomainError(f"extra form at vertex {v} does not pull back to zero")
    frame = k_frame(bhat.brane, xa)
    lifted = gc.lift(xa)
    for v in bhat.brane.cover.vertices():
        w = z.lift_form(bhat.bundle.u_of(v), xa)
        if v in extra:
            w = w + extra[v]
        moved = sym_act_gc(SymElement(w, xi), lifted)
        images = [moved.apply(k) for k in frame]
        for a, jk in enumerate(images):
            for b, k2 in enumerate(frame):
                if not z.vanishes_on(pairing(jk, k2), xa):
                    return CheckResult(False, (v, a, b), "deformed Q_J does not vanish on Z")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# first order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FirstOrderClass:
    coordinates: Tuple
    alpha: AlgebroidForm
    section: GenSection


def _first_order_generator(artin: ArtinAlgebra):
    if artin.dim != 2:
        raise DomainError("first-order classes need an algebra with one-dimensional m and m^2 = 0")
    return artin.maximal_ideal_basis[0]


def first_order_section(bhat: BraneDeformation) -> GenSection:
    """The real section x with B-hat isomorphic to B . e^{eps x}."""
    mono = _first_order_generator(bhat.artin)
    _, normalized = normalize_transitions(bhat.bundle)
    bn = bhat.with_bundle(normalized)
    xi = realize(bn).xi
    z = bhat.brane.z
    xa = bhat.ambient_chart
    x = GenSection(xi, z.lift_form(normalized.u_of(0), xa))
    amb = z.ambient
    return GenSection.from_vector(amb, [amb.transfer(xa.artin_part(p, mono), xa) for p in x.vector()])


def first_order_class(bhat: BraneDeformation, gc: GCStructure, degree: int, frame: Optional[BraneFrame] = None,
                      coh: Optional[Cohomology] = None) -> FirstOrderClass:
    frame = frame or brane_frame(bhat.brane, gc)
    x = first_order_section(bhat)
    alpha = normal_mu(frame, x)
    if delta_l(frame, alpha):
        raise IncompatibleError("delta_l of the normal class is nonzero: the deformation is not compatible")
    coh = coh or cohomology(bhat.brane, gc, 1, degree, "stable", frame)
    return FirstOrderClass(tuple(classify(coh, alpha)), alpha, x)


def induced_first_order(brane: Brane, gc: GCStructure, coordinates: Sequence, degree: int, artin: ArtinAlgebra,
                        frame: Optional[BraneFrame] = None, coh: Optional[Cohomology] = None) -> BraneDeformation:
    """B . e^{eps x} for a real x whose normal class has the given coordinates."""
    mono = _first_order_generator(artin)
    frame = frame or brane_frame(brane, gc)
    coh = coh or cohomology(brane, gc, 1, degree, "stable", frame)
    if len(coordinates) != coh.dim:
        raise DomainError(f"expected {coh.dim} coordinates, got {len(coordinates)}")
    vec = [sum((c * b[i] for c, b in zip(coordinates, coh.basis)), 0) for i in range(len(coh.labels))]
    alpha = form_from_vector(frame, 1, coh.labels, vec)
    x = normal_preimage(frame, alpha)
    xa = brane.z.ambient_on(artin)
    eps = xa.times_artin(xa.one, mono)
    lifted = x.lift(xa).times(eps)
    return induced(brane, sym_from_lie(lifted))


def deformation_equivalent(first: BraneDeformation, second: BraneDeformation, gc: GCStructure, degree: int) -> bool:
    """First-order isomorphism test through the H^1 classes."""
    if first.brane != second.brane:
        raise ContextMismatchError("deformations of different branes")
    frame = brane_frame(first.brane, gc)
    coh = cohomology(first.brane, gc, 1, degree, "stable", frame)
    return (first_order_class(first, gc, degree, frame, coh).coordinates
            == first_order_class(second, gc, degree, frame, coh).coordinates)


# ---------------------------------------------------------------------------
# equivalences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Equivalence:
    tau: VectorField
    g: Tuple[Tuple[int, object], ...]
    z: SymElement

    @classmethod
    def build(cls, tau: VectorField, g: Mapping[int, object], z: Optional[SymElement] = None,
              ambient: Optional[Chart] = None) -> "Equivalence":
        ch = tau.chart
        if not all(ch.is_m_valued(c) for c in tau.comps):
            raise DomainError("tau must be valued in the maximal ideal")
        for v, p in g.items():
            if not ch.is_m_valued(ch.check(p)):
                raise DomainError(f"g_{v} must be valued in the maximal ideal")
        if z is None:
            if ambient is None:
                raise DomainError("pass the Hamiltonian part or the ambient chart")
            z = SymElement.identity(ambient)
        return cls(tau, tuple(sorted((v, p) for v, p in g.items() if p)), z)

    @classmethod
    def identity(cls, bhat: BraneDeformation) -> "Equivalence":
        return cls.build(VectorField.zero(bhat.chart), {}, ambient=bhat.ambient_chart)

    @property
    def chart(self) -> Chart:
        return self.tau.chart

    def g_of(self, v: int):
        return dict(self.g).get(v, self.chart.zero)


def psi_apply(eq: Equivalence, bhat: BraneDeformation) -> BraneDeformation:
    """The (tau, g) part: (e^tau rho-hat, e^tau c-hat - (g_J - g_I), e^tau a-hat - dg_I)."""
    if eq.chart != bhat.chart:
        raise ContextMismatchError("equivalence and deformation live over different algebras")
    rho = tuple(exp_vf_action(eq.tau, r) if eq.tau else r for r in bhat.rho)
    bundle = _gauge_bundle(bhat.bundle, eq.tau, dict(eq.g))
    return BraneDeformation(bhat.brane, rho, bundle)


def apply_equivalence(eq: Equivalence, bhat: BraneDeformation) -> BraneDeformation:
    """The target B' of eq: psi(B) = B'.z, so B' = psi(B).z^{-1}."""
    moved = psi_apply(eq, bhat)
    return moved if eq.z.is_identity() else brane_act(moved, sym_inverse(eq.z))


def equiv_holds(eq: Equivalence, source: BraneDeformation, target: BraneDeformation) -> bool:
    lhs = psi_apply(eq, source)
    rhs = target if eq.z.is_identity() else brane_act(target, eq.z)
    return lhs == rhs


def equiv_compose(second: Equivalence, first: Equivalence) -> Equivalence:
    """second o first = (bch(tau', tau), e^{tau'} g + g', z' z)."""
    if second.chart != first.chart or second.z.chart != first.z.chart:
        raise ContextMismatchError("equivalences over different algebras cannot be composed")
    ch = first.chart
    tau = bch(second.tau, first.tau, lie_bracket, ch.order)
    verts = {v for v, _ in first.g} | {v for v, _ in second.g}
    g = {}
    for v in verts:
        pushed = exp_vf_action(second.tau, first.g_of(v)) if second.tau else first.g_of(v)
        g[v] = pushed + second.g_of(v)
    return Equivalence(tau, tuple(sorted((v, p) for v, p in g.items() if p)), sym_mul(second.z, first.z))


def equiv_inverse(eq: Equivalence) -> Equivalence:
    g = {v: -exp_vf_action(-eq.tau, p) for v, p in eq.g}
    return Equivalence(-eq.tau, tuple(sorted(g.items())), sym_inverse(eq.z))


# ---------------------------------------------------------------------------
# r(Z), the fibre product K and Sigma
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RElement:
    xi: VectorField
    f: object

    @property
    def chart(self) -> Chart:
        return self.xi.chart

    def __add__(self, other: "RElement") -> "RElement":
        return RElement(self.xi + other.xi, self.f + other.f)

    def __neg__(self) -> "RElement":
        return RElement(-self.xi, -self.f)

    def __sub__(self, other: "RElement") -> "RElement":
        return self + (-other)

    def __mul__(self, c) -> "RElement":
        return RElement(self.xi * c, self.chart.scale(self.f, c))

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.xi) or bool(self.f)


def _curvature_on(F: DiffForm, chart: Chart) -> DiffForm:
    return _lift_form(F, chart)


def _iota_iota(xi: VectorField, eta: VectorField, F: DiffForm):
    """i(eta) i(xi) F."""
    if not F.terms:
        return xi.chart.zero
    return contract(eta, contract(xi, F)).as_function()


def r_bracket(F: DiffForm, a: RElement, b: RElement) -> RElement:
    """([xi,eta], xi(g) - eta(f) + i(eta)i(xi)F)."""
    F = _curvature_on(F, a.chart)
    return RElement(lie_bracket(a.xi, b.xi), a.xi.apply(b.f) - b.xi.apply(a.f) + _iota_iota(a.xi, b.xi, F))


def mu_r(F: DiffForm, a: RElement) -> GenSection:
    """(xi, i(xi)F - df) in g-hat(Z)."""
    ch = a.chart
    F = _curvature_on(F, ch)
    form = (contract(a.xi, F) if F.terms else DiffForm.zero(ch, 1)) - d_function(ch, a.f)
    return GenSection(a.xi, form)


@dataclass(frozen=True)
class KKKElement:
    ambient: GenSection
    boundary: RElement

    @property
    def order(self) -> int:
        return self.ambient.chart.order

    def __add__(self, other: "KKKElement") -> "KKKElement":
        return KKKElement(self.ambient + other.ambient, self.boundary + other.boundary)

    def __neg__(self) -> "KKKElement":
        return KKKElement(-self.ambient, -self.boundary)

    def __sub__(self, other: "KKKElement") -> "KKKElement":
        return self + (-other)

    def __mul__(self, c) -> "KKKElement":
        return KKKElement(self.ambient * c, self.boundary * c)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.ambient) or bool(self.boundary)


def kkk_check(brane: Brane, y: KKKElement) -> CheckResult:
    """rho(xi) = tau and rho^*(w) = i(tau)F - dh."""
    z = brane.z
    xi, w = y.ambient.vf, y.ambient.form
    for k in z.normal:
        if not z.vanishes_on(xi.comps[k], xi.chart):
            return CheckResult(False, "normal", f"xi is not tangent to Z along {z.ambient.coords[k]}")
    if z.restrict_vf(xi) != y.boundary.xi:
        return CheckResult(False, "tangent", "rho(xi) != tau")
    if z.restrict_form(w) != mu_r(brane.F, y.boundary).form:
        return CheckResult(False, "form", "rho^*(w) != i(tau)F - dh")
    return CheckResult(True)


def kkk_bracket(brane: Brane, a: KKKElement, b: KKKElement) -> KKKElement:
    return KKKElement(ghat_bracket(a.ambient, b.ambient), r_bracket(brane.F, a.boundary, b.boundary))


def kkk_bch(brane: Brane, a: KKKElement, b: KKKElement) -> KKKElement:
    return bch(a, b, lambda p, q: kkk_bracket(brane, p, q), a.order)


def chi(y: KKKElement) -> SymElement:
    return sym_from_lie(y.ambient)


def sigma_morphism(brane: Brane, y: KKKElement, x: Optional[SymElement] = None,
                   x_prime: Optional[SymElement] = None) -> Equivalence:
    """(e^tau, {g_I}) from B.x to B.chi(y)x, g_I = sum_k L_tau^k (i(tau)a_I + h)/(k+1)!."""
    verdict = kkk_check(brane, y)
    if not verdict:
        raise DomainError(f"not an element of the fibre product: {verdict.detail}")
    if x is not None and x_prime is not None and sym_mul(chi(y), x) != x_prime:
        raise DomainError("x' differs from chi(y) x")
    tau, h = y.boundary.xi, y.boundary.f
    ch = tau.chart
    coeffs = _split_coeffs(ch.order)
    g = {}
    for v in brane.cover.vertices():
        a = _lift_form(brane.herm.a_of(v), ch)
        start = contract(tau, a).as_function() + h
        g[v] = lie_derivative_power_series(tau, start, coeffs)
    return Equivalence.build(tau, g, ambient=y.ambient.chart)


# ---------------------------------------------------------------------------
# trivialization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trivialization:
    x: GenSection
    equivalence: Equivalence
    holomorphic: bool


def trivialize(bhat: BraneDeformation, gc: GCStructure) -> Trivialization:
    """x = (pi^* phi^I d/dy^I, pi^* u) and an equivalence B-hat -> B . e^x."""
    z = bhat.brane.z
    xa = bhat.ambient_chart
    tau = realize(bhat).tau
    undo = Equivalence.build(-tau, {}, ambient=xa)
    straight = psi_apply(undo, bhat)
    g, bundle = normalize_transitions(straight.bundle)
    gauge = Equivalence.build(VectorField.zero(bhat.chart), g, ambient=xa)
    target = straight.with_bundle(bundle)
    comps = [xa.zero] * xa.n
    for k in z.normal:
        comps[k] = z.lift(target.rho[k], xa)
    x = GenSection(VectorField(xa, tuple(comps)), z.lift_form(bundle.u_of(0), xa))
    if induced(bhat.brane, sym_from_lie(x)) != target:
        raise ConsistencyError("B . e^x differs from the straightened deformation")
    eq = equiv_compose(gauge, undo)
    holomorphic = not endo_action(x, gc.lift(xa).endo)
    logger.debug("trivialized deformation, holomorphic=%s", holomorphic)
    return Trivialization(x, eq, holomorphic)


# ---------------------------------------------------------------------------
# descent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DescentDatum:
    """Objects per chart and Psi_ab : B_b -> B_a per edge a < b."""

    cover: NerveCover
    objects: Tuple[Tuple[int, BraneDeformation], ...]
    morphisms: Tuple[Tuple[Simplex, Equivalence], ...]

    @classmethod
    def build(cls, cover: NerveCover, objects: Mapping[int, BraneDeformation],
              morphisms: Mapping[Simplex, Equivalence]) -> "DescentDatum":
        if set(objects) != set(cover.vertices()):
            raise DomainError("one object per chart is required")
        if set(morphisms) != set(cover.edges()):
            raise DomainError("one equivalence per edge is required")
        return cls(cover, tuple(sorted(objects.items())), tuple(sorted(morphisms.items())))

    def obj(self, v: int) -> BraneDeformation:
        return dict(self.objects)[v]

    def mor(self, edge: Simplex) -> Equivalence:
        return dict(self.morphisms)[tuple(edge)]


def descent_validate(datum: DescentDatum) -> CheckResult:
    """Edge morphisms hold and Psi_ac = Psi_ab Psi_bc on triangles; witness lists all violations."""
    violations = []
    for a, b in datum.cover.edges():
        if not equiv_holds(datum.mor((a, b)), datum.obj(b), datum.obj(a)):
            violations.append(("edge", (a, b)))
    for a, b, c in datum.cover.triangles():
        if equiv_compose(datum.mor((a, b)), datum.mor((b, c))) != datum.mor((a, c)):
            violations.append(("triangle", (a, b, c)))
    if violations:
        return CheckResult(False, violations, f"{len(violations)} descent violation(s)")
    return CheckResult(True)


def restrict_to_cover(bhat: BraneDeformation, cover: NerveCover) -> DescentDatum:
    ident = Equivalence.identity(bhat)
    return DescentDatum.build(cover, {v: bhat for v in cover.vertices()}, {e: ident for e in cover.edges()})


def descent_reassemble(datum: DescentDatum) -> Tuple[BraneDeformation, Dict[int, Equivalence]]:
    """A global deformation with Phi_a : B -> B_a and Psi_ab Phi_b = Phi_a on every edge."""
    verdict = descent_validate(datum)
    if not verdict:
        first = verdict.witness[0]
        raise InsolubleError("descent datum is inconsistent", first[1])
    tree, roots = datum.cover.spanning_tree()
    if len(roots) != 1:
        raise InsolubleError("the cover is disconnected", tuple(roots))
    root = roots[0]
    glob = datum.obj(root)
    phi = {root: Equivalence.identity(glob)}
    for parent, child in tree:
        if parent < child:
            step = equiv_inverse(datum.mor((parent, child)))
        else:
            step = datum.mor((child, parent))
        phi[child] = equiv_compose(step, phi[parent])
    for a, b in datum.cover.edges():
        if equiv_compose(datum.mor((a, b)), phi[b]) != phi[a]:
            raise InsolubleError("local equivalences do not glue on this cover", (a, b))
    return glob, phi


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Transported:
    deformation: BraneDeformation
    gc: Optional[GCStructure] = field(default=None)


def _rebase(bhat: BraneDeformation, brane: Brane, f: Mapping, u: Mapping) -> BraneDeformation:
    bundle = BundleDeformation.build(brane.herm, bhat.artin, f, u)
    return BraneDeformation(brane, bhat.rho, bundle)


def transport_deformation(bhat: BraneDeformation, mode: str, data, gc: Optional[GCStructure] = None) -> Transported:
    """Move B-hat along a gauge {h_I}, a refinement (cover, sigma) or a B-transform by a 1-form u."""
    brane = bhat.brane
    herm = brane.herm
    zc = herm.chart
    cover = herm.cover
    if mode == "gauge":
        h = {v: zc.check(data.get(v, zc.zero)) for v in cover.vertices()}
        c = {(i, j): herm.c_of((i, j)) + h[j] - h[i] for i, j in cover.edges()}
        a = {v: herm.a_of(v) + d_function(zc, h[v]) for v in cover.vertices()}
        new = make_brane(brane.z, HermData.build(cover, zc, c, a))
        lhat = bhat.bundle
        return Transported(_rebase(bhat, new, dict(lhat.f), dict(lhat.u)), gc)
    if mode == "refine":
        new_cover, sigma = data
        sigma = tuple(int(s) for s in sigma)
        if len(sigma) != new_cover.n_vertices or any(s not in cover.vertices() for s in sigma):
            raise DomainError("sigma must send every new chart to an old chart")
        old = set(cover.simplices)
        for s in new_cover.simplices:
            if tuple(sorted({sigma[v] for v in s})) not in old:
                raise DomainError(f"sigma does not map simplex {s} to a simplex")

        c, f = {}, {}
        lhat = bhat.bundle
        for e in new_cover.edges():
            if sigma[e[0]] == sigma[e[1]]:
                continue
            c[e] = _oriented_c(herm, (sigma[e[0]], sigma[e[1]]))
            f[e] = lhat.f_of((sigma[e[0]], sigma[e[1]]))
        a = {v: herm.a_of(sigma[v]) for v in new_cover.vertices()}
        u = {v: lhat.u_of(sigma[v]) for v in new_cover.vertices()}
        new = make_brane(brane.z, HermData.build(new_cover, zc, c, a))
        return Transported(_rebase(bhat, new, f, u), gc)
    if mode == "btransform":
        form = data
        if form.degree != 1 or form.chart != brane.z.ambient:
            raise DomainError("B-transform data must be a 1-form on the ambient chart")
        base_shift = brane.z.restrict_form(form)
        c = {e: herm.c_of(e) for e in cover.edges()}
        a = {v: herm.a_of(v) - base_shift for v in cover.vertices()}
        new = make_brane(brane.z, HermData.build(cover, zc, c, a))
        lhat = bhat.bundle
        hat_shift = bhat.rho_pullback(_lift_form(form, bhat.ambient_chart)) - _lift_form(base_shift, bhat.chart)
        u = {v: lhat.u_of(v) - hat_shift for v in cover.vertices()}
        moved_gc = b_transform_gc(gc, ext_d(form)) if gc is not None else None
        return Transported(_rebase(bhat, new, dict(lhat.f), u), moved_gc)
    raise DomainError(f"unknown transport mode {mode!r}")


def _oriented_c(herm: HermData, edge: Tuple[int, int]):
    (a, b), sign = _orient(edge)
    p = herm.c_of((a, b))
    return p if sign > 0 else -p
