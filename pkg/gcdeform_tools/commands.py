#!/usr/bin/env python3
"""
Subcommand runners for the gcdeform CLI.

Every runner takes the loaded Model and the parsed arguments and returns
``(exit_code, payload)``: 0 for success, 1 for a checked "no" (the payload
carries the witness). Precondition errors propagate to main.
"""

import logging
import random
import time
from typing import Any, Callable, Dict, List, Tuple

from sympy.polys.domains import QQ, QQ_I

from gcdeform import config
from gcdeform.artin import ArtinHom, nilpotent_exp, truncate
from gcdeform.brane import brane_compatible, cohomology, ext_count, lwl_check
from gcdeform.cartan import (Chart, contract, d_function, ext_d, exp_vf_action, lie_bracket, random_form, random_vf,
                             wedge)
from gcdeform.complexes import cech_semicx, tot
from gcdeform.courant import (dorfman, ghat_act, ghat_bracket, inverse_split, exp_split, pairing, random_section,
                              sym_act_section, sym_exp_section, sym_from_lie, sym_inverse, sym_log, sym_mul)
from gcdeform.deform import (BraneDeformation, brane_act, descent_reassemble, descent_validate,
                             first_order_class, induced_first_order, is_compatible_deformation, restrict_to_cover)
from gcdeform.dgla import FDGLA, deligne_equivalent, element, gauge_act, lift_along_chain, mc_check, mc_residual
from gcdeform.errors import GCDeformError, InsolubleError, SchemaError
from gcdeform.gcs import (almost_check, b_transform_gc, gen_hamiltonian, hamiltonian_bracket_witness,
                          is_gen_holomorphic, is_integrable, nijenhuis, standard_gc, type_at)
from gcdeform.vdiagram import (build_V, deligne_descent_complete, descent_deligne_bijection, h2_total, kkk_times_artin,
                               phi_injective, phi_map, section_times_artin)

from . import fixtures
from .model_loader import Model

logger = logging.getLogger(__name__)

Runner = Callable[[Model, Any], Tuple[int, Dict[str, Any]]]


def _degree(args) -> int:
    return config.default_degree() if getattr(args, "deg", None) is None else args.deg


def _verdict(result, **extra) -> Tuple[int, Dict[str, Any]]:
    payload = {"ok": result.ok, **extra}
    if not result.ok:
        payload["witness"] = result.witness
        payload["detail"] = result.detail
    return (0 if result.ok else 1), payload


# ---------------------------------------------------------------------------
# gc
# ---------------------------------------------------------------------------

def run_gc_check(model: Model, args) -> Tuple[int, Dict[str, Any]]:
    gc = model.need("gc")
    almost = almost_check(gc)
    integrable = is_integrable(gc) if almost else None
    payload = {"almost": almost.ok, "integrable": bool(integrable)}
    if almost:
        payload["type"] = type_at(gc, [0] * gc.n)
    else:
        payload["witness"] = almost.detail
    if integrable is not None and not integrable:
        payload["witness"] = integrable.witness
    return (0 if almost and integrable else 1), payload


def run_gc_nijenhuis(model: Model, args):
    gc = model.need("gc")
    if "a" in model.sections and "b" in model.sections:
        residual = nijenhuis(gc, model.sections["a"], model.sections["b"])
        return (1 if residual else 0), {"zero": not residual, "residual": residual}
    return _verdict(is_integrable(gc))


def run_gc_hamiltonian(model: Model, args):
    gc = model.need("gc")
    funcs = model.need("functions")
    if "f" not in funcs or "g" not in funcs:
        raise SchemaError("gc hamiltonian needs functions 'f' and 'g'", "/functions")
    xf, xg = gen_hamiltonian(gc, funcs["f"]), gen_hamiltonian(gc, funcs["g"])
    h = hamiltonian_bracket_witness(gc, funcs["f"], funcs["g"])
    closed = ghat_bracket(xf, xg) == gen_hamiltonian(gc, h)
    return (0 if closed else 1), {"x_f": xf, "x_g": xg, "h": h, "closed": closed}


# ---------------------------------------------------------------------------
# brane
# ---------------------------------------------------------------------------

def run_brane_check(model: Model, args):
    brane = model.need("brane")
    herm = brane.herm.validate()
    compat = brane_compatible(brane, model.need("gc"))
    code, payload = _verdict(compat, herm=herm.ok, charts=len(brane.cover.vertices()))
    payload["compatible"] = payload.pop("ok")
    return code, payload


def run_brane_lwl(model: Model, args):
    return _verdict(lwl_check(model.need("brane"), model.need("gc")))


def run_brane_cohomology(model: Model, args):
    k = 1 if args.k is None else args.k
    coh = cohomology(model.need("brane"), model.need("gc"), k, _degree(args), args.filtration)
    return 0, {"k": k, "deg": _degree(args), "filtration": coh.filtration, "dim": coh.dim,
               "cocycle_dim": coh.cocycle_dim, "basis": coh.basis}


# ---------------------------------------------------------------------------
# deform
# ---------------------------------------------------------------------------

def _deformation_payload(bhat: BraneDeformation) -> Dict[str, Any]:
    lhat = bhat.bundle
    cover = bhat.brane.cover
    return {"artin": bhat.artin, "rho": list(bhat.rho),
            "f": {e: lhat.f_of(e) for e in cover.edges()},
            "u": {v: lhat.u_of(v) for v in cover.vertices()}}


def run_deform_first_order(model: Model, args):
    fc = first_order_class(model.need("deformation"), model.need("gc"), _degree(args))
    return 0, {"coordinates": fc.coordinates, "section": fc.section, "alpha": fc.alpha}


def run_deform_act(model: Model, args):
    actor = model.need("actor")
    bhat = model.deformation or BraneDeformation.trivial(model.need("brane"), actor.chart.artin)
    moved = brane_act(bhat, actor)
    payload = _deformation_payload(moved)
    if model.gc is None:
        return 0, payload
    verdict = is_compatible_deformation(moved, model.gc)
    payload["compatible"] = verdict.ok
    return (0 if verdict else 1), payload


def run_deform_compat(model: Model, args):
    return _verdict(is_compatible_deformation(model.need("deformation"), model.need("gc")))


def run_deform_descent(model: Model, args):
    bhat = model.need("deformation")
    cover = model.cover or fixtures.two_chart_cover()
    datum = restrict_to_cover(bhat, cover)
    verdict = descent_validate(datum)
    if not verdict:
        return _verdict(verdict)
    glob, phi = descent_reassemble(datum)
    same = glob == bhat
    return (0 if same else 1), {"ok": True, "charts": len(cover.vertices()), "edges": len(cover.edges()),
                                "reassembled": same}


# ---------------------------------------------------------------------------
# dgla
# ---------------------------------------------------------------------------

def run_dgla_mc(model: Model, args):
    g, x = model.need("dgla"), model.need("element")
    return _verdict(mc_check(g, x), residual=mc_residual(g, x))


def run_dgla_gauge(model: Model, args):
    g, x, y = model.need("dgla"), model.need("element"), model.need("gauge")
    moved = gauge_act(g, y, x)
    is_mc = bool(mc_check(g, moved))
    witness = deligne_equivalent(g, x, moved)
    ok = is_mc and witness is not None
    return (0 if ok else 1), {"result": moved, "mc": is_mc, "equivalent": witness is not None, "witness": witness}


def run_dgla_tot(model: Model, args):
    if model.semicx is not None:
        V = model.semicx
    else:
        cover = model.cover or (model.brane.cover if model.brane is not None else None)
        if cover is None:
            raise SchemaError("dgla tot needs a 'semicx' or a 'cover' section", "/cover")
        V = cech_semicx(cover, 1)
    total = tot(V)
    return 0, {"dims": total.dims, "exact_through": total.exact_through,
               "cohomology": {str(k): total.cohomology(k).dim for k in range(total.exact_through + 1)}}


def _diagram(model: Model, args):
    brane = model.need("brane")
    cover = model.cover or brane.cover
    return build_V(brane, model.need("gc"), cover, _degree(args))


def run_dgla_build_v(model: Model, args):
    V = _diagram(model, args)
    return 0, {"dims": V.dims, "tot_dims": V.total.dims, "closure": dict(V.closure), "h2": h2_total(V).dim}


def run_dgla_phi(model: Model, args):
    verdict = phi_injective(_diagram(model, args))
    return (0 if verdict else 1), {"injective": verdict.ok, **verdict.witness}


def run_dgla_obstruct(model: Model, args):
    g, x = model.need("dgla"), model.need("element")
    hom = ArtinHom.projection(model.need("lift_to"), x.algebra)
    result, done = lift_along_chain(g, hom, x)
    payload = {"lifted": result.lifted, "links": done, "element": result.element}
    if not result.lifted:
        payload["obstruction"] = {name: c for name, c in zip(g.labels, result.obstruction) if c}
        payload["obstruction_class"] = result.obstruction_class
        payload["residual"] = result.residual
    return (0 if result.lifted else 1), payload


COMMANDS: Dict[Tuple[str, str], Runner] = {
    ("gc", "check"): run_gc_check,
    ("gc", "nijenhuis"): run_gc_nijenhuis,
    ("gc", "hamiltonian"): run_gc_hamiltonian,
    ("brane", "check"): run_brane_check,
    ("brane", "lwl"): run_brane_lwl,
    ("brane", "cohomology"): run_brane_cohomology,
    ("deform", "first-order"): run_deform_first_order,
    ("deform", "act"): run_deform_act,
    ("deform", "compat"): run_deform_compat,
    ("deform", "descent"): run_deform_descent,
    ("dgla", "mc"): run_dgla_mc,
    ("dgla", "gauge"): run_dgla_gauge,
    ("dgla", "tot"): run_dgla_tot,
    ("dgla", "build-v"): run_dgla_build_v,
    ("dgla", "phi"): run_dgla_phi,
    ("dgla", "obstruct"): run_dgla_obstruct,
}


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

R4 = Chart(("x1", "x2", "x3", "x4"))


def _m_section(chart: Chart, rng: random.Random, degree: int = 1):
    return random_section(chart, rng, degree, m_valued=True)


def check_courant(rng: random.Random, samples: int) -> bool:
    for _ in range(samples):
        x, y, z = (random_section(R4, rng, 3) for _ in range(3))
        if dorfman(x, dorfman(y, z)) != dorfman(dorfman(x, y), z) + dorfman(y, dorfman(x, z)):
            return False
        if dorfman(x, x).vf or dorfman(x, x).form != d_function(R4, pairing(x, x)):
            return False
    return True


def check_action(rng: random.Random, samples: int) -> bool:
    for _ in range(samples):
        x, y, s = (random_section(R4, rng, 2) for _ in range(3))
        if ghat_act(ghat_bracket(x, y), s) != ghat_act(x, ghat_act(y, s)) - ghat_act(y, ghat_act(x, s)):
            return False
    for artin in (truncate(3), fixtures.dual_numbers_2()):
        ch = R4.with_artin(artin)
        for _ in range(samples):
            x, y = _m_section(ch, rng), _m_section(ch, rng)
            s = random_section(ch, rng, 1)
            g, h = sym_from_lie(x), sym_from_lie(y)
            if sym_act_section(sym_mul(g, h), s) != sym_act_section(g, sym_act_section(h, s)):
                return False
    return True


def check_bch(rng: random.Random, samples: int) -> bool:
    ch = R4.with_artin(truncate(4))
    for _ in range(samples):
        x, y, z = (_m_section(ch, rng) for _ in range(3))
        gx, gy, gz = sym_from_lie(x), sym_from_lie(y), sym_from_lie(z)
        if sym_mul(sym_mul(gx, gy), gz) != sym_mul(gx, sym_mul(gy, gz)):
            return False
        if not sym_mul(gx, sym_inverse(gx)).is_identity():
            return False
        conj = nilpotent_exp(lambda w: ghat_bracket(x, w), y, ch.order + 1)
        if sym_mul(sym_mul(gx, gy), sym_inverse(gx)) != sym_from_lie(conj):
            return False
    return True


def check_splitting(rng: random.Random, samples: int) -> bool:
    ch = R4.with_artin(truncate(5))
    for _ in range(samples):
        x = _m_section(ch, rng)
        s = random_section(ch, rng, 1)
        if sym_log(sym_from_lie(x)) != x:
            return False
        if inverse_split(x.vf, exp_split(x.vf, x.form)[0]) != x.form:
            return False
        if sym_act_section(sym_from_lie(x), s) != sym_exp_section(x, s):
            return False
    return True


def check_integrability(rng: random.Random, samples: int) -> bool:
    for m in range(4):
        for n in range(4 - m):
            if m + n == 0:
                continue
            gc = standard_gc(m, n)
            if not is_integrable(gc):
                return False
            u = random_form(gc.chart, rng, 1, 1)
            if not is_integrable(b_transform_gc(gc, ext_d(u))):
                return False
    return not is_integrable(fixtures.nonintegrable_gc())


def check_hamiltonian(rng: random.Random, samples: int) -> bool:
    gc = standard_gc(1, 1)
    ch = gc.chart
    for k in range(samples):
        f = ch.random_poly(rng, 2, complex_coeffs=k % 2 == 1)
        g = ch.random_poly(rng, 2, complex_coeffs=k % 3 == 1)
        lhs = ghat_bracket(gen_hamiltonian(gc, f), gen_hamiltonian(gc, g))
        if lhs != gen_hamiltonian(gc, hamiltonian_bracket_witness(gc, f, g)):
            return False
    return True


def check_holomorphy(rng: random.Random, samples: int) -> bool:
    for m, n in ((1, 0), (0, 1), (1, 1)):
        gc = standard_gc(m, n)
        for k in range(samples):
            if k % 2:
                if not is_gen_holomorphic(gc, gen_hamiltonian(gc, gc.chart.random_poly(rng, 2))):
                    return False
            else:
                is_gen_holomorphic(gc, random_section(gc.chart, rng, 2))
    return True


def check_compatibility(rng: random.Random, samples: int) -> bool:
    gc, brane = fixtures.standard_model(1, 1)
    if not brane_compatible(brane, gc):
        return False
    gc, brane = fixtures.incompatible_brane()
    if brane_compatible(brane, gc):
        return False
    gc, brane = fixtures.complex_brane(curved=True)
    return bool(brane_compatible(brane, gc))


def _round_trips(gc, brane, degree: int) -> bool:
    artin = truncate(2)
    coh = cohomology(brane, gc, 1, degree)
    for i in range(coh.dim):
        unit = tuple(QQ_I(1 if j == i else 0) for j in range(coh.dim))
        bhat = induced_first_order(brane, gc, unit, degree, artin, coh=coh)
        if tuple(first_order_class(bhat, gc, degree, coh=coh).coordinates) != unit:
            return False
    return True


def check_first_order(rng: random.Random, samples: int) -> bool:
    gc, brane = fixtures.complex_brane()
    if cohomology(brane, gc, 1, 2, "naive").dim != ext_count(brane, gc, 2) or ext_count(brane, gc, 2) != 6:
        return False
    if not _round_trips(gc, brane, 2):
        return False
    gc, brane = fixtures.lagrangian_line()
    return cohomology(brane, gc, 1, 3).dim == 0 and _round_trips(gc, brane, 3)


def check_descent(rng: random.Random, samples: int) -> bool:
    gc, brane = fixtures.lagrangian_line()
    artin = truncate(2)
    bhat = BraneDeformation.trivial(brane, artin)
    if not descent_validate(restrict_to_cover(bhat, fixtures.two_chart_cover())):
        return False
    glob, _ = descent_reassemble(restrict_to_cover(bhat, fixtures.two_chart_cover()))
    if glob != bhat:
        return False
    broken = fixtures.broken_descent()
    if descent_validate(broken):
        return False
    try:
        descent_reassemble(broken)
    except InsolubleError as exc:
        return exc.simplex is not None
    return False


def check_tot_deligne(rng: random.Random, samples: int) -> bool:
    for cover in (fixtures.two_chart_cover(), fixtures.triangle_cover()):
        tot(cech_semicx(cover, 2))
    cover = fixtures.two_chart_cover()
    gc, brane = fixtures.lagrangian_line(cover)
    V = build_V(brane, gc, cover, 1)
    if not V.k_basis or not V.t_basis:
        return False
    artin = truncate(2)
    k_unit = [QQ(1) if j == 0 else QQ(0) for j in range(len(V.k_basis))]
    t_unit = [QQ(1) if j == 0 else QQ(0) for j in range(len(V.t_basis))]
    y = kkk_times_artin(V, k_unit, artin, (1,))
    datum = deligne_descent_complete(cover, {(0, 1): y}, section_times_artin(V, t_unit, artin, (1,)))
    return bool(descent_validate(descent_deligne_bijection(brane, gc, datum)))


def check_obstructions(rng: random.Random, samples: int) -> bool:
    g = FDGLA.build(["u", "v"], [0, 1], {"u": {"v": 1}})
    x = element(g, truncate(2), {(1,): {"v": 1}})
    result, done = lift_along_chain(g, ArtinHom.projection(truncate(4), truncate(2)), x)
    if not result.lifted or done != 2 or not mc_check(g, result.element):
        return False
    g, x = fixtures.obstructed_element(2)
    result, _ = lift_along_chain(g, ArtinHom.projection(truncate(3), truncate(2)), x)
    expected = element(g, truncate(3), {(2,): {"c": "1/2"}})
    return not result.lifted and result.residual == expected


def check_phi(rng: random.Random, samples: int) -> bool:
    cover = fixtures.two_chart_cover()
    gc, brane = fixtures.lagrangian_line(cover)
    V = build_V(brane, gc, cover, 2)
    verdict = phi_injective(V)
    if not verdict:
        return False
    h2 = h2_total(V)
    zch = brane.z.chart
    width = V.total.dim(1)
    for rep in h2.basis:
        base = phi_map(V, rep).coordinates
        for _ in range(samples):
            b = [QQ(rng.randint(-2, 2)) for _ in range(width)]
            moved = [p + q for p, q in zip(rep, V.total.apply(1, b))]
            shift = fixtures.random_algebroid_form(zch, V.frame.rank, rng, V.degree)
            if phi_map(V, moved, shift).coordinates != base:
                return False
    return True


def check_exp_identities(rng: random.Random, samples: int) -> bool:
    ch = R4.with_artin(truncate(3))
    for _ in range(samples):
        xi = random_vf(ch, rng, 1, m_valued=True)
        eta, zeta = random_vf(ch, rng, 1), random_vf(ch, rng, 1)
        a, b = random_form(ch, rng, 1, 1), random_form(ch, rng, 2, 1)
        e = lambda obj: exp_vf_action(xi, obj)  # noqa: E731
        if e(wedge(a, b)) != wedge(e(a), e(b)):
            return False
        if e(ext_d(a)) != ext_d(e(a)):
            return False
        if e(contract(eta, b)) != contract(e(eta), e(b)):
            return False
        if e(lie_bracket(eta, zeta)) != lie_bracket(e(eta), e(zeta)):
            return False
    return True


SELFTEST: List[Tuple[str, Callable[[random.Random, int], bool]]] = [
    ("courant identities", check_courant),
    ("action and group law", check_action),
    ("bch suite", check_bch),
    ("exponential splitting", check_splitting),
    ("integrability", check_integrability),
    ("hamiltonian closure", check_hamiltonian),
    ("holomorphy equivalence", check_holomorphy),
    ("brane compatibility", check_compatibility),
    ("first-order classes", check_first_order),
    ("descent", check_descent),
    ("tot and deligne descent", check_tot_deligne),
    ("obstructions", check_obstructions),
    ("phi injective", check_phi),
    ("exponentiated identities", check_exp_identities),
]

# smallest sample count each check is run with outside quick mode
ACCEPTANCE_SAMPLES: Dict[str, int] = {
    "courant identities": 200,
    "action and group law": 200,
    "bch suite": 50,
    "exponential splitting": 100,
    "hamiltonian closure": 100,
    "holomorphy equivalence": 200,
    "phi injective": 20,
    "exponentiated identities": 100,
}


def selftest_samples(name: str, quick: bool = False) -> int:
    base = config.sample_count()
    if quick:
        return max(1, base // 5)
    return max(base, ACCEPTANCE_SAMPLES.get(name, 1))


def run_selftest(quick: bool = False) -> Tuple[int, Dict[str, Any]]:
    rows, counts = {}, {}
    for name, check in SELFTEST:
        rng = random.Random(config.seed())
        started = time.perf_counter()
        try:
            ok = bool(check(rng, counts.setdefault(name, selftest_samples(name, quick))))
        except GCDeformError as exc:
            logger.warning("selftest %s raised %s: %s", name, type(exc).__name__, exc)
            ok = False
        logger.info("selftest %s: %s in %.2fs", name, "pass" if ok else "FAIL", time.perf_counter() - started)
        rows[name] = "pass" if ok else "FAIL"
    passed = all(v == "pass" for v in rows.values())
    samples = min(counts.values())
    return (0 if passed else 1), {"samples": samples, "counts": counts, "passed": passed, "checks": rows}
