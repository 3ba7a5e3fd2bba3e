#!/usr/bin/env python3
"""
Model file ingestion for the gcdeform CLI.
- Accepts only local .json files below the configured size cap
- Hashes the raw bytes (sha256) for the audit log
- Every schema problem is raised as SchemaError carrying a JSON pointer

Polynomials are given as text ("x^2 + 1/2*y", "I" for the imaginary unit) or as
{"vars", "terms"} objects; forms as {"deg": k, "terms": [{"idx": [...], "coef": poly}]}.
"""

import hashlib
import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from gcdeform import config
from gcdeform import ring as R
from gcdeform.artin import REALS, ArtinAlgebra, MElement, make_artin
from gcdeform.brane import Brane, HermData, NerveCover, make_brane, submanifold
from gcdeform.cartan import Chart, DiffForm, VectorField
from gcdeform.complexes import CochainComplex, SemiCx
from gcdeform.courant import GenEndo, GenSection, SymElement
from gcdeform.deform import BraneDeformation, BundleDeformation
from gcdeform.dgla import FDGLA, element
from gcdeform.errors import GCDeformError, SchemaError
from gcdeform.gcs import (GCStructure, b_transform_gc, make_complex_gc, make_symplectic_gc, standard_chart,
                          standard_gc)

logger = logging.getLogger(__name__)

ALLOWED_EXTENSIONS = {".json"}
SECTIONS = ("chart", "artin", "gc", "brane", "deformation", "dgla", "element", "gauge", "lift_to",
            "functions", "sections", "actor", "cover", "semicx")


@dataclass(frozen=True)
class Model:
    source: str
    sha256: str
    chart: Optional[Chart] = None
    artin: ArtinAlgebra = REALS
    gc: Optional[GCStructure] = None
    brane: Optional[Brane] = None
    deformation: Optional[BraneDeformation] = None
    dgla: Optional[FDGLA] = None
    element: Optional[MElement] = None
    gauge: Optional[MElement] = None
    lift_to: Optional[ArtinAlgebra] = None
    functions: Dict[str, Any] = field(default_factory=dict)
    sections: Dict[str, GenSection] = field(default_factory=dict)
    actor: Optional[SymElement] = None
    cover: Optional[NerveCover] = None
    semicx: Optional[SemiCx] = None

    def need(self, name: str):
        value = getattr(self, name)
        if value is None or value == {}:
            raise SchemaError(f"this command needs a '{name}' section", "/" + name)
        return value


def _sha256_bytes(data: bytes) -> str:
    h = hashlib.sha256()
    h.update(data)
    return h.hexdigest()


@contextmanager
def _at(path: str):
    """Re-raise library precondition errors as schema errors at ``path``."""
    try:
        yield
    except SchemaError:
        raise
    except GCDeformError as exc:
        raise SchemaError(str(exc), path) from exc


def _expect(value, kind, path: str, what: str):
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaError(f"expected {what}", path)
    return value


# ---------------------------------------------------------------------------
# leaves
# ---------------------------------------------------------------------------

def parse_poly(value, chart: Chart, path: str):
    if isinstance(value, Mapping):
        with _at(path):
            return chart.reduce(R.poly_from_json(value, chart.ring, path))
    return chart.reduce(R.parse_poly(value, chart.ring, path))


def parse_form(obj, chart: Chart, path: str) -> DiffForm:
    _expect(obj, Mapping, path, "a form object {deg, terms}")
    deg = _expect(obj.get("deg"), int, path + "/deg", "an integer degree")
    terms = _expect(obj.get("terms", []), list, path + "/terms", "a list of terms")
    coeffs = {}
    for k, term in enumerate(terms):
        where = f"{path}/terms/{k}"
        _expect(term, Mapping, where, "a term {idx, coef}")
        idx = _expect(term.get("idx"), list, where + "/idx", "an index list")
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise SchemaError("indices must be integers", where + "/idx")
        if tuple(idx) in coeffs:
            raise SchemaError("repeated index", where + "/idx")
        coeffs[tuple(idx)] = parse_poly(term.get("coef", 0), chart, where + "/coef")
    with _at(path):
        return DiffForm.from_dict(chart, deg, coeffs)


def _poly_list(values, chart: Chart, path: str) -> List:
    _expect(values, list, path, f"a list of {chart.n} polynomials")
    if len(values) != chart.n:
        raise SchemaError(f"expected {chart.n} entries", path)
    return [parse_poly(v, chart, f"{path}/{i}") for i, v in enumerate(values)]


def _matrix(rows, chart: Chart, size: int, path: str) -> List[List]:
    _expect(rows, list, path, f"a {size}x{size} matrix")
    if len(rows) != size:
        raise SchemaError(f"expected {size} rows", path)
    out = []
    for i, row in enumerate(rows):
        _expect(row, list, f"{path}/{i}", "a row")
        if len(row) != size:
            raise SchemaError(f"expected {size} entries", f"{path}/{i}")
        out.append([parse_poly(v, chart, f"{path}/{i}/{j}") for j, v in enumerate(row)])
    return out


def _rational_matrix(rows, path: str) -> List[List]:
    _expect(rows, list, path, "a matrix")
    return [[R.to_qq(v, f"{path}/{i}/{j}") for j, v in enumerate(_expect(row, list, f"{path}/{i}", "a row"))]
            for i, row in enumerate(rows)]


def _edge_key(key: str, path: str):
    try:
        edge = tuple(int(v) for v in key.split(","))
    except ValueError:
        raise SchemaError(f"edge keys look like '0,1', got {key!r}", path) from None
    if len(edge) != 2 or edge[0] >= edge[1]:
        raise SchemaError(f"edge keys are increasing pairs, got {key!r}", path)
    return edge


def _vertex_key(key: str, path: str) -> int:
    if not key.isdigit():
        raise SchemaError(f"vertex keys are chart indices, got {key!r}", path)
    return int(key)


# ---------------------------------------------------------------------------
# sections of the model file
# ---------------------------------------------------------------------------

def parse_chart(obj, path: str = "/chart") -> Chart:
    coords = obj.get("coords") if isinstance(obj, Mapping) else obj
    _expect(coords, list, path, "a list of coordinate labels")
    if not all(isinstance(c, str) and c.isidentifier() for c in coords):
        raise SchemaError("coordinate labels must be identifiers", path)
    with _at(path):
        return Chart(tuple(coords))


def parse_artin(obj, path: str = "/artin") -> ArtinAlgebra:
    _expect(obj, Mapping, path, "an object {gens, relations}")
    gens = _expect(obj.get("gens"), list, path + "/gens", "a list of generator names")
    rels = _expect(obj.get("relations"), list, path + "/relations", "a list of exponent vectors")
    for i, r in enumerate(rels):
        if not isinstance(r, list) or len(r) != len(gens) or not all(isinstance(e, int) and e >= 0 for e in r):
            raise SchemaError("bad exponent vector", f"{path}/relations/{i}")
    with _at(path):
        return make_artin(tuple(gens), tuple(tuple(r) for r in rels))


def parse_cover(obj, path: str = "/cover") -> NerveCover:
    _expect(obj, Mapping, path, "an object {verts, simplices}")
    verts = _expect(obj.get("verts"), int, path + "/verts", "a vertex count")
    simplices = _expect(obj.get("simplices", []), list, path + "/simplices", "a list of simplices")
    for i, s in enumerate(simplices):
        if not isinstance(s, list) or not all(isinstance(v, int) for v in s):
            raise SchemaError("a simplex is a list of vertex indices", f"{path}/simplices/{i}")
    with _at(path):
        return NerveCover.nerve(verts, simplices)


def parse_gc(obj, chart: Optional[Chart], path: str = "/gc") -> GCStructure:
    _expect(obj, Mapping, path, "an object with a 'kind'")
    kind = obj.get("kind")
    with _at(path):
        if kind == "standard":
            m = _expect(obj.get("m", 0), int, path + "/m", "an integer")
            n = _expect(obj.get("n", 0), int, path + "/n", "an integer")
            if chart is not None and chart != standard_chart(m, n):
                raise SchemaError(f"standard model ({m}, {n}) uses coordinates {standard_chart(m, n).coords}",
                                  "/chart")
            gc = standard_gc(m, n)
        elif chart is None:
            raise SchemaError("a chart is required for this kind", "/chart")
        elif kind == "symplectic":
            gc = make_symplectic_gc(chart, parse_form(obj.get("omega"), chart, path + "/omega"))
        elif kind == "complex":
            gc = make_complex_gc(chart, _matrix(obj.get("jcx"), chart, chart.n, path + "/jcx"))
        elif kind == "matrix":
            gc = GCStructure(GenEndo(chart, tuple(tuple(r) for r in _matrix(obj.get("rows"), chart, 2 * chart.n,
                                                                              path + "/rows"))), "matrix")
        else:
            raise SchemaError(f"unknown kind {kind!r}", path + "/kind")
        if "b" in obj:
            gc = b_transform_gc(gc, parse_form(obj["b"], gc.chart, path + "/b"))
    return gc


def parse_brane(obj, chart: Chart, path: str = "/brane") -> Brane:
    _expect(obj, Mapping, path, "a brane object")
    retained = _expect(obj.get("z_coords"), list, path + "/z_coords", "a list of retained coordinates")
    with _at(path + "/z_coords"):
        z = submanifold(chart, retained)
    cover = parse_cover(obj.get("cover", {"verts": 1}), path + "/cover")
    zc = z.chart
    c = {}
    for key, value in _expect(obj.get("c", {}), Mapping, path + "/c", "an edge map").items():
        c[_edge_key(key, f"{path}/c/{key}")] = parse_poly(value, zc, f"{path}/c/{key}")
    a = {}
    for key, value in _expect(obj.get("a", {}), Mapping, path + "/a", "a vertex map").items():
        a[_vertex_key(key, f"{path}/a/{key}")] = parse_form(value, zc, f"{path}/a/{key}")
    with _at(path):
        return make_brane(z, HermData.build(cover, zc, c, a))


def parse_deformation(obj, brane: Brane, artin: ArtinAlgebra, path: str = "/deformation") -> BraneDeformation:
    _expect(obj, Mapping, path, "a deformation object")
    z = brane.z
    zc = z.chart_on(artin)
    trivial = BraneDeformation.trivial(brane, artin)
    rho = list(trivial.rho)
    for label, value in _expect(obj.get("rho", {}), Mapping, path + "/rho", "a coordinate map").items():
        if label not in z.ambient.coords:
            raise SchemaError(f"unknown coordinate {label!r}", f"{path}/rho/{label}")
        rho[z.ambient.index(label)] = parse_poly(value, zc, f"{path}/rho/{label}")
    bundle = _expect(obj.get("bundle", {}), Mapping, path + "/bundle", "an object {f, u}")
    f = {_edge_key(k, f"{path}/bundle/f/{k}"): parse_poly(v, zc, f"{path}/bundle/f/{k}")
         for k, v in _expect(bundle.get("f", {}), Mapping, path + "/bundle/f", "an edge map").items()}
    u = {_vertex_key(k, f"{path}/bundle/u/{k}"): parse_form(v, zc, f"{path}/bundle/u/{k}")
         for k, v in _expect(bundle.get("u", {}), Mapping, path + "/bundle/u", "a vertex map").items()}
    with _at(path):
        return BraneDeformation(brane, tuple(rho), BundleDeformation.build(brane.herm, artin, f, u))


def parse_element(obj, g: FDGLA, artin: ArtinAlgebra, path: str) -> MElement:
    _expect(obj, list, path, "a list of {mono, coords}")
    comps = {}
    for k, term in enumerate(obj):
        where = f"{path}/{k}"
        _expect(term, Mapping, where, "a term {mono, coords}")
        mono = _expect(term.get("mono"), list, where + "/mono", "an exponent vector")
        coords = _expect(term.get("coords"), Mapping, where + "/coords", "a map of basis names to coefficients")
        unknown = [name for name in coords if name not in g.labels]
        if unknown:
            raise SchemaError(f"unknown basis element {unknown[0]!r}", where + "/coords")
        comps[tuple(mono)] = coords
    with _at(path):
        return element(g, artin, comps)


def parse_section(obj, chart: Chart, path: str) -> GenSection:
    _expect(obj, Mapping, path, "a section {vf, form}")
    vf = _poly_list(obj.get("vf", [0] * chart.n), chart, path + "/vf")
    form = _poly_list(obj.get("form", [0] * chart.n), chart, path + "/form")
    return GenSection.of(chart, vf, form)


def parse_actor(obj, chart: Chart, path: str = "/actor") -> SymElement:
    _expect(obj, Mapping, path, "a group element {u, xi}")
    u = _poly_list(obj.get("u", [0] * chart.n), chart, path + "/u")
    xi = _poly_list(obj.get("xi", [0] * chart.n), chart, path + "/xi")
    with _at(path):
        return SymElement(DiffForm.one_form(chart, u), VectorField.of(chart, xi))


def parse_semicx(obj, path: str = "/semicx") -> SemiCx:
    _expect(obj, Mapping, path, "an object {levels, cofaces}")
    levels = []
    for n, lv in enumerate(_expect(obj.get("levels"), list, path + "/levels", "a list of levels")):
        where = f"{path}/levels/{n}"
        _expect(lv, Mapping, where, "a level {dims, d}")
        dims = _expect(lv.get("dims"), list, where + "/dims", "a list of dimensions")
        maps = [_rational_matrix(m, f"{where}/d/{k}")
                for k, m in enumerate(_expect(lv.get("d", []), list, where + "/d", "a list of matrices"))]
        with _at(where):
            levels.append(CochainComplex.build(dims, maps))
    cofaces = []
    for n, per_i in enumerate(_expect(obj.get("cofaces", []), list, path + "/cofaces", "nested coface lists")):
        cofaces.append([[_rational_matrix(m, f"{path}/cofaces/{n}/{i}/{q}") for q, m in enumerate(per_q)]
                        for i, per_q in enumerate(per_i)])
    with _at(path):
        return SemiCx.build(levels, cofaces, bool(obj.get("truncated", False)))


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def read_model_bytes(file_path: str) -> bytes:
    path = Path(file_path)
    if not path.exists() or not path.is_file():
        raise SchemaError(f"file not found: {file_path}", "/")
    ext = path.suffix.lower()
    if ext not in ALLOWED_EXTENSIONS:
        raise SchemaError(f"unsupported file extension: {ext or '(none)'}", "/")
    size = path.stat().st_size
    cap = config.max_input_bytes()
    if size > cap:
        raise SchemaError(f"file too large: {size} bytes (max {cap})", "/")
    return path.read_bytes()


def parse_model(data: Mapping, source: str = "<memory>", digest: str = "") -> Model:
    """Build a Model from already-decoded JSON."""
    _expect(data, Mapping, "", "a JSON object")
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise SchemaError(f"unknown section {unknown[0]!r}", "/" + unknown[0])
    chart = parse_chart(data["chart"]) if "chart" in data else None
    artin = parse_artin(data["artin"]) if "artin" in data else REALS
    gc = parse_gc(data["gc"], chart) if "gc" in data else None
    if gc is not None:
        chart = gc.chart
    brane = None
    if "brane" in data:
        if chart is None:
            raise SchemaError("a chart or gc is required before a brane", "/chart")
        brane = parse_brane(data["brane"], chart)
    deformation = None
    if "deformation" in data:
        if brane is None:
            raise SchemaError("a deformation needs a brane", "/brane")
        deformation = parse_deformation(data["deformation"], brane, artin)
    g = FDGLA.from_json(data["dgla"]) if "dgla" in data else None
    elements = {}
    for key in ("element", "gauge"):
        if key in data:
            if g is None:
                raise SchemaError(f"'{key}' needs a dgla", "/dgla")
            elements[key] = parse_element(data[key], g, artin, "/" + key)
    lift_to = parse_artin(data["lift_to"], "/lift_to") if "lift_to" in data else None
    functions, sections, actor = {}, {}, None
    if any(k in data for k in ("functions", "sections", "actor")) and chart is None:
        raise SchemaError("a chart or gc is required", "/chart")
    for name, value in _expect(data.get("functions", {}), Mapping, "/functions", "a map of functions").items():
        functions[name] = parse_poly(value, chart, f"/functions/{name}")
    for name, value in _expect(data.get("sections", {}), Mapping, "/sections", "a map of sections").items():
        sections[name] = parse_section(value, chart, f"/sections/{name}")
    if "actor" in data:
        actor = parse_actor(data["actor"], chart.with_artin(artin))
    cover = parse_cover(data["cover"]) if "cover" in data else None
    semicx = parse_semicx(data["semicx"]) if "semicx" in data else None
    return Model(source, digest, chart, artin, gc, brane, deformation, g, elements.get("element"),
                 elements.get("gauge"), lift_to, functions, sections, actor, cover, semicx)


def load_model(file_path: str) -> Model:
    """Validate, hash and parse one model file."""
    raw = read_model_bytes(file_path)
    digest = _sha256_bytes(raw)
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"not valid JSON: {exc}", "/") from exc
    model = parse_model(data, Path(file_path).name, digest)
    logger.debug("loaded %s (sha256 %s…)", model.source, digest[:16])
    return model
