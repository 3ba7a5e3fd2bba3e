"""
Deterministic rendering of command payloads.
- Exact scalars become "p/q" text (Gaussian ones "p/q + r/s*I")
- Polynomials, forms, sections and Artin elements become plain dicts/strings
- JSON output uses sorted keys so repeated runs are byte-identical
"""

import json
import logging
from dataclasses import fields, is_dataclass
from typing import Any, List, Tuple

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyElement

from gcdeform import ring as R
from gcdeform.artin import ArtinAlgebra, MElement
from gcdeform.cartan import DiffForm, VectorField
from gcdeform.courant import GenSection
from gcdeform.gcs import AlgebroidForm
from gcdeform.results import CheckResult, Cohomology

logger = logging.getLogger(__name__)


def _index(idx) -> str:
    return ",".join(str(i) for i in idx)


def to_jsonable(obj: Any) -> Any:
    """Map library values onto JSON-compatible data with exact text scalars."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, PolyElement):
        return R.poly_str(obj)
    if QQ.of_type(obj) or QQ_I.of_type(obj):
        return R.scalar_str(obj)
    if isinstance(obj, ArtinAlgebra):
        return obj.label()
    if isinstance(obj, VectorField):
        return [R.poly_str(c) for c in obj.comps]
    if isinstance(obj, (DiffForm, AlgebroidForm)):
        return {"deg": obj.degree, "terms": {_index(idx): R.poly_str(c) for idx, c in obj.terms}}
    if isinstance(obj, GenSection):
        return {"vf": to_jsonable(obj.vf), "form": [R.poly_str(c) for c in obj.form.comps()]}
    if isinstance(obj, MElement):
        return {_index(mono): [R.qq_str(c) for c in vec] for mono, vec in obj.comps}
    if isinstance(obj, CheckResult):
        out = {"ok": obj.ok, "witness": to_jsonable(obj.witness)}
        if obj.detail:
            out["detail"] = obj.detail
        return out
    if isinstance(obj, Cohomology):
        return {"degree": obj.degree, "dim": obj.dim, "cocycle_dim": obj.cocycle_dim,
                "basis": to_jsonable(obj.basis)}
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else _index(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    logger.debug("falling back to str() for %s", type(obj).__name__)
    return str(obj)


def render_json(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)


def _rows(data: Any, prefix: str = "") -> List[Tuple[str, str]]:
    if isinstance(data, dict) and data:
        rows = []
        for key in sorted(data):
            rows.extend(_rows(data[key], f"{prefix}.{key}" if prefix else str(key)))
        return rows
    if isinstance(data, (dict, list)):
        return [(prefix, json.dumps(data, sort_keys=True, ensure_ascii=False))]
    return [(prefix, "" if data is None else str(data).lower() if isinstance(data, bool) else str(data))]


def render_table(payload: Any) -> str:
    """Key/value rows, nested keys dotted, lists kept as compact JSON."""
    rows = _rows(to_jsonable(payload)) or [("", "")]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def render(payload: Any, output: str = "json") -> str:
    return render_table(payload) if output == "table" else render_json(payload)
