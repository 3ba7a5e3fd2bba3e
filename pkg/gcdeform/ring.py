"""
Exact scalars, polynomial parsing and linear algebra over QQ and QQ_I.

- Polynomials are sympy ``PolyElement`` objects over a sparse ``PolyRing``.
- Scalars are ``QQ`` (gmpy2 ``mpq``) or ``QQ_I`` elements, never floats.
- Linear systems go through ``DomainMatrix.rref``.
"""

import logging
import re
from functools import lru_cache
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import I, Integer, Rational, Symbol
from sympy.parsing.sympy_parser import parse_expr, standard_transformations
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from . import config
from .errors import ComplexError, ContextMismatchError, DomainError, SchemaError

logger = logging.getLogger(__name__)

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_ALLOWED = re.compile(r"^[0-9A-Za-z_+\-*/^() ]*$")
_POWER = re.compile(r"(?:\^|\*\*)\s*(\d*)\s*(\^|\*\*)?")

Vector = List


@lru_cache(maxsize=None)
def poly_ring(names: Tuple[str, ...], domain=QQ_I) -> PolyRing:
    """Shared ring per (names, domain) so that equal contexts compare equal."""
    if not names:
        # PolyRing needs at least one generator to build monomials sanely.
        raise DomainError("a polynomial ring needs at least one variable")
    return PolyRing(names, domain, grlex)


def to_qq(value, path: str = "") -> "QQ.dtype":
    """Exact rational from an int, a QQ element or a "p/q" string."""
    if isinstance(value, bool):
        raise SchemaError("expected a rational, got a boolean", path)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        text = value.strip()
        m = re.fullmatch(r"([+-]?\d+)(?:/(\d+))?", text)
        if not m:
            raise SchemaError(f"not an exact rational: {value!r}", path)
        den = int(m.group(2) or 1)
        if den == 0:
            raise SchemaError("zero denominator", path)
        return QQ(int(m.group(1)), den)
    if isinstance(value, float):
        raise SchemaError("floats are not accepted; use \"p/q\"", path)
    try:
        return QQ.convert(value)
    except Exception as exc:
        raise SchemaError(f"not a rational: {value!r}", path) from exc


def conj(c):
    """Complex conjugate of a QQ_I element."""
    c = QQ_I.convert(c)
    return QQ_I(c.x, -c.y)


def real_part(c):
    return QQ_I.convert(c).x


def imag_part(c):
    return QQ_I.convert(c).y


def qq_str(q) -> str:
    q = QQ.convert(q)
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def scalar_str(c) -> str:
    """Deterministic text for a QQ or QQ_I scalar: "p/q" or "p/q + r/s*I"."""
    if QQ.of_type(c) or isinstance(c, int):
        return qq_str(c)
    c = QQ_I.convert(c)
    if not c.y:
        return qq_str(c.x)
    im = qq_str(c.y)
    if not c.x:
        return f"{im}*I"
    sign = "-" if c.y < 0 else "+"
    return f"{qq_str(c.x)} {sign} {qq_str(abs(c.y))}*I"


def _nested_power(text: str) -> bool:
    """True when a power is applied to a parenthesised group that itself holds a power."""
    t = text.replace("**", "^")
    opens = []
    for pos, ch in enumerate(t):
        if ch == "(":
            opens.append(pos)
        elif ch == ")" and opens:
            start = opens.pop()
            if "^" in t[start:pos] and t[pos + 1:].lstrip().startswith("^"):
                return True
    return False


def _degree_bound(expr) -> int:
    if expr.is_number:
        return 0
    if expr.is_Symbol:
        return 1
    if expr.is_Pow:
        return _degree_bound(expr.base) * max(int(expr.exp), 0) if expr.exp.is_Integer else 0
    if expr.is_Add:
        return max(_degree_bound(a) for a in expr.args)
    return sum(_degree_bound(a) for a in expr.args)


def _check_powers(text: str, path: str):
    limit = config.max_poly_degree()
    for m in _POWER.finditer(text):
        if not m.group(1):
            raise SchemaError(f"exponents must be non-negative integer literals in {text!r}", path)
        if m.group(2):
            raise SchemaError(f"chained exponents are not accepted in {text!r}", path)
        if int(m.group(1)) > limit:
            raise SchemaError(f"exponent {m.group(1)} exceeds the degree cap {limit}", path)
    if _nested_power(text):
        raise SchemaError(f"powers of powers are not accepted in {text!r}", path)


def parse_poly(text, ring: PolyRing, path: str = ""):
    """Parse a polynomial string in the generators of ``ring``.

    Only generator names, ``I`` (when the ground field is QQ_I), integers and
    ``+ - * / ^ ( )`` are accepted.
    """
    if isinstance(text, bool):
        raise SchemaError("expected a polynomial string", path)
    if isinstance(text, int):
        return ring.ground_new(ring.domain.convert(text))
    if not isinstance(text, str):
        raise SchemaError("expected a polynomial string", path)
    if not _ALLOWED.match(text):
        raise SchemaError(f"illegal characters in {text!r}", path)
    names = {str(s) for s in ring.symbols}
    for name in _NAME.findall(text):
        if name not in names and not (name == "I" and ring.domain == QQ_I):
            raise SchemaError(f"unknown symbol {name!r}", path)
    _check_powers(text, path)
    local = {n: Symbol(n) for n in names}
    local["I"] = I
    glb = {"Integer": Integer, "Rational": Rational, "Symbol": Symbol, "I": I}
    try:
        expr = parse_expr(text.replace("^", "**") or "0", local_dict=local,
                          global_dict=glb, transformations=standard_transformations)
        if _degree_bound(expr) > config.max_poly_degree():
            raise SchemaError(f"{text!r} exceeds the degree cap {config.max_poly_degree()}", path)
        return ring.from_expr(expr)
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"cannot parse polynomial {text!r}: {exc}", path) from exc


def poly_str(p) -> str:
    if not p:
        return "0"
    return str(p.as_expr())


def poly_degree(p) -> int:
    if not p:
        return -1
    return max(sum(m) for m in p.keys())


def monomials_up_to(nvars: int, degree: int) -> List[Tuple[int, ...]]:
    """All exponent tuples of total degree <= degree: graded, then lexicographic with x1 > x2 > ..."""
    if degree < 0:
        return []
    monos = [m for m in product(range(degree + 1), repeat=nvars) if sum(m) <= degree]
    return sorted(monos, key=lambda m: (sum(m), tuple(-e for e in m)))


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

def _matrix(rows: Sequence[Sequence], ncols: int, K) -> DomainMatrix:
    data = [[K.convert(e) for e in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), K)


def rref(rows: Sequence[Sequence], ncols: int, K=QQ) -> Tuple[List[List], Tuple[int, ...]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    if not rows or ncols == 0:
        return [], ()
    reduced, pivots = _matrix(rows, ncols, K).rref()
    out = reduced.to_list()[: len(pivots)]
    return out, tuple(pivots)


def rank(rows: Sequence[Sequence], ncols: int, K=QQ) -> int:
    return len(rref(rows, ncols, K)[1])


def kernel(rows: Sequence[Sequence], ncols: int, K=QQ) -> List[List]:
    """Basis of {v : rows . v = 0}, one free column per basis vector."""
    reduced, pivots = rref(rows, ncols, K)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [K.zero] * ncols
        v[f] = K.one
        for r, p in enumerate(pivots):
            v[p] = -reduced[r][f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], ncols: int, rhs: Sequence, K=QQ) -> Optional[List]:
    """One solution of rows . v = rhs (free variables set to zero), or None."""
    if not rows:
        return [K.zero] * ncols if all(not K.convert(b) for b in rhs) else None
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(aug, ncols + 1, K)
    if ncols in pivots:
        return None
    v = [K.zero] * ncols
    for r, p in enumerate(pivots):
        v[p] = reduced[r][ncols]
    return v


def span_basis(vectors: Iterable[Sequence], n: int, K=QQ) -> List[List]:
    """A basis (in rref) of the span of ``vectors``."""
    vectors = list(vectors)
    return rref(vectors, n, K)[0] if vectors else []


def coordinates(basis: Sequence[Sequence], v: Sequence, K=QQ) -> Optional[List]:
    """Coefficients c with sum c_k basis_k = v, or None if v is not in the span."""
    n = len(v)
    if not basis:
        return [] if all(not K.convert(e) for e in v) else None
    cols = [[K.convert(basis[k][i]) for k in range(len(basis))] for i in range(n)]
    return solve(cols, len(basis), list(v), K)


def mat_vec(rows: Sequence[Sequence], v: Sequence, K=QQ) -> List:
    return [sum((K.convert(a) * K.convert(b) for a, b in zip(row, v)), K.zero) for row in rows]


def transpose(rows: Sequence[Sequence], ncols: int) -> List[List]:
    return [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]


def is_zero_vector(v: Sequence) -> bool:
    return all(not e for e in v)


def quotient_dim(im_gens: Sequence[Sequence], ker_gens: Sequence[Sequence], n: int,
                 K=QQ) -> Tuple[int, List[List]]:
    """dim span(ker)/span(im) and representatives completing an im-basis to a ker-basis.

    Raises ComplexError when span(im) is not inside span(ker).
    """
    im_gens = [list(v) for v in im_gens]
    ker_gens = [list(v) for v in ker_gens]
    r_ker = rank(ker_gens, n, K) if ker_gens else 0
    if im_gens and rank(ker_gens + im_gens, n, K) != r_ker:
        raise ComplexError("image is not contained in the kernel")
    chosen = span_basis(im_gens, n, K)
    current = len(chosen)
    reps = []
    for v in span_basis(ker_gens, n, K):
        trial = chosen + [v]
        r = rank(trial, n, K)
        if r > current:
            chosen, current = trial, r
            reps.append(v)
    return len(reps), reps


def inverse(rows: Sequence[Sequence], K=QQ) -> List[List]:
    n = len(rows)
    mat = _matrix(rows, n, K)
    if mat.rank() != n:
        raise DomainError("matrix is singular")
    return mat.inv().to_list()


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence], K=QQ) -> List[List]:
    cols = len(b[0]) if b else 0
    return [[sum((K.convert(row[k]) * K.convert(b[k][j]) for k in range(len(b))), K.zero)
             for j in range(cols)] for row in a]


# ---------------------------------------------------------------------------
# polynomial helpers and text forms
# ---------------------------------------------------------------------------

def poly_mul(p, q):
    if p.ring != q.ring:
        raise ContextMismatchError(f"cannot multiply polynomials over {p.ring} and {q.ring}")
    return p * q


def poly_partial(p, var: str):
    names = [str(s) for s in p.ring.symbols]
    if var not in names:
        raise DomainError(f"unknown variable {var!r}")
    return p.diff(p.ring.gens[names.index(var)])


def parse_rational(text: str):
    try:
        return to_qq(text)
    except SchemaError as exc:
        raise DomainError(exc.reason) from exc


to_text = scalar_str


def _coef_json(c):
    c = QQ_I.convert(c)
    if not c.y:
        return qq_str(c.x)
    return {"re": qq_str(c.x), "im": qq_str(c.y)}


def poly_to_json(p) -> dict:
    names = [str(s) for s in p.ring.symbols]
    return {"vars": names,
            "terms": [{"exp": list(m), "coef": _coef_json(c)} for m, c in p.terms()]}


def poly_from_json(obj, ring: Optional[PolyRing] = None, path: str = ""):
    if not isinstance(obj, dict) or "vars" not in obj or "terms" not in obj:
        raise SchemaError("polynomial needs 'vars' and 'terms'", path)
    names = obj["vars"]
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise SchemaError("'vars' must be a list of labels", path + "/vars")
    if ring is None:
        ring = poly_ring(tuple(names))
    elif [str(s) for s in ring.symbols] != names:
        raise ContextMismatchError(f"polynomial variables {names} differ from {ring.symbols}")
    terms = {}
    for k, term in enumerate(obj["terms"]):
        where = f"{path}/terms/{k}"
        exp = term.get("exp") if isinstance(term, dict) else None
        if not isinstance(exp, list) or len(exp) != len(names) or not all(isinstance(e, int) and e >= 0 for e in exp):
            raise SchemaError("bad exponent vector", where + "/exp")
        coef = term.get("coef")
        if isinstance(coef, dict):
            c = QQ_I(to_qq(coef.get("re", 0), where + "/coef/re"), to_qq(coef.get("im", 0), where + "/coef/im"))
        else:
            c = QQ_I.convert(to_qq(coef, where + "/coef"))
        if c:
            terms[tuple(exp)] = terms.get(tuple(exp), QQ_I.zero) + c
    return ring.from_dict({m: c for m, c in terms.items() if c})
