"""
Finite cochain complexes and their semicosimplicial relatives.

- ``CochainComplex``: dims per degree and dense differentials d_k : C^k -> C^{k+1}.
- ``SemiCx``: a row of complexes V_0, V_1, ... with coface maps; ``tot`` builds
  sum V_n[-n] with D = sum (-1)^n d_n + sum_i (-1)^i coface_i.
- ``BisemiCx``: rows joined by vertical cofaces; totalized row by row, then again.
- ``SemiCxMap`` / ``tot_map``: levelwise maps and the induced chain map.
- ``cech_semicx``: the nerve of a constant coefficient system.

Matrices are lists of rows (target x source) over QQ.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from . import ring as R
from .brane import NerveCover
from .errors import ComplexError, DomainError
from .results import Cohomology

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple, ...]


def zeros(rows: int, cols: int) -> List[List]:
    return [[QQ(0)] * cols for _ in range(rows)]


def identity(n: int) -> List[List]:
    return [[QQ(1) if i == j else QQ(0) for j in range(n)] for i in range(n)]


def _freeze(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(QQ.convert(a) for a in r) for r in rows)


def _mul(a: Sequence[Sequence], b: Sequence[Sequence], inner: int, cols: int) -> List[List]:
    if not a or not inner:
        return zeros(len(a), cols)
    return R.mat_mul(a, b)


def _is_zero(m: Sequence[Sequence]) -> bool:
    return all(not c for r in m for c in r)


def _shape(m: Sequence[Sequence], rows: int, cols: int, what: str):
    if len(m) != rows or any(len(r) != cols for r in m):
        raise DomainError(f"{what}: expected a {rows}x{cols} matrix")


# ---------------------------------------------------------------------------
# cochain complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CochainComplex:
    """Degrees 0..len(dims)-1; cohomology is reported up to ``exact_through``."""

    dims: Tuple[int, ...]
    d: Tuple[Matrix, ...]
    exact_through: int

    @classmethod
    def build(cls, dims: Sequence[int], maps: Sequence[Sequence[Sequence]],
              exact_through: Optional[int] = None) -> "CochainComplex":
        dims = tuple(int(n) for n in dims)
        if any(n < 0 for n in dims):
            raise DomainError("dimensions must be non-negative")
        if len(maps) != max(len(dims) - 1, 0):
            raise DomainError("one differential per consecutive pair of degrees is required")
        for k, m in enumerate(maps):
            _shape(m, dims[k + 1], dims[k], f"d_{k}")
        frozen = tuple(_freeze(m) for m in maps)
        for k in range(len(frozen) - 1):
            if not _is_zero(_mul(frozen[k + 1], frozen[k], dims[k + 1], dims[k])):
                raise ComplexError(f"D^2 != 0 from degree {k}")
        top = len(dims) - 1 if exact_through is None else exact_through
        return cls(dims, frozen, top)

    def differential(self, k: int) -> Matrix:
        if 0 <= k < len(self.d):
            return self.d[k]
        rows = self.dims[k + 1] if 0 <= k + 1 < len(self.dims) else 0
        cols = self.dims[k] if 0 <= k < len(self.dims) else 0
        return _freeze(zeros(rows, cols))

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def apply(self, k: int, v: Sequence) -> List:
        if len(v) != self.dim(k):
            raise DomainError(f"vector of length {len(v)} is not in degree {k}")
        return R.mat_vec(self.differential(k), v)

    def is_cocycle(self, k: int, v: Sequence) -> bool:
        return R.is_zero_vector(self.apply(k, v))

    def preimage(self, k: int, v: Sequence) -> Optional[List]:
        """b with d_{k-1} b = v, or None."""
        if k == 0:
            return None if any(v) else []
        return R.solve([list(r) for r in self.differential(k - 1)], self.dim(k - 1), list(v))

    def cohomology(self, k: int) -> Cohomology:
        if k < 0 or k > self.exact_through:
            raise DomainError(f"cohomology in degree {k} is outside the computed range 0..{self.exact_through}")
        n = self.dim(k)
        out = [list(r) for r in self.differential(k)]
        cocycles = R.kernel(out, n) if out else identity(n)
        boundaries: List[List] = []
        if k > 0 and self.dim(k - 1):
            cols = R.transpose([list(r) for r in self.differential(k - 1)], self.dim(k - 1))
            boundaries = R.span_basis(cols, n)
        dim, reps = R.quotient_dim(boundaries, cocycles, n)
        logger.debug("H^%d: cochains %d, cocycles %d, boundaries %d", k, n, len(cocycles), len(boundaries))
        return Cohomology(k, dim, tuple(tuple(v) for v in reps), len(cocycles), tuple(tuple(v) for v in boundaries))


# ---------------------------------------------------------------------------
# semicosimplicial complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SemiCx:
    """levels[n] is V_n; cofaces[n][i][q] maps V_n^q -> V_{n+1}^q for i = 0..n+1.

    ``truncated`` marks a row cut off after its last level rather than ending there.
    """

    levels: Tuple[CochainComplex, ...]
    cofaces: Tuple[Tuple[Tuple[Matrix, ...], ...], ...]
    truncated: bool = False

    @classmethod
    def build(cls, levels: Sequence[CochainComplex], cofaces: Sequence, truncated: bool = False) -> "SemiCx":
        levels = tuple(levels)
        if not levels:
            raise DomainError("a semicosimplicial complex needs at least one level")
        width = len(levels[0].dims)
        if any(len(lv.dims) != width for lv in levels):
            raise DomainError("all levels must span the same internal degrees")
        if len(cofaces) != len(levels) - 1:
            raise DomainError("cofaces are needed between consecutive levels")
        frozen = []
        for n, maps in enumerate(cofaces):
            if len(maps) != n + 2:
                raise DomainError(f"level {n} needs {n + 2} coface maps")
            per_i = []
            for i, per_q in enumerate(maps):
                if len(per_q) != width:
                    raise DomainError("one coface matrix per internal degree is required")
                for q, m in enumerate(per_q):
                    _shape(m, levels[n + 1].dim(q), levels[n].dim(q), f"coface {i} at level {n}, degree {q}")
                per_i.append(tuple(_freeze(m) for m in per_q))
            frozen.append(tuple(per_i))
        out = cls(levels, tuple(frozen), truncated)
        out.verify()
        return out

    @property
    def width(self) -> int:
        return len(self.levels[0].dims)

    def dim(self, n: int, q: int) -> int:
        return self.levels[n].dim(q) if 0 <= n < len(self.levels) else 0

    def coface(self, n: int, i: int, q: int) -> Matrix:
        return self.cofaces[n][i][q]

    def verify(self):
        """Chain-map property and cosimplicial identities; raises ComplexError."""
        for n, maps in enumerate(self.cofaces):
            lv, nxt = self.levels[n], self.levels[n + 1]
            for i in range(n + 2):
                for q in range(self.width - 1):
                    left = _mul(nxt.differential(q), maps[i][q], self.dim(n + 1, q), self.dim(n, q))
                    right = _mul(maps[i][q + 1], lv.differential(q), self.dim(n, q + 1), self.dim(n, q))
                    if left != right:
                        raise ComplexError(f"coface {i} at level {n} is not a chain map (degree {q})")
        for n in range(len(self.cofaces) - 1):
            for j in range(1, n + 3):
                for i in range(j):
                    for q in range(self.width):
                        lhs = _mul(self.cofaces[n + 1][j][q], self.cofaces[n][i][q],
                                   self.dim(n + 1, q), self.dim(n, q))
                        rhs = _mul(self.cofaces[n + 1][i][q], self.cofaces[n][j - 1][q],
                                   self.dim(n + 1, q), self.dim(n, q))
                        if lhs != rhs:
                            raise ComplexError(f"cosimplicial identity fails at level {n} for (i, j) = ({i}, {j})")

    def coboundary(self, n: int, q: int) -> List[List]:
        """sum_i (-1)^i coface_i on V_n^q."""
        out = zeros(self.dim(n + 1, q), self.dim(n, q))
        if n >= len(self.cofaces):
            return out
        for i, per_q in enumerate(self.cofaces[n]):
            sign = 1 if i % 2 == 0 else -1
            for r, row in enumerate(per_q[q]):
                for c, a in enumerate(row):
                    if a:
                        out[r][c] += sign * a
        return out


def tot_layout(V: SemiCx) -> List[List[Tuple[Tuple[int, int], int, int]]]:
    """Per total degree: ((level, internal degree), offset, size), levels ascending."""
    top = len(V.levels) - 1 + V.width - 1
    layout = []
    for k in range(top + 1):
        blocks, offset = [], 0
        for n in range(len(V.levels)):
            q = k - n
            if 0 <= q < V.width:
                size = V.dim(n, q)
                blocks.append(((n, q), offset, size))
                offset += size
        layout.append(blocks)
    return layout


def _place(target: List[List], block: Sequence[Sequence], row0: int, col0: int, sign: int = 1):
    for r, row in enumerate(block):
        for c, a in enumerate(row):
            if a:
                target[row0 + r][col0 + c] += sign * a


def tot(V: SemiCx) -> CochainComplex:
    """Tot(V) with D = (-1)^n d_n + sum_i (-1)^i coface_i."""
    layout = tot_layout(V)
    dims = [sum(size for _, _, size in blocks) for blocks in layout]
    maps = []
    for k in range(len(layout) - 1):
        D = zeros(dims[k + 1], dims[k])
        target = {key: off for key, off, _ in layout[k + 1]}
        for (n, q), col0, size in layout[k]:
            if not size:
                continue
            if (n, q + 1) in target:
                sign = 1 if n % 2 == 0 else -1
                _place(D, V.levels[n].differential(q), target[(n, q + 1)], col0, sign)
            if (n + 1, q) in target:
                _place(D, V.coboundary(n, q), target[(n + 1, q)], col0)
        maps.append(D)
    top = len(dims) - 1
    # only levels cut short of their top degree limit the range
    partial = [lv.exact_through + n for n, lv in enumerate(V.levels) if lv.exact_through < len(lv.dims) - 1]
    exact = min([len(V.levels) - 2 if V.truncated else top] + partial)
    logger.debug("Tot dims %s (exact through %d)", dims, exact)
    return CochainComplex.build(dims, maps, exact)


@dataclass(frozen=True)
class SemiCxMap:
    source: SemiCx
    target: SemiCx
    maps: Tuple[Tuple[Matrix, ...], ...]

    @classmethod
    def build(cls, source: SemiCx, target: SemiCx, maps: Sequence) -> "SemiCxMap":
        if len(source.levels) != len(target.levels) or source.width != target.width:
            raise DomainError("levelwise maps need matching level and degree ranges")
        frozen = []
        for n, per_q in enumerate(maps):
            for q, m in enumerate(per_q):
                _shape(m, target.dim(n, q), source.dim(n, q), f"map at level {n}, degree {q}")
            frozen.append(tuple(_freeze(m) for m in per_q))
        out = cls(source, target, tuple(frozen))
        for n in range(len(source.levels)):
            for q in range(source.width - 1):
                left = _mul(target.levels[n].differential(q), out.maps[n][q], target.dim(n, q), source.dim(n, q))
                right = _mul(out.maps[n][q + 1], source.levels[n].differential(q), source.dim(n, q + 1),
                             source.dim(n, q))
                if left != right:
                    raise ComplexError(f"levelwise map does not commute with d at level {n}")
        for n in range(len(source.cofaces)):
            for i in range(n + 2):
                for q in range(source.width):
                    left = _mul(target.coface(n, i, q), out.maps[n][q], target.dim(n, q), source.dim(n, q))
                    right = _mul(out.maps[n + 1][q], source.coface(n, i, q), source.dim(n + 1, q), source.dim(n, q))
                    if left != right:
                        raise ComplexError(f"levelwise map does not commute with coface {i} at level {n}")
        return out


def tot_map(f: SemiCxMap) -> List[List[List]]:
    """Block-diagonal matrices Tot(source)^k -> Tot(target)^k."""
    src, tgt = tot_layout(f.source), tot_layout(f.target)
    out = []
    for k in range(len(src)):
        rows = sum(size for _, _, size in tgt[k])
        cols = sum(size for _, _, size in src[k])
        m = zeros(rows, cols)
        toff = {key: off for key, off, _ in tgt[k]}
        for (n, q), col0, size in src[k]:
            if size:
                _place(m, f.maps[n][q], toff[(n, q)], col0)
        out.append(m)
    return out


def is_chain_map(maps: Sequence[Sequence[Sequence]], source: CochainComplex, target: CochainComplex) -> bool:
    for k in range(len(source.dims) - 1):
        left = _mul(target.differential(k), maps[k], target.dim(k), source.dim(k))
        right = _mul(maps[k + 1], source.differential(k), source.dim(k + 1), source.dim(k))
        if left != right:
            return False
    return True


# ---------------------------------------------------------------------------
# bisemicosimplicial complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BisemiCx:
    """rows[m] = V_{., m}; vertical[m][i][n][q] : V_{n,m}^q -> V_{n,m+1}^q."""

    rows: Tuple[SemiCx, ...]
    vertical: Tuple[Tuple[Tuple[Tuple[Matrix, ...], ...], ...], ...]

    @classmethod
    def build(cls, rows: Sequence[SemiCx], vertical: Sequence) -> "BisemiCx":
        rows = tuple(rows)
        levels = len(rows[0].levels)
        width = rows[0].width
        if any(len(r.levels) != levels or r.width != width for r in rows):
            raise DomainError("rows must share level count and internal degrees")
        if len(vertical) != len(rows) - 1:
            raise DomainError("vertical cofaces are needed between consecutive rows")
        frozen = []
        for m, per_i in enumerate(vertical):
            if len(per_i) != m + 2:
                raise DomainError(f"row {m} needs {m + 2} vertical cofaces")
            fi = []
            for per_n in per_i:
                fn = []
                for n, per_q in enumerate(per_n):
                    for q, mat in enumerate(per_q):
                        _shape(mat, rows[m + 1].dim(n, q), rows[m].dim(n, q), f"vertical map at ({n}, {m})")
                    fn.append(tuple(_freeze(mat) for mat in per_q))
                fi.append(tuple(fn))
            frozen.append(tuple(fi))
        out = cls(rows, tuple(frozen))
        for m, per_i in enumerate(out.vertical):
            for i, per_n in enumerate(per_i):
                SemiCxMap.build(rows[m], rows[m + 1], per_n)
        out.row_tot()
        return out

    def row_tot(self) -> SemiCx:
        """Tot of each row, joined by the induced vertical cofaces."""
        levels = [tot(r) for r in self.rows]
        cofaces = []
        for m, per_i in enumerate(self.vertical):
            maps = []
            for per_n in per_i:
                f = SemiCxMap(self.rows[m], self.rows[m + 1], per_n)
                maps.append(tot_map(f))
            cofaces.append(maps)
        return SemiCx.build(levels, cofaces)


def tot_bisemi(V: BisemiCx) -> CochainComplex:
    """Tot(Tot^row(V))."""
    return tot(V.row_tot())


def bisemi_layout(V: BisemiCx) -> List[List[Tuple[Tuple[int, int], int, int]]]:
    """Per total degree k: ((n, m), offset, size) for the blocks V_{n,m}, n + m = k (internal degree 0)."""
    inner = V.row_tot()
    outer = tot_layout(inner)
    rows_layout = [tot_layout(r) for r in V.rows]
    out = []
    for blocks in outer:
        entry = []
        for (m, p), off, _ in blocks:
            if p < len(rows_layout[m]):
                for (n, q), inner_off, size in rows_layout[m][p]:
                    if q == 0:
                        entry.append(((n, m), off + inner_off, size))
        out.append(entry)
    return out


# ---------------------------------------------------------------------------
# nerves
# ---------------------------------------------------------------------------

def simplices_of(cover: NerveCover, n: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(s for s in cover.simplices if len(s) == n + 1)


def nerve_coface(cover: NerveCover, n: int, i: int, fibre: int) -> List[List]:
    """(coface_i v)_tau = v_{tau minus its i-th vertex}; identity restrictions on QQ^fibre."""
    src = simplices_of(cover, n)
    tgt = simplices_of(cover, n + 1)
    m = zeros(len(tgt) * fibre, len(src) * fibre)
    pos = {s: k for k, s in enumerate(src)}
    for t_idx, tau in enumerate(tgt):
        face = tau[:i] + tau[i + 1:]
        _place(m, identity(fibre), t_idx * fibre, pos[face] * fibre)
    return m


def cech_semicx(cover: NerveCover, fibre_dim: int = 1) -> SemiCx:
    """Constant coefficients QQ^fibre_dim on every simplex, identity restrictions."""
    top = max(len(s) for s in cover.simplices) - 1
    levels = [CochainComplex.build([len(simplices_of(cover, n)) * fibre_dim], []) for n in range(top + 1)]
    cofaces = []
    for n in range(top):
        cofaces.append([[nerve_coface(cover, n, i, fibre_dim)] for i in range(n + 2)])
    return SemiCx.build(levels, cofaces)
