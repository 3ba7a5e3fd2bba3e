"""
Verdict objects returned by checks.

A check that can legitimately answer "no" returns one of these instead of
raising; ``witness`` carries the offending data (or the evidence when ``ok``).
"""

from dataclasses import dataclass, field
from typing import Any, List, Tuple


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: Any = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Cohomology:
    """Truncated cohomology in one degree.

    ``basis`` holds representative cocycles as coordinate vectors; ``coboundaries``
    spans the image used in the quotient, in the same coordinates.
    """

    degree: int
    dim: int
    basis: Tuple[Tuple, ...]
    cocycle_dim: int
    coboundaries: Tuple[Tuple, ...] = field(default=(), repr=False)
    filtration: str = "stable"
    labels: Tuple[Any, ...] = field(default=(), repr=False)

    @property
    def coboundary_dim(self) -> int:
        return len(self.coboundaries)

    def as_lists(self) -> List[List]:
        return [list(v) for v in self.basis]
