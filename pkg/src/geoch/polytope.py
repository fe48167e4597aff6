"""Deterministic vertices of the Bell polytope and exact facet certification."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .catalog import BellInequality, Scenario, coordinate_order, frac_str
from .errors import SizeError

MAX_VERTEX_BITS = 20


@dataclass(frozen=True)
class DeterministicVertex:
    assignment: int
    coordinates: tuple[int, ...]


def vertex_matrix(scenario: Scenario, coordinates=None) -> np.ndarray:
    """0/1 matrix with one row per deterministic assignment.

    Row ``a`` uses the sample-space point numbering: bit
    ``offset(party) + setting - 1`` of ``a`` is that observable's outcome.
    """
    coords = coordinate_order(scenario) if coordinates is None else tuple(coordinates)
    nbits = sum(scenario.settings)
    if nbits > MAX_VERTEX_BITS:
        raise SizeError(f"2^{nbits} vertices exceed the enumeration cap 2^{MAX_VERTEX_BITS}")
    offsets = np.cumsum((0,) + scenario.settings[:-1])
    pts = np.arange(1 << nbits, dtype=np.int64)
    out = np.ones((pts.size, len(coords)), dtype=np.int64)
    for col, coord in enumerate(coords):
        for p, s in coord:
            out[:, col] &= (pts >> int(offsets[p] + s - 1)) & 1
    return out


def enumerate_vertices(scenario: Scenario, coordinates=None) -> list[DeterministicVertex]:
    mat = vertex_matrix(scenario, coordinates)
    return [DeterministicVertex(a, tuple(int(v) for v in row)) for a, row in enumerate(mat)]


def _integer_coefficients(ineq: BellInequality) -> tuple[np.ndarray, int]:
    scale = 1
    for c in ineq.coefficients:
        scale = scale * c.denominator // np.gcd(scale, c.denominator)
    vec = np.array([int(c * scale) for c in ineq.coefficients], dtype=np.int64)
    return vec, int(scale)


def vertex_values(ineq: BellInequality) -> list[Fraction]:
    vec, scale = _integer_coefficients(ineq)
    vals = vertex_matrix(ineq.scenario, ineq.coordinates) @ vec
    return [Fraction(int(v), scale) for v in vals]


def validate(ineq: BellInequality) -> tuple[Fraction, Fraction, bool]:
    """Exact minimum and maximum over all vertices, and whether the bounds hold."""
    vals = vertex_values(ineq)
    lo, hi = min(vals), max(vals)
    ok = lo >= ineq.lower_bound and (ineq.upper_bound is None or hi <= ineq.upper_bound)
    return lo, hi, ok


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free Gaussian elimination."""
    m = [[int(x) for x in r] for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank, prev = 0, 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        for r in range(rank + 1, nrows):
            f = m[r][col]
            row, prow = m[r], m[rank]
            for c in range(col + 1, ncols):
                # exact: Sylvester's identity makes the division remainder-free
                row[c] = (p * row[c] - f * prow[c]) // prev
            row[col] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


@dataclass(frozen=True)
class FacetReport:
    bound_value: Fraction
    saturating_count: int
    rank: int
    required_rank: int
    is_facet: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["bound_value"] = frac_str(self.bound_value)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def saturating_vertices(ineq: BellInequality, which: str = "lower") -> list[tuple[int, ...]]:
    bound = _bound(ineq, which)
    mat = vertex_matrix(ineq.scenario, ineq.coordinates)
    vals = vertex_values(ineq)
    return [tuple(int(x) for x in mat[i]) for i, v in enumerate(vals) if v == bound]


def _bound(ineq: BellInequality, which: str) -> Fraction:
    if which == "lower":
        return ineq.lower_bound
    if which == "upper":
        if ineq.upper_bound is None:
            raise ValueError(f"{ineq.name} has no upper bound")
        return ineq.upper_bound
    raise ValueError("which must be 'lower' or 'upper'")


def tightness(ineq: BellInequality, which: str = "lower") -> FacetReport:
    """Count saturating vertices and certify the facet by exact rank.

    A hyperplane through the origin (bound 0) needs ``d - 1`` independent
    saturating vertices; otherwise ``d`` are needed.
    """
    bound = _bound(ineq, which)
    rows = saturating_vertices(ineq, which)
    rank = bareiss_rank(rows)
    d = ineq.dimension
    required = d - 1 if bound == 0 else d
    return FacetReport(bound, len(rows), rank, required, rank == required)
