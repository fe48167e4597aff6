import csv
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoch import catalog as cat
from geoch import polytope as poly
from geoch.errors import SizeError

from conftest import DATA

CHM = cat.make_probability("geometric_tripartite_ch")


def _golden(name):
    with open(DATA / name) as fh:
        return [tuple(int(x) for x in row) for row in csv.reader(fh) if row and row[0].strip().isdigit()]


def test_vertex_enumeration():
    verts = poly.enumerate_vertices(cat.TRIPARTITE)
    assert len(verts) == 64 and all(len(v.coordinates) == 26 for v in verts)
    assert verts[0].coordinates == (0,) * 26
    only_c1 = cat.TRIPARTITE.space().point([(0, 0), (0, 0), (1, 0)])
    assert verts[only_c1].coordinates == (0, 0, 0, 0, 1) + (0,) * 21


def test_vertices_have_product_structure():
    mat = poly.vertex_matrix(cat.TRIPARTITE)
    coords = cat.coordinate_order(cat.TRIPARTITE)
    single = {c[0]: i for i, c in enumerate(coords) if len(c) == 1}
    for i, c in enumerate(coords):
        expect = np.ones(64, dtype=np.int64)
        for site in c:
            expect &= mat[:, single[site]]
        assert np.array_equal(mat[:, i], expect)
    assert set(np.unique(mat)) <= {0, 1}


def test_vertex_cap():
    class Wide:  # bypasses Scenario's own limits: 21 observables
        settings = (3,) * 7
        parties = 7

    with pytest.raises(SizeError):
        poly.vertex_matrix(Wide(), coordinates=())


def test_validate():
    assert poly.validate(CHM) == (0, 1, True)
    lo, _, ok = poly.validate(cat.make_named("three_site_ch"))
    assert lo == 0 and ok
    flipped = cat.BellInequality("flipped", CHM.scenario, CHM.coordinates,
                                 tuple(-c for c in CHM.coefficients), 0)
    lo, hi, ok = poly.validate(flipped)
    assert (lo, hi, ok) == (-1, 0, False)


def test_chm_facets():
    lower = poly.tightness(CHM, "lower")
    upper = poly.tightness(CHM, "upper")
    assert (lower.saturating_count, lower.rank, lower.required_rank, lower.is_facet) == (32, 25, 25, True)
    assert (upper.saturating_count, upper.rank, upper.required_rank, upper.is_facet) == (32, 26, 26, True)
    assert upper.bound_value == 1


def test_three_site_facet():
    rep = poly.tightness(cat.make_named("three_site_ch"), "lower")
    assert rep.is_facet and rep.rank == 25


def test_bound_selection():
    with pytest.raises(ValueError):
        poly.tightness(cat.make_named("three_site_ch"), "upper")
    with pytest.raises(ValueError):
        poly.tightness(CHM, "middle")


def test_table_iii_rows_are_saturating_and_independent():
    rows = _golden("table3.csv")
    assert len(rows) == 25
    saturating = set(poly.saturating_vertices(CHM, "lower"))
    assert all(r in saturating for r in rows)
    assert poly.bareiss_rank(rows) == 25
    # the null vertex saturates a bound-0 facet without adding rank
    assert poly.bareiss_rank(rows + [(0,) * 26]) == 25


def test_table_iv_rows_are_saturating_and_independent():
    rows = _golden("table4.csv")
    assert len(rows) == 26
    # Row 25 of the printed table carries a stray A2C2 entry although C2 = 0
    # in that row; no vertex has that pattern. The corrected row is the
    # vertex with only A1 and A2 detected.
    printed = rows[24]
    assert printed == (1, 1) + (0,) * 15 + (1,) + (0,) * 8
    assert printed not in {v.coordinates for v in poly.enumerate_vertices(cat.TRIPARTITE)}
    rows[24] = (1, 1) + (0,) * 24
    saturating = set(poly.saturating_vertices(CHM, "upper"))
    assert all(r in saturating for r in rows)
    assert poly.bareiss_rank(rows) == 26


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 2 ** 32 - 1))
def test_bareiss_matches_float_rank(nrows, ncols, seed):
    rng = np.random.default_rng(seed)
    base = rng.integers(-3, 4, size=(nrows, max(1, ncols // 2)))
    mix = rng.integers(-2, 3, size=(max(1, ncols // 2), ncols))
    m = base @ mix
    assert poly.bareiss_rank(m.tolist()) == np.linalg.matrix_rank(m.astype(float))


def test_bareiss_edge_cases():
    assert poly.bareiss_rank([]) == 0
    assert poly.bareiss_rank([[0, 0], [0, 0]]) == 0
    assert poly.bareiss_rank([[10 ** 30, 1], [1, 0]]) == 2


def test_facet_report_json():
    data = poly.tightness(CHM).to_json()
    assert data["bound_value"] == "0/1" and data["rank"] == 25
    assert poly.tightness(CHM).dumps().endswith("}\n")


def test_vertex_values_exact():
    vals = poly.vertex_values(CHM)
    assert all(isinstance(v, Fraction) for v in vals)
    assert min(vals) == 0 and max(vals) == 1
