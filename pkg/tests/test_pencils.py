import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from freespec.errors import CatalogError, DomainError, UnboundedError
from freespec.linalg import MatrixTuple, SIGMA_X, SIGMA_Z
from freespec.pencils import (CATALOG_IDS, LinearPencil, Membership, cartesian, catalog, direct_sum_pencil,
                              dual_free_polytope, enumerate_vertices, eval_L, facet_rows, level1_bounded,
                              membership, scale_pencil)


@pytest.mark.parametrize("cid, params, d, g, nverts", [
    ("interval", None, 2, 1, 2),
    ("square", None, 4, 2, 4),
    ("cube", 3, 6, 3, 8),
    ("diamond", 3, 8, 3, 6),
    ("jewel", (2, 3), 6, 3, 5),
    ("simplex", 2, 3, 2, 3),
    ("simplex_Ak", 2, 5, 3, 6),
    ("simplex_Ak", 4, 7, 5, 10),
    ("line_simplex_dual_Bk", 3, 8, 4, 6),
    ("simplex_S", 3, 5, 3, 6),
])
def test_catalog_shapes(cid, params, d, g, nverts):
    A = catalog(cid, params)
    assert (A.d, A.g) == (d, g)
    assert A.is_diagonal and A.is_bounded
    assert len(A.vertices) == nverts


@pytest.mark.parametrize("cid, params", [("cube", 2), ("diamond", 2), ("jewel", (3, 3)), ("simplex", 3),
                                         ("simplex_Ak", 3), ("line_simplex_dual_Bk", 2), ("simplex_S", 4)])
def test_stored_vertices_match_exact_enumeration(cid, params):
    A = catalog(cid, params)
    stored = set(A.vertices)
    enumerated = set(enumerate_vertices(LinearPencil.from_rows(A.rows)).vertices)
    assert stored == enumerated


def test_catalog_errors():
    with pytest.raises(CatalogError):
        catalog("nope")
    with pytest.raises(CatalogError):
        catalog("cube")
    with pytest.raises(CatalogError):
        catalog("cube", 0)
    with pytest.raises(CatalogError):
        catalog("simplex_S", 1)
    assert "jewel" in CATALOG_IDS


def test_membership_levels():
    sq = catalog("square")
    assert membership(sq, [0.5, 0.5]).status is Membership.INSIDE
    assert membership(sq, [1.0, 0.3]).status is Membership.BOUNDARY
    assert membership(sq, [1.1, 0.0]).status is Membership.OUTSIDE
    # (σ_Z, σ_X) is in the matrix square but not in the matrix diamond
    X = MatrixTuple.of([SIGMA_Z, SIGMA_X])
    assert membership(sq, X).contained
    assert membership(catalog("diamond", 2), X).status is Membership.OUTSIDE
    assert membership(catalog("diamond", 2), X * (1 / np.sqrt(2))).status is Membership.BOUNDARY


def test_eval_L_is_identity_minus_pencil():
    A = catalog("interval")
    L = eval_L(A, MatrixTuple.of([SIGMA_Z]))
    assert np.allclose(L, np.eye(4) - np.kron(np.diag([1.0, -1.0]), SIGMA_Z))


def test_cartesian_product():
    P = cartesian(catalog("simplex", 2), catalog("interval"))
    assert P.g == 3 and P.d == 5
    assert len(P.vertices) == 6
    assert membership(P, [1.0, 1.0, -1.0]).status is Membership.BOUNDARY
    assert membership(P, [1.0, 1.0, 1.5]).status is Membership.OUTSIDE
    assert set(P.vertices) == set(catalog("simplex_Ak", 2).vertices)


def test_direct_sum_pencil_is_polar_of_product_of_polars():
    S = direct_sum_pencil(catalog("interval"), catalog("interval"))
    assert set(S.rows) == set(catalog("diamond", 2).rows)


def test_scale_pencil():
    A = scale_pencil(catalog("square"), 2)
    assert membership(A, [0.5, 0.5]).status is Membership.BOUNDARY
    assert set(A.vertices) == {(Fraction(a, 2), Fraction(b, 2)) for a, b in itertools.product((1, -1), repeat=2)}
    with pytest.raises(DomainError):
        scale_pencil(catalog("square"), 0)


@pytest.mark.parametrize("cid, params", [("square", None), ("cube", 3), ("simplex", 2), ("simplex_Ak", 2)])
def test_dual_is_involutive_on_level_one(cid, params):
    A = catalog(cid, params)
    D = dual_free_polytope(A)
    assert set(D.vertices) == set(facet_rows(A))
    DD = dual_free_polytope(D)
    assert set(DD.vertices) == set(A.vertices)


def test_dual_of_cube_is_diamond():
    assert set(dual_free_polytope(catalog("cube", 3)).rows) == set(catalog("diamond", 3).rows)


def test_line_simplex_dual_vertices_are_facets_of_A():
    k = 3
    B = catalog("line_simplex_dual_Bk", k)
    assert set(B.vertices) == set(facet_rows(catalog("simplex_Ak", k)))


def test_unbounded_detection():
    half = LinearPencil.from_rows([(1, 0), (0, 1)])
    assert level1_bounded(half) is False
    with pytest.raises(UnboundedError):
        enumerate_vertices(half)


def test_pencil_json_round_trip():
    A = catalog("jewel", (2, 3))
    data = json.loads(json.dumps(A.to_json()))
    B = LinearPencil.from_json(data)
    assert B.A.allclose(A.A, atol=0.0)
    assert set(B.vertices) == set(A.vertices)


def test_non_diagonal_pencil():
    A = LinearPencil.from_matrices([SIGMA_Z, SIGMA_X])
    assert not A.is_diagonal
    # the unit disk: level-1 points of norm <= 1
    assert membership(A, [0.6, 0.8]).status is Membership.BOUNDARY
    assert membership(A, [0.8, 0.8]).status is Membership.OUTSIDE
    with pytest.raises(DomainError):
        A.row_array()
