import math

import numpy as np
import pytest

from freespec.errors import DomainError
from freespec.extremal import (Verdict, classify, classify_cartesian, family_theta, irreducible,
                               sample_extreme, simplex_interval_complex_example, simplex_square_example)
from freespec.linalg import MatrixTuple, ScalarField, SIGMA_X, SIGMA_Y, SIGMA_Z
from freespec.pencils import Membership, cartesian, catalog, membership
from freespec.inclusion import four_lines_witness


def test_level_one_vertex_is_free_extreme():
    r = classify(catalog("square"), MatrixTuple.from_vector([1.0, 1.0]))
    assert r.euclidean is Verdict.YES and r.matrix is Verdict.YES
    assert r.arveson is Verdict.YES and r.free is Verdict.YES


def test_edge_midpoint_is_not_extreme():
    r = classify(catalog("square"), MatrixTuple.from_vector([1.0, 0.0]))
    assert r.euclidean is Verdict.NO
    assert r.matrix is Verdict.NO and r.free is Verdict.NO


def test_reducible_point_is_not_free_extreme():
    # direct sum of two vertices: Euclidean extreme, but reducible
    X = MatrixTuple.of([np.diag([1.0, -1.0]), np.diag([1.0, 1.0])])
    r = classify(catalog("square"), X)
    assert r.euclidean is Verdict.YES
    assert r.irreducible is Verdict.NO
    assert r.free is Verdict.NO


def test_pauli_pair_in_matrix_square():
    # (σ_Z, σ_X) is a free extreme point of the matrix square
    r = classify(catalog("square"), MatrixTuple.of([SIGMA_Z, SIGMA_X]))
    assert r.free is Verdict.YES


def test_family_x_at_pi_over_2_is_free_extreme():
    r = classify(catalog("simplex_Ak", 2), family_theta("X", math.pi / 2, 2))
    assert r.free is Verdict.YES
    assert membership(catalog("simplex_Ak", 2), family_theta("X", math.pi / 2, 2)).status is Membership.BOUNDARY


def test_family_domain_errors():
    with pytest.raises(DomainError):
        family_theta("Q", 0.1)
    with pytest.raises(DomainError):
        family_theta("Y", 0.1, 3)
    with pytest.raises(DomainError):
        family_theta("X", -0.5)


def test_simplex_square_example_matrix_not_arveson():
    A, B, X, Y = simplex_square_example()
    assert membership(cartesian(A, B), MatrixTuple.of(list(X.items) + list(Y.items))).contained
    r = classify_cartesian(A, B, X, Y)
    assert r.matrix is Verdict.YES
    assert r.arveson is Verdict.NO
    assert r.free is Verdict.NO


def test_complex_pair_extreme_over_c_only():
    A, B, X, Y = simplex_interval_complex_example()
    P = cartesian(A, B)
    XY = MatrixTuple.of(list(X.items) + list(Y.items), ScalarField.COMPLEX)
    assert classify(P, XY).matrix is Verdict.YES
    assert classify(P, XY.real_embedding()).matrix is Verdict.NO


def test_four_lines_x_is_free_extreme_in_complex_cube():
    X, _ = four_lines_witness()
    r = classify(catalog("cube", 4), X, field=ScalarField.COMPLEX)
    assert r.free is Verdict.YES


def test_arveson_routes_agree_on_named_points():
    A, B, X, Y = simplex_square_example()
    r = classify_cartesian(A, B, X, Y)
    for part in ("x", "y"):
        ev = r.evidence[part]
        assert ev["arveson_kernel"] == ev["arveson_dilation"] != "undecided"
    assert r.evidence["x"]["arveson_kernel"] == "no"


def test_irreducibility():
    assert irreducible(MatrixTuple.of([SIGMA_Z, SIGMA_X])).verdict is Verdict.YES
    assert irreducible(MatrixTuple.of([np.diag([1.0, 2.0]), np.diag([0.0, 1.0])])).verdict is Verdict.NO
    # (σ_Z, σ_Y) is irreducible over C; its real embedding commutes with the complex structure
    Z = MatrixTuple.of([SIGMA_Z, SIGMA_Y], ScalarField.COMPLEX)
    assert irreducible(Z).verdict is Verdict.YES
    assert irreducible(Z.real_embedding()).verdict is Verdict.NO


@pytest.mark.parametrize("cid, params", [("square", None), ("simplex_Ak", 2), ("cube", 3)])
def test_sampled_points_respect_the_extremality_hierarchy(cid, params):
    A = catalog(cid, params)
    for seed in range(6):
        X = sample_extreme(A, 2, seed)
        assert membership(A, X, 1e-6).contained
        r = classify(A, X, tol=1e-6, seed=seed, rank_tol=1e-8)
        assert r.euclidean is not Verdict.NO
        if r.free is Verdict.YES:
            assert r.matrix is Verdict.YES
        if r.matrix is Verdict.YES:
            assert r.euclidean is Verdict.YES


def test_sampling_is_seeded():
    A = catalog("square")
    assert sample_extreme(A, 2, 11).allclose(sample_extreme(A, 2, 11), atol=0.0)
    assert not sample_extreme(A, 2, 11).allclose(sample_extreme(A, 2, 12), atol=1e-3)
