import math

import cvxpy as cp
import numpy as np
import pytest

from freespec.errors import ArityError, DomainError
from freespec.extremal import family_theta, sample_extreme
from freespec.inclusion import (alternative_feasible_point, feasible_point, four_lines_witness, gamma_closed_form,
                                hkm_inclusion, max_inclusion_scale, min_ball_gamma, pairing_value,
                                s_closed_form, theta_scan, verify_feasible_point, witness_tuples)
from freespec.linalg import MatrixTuple, SIGMA_X, SIGMA_Z
from freespec.pencils import LinearPencil, Membership, catalog, membership
from freespec.sdp import Feasibility


def _cvxpy_scale(A: LinearPencil, B: LinearPencil) -> float:
    """Largest s with s·D_A ⊆ D_B via the Choi matrix, written directly in cvxpy."""
    d, D = A.d, B.d
    C = cp.Variable((d * D, d * D), symmetric=True)
    s = cp.Variable()
    blk = lambda p, q: C[p * D:(p + 1) * D, q * D:(q + 1) * D]
    cons = [C >> 0, sum(blk(p, p) for p in range(d)) == np.eye(D)]
    for Ai, Bi in zip(A.A.items, B.A.items):
        cons.append(sum(Ai[p, q] * blk(p, q) for p in range(d) for q in range(d) if Ai[p, q] != 0) == s * Bi)
    prob = cp.Problem(cp.Maximize(s), cons)
    prob.solve(solver=cp.CLARABEL)
    return s.value


def _cvxpy_min_ball(X: MatrixTuple, V: np.ndarray) -> float:
    n = X.n
    Cs = [cp.Variable((n, n), symmetric=True) for _ in V]
    gam = cp.Variable()
    cons = [C >> 0 for C in Cs] + [sum(Cs) == gam * np.eye(n)]
    cons += [sum(v[i] * C for v, C in zip(V, Cs)) == X[i] for i in range(X.g)]
    prob = cp.Problem(cp.Minimize(gam), cons)
    prob.solve(solver=cp.CLARABEL)
    return gam.value


def test_closed_forms_are_reciprocal():
    for k in range(1, 12):
        assert gamma_closed_form(k) * s_closed_form(k) == pytest.approx(1.0, abs=1e-14)
    assert gamma_closed_form(1) == pytest.approx(math.sqrt(2))
    assert gamma_closed_form(2) == pytest.approx(4 / (1 + math.sqrt(3)))
    assert gamma_closed_form(3) == pytest.approx(1.5)
    with pytest.raises(DomainError):
        gamma_closed_form(0)


@pytest.mark.parametrize("k", range(1, 11))
def test_witness_pairing(k):
    X, Y = witness_tuples(k)
    assert pairing_value(X, Y) == pytest.approx(gamma_closed_form(k), abs=1e-9)


def test_four_lines_pairing():
    X, Y = four_lines_witness()
    assert pairing_value(X, Y) == pytest.approx(math.sqrt(13) / 2, abs=1e-9)
    assert membership(catalog("cube", 4), X).contained


def test_diamond_in_square_but_not_conversely():
    assert hkm_inclusion(catalog("diamond", 2), catalog("square")).verdict is Feasibility.FEASIBLE
    cert = hkm_inclusion(catalog("square"), catalog("diamond", 2))
    assert cert.verdict is Feasibility.INFEASIBLE


def test_inclusion_certificate_residuals():
    cert = hkm_inclusion(catalog("diamond", 2), catalog("square"))
    assert cert.residuals["unital"] <= 1e-7
    assert cert.residuals["mapping"] <= 1e-7
    assert cert.residuals["min_eig"] >= -1e-7


@pytest.mark.parametrize("g", [2, 3])
def test_cube_into_diamond_scale_is_level_one_value(g):
    # the matrix diamond is the largest matrix convex set over the l1 ball,
    # so the free scale equals the level-1 scale 1/g
    assert max_inclusion_scale(catalog("cube", g), catalog("diamond", g)).s == pytest.approx(1 / g, abs=1e-6)


def test_scale_matches_cvxpy_for_spin_disk():
    disk = LinearPencil.from_matrices([SIGMA_Z, SIGMA_X])
    res = max_inclusion_scale(catalog("square"), disk)
    assert res.s == pytest.approx(_cvxpy_scale(catalog("square"), disk), abs=1e-5)
    assert res.upper >= res.s - 1e-7


def test_arity_mismatch():
    with pytest.raises(ArityError):
        hkm_inclusion(catalog("square"), catalog("cube", 3))


def test_min_ball_of_pauli_pair():
    X = MatrixTuple.of([SIGMA_Z, SIGMA_X])
    assert min_ball_gamma(X, catalog("square")).gamma == pytest.approx(math.sqrt(2), abs=1e-6)
    assert min_ball_gamma(X, catalog("diamond", 2)).gamma == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_min_ball_matches_cvxpy_on_sampled_points(seed):
    A = catalog("simplex_Ak", 2)
    X = sample_extreme(A, 2, seed)
    cert = min_ball_gamma(X, A.vertices)
    assert cert.gamma == pytest.approx(_cvxpy_min_ball(X, A.vertices.array()), abs=1e-5)
    assert 1.0 - 1e-6 <= cert.gamma <= gamma_closed_form(2) + 1e-6
    assert cert.residuals["equality"] <= 1e-7 and cert.residuals["min_eig"] >= -1e-7


def test_min_ball_requires_interior_origin():
    with pytest.raises(DomainError):
        min_ball_gamma(MatrixTuple.from_vector([0.5]), np.array([[1.0], [2.0]]))


@pytest.mark.parametrize("k", [2, 3, 5, 8])
@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 8, 1.0, math.pi / 2])
def test_feasible_points_verify(k, theta):
    chk = verify_feasible_point(feasible_point(k, theta))
    assert chk.ok, chk


def test_k2_branches_overlap_at_pi_over_8():
    for branch in ("low", "high"):
        assert verify_feasible_point(feasible_point(2, math.pi / 8, branch)).ok
    with pytest.raises(DomainError):
        feasible_point(2, 1.0, "low")
    with pytest.raises(DomainError):
        feasible_point(2, 0.1, "high")


def test_feasible_point_bounds_family_constant():
    # the explicit point certifies γ_X(θ) <= γ(k); the SDP value must not exceed it
    for theta in (0.2, 1.2):
        X = family_theta("X", theta, 2)
        assert min_ball_gamma(X, catalog("simplex_Ak", 2)).gamma <= gamma_closed_form(2) + 1e-6


def test_alternative_point_equalities_hold():
    fp = alternative_feasible_point(1.0)
    chk = verify_feasible_point(fp)
    assert chk.max_residual <= 1e-10


def test_theta_scan_small_grid():
    scan = theta_scan(3, 9)
    assert scan.best_gamma == pytest.approx(1.5, abs=1e-6)
    assert membership(catalog("simplex_Ak", 2), family_theta("X", 0.7, 2)).status is Membership.BOUNDARY
