import cvxpy as cp
import numpy as np
import pytest

from freespec.errors import CapacityError
from freespec.linalg import ScalarField, random_hermitian
from freespec.sdp import (Feasibility, LmiProblem, SdpProblem, SolverConfig, Status, check_solution,
                          feasibility, solve)


def _random_instance(rng, n, m, field=ScalarField.REAL):
    """Strictly primal and dual feasible standard-form instance."""
    As = [random_hermitian(n, rng, field) for _ in range(m)]
    G = random_hermitian(n, rng, field)
    X0 = G @ G.conj().T + np.eye(n)
    G = random_hermitian(n, rng, field)
    Z0 = G @ G.conj().T + np.eye(n)
    y0 = rng.standard_normal(m)
    b = np.array([np.real(np.trace(A @ X0)) for A in As])
    C = Z0 + sum(y * A for y, A in zip(y0, As))
    return As, b, C


def _cvxpy_value(As, b, C, field):
    n = C.shape[0]
    X = cp.Variable((n, n), hermitian=True) if field is ScalarField.COMPLEX else cp.Variable((n, n), symmetric=True)
    re = cp.real if field is ScalarField.COMPLEX else (lambda e: e)
    cons = [X >> 0] + [re(cp.trace(A @ X)) == bj for A, bj in zip(As, b)]
    prob = cp.Problem(cp.Minimize(re(cp.trace(C @ X))), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


@pytest.mark.parametrize("field", [ScalarField.REAL, ScalarField.COMPLEX])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_solve_matches_cvxpy(field, seed):
    rng = np.random.default_rng(seed)
    As, b, C = _random_instance(rng, 4, 5, field)
    p = SdpProblem("min")
    blk = p.add_block(4, field)
    for A, bj in zip(As, b):
        p.add_constraint({blk: A}, bj)
    p.set_objective({blk: C})
    sol = solve(p)
    assert sol.status is Status.OPTIMAL
    assert sol.check.ok and sol.check.weak_duality_ok
    ref = _cvxpy_value(As, b, C, field)
    assert sol.objective == pytest.approx(ref, rel=1e-6, abs=1e-6)
    assert sol.dual_objective == pytest.approx(ref, rel=1e-6, abs=1e-6)


def test_block_diagonal_problem_and_max_sense():
    # max tr(X1) + tr(X2) with tr(X1) + 2 tr(X2) = 1 -> put all weight on block 1
    p = SdpProblem("max")
    b1, b2 = p.add_block(2), p.add_block(3)
    p.add_constraint({b1: np.eye(2), b2: 2 * np.eye(3)}, 1.0)
    p.set_objective({b1: np.eye(2), b2: np.eye(3)})
    sol = solve(p)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(1.0, abs=1e-7)


def test_entry_constraints():
    # X ⪰ 0, X[0,0] = X[1,1] = 1, maximize X[0,1] -> 1
    p = SdpProblem("max")
    blk = p.add_block(2)
    p.add_entry_constraint([(blk, 0, 0, 1.0)], 1.0)
    p.add_entry_constraint([(blk, 1, 1, 1.0)], 1.0)
    p.add_objective_entries([(blk, 0, 1, 1.0)])
    sol = solve(p)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(1.0, abs=1e-7)


def test_infeasible_problem_detected():
    p = SdpProblem("min")
    blk = p.add_block(2)
    p.add_constraint({blk: np.eye(2)}, -1.0)
    p.set_objective({blk: np.eye(2)})
    assert solve(p).status is Status.INFEASIBLE
    assert feasibility(p).verdict is Feasibility.INFEASIBLE


def test_inconsistent_empty_constraint():
    p = SdpProblem("min")
    blk = p.add_block(2)
    p.add_entry_constraint([(blk, 0, 1, 1.0, "im")], 1.0)
    assert p.inconsistent
    assert solve(p).status is Status.INFEASIBLE


def test_feasibility_witness_satisfies_constraints():
    rng = np.random.default_rng(7)
    As, b, _ = _random_instance(rng, 3, 4)
    p = SdpProblem("min")
    blk = p.add_block(3)
    for A, bj in zip(As, b):
        p.add_constraint({blk: A}, bj)
    res = feasibility(p)
    assert res.verdict is Feasibility.FEASIBLE
    X = res.witness[blk]
    assert np.linalg.eigvalsh(X).min() >= -1e-8
    assert max(abs(np.trace(A @ X) - bj) for A, bj in zip(As, b)) <= 1e-7


def test_checker_rejects_tampered_solution():
    rng = np.random.default_rng(3)
    As, b, C = _random_instance(rng, 3, 3)
    p = SdpProblem("min")
    blk = p.add_block(3)
    for A, bj in zip(As, b):
        p.add_constraint({blk: A}, bj)
    p.set_objective({blk: C})
    sol = solve(p)
    assert check_solution(p, sol.X_real, sol.y).ok
    bad = [sol.X_real[0] + 1e-3 * np.eye(3)]
    assert not check_solution(p, bad, sol.y).ok
    assert not check_solution(p, sol.X_real, sol.y + 1e-2).ok


def test_lmi_problem_disk():
    # max x subject to [[1, x], [x, 1]] ⪰ 0 -> x = 1
    lmi = LmiProblem(1, "max")
    lmi.add_lmi(np.eye(2), {0: np.array([[0.0, 1.0], [1.0, 0.0]])})
    lmi.set_objective([1.0])
    sol = lmi.solve()
    assert sol.optimal
    assert sol.value == pytest.approx(1.0, abs=1e-7)
    assert sol.bound == pytest.approx(1.0, abs=1e-7)
    assert np.linalg.eigvalsh(sol.slacks[0]).min() >= -1e-7


def test_lmi_linear_constraint_and_min_sense():
    # min x + y over the unit disk: inactive bound x >= -0.9, then active bound x >= -0.1
    lmi = LmiProblem(2, "min")
    lmi.add_lmi(np.eye(2), {0: np.diag([1.0, -1.0]), 1: np.array([[0.0, 1.0], [1.0, 0.0]])})
    lmi.add_linear_le({0: -1.0}, 0.9)
    lmi.set_objective([1.0, 1.0])
    sol = lmi.solve()
    assert sol.value == pytest.approx(-np.sqrt(2), abs=1e-7)
    lmi2 = LmiProblem(2, "min")
    lmi2.add_lmi(np.eye(2), {0: np.diag([1.0, -1.0]), 1: np.array([[0.0, 1.0], [1.0, 0.0]])})
    lmi2.add_linear_le({0: -1.0}, 0.1)   # x >= -0.1
    lmi2.set_objective([1.0, 1.0])
    assert lmi2.solve().value == pytest.approx(-0.1 - np.sqrt(1 - 0.01), abs=1e-7)


def test_capacity_cap():
    p = SdpProblem("min")
    p.add_block(50)
    with pytest.raises(CapacityError) as exc:
        solve(p, SolverConfig(max_dim=10))
    assert exc.value.required == 50 and exc.value.cap == 10


def test_sdpa_dump_header():
    p = SdpProblem("max")
    b1 = p.add_block(2)
    b2 = p.add_block(1, ScalarField.COMPLEX)
    p.add_constraint({b1: np.eye(2)}, 1.0)
    p.add_constraint({b2: np.eye(1)}, 2.0)
    p.set_objective({b1: np.eye(2)})
    lines = p.to_sdpa().splitlines()
    assert lines[1] == "2 = mDIM"
    assert lines[2] == "2 = nBLOCK"
    assert lines[3] == "2 2 = bLOCKsTRUCT"
    assert lines[4].split() == ["1", "2"]
    # objective negated for the max sense
    assert "0 1 1 1 -1" in lines
