import itertools
import math

import cvxpy as cp
import numpy as np
import pytest

from freespec.errors import DomainError
from freespec.extremal import Verdict
from freespec.inclusion import s_closed_form
from freespec.linalg import ScalarField
from freespec.quantum import (MeasurementSet, Povm, bloch_to_measurements, bloch_vectors, compatibility_degree,
                              effects_to_observables, four_qubit_bloch_witness, gram_check, is_compatible,
                              known_bounds, min_compat_degree_seesaw, observables_to_effects, qubit_bloch_seesaw,
                              qubit_bloch_value, tau, witness_measurements)


def _cvxpy_degree(E: MeasurementSet) -> float:
    """Compatibility degree from the joint-POVM SDP written directly in cvxpy (complex joint effects)."""
    d, ks = E.d, E.ks
    outcomes = list(itertools.product(*(range(k) for k in ks)))
    J = {j: cp.Variable((d, d), hermitian=True) for j in outcomes}
    s = cp.Variable()
    cons = [Jj >> 0 for Jj in J.values()] + [sum(J.values()) == np.eye(d), s >= 0, s <= 1]
    for x, p in enumerate(E.povms):
        for i in range(p.k):
            cons.append(sum(J[j] for j in outcomes if j[x] == i) == s * p.effects[i] + (1 - s) * np.eye(d) / p.k)
    prob = cp.Problem(cp.Maximize(s), cons)
    prob.solve(solver=cp.CLARABEL)
    return s.value


def test_povm_validation():
    with pytest.raises(DomainError, match="sum to the identity"):
        Povm(2, [np.diag([1.0, 0.0]), np.diag([1.0, 0.0])])
    with pytest.raises(DomainError, match="positive semidefinite"):
        Povm(2, [np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])])
    with pytest.raises(DomainError, match="self-adjoint"):
        Povm(2, [np.array([[0.5, 0.5], [0.0, 0.5]]), np.array([[0.5, -0.5], [0.0, 0.5]])])
    with pytest.raises(DomainError):
        MeasurementSet([Povm(2, [np.eye(2)]), Povm(3, [np.eye(3)])])


def test_observables_round_trip():
    E = witness_measurements("two_plus_k", 3)
    A = effects_to_observables(E)
    assert A.g == 1 + 3
    back = observables_to_effects(A, E.ks)
    for p, q in zip(E.povms, back.povms):
        assert all(np.allclose(a, b) for a, b in zip(p.effects, q.effects))


def test_noisy_povm():
    p = Povm(2, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    q = p.noisy(0.0)
    assert all(np.allclose(e, np.eye(2) / 2) for e in q.effects)


def test_povm_json_round_trip():
    E = witness_measurements("four_qubit")
    F = MeasurementSet.from_json(E.to_json())
    assert F.ks == E.ks and F.field is ScalarField.COMPLEX
    for p, q in zip(E.povms, F.povms):
        assert all(np.allclose(a, b) for a, b in zip(p.effects, q.effects))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_degree_matches_closed_form_and_cvxpy(k):
    E = witness_measurements("two_plus_k", k)
    deg = compatibility_degree(E)
    assert deg.s == pytest.approx(s_closed_form(k), abs=1e-6)
    assert deg.s == pytest.approx(_cvxpy_degree(E), abs=1e-5)
    assert deg.marginal_error <= 1e-7


def test_degree_matches_cvxpy_on_random_qubit_pair(rng):
    xs = rng.standard_normal((2, 3))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    E = bloch_to_measurements(xs)
    assert compatibility_degree(E).s == pytest.approx(_cvxpy_degree(E), abs=1e-5)


def test_degree_one_iff_compatible():
    commuting = MeasurementSet([Povm(2, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]),
                                Povm(2, [np.diag([0.3, 0.6]), np.diag([0.7, 0.4])])])
    assert compatibility_degree(commuting).s == pytest.approx(1.0, abs=1e-6)
    assert is_compatible(commuting).compatible is Verdict.YES
    E = witness_measurements("two_plus_k", 1)
    assert compatibility_degree(E).s < 1 - 1e-3
    assert is_compatible(E).compatible is Verdict.NO


def test_noise_monotonicity():
    E = witness_measurements("two_plus_k", 2)
    s = s_closed_form(2)
    for t in (0.2, s - 1e-3):
        r = is_compatible(E.noisy(t))
        assert r.compatible is Verdict.YES
        assert r.evidence["joint_sdp"] == r.evidence["jewel_inclusion"] == "yes"
    for t in (s + 1e-3, 0.95):
        r = is_compatible(E.noisy(t))
        assert r.compatible is Verdict.NO
        assert r.evidence["joint_sdp"] == r.evidence["jewel_inclusion"] == "no"


def test_real_restricted_mode_skips_jewel_route():
    E = witness_measurements("two_plus_k", 1)
    r = is_compatible(E, field=ScalarField.REAL)
    assert r.compatible is Verdict.NO and "jewel_inclusion" not in r.evidence


def test_four_qubit_degree():
    assert compatibility_degree(witness_measurements("four_qubit")).s == pytest.approx(2 / math.sqrt(13), abs=1e-5)


def test_bloch_witness_value_and_gram_form():
    xs = four_qubit_bloch_witness()
    bv = qubit_bloch_value(xs)
    assert bv.feasible
    assert bv.value == pytest.approx(math.sqrt(13) / 2, abs=1e-12)
    assert gram_check(xs @ xs.T).ok
    assert np.allclose(bloch_vectors(bloch_to_measurements(xs)), xs)


def test_known_bounds_exact_values():
    assert known_bounds(2, 2).lower == pytest.approx(1 / math.sqrt(2))
    assert known_bounds(2, 2).upper == pytest.approx(1 / math.sqrt(2))
    assert known_bounds(1, 3).upper == 1.0
    assert known_bounds(4, 3, (1, 1, 1)).lower == 1.0
    assert tau(2) == pytest.approx(0.5)
    assert tau(4) == pytest.approx(6 / 16)


@pytest.mark.parametrize("d, g", [(2, 2), (2, 3), (3, 2), (4, 3)])
def test_known_bounds_monotone_in_outcome_count(d, g):
    prev = None
    for k in range(2, 6):
        b = known_bounds(d, g, (k,) * g)
        assert b.lower <= b.upper + 1e-12
        if prev is not None:
            # s(d, g, k) is non-increasing in k, so the best upper bound cannot grow
            assert b.upper <= prev.upper + 1e-12
        prev = b


def test_known_bounds_consistent_with_witnesses():
    # the witnesses have degree s(k) >= the proved lower bound for (2, 2, (2, k+1))
    for k in range(1, 6):
        b = known_bounds(2, 2, (2, k + 1))
        assert b.lower <= s_closed_form(k) + 1e-12


def test_seesaw_recovers_qubit_pair_value():
    r = min_compat_degree_seesaw(2, 2, (2, 2), restarts=3, seed=0)
    assert r.value >= math.sqrt(2) - 1e-4
    assert r.value <= math.sqrt(2) + 1e-6
    assert r.s_upper == pytest.approx(1 / r.value)


def test_seesaw_is_deterministic_per_seed():
    a = min_compat_degree_seesaw(2, 2, (2, 2), restarts=2, seed=5)
    b = min_compat_degree_seesaw(2, 2, (2, 2), restarts=2, seed=5)
    assert a.value == b.value and a.best_seed == b.best_seed


def test_bloch_seesaw():
    r = qubit_bloch_seesaw(2, restarts=3)
    assert r.value == pytest.approx(math.sqrt(2), abs=1e-6)
    assert qubit_bloch_value(r.xs).feasible


def test_seesaw_domain_errors():
    with pytest.raises(DomainError):
        min_compat_degree_seesaw(2, 2, (2,))
    with pytest.raises(DomainError):
        min_compat_degree_seesaw(2, 2, (1, 1))
