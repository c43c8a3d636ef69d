import math

import numpy as np
import pytest

from freespec.errors import CapacityError, DomainError
from freespec.hierarchy import (CommutativePoly, NcPolynomial, RewriteSystem, build_lasserre, build_npa,
                                check_line_simplex_point, extracted_tuple, lasserre_bloch, line_simplex_problem,
                                npa_line_simplex, solve_relaxation)
from freespec.inclusion import gamma_closed_form
from freespec.sdp import Status

V = NcPolynomial.var
ONE = NcPolynomial.const(1.0)


def test_nc_polynomial_algebra():
    p = V(0) * V(1) + 2.0
    assert p.degree == 2
    assert p.adjoint().as_dict == {(): 2.0, (1, 0): 1.0}
    assert not p.is_symmetric()
    assert (0.5 * (p + p.adjoint())).is_symmetric()
    assert V(0).commutator(V(0)).as_dict == {}


def test_commutative_poly_evaluate():
    x = CommutativePoly.var(2, 0)
    y = CommutativePoly.var(2, 1)
    f = x * x + 3.0 * x * y - 1.0
    assert f.degree == 2
    assert f.evaluate([2.0, 1.0]) == pytest.approx(4 + 6 - 1)


def test_rewrite_commuting_involutions_is_confluent():
    rs = RewriteSystem.from_equalities([V(0) * V(0) - ONE, V(1) * V(1) - ONE, V(0).commutator(V(1))])
    assert rs.critical_pairs()
    assert rs.is_confluent()
    assert rs.reduce_word((1, 0, 1, 0, 0)) == {(0,): 1.0}
    assert rs.is_reduced((0, 1)) and not rs.is_reduced((1, 0))


def test_rewrite_detects_non_confluence():
    rs = RewriteSystem.from_equalities([V(0) * V(1) - V(2), V(1) * V(1) - V(3)])
    assert not rs.is_confluent()


@pytest.mark.parametrize("k", [2, 3, 4])
def test_line_simplex_rewrite_system_is_confluent(k):
    _, _, eqs, _, _ = line_simplex_problem(k)
    assert RewriteSystem.from_equalities(eqs).is_confluent()


def test_npa_tsirelson_bound():
    a0, a1, b0, b1 = (V(i) for i in range(4))
    obj = a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1
    obj = 0.5 * (obj + obj.adjoint())
    eqs = [a * a - ONE for a in (a0, a1, b0, b1)] + [a.commutator(b) for a in (a0, a1) for b in (b0, b1)]
    r = solve_relaxation(build_npa(obj, [], eqs, 1))
    assert r.status is Status.OPTIMAL
    assert r.value == pytest.approx(2 * math.sqrt(2), abs=1e-6)


def test_lasserre_disk():
    x = CommutativePoly.var(2, 0)
    y = CommutativePoly.var(2, 1)
    r = solve_relaxation(build_lasserre(x + y, [CommutativePoly.const(2, 1.0) - x * x - y * y], 1))
    assert r.value == pytest.approx(math.sqrt(2), abs=1e-6)
    assert r.unit == pytest.approx(1.0, abs=1e-9)


def test_level_validation_and_caps():
    with pytest.raises(DomainError):
        npa_line_simplex(3, 0)
    with pytest.raises(CapacityError):
        npa_line_simplex(3, 3, basis_cap=20)
    with pytest.raises(DomainError):
        build_npa(V(0) * V(1), [], [], 1)


def test_npa_line_simplex_levels():
    results = [solve_relaxation(npa_line_simplex(3, level)) for level in (1, 2)]
    values = [r.value for r in results]
    assert all(r.status is Status.OPTIMAL for r in results)
    assert values[1] <= values[0] + 1e-6
    assert values[0] == pytest.approx(1.4919423, abs=1e-5)
    assert values[1] == pytest.approx(gamma_closed_form(2), abs=1e-6)
    for r in results:
        assert r.min_eigenvalue >= -1e-7
        assert r.unit == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("g, target", [(2, math.sqrt(2)), (4, math.sqrt(13) / 2)])
def test_lasserre_bloch_dominates_witness(g, target):
    results = [solve_relaxation(lasserre_bloch(g, level)) for level in (1, 2)]
    assert results[1].value <= results[0].value + 1e-6
    assert all(min(r.value, r.bound) >= target - 1e-6 for r in results)


def test_extracted_tuple_is_optimal_point():
    pc = check_line_simplex_point(extracted_tuple())
    assert pc.ok
    assert pc.value == pytest.approx(gamma_closed_form(2), abs=1e-9)
    mats = extracted_tuple()
    assert all(m.shape == (12, 12) for m in mats.values())


def test_extracted_tuple_as_printed_violates_constraints():
    pc = check_line_simplex_point(extracted_tuple(as_printed=True))
    assert not pc.ok
    assert pc.min_constraint_eig < -1e-3


def test_relaxation_summary():
    r = npa_line_simplex(2, 1)
    s = r.summary()
    assert s["kind"] == "npa" and s["level"] == 1
    assert s["basis_size"] == r.basis_size == len(r.basis)
    assert np.all(np.asarray(s["block_sizes"]) > 0)
