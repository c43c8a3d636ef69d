"""Quantum measurements: POVMs, compatibility, and compatibility degrees.

A family of POVMs ``E_{·|x}`` (``x = 1..g``, ``k_x`` outcomes each) is
*compatible* if it has a joint POVM ``J`` over ``[k_1]×…×[k_g]`` whose
marginals reproduce every ``E_{i|x}``.  Writing the effects as observables
``A_{i|x} = 2E_{i|x} - (2/k_x) I`` (``i < k_x``), compatibility is
equivalent to the inclusion of the matrix jewel ``D_jewel(k)`` in ``D_A``,
which gives an independent second test.

The *compatibility degree* ``s(E)`` is the largest white-noise level ``s``
for which ``sE_i + (1-s)I/k`` is compatible.  The minimum of ``s(E)`` over
all families in dimension ``d`` equals ``1/λ*`` where ``λ*`` maximizes
``λ_max(Σ A_{i|x} ⊗ X_{i|x})`` over POVM observables ``A`` and jewel points
``X``; :func:`min_compat_degree_seesaw` attacks that problem by alternating
maximization.  For dichotomic qubit measurements the same problem becomes a
geometric problem on Bloch vectors (:func:`qubit_bloch_value`).
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CapacityError, DomainError, FieldError, NumericalFailure
from .extremal import Verdict, hermitian_basis
from .inclusion import _add_mapping, hkm_inclusion
from .linalg import (MatrixTuple, ScalarField, SIGMA_X, SIGMA_Y, SIGMA_Z, decode_matrix, encode_matrix,
                     kron, lambda_max)
from .pencils import LinearPencil, catalog
from .sdp import Feasibility, LmiProblem, SdpProblem, SolverConfig, Status, feasibility, solve

log = logging.getLogger(__name__)

POVM_TOL = 1e-8
MARGINAL_TOL = 1e-7
JOINT_OUTCOME_CAP = 4096


# ---------------------------------------------------------------------------
# POVMs


@dataclass
class Povm:
    """A ``d``-dimensional POVM: PSD effects summing to the identity.

    Zero effects are allowed (outcome lists padded with zeros).
    """
    d: int
    effects: list

    def __post_init__(self):
        if not self.effects:
            raise DomainError("a POVM needs at least one effect")
        effs = []
        for E in self.effects:
            E = np.asarray(E)
            if E.shape != (self.d, self.d):
                raise DomainError(f"effect of shape {E.shape} in a {self.d}-dimensional POVM")
            if not np.allclose(E, E.conj().T, atol=POVM_TOL):
                raise DomainError("POVM effects must be self-adjoint")
            E = 0.5 * (E + E.conj().T)
            if np.linalg.eigvalsh(E).min() < -POVM_TOL:
                raise DomainError("POVM effects must be positive semidefinite")
            effs.append(E)
        if np.max(np.abs(sum(effs) - np.eye(self.d))) > POVM_TOL:
            raise DomainError("POVM effects must sum to the identity")
        self.effects = effs

    @property
    def k(self) -> int:
        return len(self.effects)

    @property
    def field(self) -> ScalarField:
        return ScalarField.join(*(ScalarField.of(E) for E in self.effects))

    def noisy(self, s: float) -> "Povm":
        """White-noise version ``s E_i + (1 - s) I / k``."""
        return Povm(self.d, [s * E + (1 - s) * np.eye(self.d) / self.k for E in self.effects])

    def to_json(self) -> dict:
        return {"d": self.d, "effects": [encode_matrix(E) for E in self.effects]}

    @classmethod
    def from_json(cls, data: dict) -> "Povm":
        return cls(int(data["d"]), [decode_matrix(E) for E in data["effects"]])


@dataclass
class MeasurementSet:
    """``g`` POVMs on the same ``d``-dimensional space."""
    povms: list

    def __post_init__(self):
        if not self.povms:
            raise DomainError("a measurement set needs at least one POVM")
        self.povms = [p if isinstance(p, Povm) else Povm(len(p[0]), list(p)) for p in self.povms]
        ds = {p.d for p in self.povms}
        if len(ds) != 1:
            raise DomainError(f"POVMs of different dimensions {sorted(ds)}")

    @property
    def d(self) -> int:
        return self.povms[0].d

    @property
    def g(self) -> int:
        return len(self.povms)

    @property
    def ks(self) -> tuple:
        return tuple(p.k for p in self.povms)

    @property
    def field(self) -> ScalarField:
        return ScalarField.join(*(p.field for p in self.povms))

    def noisy(self, s: float) -> "MeasurementSet":
        return MeasurementSet([p.noisy(s) for p in self.povms])

    def to_json(self) -> dict:
        return {"d": self.d, "povms": [p.to_json()["effects"] for p in self.povms]}

    @classmethod
    def from_json(cls, data: dict) -> "MeasurementSet":
        d = int(data["d"])
        if "povms" in data:
            return cls([Povm(d, [decode_matrix(E) for E in effs]) for effs in data["povms"]])
        return cls([Povm(d, [decode_matrix(E) for E in data["effects"]])])


def effects_to_observables(E: MeasurementSet) -> MatrixTuple:
    """``A_{i|x} = 2E_{i|x} - (2/k_x) I`` for ``i < k_x``, ordered by ``x`` then ``i``.

    One-outcome POVMs contribute no observables; a set made only of those
    maps to the empty tuple, which is reported as a :class:`DomainError`.
    """
    mats = []
    for p in E.povms:
        for Ei in p.effects[:-1]:
            mats.append(2 * Ei - (2.0 / p.k) * np.eye(p.d))
    if not mats:
        raise DomainError("measurements with a single outcome have no observables")
    return MatrixTuple.of(mats)


def observables_to_effects(A: MatrixTuple, ks) -> MeasurementSet:
    """Inverse of :func:`effects_to_observables`; validates the POVM conditions."""
    ks = tuple(int(k) for k in ks)
    if sum(k - 1 for k in ks) != A.g:
        raise DomainError(f"{A.g} observables do not match outcome counts {ks}")
    d = A.n
    povms, pos = [], 0
    for k in ks:
        effs = [0.5 * A[pos + i] + np.eye(d) / k for i in range(k - 1)]
        effs.append(np.eye(d) - sum(effs) if effs else np.eye(d))
        povms.append(Povm(d, effs))
        pos += k - 1
    return MeasurementSet(povms)


def _jewel_ks(ks) -> tuple:
    return tuple(k for k in ks if k > 1)


# ---------------------------------------------------------------------------
# joint measurability


@dataclass
class CompatReport:
    compatible: Verdict
    joint: dict | None = None          # outcome tuple -> joint effect
    degree: float | None = None
    method: str = "joint-sdp"
    evidence: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"compatible": self.compatible.value, "method": self.method, "degree": self.degree,
               "evidence": self.evidence}
        if self.joint is not None:
            out["joint"] = {",".join(map(str, j)): encode_matrix(J) for j, J in self.joint.items()}
        return out


def _joint_problem(E: MeasurementSet, with_noise: bool, field: ScalarField):
    """Joint-POVM SDP: blocks ``J_j ⪰ 0`` for ``j ∈ Π[k_x]`` and optional noise level ``s``.

    Constraints: ``Σ_j J_j = I`` and, for every ``x`` and ``i < k_x``,
    ``Σ_{j: j_x = i} J_j = s E_{i|x} + (1 - s) I/k_x`` (``s = 1`` without noise).
    """
    ks = E.ks
    n_out = math.prod(ks)
    if n_out > JOINT_OUTCOME_CAP:
        raise CapacityError(f"joint POVM with {n_out} outcomes exceeds the cap {JOINT_OUTCOME_CAP}",
                            required=n_out, cap=JOINT_OUTCOME_CAP)
    if field is ScalarField.REAL and E.field is ScalarField.COMPLEX:
        raise FieldError("a complex measurement set has no real joint POVM")
    d = E.d
    p = SdpProblem("max")
    outcomes = list(itertools.product(*(range(k) for k in ks)))
    blocks = {j: p.add_block(d, field) for j in outcomes}
    cplx = field is ScalarField.COMPLEX
    _add_mapping(p, [(blocks[j], 1.0, 0, 0) for j in outcomes], np.eye(d), complex_=cplx)
    s_blk = None
    if with_noise:
        s_blk = p.add_block(1)
        u_blk = p.add_block(1)
        p.add_constraint({s_blk: np.eye(1), u_blk: np.eye(1)}, 1.0)
    for x, pv in enumerate(E.povms):
        for i in range(pv.k - 1):
            terms = [(blocks[j], 1.0, 0, 0) for j in outcomes if j[x] == i]
            base = np.eye(d) / pv.k
            if with_noise:
                _add_mapping(p, terms, base, (s_blk, pv.effects[i] - base), cplx)
            else:
                _add_mapping(p, terms, pv.effects[i], complex_=cplx)
    return p, blocks, s_blk


def _marginal_error(E: MeasurementSet, joint: dict, s: float = 1.0) -> float:
    err = 0.0
    for x, pv in enumerate(E.povms):
        for i in range(pv.k):
            target = s * pv.effects[i] + (1 - s) * np.eye(E.d) / pv.k
            marg = sum(J for j, J in joint.items() if j[x] == i)
            err = max(err, float(np.max(np.abs(marg - target))))
    return err


def joint_povm(E: MeasurementSet, field: ScalarField | None = None, cfg: SolverConfig | None = None):
    """Search for a joint POVM; returns ``(Feasibility, joint dict or None)``."""
    field = field or ScalarField.COMPLEX
    p, blocks, _ = _joint_problem(E, False, field)
    # Σ tr J_j = d on the feasible set, so a tight phase-I trace bound keeps it well scaled
    res = feasibility(p, cfg, trace_bound=10.0 * (E.d + 1))
    if res.verdict is not Feasibility.FEASIBLE:
        return res.verdict, None
    joint = {j: res.witness[b] for j, b in blocks.items()}
    if _marginal_error(E, joint) > MARGINAL_TOL:
        return Feasibility.UNDECIDED, None
    return res.verdict, joint


def _verdict(f: Feasibility) -> Verdict:
    return {Feasibility.FEASIBLE: Verdict.YES, Feasibility.INFEASIBLE: Verdict.NO}.get(f, Verdict.UNDECIDED)


def is_compatible(E: MeasurementSet, field: ScalarField | None = None,
                  cfg: SolverConfig | None = None) -> CompatReport:
    """Decide compatibility by the joint-POVM SDP, cross-checked by jewel inclusion.

    The jewel test ``D_jewel(k) ⊆ D_A`` works over the field of the
    observables; it is skipped in the real-restricted mode, where the real
    joint POVM is the only route.
    """
    field = field or ScalarField.COMPLEX
    primary, joint = joint_povm(E, field, cfg)
    v1 = _verdict(primary)
    evidence = {"joint_sdp": v1.value}
    jks = _jewel_ks(E.ks)
    if not jks:
        # only trivial measurements: the identity is its own joint POVM
        return CompatReport(Verdict.YES, joint, method="joint-sdp", evidence=evidence)
    if field is ScalarField.REAL:
        return CompatReport(v1, joint, method="joint-sdp", evidence=evidence)
    A = effects_to_observables(E)
    try:
        cert = hkm_inclusion(catalog("jewel", list(jks)), LinearPencil.from_matrices(A.items), cfg)
        v2 = _verdict(cert.verdict)
    except CapacityError:
        v2 = Verdict.UNDECIDED
    evidence["jewel_inclusion"] = v2.value
    if v1 is v2:
        return CompatReport(v1, joint, method="joint-sdp+jewel-inclusion", evidence=evidence)
    log.warning("compatibility routes disagree: joint %s, jewel %s", v1.value, v2.value)
    return CompatReport(Verdict.UNDECIDED, None, method="joint-sdp+jewel-inclusion", evidence=evidence)


@dataclass
class DegreeResult:
    s: float
    upper: float                  # certified bound from the dual
    joint: dict
    marginal_error: float
    status: Status


def compatibility_degree(E: MeasurementSet, field: ScalarField | None = None,
                         cfg: SolverConfig | None = None) -> DegreeResult:
    """``s(E) = max{s ∈ [0, 1] : sE + (1-s)I/k compatible}`` as one SDP.

    The noisy marginal constraints are affine in ``(s, J)`` jointly.  With
    ``field=REAL`` the joint POVM is restricted to real matrices.
    """
    field = field or ScalarField.COMPLEX
    p, blocks, s_blk = _joint_problem(E, True, field)
    p.set_objective({s_blk: np.eye(1)}, "max")
    sol = solve(p, cfg)
    if sol.status is not Status.OPTIMAL:
        raise NumericalFailure(f"compatibility-degree SDP ended with status {sol.status.value}")
    s = float(sol.X[s_blk][0, 0].real)
    joint = {j: sol.X[b] for j, b in blocks.items()}
    return DegreeResult(s, float(sol.dual_objective), joint, _marginal_error(E, joint, s), sol.status)


# ---------------------------------------------------------------------------
# see-saw for the minimum compatibility degree


def _jewel_rows(ks) -> np.ndarray:
    """Rows ``(-2/k_x + 2 δ_{i, j_x})`` for ``j ∈ Π[k_x]``, columns ordered by ``x`` then ``i``."""
    rows = []
    for j in itertools.product(*(range(k) for k in ks)):
        r = []
        for x, k in enumerate(ks):
            r += [-2.0 / k + (2.0 if i == j[x] else 0.0) for i in range(k - 1)]
        rows.append(r)
    return np.array(rows)


def _random_povm(d: int, k: int, rng: np.random.Generator, field: ScalarField) -> list:
    """Random PSD effects normalized to sum to the identity."""
    gs = []
    for _ in range(k):
        G = rng.standard_normal((d, d))
        if field is ScalarField.COMPLEX:
            G = G + 1j * rng.standard_normal((d, d))
        gs.append(G @ G.conj().T)
    S = sum(gs)
    w, V = np.linalg.eigh(S)
    Sih = (V / np.sqrt(w)) @ V.conj().T
    return [Sih @ G @ Sih for G in gs]


def _observables_from_povms(povms) -> list:
    out = []
    for effs in povms:
        k, d = len(effs), effs[0].shape[0]
        out += [2 * E - (2.0 / k) * np.eye(d) for E in effs[:-1]]
    return out


def _top_vector(M: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(M)
    return V[:, -1]


def _a_step(Psi: np.ndarray, Xs: list, ks, field: ScalarField, cfg: SolverConfig) -> list:
    """Best POVMs for fixed ``ψ`` and ``X``: one small SDP per measurement."""
    d = Psi.shape[0]
    povms, pos = [], 0
    for k in ks:
        p = SdpProblem("max")
        blks = [p.add_block(d, field) for _ in range(k)]
        _add_mapping(p, [(b, 1.0, 0, 0) for b in blks], np.eye(d), complex_=field is ScalarField.COMPLEX)
        # <ψ, (A ⊗ X) ψ> = tr(A R) with R = Ψ Xᵀ Ψ*, and A_i = 2E_i - (2/k) I
        obj = {}
        for i in range(k - 1):
            R = Psi @ Xs[pos + i].T @ Psi.conj().T
            R = 0.5 * (R + R.conj().T)
            obj[blks[i]] = 2 * (R if field is ScalarField.COMPLEX else R.real)
        if obj:
            p.set_objective(obj, "max")
            sol = solve(p, cfg)
            effs = [sol.X[b] for b in blks]
        else:
            effs = [np.eye(d)]
        povms.append(_clean_povm(effs, field))
        pos += k - 1
    return povms


def _clean_povm(effs: list, field: ScalarField) -> list:
    """Project solver output back onto the POVM set (clip tiny negative parts, renormalize)."""
    out = []
    for E in effs:
        E = 0.5 * (E + E.conj().T)
        if field is ScalarField.REAL:
            E = E.real
        w, V = np.linalg.eigh(E)
        out.append((V * np.clip(w, 0, None)) @ V.conj().T)
    S = sum(out)
    w, V = np.linalg.eigh(S)
    Sih = (V / np.sqrt(w)) @ V.conj().T
    return [Sih @ E @ Sih for E in out]


def _x_step(Psi: np.ndarray, As: list, ks, field: ScalarField, cfg: SolverConfig) -> list:
    """Best jewel point ``X ∈ D_jewel(d)`` for fixed ``ψ`` and ``A`` (one LMI problem)."""
    d = Psi.shape[0]
    basis = hermitian_basis(d, field)
    N = len(basis)
    nv = len(As) * N
    c = np.zeros(nv)
    for a, A in enumerate(As):
        # <ψ, (A ⊗ X) ψ> = tr(X Q) with Q = Ψᵀ Aᵀ conj(Ψ)
        Q = Psi.T @ A.T @ Psi.conj()
        for b, B in enumerate(basis):
            c[a * N + b] = float(np.real(np.trace(B @ Q)))
    lmi = LmiProblem(nv, "max")
    for row in _jewel_rows(ks):
        Fs = {}
        for a, coeff in enumerate(row):
            for b, B in enumerate(basis):
                Fs[a * N + b] = -coeff * B
        lmi.add_lmi(np.eye(d), Fs, field)
    lmi.set_objective(c)
    sol = lmi.solve(cfg)
    Xs = []
    for a in range(len(As)):
        X = sum(sol.y[a * N + b] * B for b, B in enumerate(basis))
        Xs.append(X)
    # shrink into the jewel if the solver landed marginally outside
    worst = max(lambda_max(sum(coeff * X for coeff, X in zip(row, Xs))) for row in _jewel_rows(ks))
    if worst > 1.0:
        Xs = [X / worst for X in Xs]
    return Xs


def seesaw_objective(As: list, Xs: list) -> float:
    return lambda_max(sum(kron(A, X) for A, X in zip(As, Xs)))


@dataclass
class SeesawRun:
    seed: int
    value: float
    iterations: int
    history: list


@dataclass
class SeesawResult:
    value: float                  # best λ_max found, a lower bound on 1/s(d, g, k)
    s_upper: float                # 1/value, an upper bound on s(d, g, k)
    observables: list
    X: list
    psi: np.ndarray
    runs: list
    best_seed: int

    def to_json(self) -> dict:
        return {"value": self.value, "s_upper": self.s_upper, "best_seed": self.best_seed,
                "runs": [{"seed": r.seed, "value": r.value, "iterations": r.iterations} for r in self.runs]}


def _seesaw_run(args):
    d, ks, seed, field, max_iter, stall_tol, stall_iters = args
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(gap_tol=1e-10, feas_tol=1e-10)
    povms = [_random_povm(d, k, rng, field) for k in ks]
    As = _observables_from_povms(povms)
    psi = rng.standard_normal(d * d)
    if field is ScalarField.COMPLEX:
        psi = psi + 1j * rng.standard_normal(d * d)
    psi /= np.linalg.norm(psi)
    Xs = _x_step(psi.reshape(d, d), As, ks, field, cfg)
    history = [seesaw_objective(As, Xs)]
    best = (history[0], As, Xs, psi)
    it = 0
    for it in range(1, max_iter + 1):
        psi = _top_vector(sum(kron(A, X) for A, X in zip(As, Xs)))
        As = _observables_from_povms(_a_step(psi.reshape(d, d), Xs, ks, field, cfg))
        psi = _top_vector(sum(kron(A, X) for A, X in zip(As, Xs)))
        Xs = _x_step(psi.reshape(d, d), As, ks, field, cfg)
        val = seesaw_objective(As, Xs)
        history.append(val)
        if val > best[0]:
            best = (val, As, Xs, psi)
        if len(history) > stall_iters and history[-1] - history[-1 - stall_iters] < stall_tol:
            break
    val, As, Xs, psi = best
    psi = _top_vector(sum(kron(A, X) for A, X in zip(As, Xs)))
    return SeesawRun(seed, val, it, history), As, Xs, psi


def min_compat_degree_seesaw(d: int, g: int, ks, restarts: int = 20, seed: int = 0,
                             field: ScalarField | None = None, jobs: int = 1, max_iter: int = 300,
                             stall_tol: float = 1e-9, stall_iters: int = 5) -> SeesawResult:
    """Alternating maximization of ``λ_max(Σ A_{i|x} ⊗ X_{i|x})``.

    Each round (i) takes the top eigenvector ``ψ``, (ii) optimizes the POVMs
    for fixed ``ψ, X`` and (iii) optimizes ``X`` over the jewel for fixed
    ``ψ, A``.  A run stops once the objective improved by less than
    ``stall_tol`` over ``stall_iters`` rounds.  Restart ``r`` uses seed
    ``seed + r``; the best value wins, ties going to the lowest seed.  The
    value is a lower bound on ``1/s(d, g, k)``.
    """
    ks = tuple(int(k) for k in ks)
    if len(ks) != g:
        raise DomainError(f"{len(ks)} outcome counts for g = {g}")
    if any(k < 1 for k in ks) or d < 1:
        raise DomainError("dimensions and outcome counts must be positive")
    if all(k == 1 for k in ks):
        raise DomainError("at least one measurement must have two or more outcomes")
    field = field or ScalarField.COMPLEX
    args = [(d, ks, seed + r, field, max_iter, stall_tol, stall_iters) for r in range(restarts)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_seesaw_run, args))
    else:
        results = [_seesaw_run(a) for a in args]
    best = None
    for run, As, Xs, psi in results:
        if best is None or run.value > best[0].value + 1e-12:
            best = (run, As, Xs, psi)
        if run.value < results[0][0].value - 1e-6:
            log.debug("restart with seed %d ended at %.9f", run.seed, run.value)
    run, As, Xs, psi = best
    return SeesawResult(run.value, 1.0 / run.value, As, Xs, psi, [r[0] for r in results], run.seed)


# ---------------------------------------------------------------------------
# dichotomic qubits: Bloch-vector formulation


def _sign_vectors(g: int, halve: bool = True):
    """All sign vectors ``ε ∈ {±1}^g``; with ``halve`` only those with ``ε_1 = +1``."""
    for tail in itertools.product((1, -1), repeat=g - 1):
        yield (1,) + tail
        if not halve:
            yield (-1,) + tuple(-t for t in tail)


@dataclass
class BlochValue:
    value: float                  # Σ ‖x_i‖
    feasible: bool
    max_constraint: float         # max_ε ‖Σ ε_i x_i‖
    tight_signs: list             # sign patterns attaining the maximum (ε_1 = +1)


def qubit_bloch_value(xs, tol: float = 1e-9) -> BlochValue:
    """Objective ``Σ‖x_i‖`` and the sign constraints ``‖Σ ε_i x_i‖ <= 1``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != 3:
        raise DomainError("Bloch vectors must be real 3-vectors")
    g = xs.shape[0]
    norms = {eps: float(np.linalg.norm(np.asarray(eps) @ xs)) for eps in _sign_vectors(g)}
    worst = max(norms.values())
    tight = [list(e) for e, v in norms.items() if abs(v - worst) <= 1e-9]
    return BlochValue(float(np.linalg.norm(xs, axis=1).sum()), worst <= 1 + tol, worst, tight)


@dataclass
class GramCheck:
    ok: bool
    psd: bool
    rank: int
    max_constraint: float


def gram_check(G, tol: float = 1e-9) -> GramCheck:
    """Gram-matrix form: ``G ⪰ 0``, ``rank G <= 3`` and ``εᵀ G ε <= 1`` for all signs."""
    G = np.asarray(G, dtype=float)
    w = np.linalg.eigvalsh(G)
    psd = w.min() >= -tol
    rank = int(np.sum(w > tol * max(1.0, w.max())))
    worst = max(float(np.asarray(e) @ G @ np.asarray(e)) for e in _sign_vectors(G.shape[0]))
    return GramCheck(psd and rank <= 3 and worst <= 1 + tol, psd, rank, worst)


def bloch_to_measurements(xs) -> MeasurementSet:
    """Qubit POVMs whose observables ``A_i = 2E_i - I`` have Bloch vectors ``x_i``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    povms = []
    for x in xs:
        if np.linalg.norm(x) > 1 + 1e-12:
            raise DomainError("Bloch vectors of effects must have norm at most 1")
        A = x[0] * SIGMA_X + x[1] * SIGMA_Y + x[2] * SIGMA_Z
        povms.append(Povm(2, [0.5 * (np.eye(2) + A), 0.5 * (np.eye(2) - A)]))
    return MeasurementSet(povms)


def four_qubit_bloch_witness() -> np.ndarray:
    """``x_1 = (0, 0, 2/√13)``, ``x_j = 3/(2√13)·(cos 2πj/3, sin 2πj/3, 0)`` for ``j = 1..3``."""
    r = 3.0 / (2.0 * math.sqrt(13.0))
    xs = [[0.0, 0.0, 2.0 / math.sqrt(13.0)]]
    xs += [[r * math.cos(2 * math.pi * j / 3), r * math.sin(2 * math.pi * j / 3), 0.0] for j in range(1, 4)]
    return np.array(xs)


def _bloch_x_step(a: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Maximize ``Σ <a_i, x_i>`` subject to ``‖Σ ε_i x_i‖ <= 1`` for all signs (an SOCP as LMIs)."""
    g = a.shape[0]
    lmi = LmiProblem(3 * g, "max")
    for eps in _sign_vectors(g):
        # [[1, vᵀ], [v, I_3]] ⪰ 0  <=>  ‖v‖ <= 1, with v = Σ ε_i x_i
        F0 = np.eye(4)
        Fs = {}
        for i, e in enumerate(eps):
            for c in range(3):
                F = np.zeros((4, 4))
                F[0, c + 1] = F[c + 1, 0] = e
                Fs[3 * i + c] = F
        lmi.add_lmi(F0, Fs, ScalarField.REAL)
    lmi.set_objective(a.reshape(-1))
    sol = lmi.solve(cfg)
    x = sol.y.reshape(g, 3)
    worst = max(np.linalg.norm(np.asarray(e) @ x) for e in _sign_vectors(g))
    return x / max(1.0, worst)


@dataclass
class BlochSeesawResult:
    value: float
    xs: np.ndarray
    values: list                  # best value per restart


def qubit_bloch_seesaw(g: int, restarts: int = 10, seed: int = 0, max_iter: int = 200,
                       stall_tol: float = 1e-10, stall_iters: int = 5) -> BlochSeesawResult:
    """See-saw over unit vectors ``a_i`` and Bloch vectors ``x_i``.

    For fixed ``x`` the best ``a_i`` is ``x_i/‖x_i‖``; for fixed ``a`` the
    ``x``-problem is a second-order cone program.  The value is a lower
    bound on ``1/s(2, g)`` for dichotomic qubit measurements.
    """
    if g < 1:
        raise DomainError("g must be positive")
    cfg = SolverConfig(gap_tol=1e-10, feas_tol=1e-10)
    best_val, best_x, values = -np.inf, None, []
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        a = rng.standard_normal((g, 3))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        hist = []
        x = None
        for _ in range(max_iter):
            x = _bloch_x_step(a, cfg)
            hist.append(float(np.sum(a * x)))
            n = np.linalg.norm(x, axis=1)
            a = np.where(n[:, None] > 1e-12, x / np.maximum(n, 1e-300)[:, None], a)
            if len(hist) > stall_iters and hist[-1] - hist[-1 - stall_iters] < stall_tol:
                break
        val = qubit_bloch_value(x).value
        values.append(val)
        if val > best_val + 1e-12:
            best_val, best_x = val, x
    return BlochSeesawResult(best_val, best_x, values)


# ---------------------------------------------------------------------------
# closed-form bounds


@dataclass
class BoundEntry:
    item: int
    kind: str                     # "lower", "upper", "exact" or "relation"
    value: float | None
    note: str


@dataclass
class BoundTable:
    d: int
    g: int
    ks: tuple
    entries: list
    lower: float
    upper: float

    def to_json(self) -> dict:
        return {"d": self.d, "g": self.g, "ks": list(self.ks), "lower": self.lower, "upper": self.upper,
                "entries": [e.__dict__ for e in self.entries]}


def tau(d: int) -> float:
    """``τ(d) = 4^{-n} C(2n, n)`` with ``n = ⌊d/2⌋``."""
    n = d // 2
    return math.comb(2 * n, n) / 4 ** n


def known_bounds(d: int, g: int, ks=None) -> BoundTable:
    """Closed-form bounds on the minimum compatibility degree ``s(d, g, k)``.

    Items are numbered 1–11: structural relations (1–5) are listed for
    reference; numeric lower bounds (6, 8–11) and the exact value (7) are
    evaluated when applicable.  Upper bounds come from item 7 combined with
    monotonicity in ``k`` and ``g`` (items 3, 5).
    """
    if d < 1 or g < 1:
        raise DomainError("d and g must be positive")
    ks = tuple(int(k) for k in (ks if ks is not None else (2,) * g))
    if len(ks) != g or any(k < 1 for k in ks):
        raise DomainError(f"outcome counts {ks} do not fit g = {g}")
    nontrivial = tuple(sorted((k for k in ks if k > 1), reverse=True))
    ge = len(nontrivial)
    entries = [
        BoundEntry(1, "relation", None, "invariant under permuting the measurements"),
        BoundEntry(2, "relation", None, f"one-outcome measurements can be dropped: reduces to g = {ge}, k = {nontrivial}"),
        BoundEntry(3, "relation", None, "non-increasing when any outcome count grows"),
        BoundEntry(4, "relation", None, "non-increasing in the dimension d"),
        BoundEntry(5, "relation", None, "non-increasing in the number of dichotomic measurements g"),
    ]
    if ge == 0:
        entries.append(BoundEntry(2, "exact", 1.0, "only trivial measurements"))
        return BoundTable(d, g, ks, entries, 1.0, 1.0)
    if d == 1:
        entries.append(BoundEntry(4, "exact", 1.0, "classical (1-dimensional) measurements are compatible"))
        return BoundTable(d, g, ks, entries, 1.0, 1.0)
    dich = all(k == 2 for k in nontrivial)
    lowers, uppers = [1.0 / ge], [1.0]
    entries.append(BoundEntry(9, "lower", 1.0 / ge, "s >= 1/g"))
    kmax = max(nontrivial)
    v10 = (ge + kmax * d) / (ge * (1 + kmax * d))
    entries.append(BoundEntry(10, "lower", v10, "(g + k_max d)/(g (1 + k_max d))"))
    lowers.append(v10)
    if dich:
        v6 = 1.0 / math.sqrt(ge)
        entries.append(BoundEntry(6, "lower", v6, "dichotomic: s >= 1/√g"))
        lowers.append(v6)
        entries.append(BoundEntry(8, "lower", tau(d), "dichotomic: s >= τ(d)"))
        lowers.append(tau(d))
        if d >= 2 ** math.ceil((ge - 1) / 2):
            entries.append(BoundEntry(7, "exact", v6, "dichotomic, d >= 2^⌈(g-1)/2⌉: s = 1/√g"))
            uppers.append(v6)
    if ge == 2:
        k1, k2 = nontrivial
        v11 = 0.5 * (1 + 1 / (math.sqrt(k1 * k2) + 1))
        entries.append(BoundEntry(11, "lower", v11, "g = 2: ½(1 + 1/(√(k_1k_2)+1))"))
        lowers.append(v11)
    # upper bounds: every k_x >= 2, so by item 3 s(d,g,k) <= s(d,g,(2..2)); item 5
    # lets us drop to any g' <= g; item 7 evaluates the largest admissible g'
    gp = max(gg for gg in range(1, ge + 1) if d >= 2 ** math.ceil((gg - 1) / 2))
    if gp >= 2 and not (dich and gp == ge):
        entries.append(BoundEntry(7, "upper", 1.0 / math.sqrt(gp),
                                  f"items 3, 5, 7: s <= s(d, {gp}, (2,…,2)) = 1/√{gp}"))
        uppers.append(1.0 / math.sqrt(gp))
    return BoundTable(d, g, ks, entries, max(lowers), min(uppers))


# ---------------------------------------------------------------------------
# witness measurements


def _proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    P = np.outer(v, v.conj())
    return P.real if np.allclose(P.imag, 0) else P


def witness_measurements(kind: str, k: int | None = None) -> MeasurementSet:
    """Named maximally incompatible families.

    * ``two_plus_k``: Hadamard basis together with the computational basis
      padded with ``k - 1`` zero effects (``k + 1`` outcomes); degree
      ``(k - 1 + √(k+1))/(2k)``.
    * ``four_qubit``: four projective qubit measurements, the last two with
      phases ``e^{±2πi/3}``; degree ``2/√13``.
    """
    if kind == "two_plus_k":
        if k is None or k < 1:
            raise DomainError("two_plus_k needs k >= 1")
        E = Povm(2, [0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]), 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])])
        F = Povm(2, [np.diag([0.0, 1.0]), np.diag([1.0, 0.0])] + [np.zeros((2, 2)) for _ in range(k - 1)])
        return MeasurementSet([E, F])
    if kind == "four_qubit":
        w = np.exp(2j * np.pi / 3)
        v = np.exp(1j * np.pi / 3)
        E = Povm(2, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        F = Povm(2, [0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]), 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])])
        G = Povm(2, [0.5 * np.array([[1, w], [w.conjugate(), 1]]), 0.5 * np.array([[1, v.conjugate()], [v, 1]])])
        H = Povm(2, [0.5 * np.array([[1, w.conjugate()], [w, 1]]), 0.5 * np.array([[1, v], [v.conjugate(), 1]])])
        return MeasurementSet([E, F, G, H])
    raise DomainError(f"unknown witness family {kind!r}")


def bloch_vectors(E: MeasurementSet) -> np.ndarray:
    """Bloch vectors of the first-effect observables ``2E_{1|x} - I`` of qubit measurements."""
    if E.d != 2:
        raise DomainError("Bloch vectors need qubit measurements")
    out = []
    for p in E.povms:
        A = 2 * p.effects[0] - np.eye(2)
        out.append([float(np.real(np.trace(A @ S))) / 2 for S in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
    return np.array(out)
