"""Extreme points of free spectrahedra.

A point ``X ∈ D_A(n)`` is classified through linear systems built on the
kernel ``K`` of ``L_A(X) = I - Σ A_i ⊗ X_i``:

* **Euclidean extreme** iff the only ``W ∈ SM_n^g`` with
  ``(Σ A_i ⊗ W_i) K = 0`` is ``W = 0``;
* **matrix extreme** iff the solutions ``(H, W)`` of
  ``(I ⊗ H - Σ A_i ⊗ W_i) K = 0`` form the one-dimensional real space spanned
  by ``(I, X)``;
* **Arveson extreme** iff the only row vectors ``β_i ∈ F^{1×n}`` with
  ``(Σ A_i ⊗ β_i) K = 0`` are zero.  This is cross-checked against an SDP
  that searches for a nontrivial one-column dilation
  ``[[X_i, β_i^*], [β_i, c_i]] ∈ D_A(n+1)``;
* **free extreme** iff Arveson extreme and irreducible.

Rank decisions that fall into a tolerance band are reported as
``UNDECIDED`` rather than guessed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .errors import ArityError, DomainError, NumericalFailure, UnboundedError
from .linalg import DEFAULT_TOL, MatrixTuple, ScalarField, eig_sym, kron, SIGMA_X, SIGMA_Y, SIGMA_Z
from .pencils import LinearPencil, catalog, eval_L, level1_bounded
from .sdp import LmiProblem, SolverConfig, Status


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"

    def __bool__(self):  # pragma: no cover - guard against accidental truthiness
        raise TypeError("compare verdicts explicitly, e.g. `v is Verdict.YES`")


def _both(a: Verdict, b: Verdict) -> Verdict:
    if a is Verdict.NO or b is Verdict.NO:
        return Verdict.NO
    if a is Verdict.YES and b is Verdict.YES:
        return Verdict.YES
    return Verdict.UNDECIDED


@dataclass
class ExtremeReport:
    euclidean: Verdict
    matrix: Verdict
    arveson: Verdict
    free: Verdict
    irreducible: Verdict
    field: ScalarField
    evidence: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {k: getattr(self, k).value for k in ("euclidean", "matrix", "arveson", "free", "irreducible")}
        out["field"] = self.field.value
        out["evidence"] = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.evidence.items()}
        return out


# ---------------------------------------------------------------------------
# bases and linear systems


def hermitian_basis(n: int, field: ScalarField) -> list:
    """Orthonormal basis of the real vector space of self-adjoint ``n x n`` matrices."""
    dtype = field.dtype
    out = []
    for k in range(n):
        e = np.zeros((n, n), dtype=dtype)
        e[k, k] = 1.0
        out.append(e)
    r = 1.0 / np.sqrt(2.0)
    for k in range(n):
        for l in range(k + 1, n):
            e = np.zeros((n, n), dtype=dtype)
            e[k, l] = e[l, k] = r
            out.append(e)
            if field is ScalarField.COMPLEX:
                e = np.zeros((n, n), dtype=dtype)
                e[k, l] = -1j * r
                e[l, k] = 1j * r
                out.append(e)
    return out


def row_basis(n: int, field: ScalarField) -> list:
    """Basis of ``F^{1×n}`` as a real vector space."""
    out = []
    for k in range(n):
        e = np.zeros((1, n), dtype=field.dtype)
        e[0, k] = 1.0
        out.append(e)
        if field is ScalarField.COMPLEX:
            e = np.zeros((1, n), dtype=field.dtype)
            e[0, k] = 1j
            out.append(e)
    return out


def _realify(cols: list) -> np.ndarray:
    """Stack complex column vectors into a real matrix (real parts over imaginary parts)."""
    M = np.stack([np.asarray(c).reshape(-1) for c in cols], axis=1)
    if np.iscomplexobj(M):
        return np.vstack([M.real, M.imag])
    return M


@dataclass
class NullSpace:
    """Numerical null space with a rank decision."""

    basis: np.ndarray          # columns
    singular_values: np.ndarray
    dim: int
    ambiguous: bool


def null_space_decided(M: np.ndarray, lo: float, hi: float) -> NullSpace:
    """Null space of ``M`` counting singular values ``<= lo·σ_max`` as zero.

    Singular values in ``(lo·σ_max, hi·σ_max)`` make the rank ambiguous.
    """
    ncol = M.shape[1]
    if M.size == 0:
        return NullSpace(np.eye(ncol), np.zeros(0), ncol, False)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    full = np.zeros(ncol)
    full[:len(s)] = s
    scale = max(1.0, float(s[0]) if len(s) else 1.0)
    null = full <= lo * scale
    amb = bool(np.any((full > lo * scale) & (full < hi * scale)))
    return NullSpace(vh[null].conj().T, full, int(np.sum(null)), amb)


@dataclass
class KernelSystem:
    """The kernel of ``L_A(X)`` and the homogeneous systems built on it."""

    kernel: np.ndarray
    kernel_eigs: np.ndarray
    ambiguous_kernel: bool
    margin: float


def pencil_kernel(A: LinearPencil, X: MatrixTuple, tol: float) -> KernelSystem:
    L = eval_L(A, X)
    e = eig_sym(L)
    scale = max(1.0, float(np.max(np.abs(e.values))))
    mask = np.abs(e.values) <= tol * scale
    amb = bool(np.any((np.abs(e.values) > tol * scale) & (np.abs(e.values) <= 100 * tol * scale)))
    return KernelSystem(e.vectors[:, mask], e.values[mask], amb, float(e.values[0]))


def _systems(pencils, points, K_list, field: ScalarField, shared_h: bool = True):
    """Coefficient matrices of the matrix-extreme and Euclidean systems.

    For several (pencil, point, kernel) triples with a shared ``H`` (the
    Cartesian-product case) the blocks are stacked.
    """
    n = points[0].n
    basis = hermitian_basis(n, field)
    N = len(basis)
    g_total = sum(p.g for p in pencils)
    rows_full = []
    for idx, (A, K) in enumerate(zip(pencils, K_list)):
        d = A.d
        r = K.shape[1]
        if r == 0:
            continue
        cols = []
        # H columns
        for E in basis:
            cols.append(kron(np.eye(d), E) @ K)
        # W columns for all pencils; only this pencil's own W enters its block
        for jdx, B in enumerate(pencils):
            for Ai in B.A.items:
                for E in basis:
                    if jdx == idx:
                        cols.append(-kron(Ai, E) @ K)
                    else:
                        cols.append(np.zeros((d * n, r)))
        rows_full.append(_realify(cols))
    ncols = N * (1 + g_total)
    if rows_full:
        full = np.vstack(rows_full)
    else:
        full = np.zeros((0, ncols))
    return full, basis


def _arveson_system(A: LinearPencil, n: int, K: np.ndarray, field: ScalarField) -> np.ndarray:
    basis = row_basis(n, field)
    cols = []
    for Ai in A.A.items:
        for e in basis:
            cols.append(kron(Ai, e) @ K)
    if K.shape[1] == 0:
        return np.zeros((0, len(cols)))
    return _realify(cols)


def _dilation_value(A: LinearPencil, X: MatrixTuple, field: ScalarField, R: np.ndarray, eps: float,
                    cfg: SolverConfig) -> float:
    """Extent of the one-column dilation set of the relaxed point in direction ``R``.

    Maximizes ``<R, β>`` subject to
    ``[[L_A(X) + εI, -Λ_A(β)^*], [-Λ_A(β), I_d]] ⪰ 0``.  Without the shift
    the set is symmetric in ``β`` and has value 0 iff no nontrivial dilation
    exists, but it is then not strictly feasible; the shift restores strict
    feasibility and the scaling in ``ε`` separates the two cases: the value
    decays like ``√ε`` when no dilation exists and stays bounded below when
    one does.
    """
    n, d = X.n, A.d
    L = eval_L(A, X)
    basis = row_basis(n, field)
    size = d * n + d
    F0 = np.zeros((size, size), dtype=field.dtype)
    F0[:d * n, :d * n] = L + eps * np.eye(d * n)
    F0[d * n:, d * n:] = np.eye(d)
    Fs = {}
    j = 0
    for Ai in A.A.items:
        for e in basis:
            B = kron(Ai, e)        # d x dn
            F = np.zeros((size, size), dtype=field.dtype)
            F[d * n:, :d * n] = -B
            F[:d * n, d * n:] = -B.conj().T
            Fs[j] = F
            j += 1
    lmi = LmiProblem(len(Fs), "max")
    lmi.add_lmi(F0, Fs, field)
    lmi.set_objective(R)
    sol = lmi.solve(cfg)
    if sol.status is not Status.OPTIMAL:
        return float("nan")
    return sol.value


#: shifts used by the dilation test
DILATION_SHIFTS = (1e-4, 1e-6)


def dilation_test(A: LinearPencil, X: MatrixTuple, field: ScalarField, seed: int = 0,
                  cfg: SolverConfig | None = None) -> tuple:
    """SDP route to Arveson extremality.  Returns ``(verdict, values)``."""
    rng = np.random.default_rng(seed)
    nb = len(row_basis(X.n, field))
    R = rng.standard_normal(A.g * nb)
    R /= np.linalg.norm(R)
    cfg = cfg or SolverConfig()
    vals = [_dilation_value(A, X, field, R, eps, cfg) for eps in DILATION_SHIFTS]
    if any(np.isnan(v) for v in vals):
        return Verdict.UNDECIDED, vals
    # fit v(ε) ≈ v0 + c·√ε and decide on the extrapolated extent v0
    r1, r2 = np.sqrt(DILATION_SHIFTS)
    v1, v2 = vals
    if v1 <= 0:
        return Verdict.UNDECIDED, vals
    v0 = (v2 * r1 - v1 * r2) / (r1 - r2)
    if v0 <= 0.05 * v1:
        return Verdict.YES, vals
    if v0 >= 0.2 * v1:
        return Verdict.NO, vals
    return Verdict.UNDECIDED, vals


# ---------------------------------------------------------------------------
# irreducibility


@dataclass
class IrreducibilityResult:
    verdict: Verdict
    projection: np.ndarray | None
    commutant_dim: int


def irreducible(X: MatrixTuple, tol: float = 1e-9, field: ScalarField | None = None) -> IrreducibilityResult:
    """Irreducibility via the self-adjoint part of the commutant.

    Over ``ℂ`` this space is ``ℝ·I`` iff the commutant is ``ℂ·I``; over ``ℝ``
    only symmetric commutant elements are considered.  On ``NO`` a reducing
    orthogonal projection (a spectral projection of a generic self-adjoint
    commutant element) is returned.
    """
    field = field or X.field
    n = X.n
    basis = hermitian_basis(n, field)
    cols = []
    for E in basis:
        cols.append(np.concatenate([(E @ Xi - Xi @ E).reshape(-1) for Xi in X.items]))
    M = _realify(cols)
    ns = null_space_decided(M, tol, 1e3 * tol)
    if ns.ambiguous:
        return IrreducibilityResult(Verdict.UNDECIDED, None, ns.dim)
    if ns.dim <= 1:
        return IrreducibilityResult(Verdict.YES, None, ns.dim)
    rng = np.random.default_rng(12345)
    coeffs = ns.basis @ rng.standard_normal(ns.dim)
    T = sum(c * E for c, E in zip(coeffs, basis))
    e = eig_sym(T)
    vals = e.values
    gaps = np.diff(vals)
    cut = int(np.argmax(gaps)) + 1
    V = e.vectors[:, :cut]
    return IrreducibilityResult(Verdict.NO, V @ V.conj().T, ns.dim)


# ---------------------------------------------------------------------------
# classification


def _check_domain(A: LinearPencil, X: MatrixTuple):
    if A.g != X.g:
        raise ArityError(f"pencil arity {A.g} vs tuple arity {X.g}")
    bounded = A.is_bounded
    if bounded is None and A.is_diagonal:
        bounded = level1_bounded(A)
    if bounded is False:
        raise UnboundedError("classification requires a bounded free spectrahedron")


def _rank_tolerances(tol: float):
    """Null / ambiguous singular-value thresholds for the kernel systems."""
    return 1e3 * tol, 1e5 * tol


def classify(A: LinearPencil, X: MatrixTuple, tol: float = DEFAULT_TOL, field: ScalarField | None = None,
             seed: int = 0, dilation_check: bool = True, cfg: SolverConfig | None = None,
             rank_tol: float | None = None) -> ExtremeReport:
    """Classify ``X ∈ D_A`` as Euclidean / matrix / Arveson / free extreme.

    ``tol`` is the relative eigenvalue threshold defining ``ker L_A(X)``;
    ``rank_tol`` (default ``tol``) sets the rank thresholds of the kernel
    systems and the irreducibility test.  Points produced by an SDP solver
    carry kernel eigenvalues at solver accuracy, so a looser ``tol`` with a
    tight ``rank_tol`` suits them (see ``SAMPLE_KERNEL_TOL``).
    Over ``ℂ`` solution spaces are real spaces of self-adjoint tuples.
    """
    field = field or ScalarField.join(X.field, A.field)
    _check_domain(A, X)
    if field is ScalarField.REAL and X.field is ScalarField.COMPLEX:
        raise DomainError("a complex tuple cannot be classified over the reals; use its real embedding")
    ks = pencil_kernel(A, X, tol)
    if ks.margin < -tol * max(1.0, abs(ks.margin)) and ks.kernel.shape[1] == 0:
        raise DomainError(f"point lies outside D_A (margin {ks.margin:.3e})")
    if ks.margin < -100 * tol:
        raise DomainError(f"point lies outside D_A (margin {ks.margin:.3e})")
    rt = tol if rank_tol is None else rank_tol
    irr = irreducible(X, max(rt, 1e-9), field)
    evidence = {"kernel_dim": int(ks.kernel.shape[1]), "margin": ks.margin,
                "commutant_dim": irr.commutant_dim}
    U = Verdict.UNDECIDED
    if ks.ambiguous_kernel:
        evidence["note"] = "eigenvalues of L_A(X) inside the tolerance band"
        return ExtremeReport(U, U, U, U, irr.verdict, field, evidence)
    if ks.kernel.shape[1] == 0:
        N = Verdict.NO
        return ExtremeReport(N, N, N, N, irr.verdict, field, evidence)
    lo, hi = _rank_tolerances(rt)

    full, basis = _systems([A], [X], [ks.kernel], field)
    Nb = len(basis)
    mat_ns = null_space_decided(full, lo, hi)
    euc_ns = null_space_decided(full[:, Nb:], lo, hi)
    arv_ns = null_space_decided(_arveson_system(A, X.n, ks.kernel, field), lo, hi)
    evidence.update({"matrix_solution_dim": mat_ns.dim, "euclidean_solution_dim": euc_ns.dim,
                     "arveson_solution_dim": arv_ns.dim})

    euclid = U if euc_ns.ambiguous else (Verdict.YES if euc_ns.dim == 0 else Verdict.NO)
    matrix = U if mat_ns.ambiguous else (Verdict.YES if mat_ns.dim == 1 else Verdict.NO)
    if mat_ns.dim == 0 and not mat_ns.ambiguous:
        # (I, X) always solves the system; losing it means the kernel is unreliable
        matrix = U
    arv_kernel = U if arv_ns.ambiguous else (Verdict.YES if arv_ns.dim == 0 else Verdict.NO)

    arveson = arv_kernel
    if dilation_check:
        arv_sdp, vals = dilation_test(A, X, field, seed, cfg)
        evidence["dilation_values"] = vals
        evidence["arveson_kernel"] = arv_kernel.value
        evidence["arveson_dilation"] = arv_sdp.value
        arveson = arv_kernel if arv_kernel is arv_sdp else U
    # consistency of the hierarchy (Euclidean ⊇ matrix)
    if matrix is Verdict.YES and euclid is not Verdict.YES:
        matrix = U
    free = _both(arveson, irr.verdict)
    if free is Verdict.YES and matrix is not Verdict.YES:
        evidence["note"] = "free verdict without matrix verdict; marked undecided"
        free = U
    return ExtremeReport(euclid, matrix, arveson, free, irr.verdict, field, evidence)


def classify_cartesian(A: LinearPencil, B: LinearPencil, X: MatrixTuple, Y: MatrixTuple,
                       tol: float = DEFAULT_TOL, field: ScalarField | None = None, seed: int = 0,
                       dilation_check: bool = True, cfg: SolverConfig | None = None,
                       rank_tol: float | None = None) -> ExtremeReport:
    """Classify ``(X, Y) ∈ D_A × D_B``.

    Euclidean and Arveson verdicts are componentwise; matrix extremality
    solves the joint system with a shared ``H`` and separate ``W``, ``Z``.
    """
    if X.n != Y.n:
        raise DomainError("components must have the same level")
    field = field or ScalarField.join(X.field, Y.field, A.field, B.field)
    rt = tol if rank_tol is None else rank_tol
    rx = classify(A, X, tol, field, seed, dilation_check, cfg, rank_tol)
    ry = classify(B, Y, tol, field, seed + 1, dilation_check, cfg, rank_tol)
    joint = MatrixTuple(np.concatenate([X.astype(field).items, Y.astype(field).items]), field)
    irr = irreducible(joint, max(rt, 1e-9), field)
    kx, ky = pencil_kernel(A, X, tol), pencil_kernel(B, Y, tol)
    U = Verdict.UNDECIDED
    euclid = _both(rx.euclidean, ry.euclidean)
    arveson = _both(rx.arveson, ry.arveson)
    evidence = {"x": rx.evidence, "y": ry.evidence, "commutant_dim": irr.commutant_dim}
    if kx.ambiguous_kernel or ky.ambiguous_kernel:
        matrix = U
    elif kx.kernel.shape[1] == 0 or ky.kernel.shape[1] == 0:
        matrix = Verdict.NO
    else:
        lo, hi = _rank_tolerances(rt)
        full, _ = _systems([A, B], [X, Y], [kx.kernel, ky.kernel], field)
        ns = null_space_decided(full, lo, hi)
        evidence["matrix_solution_dim"] = ns.dim
        matrix = U if ns.ambiguous else (Verdict.YES if ns.dim == 1 else Verdict.NO)
    if matrix is Verdict.YES and euclid is not Verdict.YES:
        matrix = U
    free = _both(arveson, irr.verdict)
    if free is Verdict.YES and matrix is not Verdict.YES:
        free = U
    return ExtremeReport(euclid, matrix, arveson, free, irr.verdict, field, evidence)


# ---------------------------------------------------------------------------
# named families and examples


def x3(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]])


def family_theta(kind: str, theta: float, k: int = 2) -> MatrixTuple:
    """Real level-2 boundary families of the simplex-times-interval pencil ``A(k)``.

    ``X(θ) = (diag(1,-k), diag(-k,1), I, ..., I, X3(θ))`` for any ``k >= 1``
    (for ``k = 1`` just ``(diag(1,-1), X3(θ))``); ``Y(θ) = (I, diag(-2,1), X3(θ))``
    and ``Z(θ) = (diag(-2,1), I, X3(θ))`` for ``k = 2``, where
    ``X3(θ) = [[cos θ, sin θ], [sin θ, -cos θ]]``.
    """
    if not 0.0 <= theta <= np.pi + 1e-12:
        raise DomainError("θ must lie in [0, π]")
    if kind not in ("X", "Y", "Z"):
        raise DomainError(f"unknown family kind {kind!r}")
    k = int(k)
    if k < 1:
        raise DomainError("k must be positive")
    I = np.eye(2)
    if kind == "X":
        if k == 1:
            return MatrixTuple.of([np.diag([1.0, -1.0]), x3(theta)])
        items = [np.diag([1.0, -k]), np.diag([-float(k), 1.0])] + [I] * (k - 2) + [x3(theta)]
        return MatrixTuple.of(items)
    if k != 2:
        raise DomainError("families Y and Z are defined for k = 2")
    if kind == "Y":
        return MatrixTuple.of([I, np.diag([-2.0, 1.0]), x3(theta)])
    return MatrixTuple.of([np.diag([-2.0, 1.0]), I, x3(theta)])


def simplex_square_example():
    """A point of (2-simplex) × (square) that is matrix extreme but not Arveson extreme.

    Returns ``(A, B, X, Y)`` with ``X = (diag(1,0), [[1/2, √(5/6)], [√(5/6), -2/3]])``
    and ``Y = (σ_Z, σ_X)``.
    """
    r = np.sqrt(5.0 / 6.0)
    X = MatrixTuple.of([np.diag([1.0, 0.0]), np.array([[0.5, r], [r, -2.0 / 3.0]])])
    Y = MatrixTuple.of([SIGMA_Z, SIGMA_X])
    return catalog("simplex", 2), catalog("square"), X, Y


def simplex_interval_complex_example():
    """The same simplex point paired with ``σ_Y`` in the interval.

    Matrix extreme over ``ℂ``; the real embedding of the pair is not matrix
    extreme over ``ℝ``.  Returns ``(A, B, X, Y)`` with complex ``X``/``Y``.
    """
    A, _, X, _ = simplex_square_example()
    Y = MatrixTuple.of([SIGMA_Y], ScalarField.COMPLEX)
    return A, catalog("interval"), X.astype(ScalarField.COMPLEX), Y


# ---------------------------------------------------------------------------
# sampling


def _tuple_from_coords(y: np.ndarray, g: int, basis: list, field: ScalarField) -> MatrixTuple:
    N = len(basis)
    items = [sum(y[i * N + j] * basis[j] for j in range(N)) for i in range(g)]
    return MatrixTuple.of(items, field)


SAMPLE_RETRIES = 2
# kernel threshold for classifying sampled points: their kernel eigenvalues
# sit at solver accuracy (~1e-7), well separated from the rest of the spectrum
SAMPLE_KERNEL_TOL = 1e-6


def sample_extreme(A: LinearPencil, n: int, rng_seed: int, field: ScalarField = ScalarField.REAL,
                   cfg: SolverConfig | None = None) -> MatrixTuple:
    """Maximize a random linear functional over ``D_A(n)``.

    The functional ``ℓ(X) = Σ_i <L_i, X_i>`` has coefficients of ``L_i`` in an
    orthonormal basis of ``SM_n`` drawn i.i.d. uniform on ``[-1, 1]``.  The
    optimizer is a Euclidean extreme point up to solver tolerance.
    """
    if A.is_bounded is False:
        raise UnboundedError("sampling requires a bounded free spectrahedron")
    rng = np.random.default_rng(rng_seed)
    basis = hermitian_basis(n, field)
    N = len(basis)
    nv = A.g * N
    lmi = LmiProblem(nv, "max")
    Fs = {}
    for i, Ai in enumerate(A.A.items):
        for j, E in enumerate(basis):
            Fs[i * N + j] = -kron(Ai, E)
    lmi.add_lmi(np.eye(A.d * n), Fs, ScalarField.join(field, A.field))
    lmi.set_objective(rng.uniform(-1.0, 1.0, nv))
    cfg = cfg or SolverConfig(gap_tol=1e-9, feas_tol=1e-9)
    sol = lmi.solve(cfg)
    for retry in range(1, SAMPLE_RETRIES + 1):
        # same functional, perturbed interior-point start
        if sol.status is Status.OPTIMAL:
            break
        sol = lmi.solve(replace(cfg, seed=retry))
    if sol.status is not Status.OPTIMAL:
        raise NumericalFailure(f"sampling SDP ended with status {sol.status.value}")
    return _tuple_from_coords(sol.y, A.g, basis, field)
