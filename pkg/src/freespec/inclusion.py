"""Inclusion of free spectrahedra and inclusion constants.

* :func:`hkm_inclusion` decides ``D_A ⊆ D_B`` through the Choi-matrix
  feasibility SDP (a unital completely positive map sending ``A_i`` to ``B_i``).
* :func:`max_inclusion_scale` finds the largest ``s`` with ``s·D_A ⊆ D_B``.
* :func:`min_ball_gamma` finds the smallest ``γ`` with
  ``X ∈ γ·W^min(conv P)`` (one SDP, ``γ`` a free variable).
* :func:`theta_scan` scans the one-parameter boundary family of the
  simplex-times-interval pencil, whose maximum is the inclusion constant.

The closed-form constant ``γ(k) = 2k/(k-1+√(1+k))``, the witness tuples
attaining it, and explicit feasible points certifying it are also provided.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import linprog, minimize_scalar

from .errors import DomainError, FieldError, ArityError, NumericalFailure
from .extremal import family_theta, x3
from .linalg import MatrixTuple, ScalarField, SIGMA_X, SIGMA_Z, lambda_max, kron
from .pencils import LinearPencil, VertexList, catalog, level1_bounded
from .sdp import Feasibility, SdpProblem, SolverConfig, Status, check_solution, feasibility, solve

NEAR_OPTIMAL_TOL = 1e-6


# ---------------------------------------------------------------------------
# helpers


def _add_mapping(p: SdpProblem, terms, rhs, scalar=None, complex_: bool = False) -> None:
    """Entrywise ``Σ coeff·X_blk[ro+k, co+l] - s·M[k, l] = rhs[k, l]`` for ``k <= l``.

    ``terms`` are ``(blk, coeff, ro, co)`` with real ``coeff``; ``scalar`` is
    ``(blk, M)`` for a ``1x1`` block ``s`` multiplying a fixed matrix ``M``.
    """
    rhs = np.asarray(rhs)
    n = rhs.shape[0]
    M = None if scalar is None else np.asarray(scalar[1])
    complex_ = complex_ or np.iscomplexobj(rhs) or (M is not None and np.iscomplexobj(M))
    for k in range(n):
        for l in range(k, n):
            ents = [(blk, ro + k, co + l, c, "re") for blk, c, ro, co in terms if c]
            if M is not None and M[k, l].real != 0:
                ents.append((scalar[0], 0, 0, -float(M[k, l].real), "re"))
            p.add_entry_constraint(ents, float(np.real(rhs[k, l])))
            if complex_ and l > k:
                ents = [(blk, ro + k, co + l, c, "im") for blk, c, ro, co in terms if c]
                if M is not None and M[k, l].imag != 0:
                    ents.append((scalar[0], 0, 0, -float(M[k, l].imag), "re"))
                p.add_entry_constraint(ents, float(np.imag(rhs[k, l])))


def _vertex_array(P) -> np.ndarray:
    if isinstance(P, VertexList):
        return P.array()
    if isinstance(P, LinearPencil):
        if P.vertices is None:
            raise DomainError("pencil has no vertex list; enumerate vertices first")
        return P.vertices.array()
    return np.atleast_2d(np.asarray(P, dtype=float))


def zero_is_interior(V: np.ndarray) -> bool:
    """Whether 0 lies in the interior of ``conv(V)`` (rows are points)."""
    m, g = V.shape
    if np.linalg.matrix_rank(V) < g:
        return False
    # maximize t subject to Σ λ_v v = 0, Σ λ_v = 1, λ_v >= t
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_eq = np.zeros((g + 1, m + 1))
    A_eq[:g, :m] = V.T
    A_eq[g, :m] = 1.0
    b_eq = np.zeros(g + 1)
    b_eq[g] = 1.0
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    return bool(res.status == 0 and -res.fun > 1e-12)


# ---------------------------------------------------------------------------
# inclusion of free spectrahedra


@dataclass
class InclusionCertificate:
    verdict: Feasibility
    choi_blocks: list | None        # d x d grid of D x D matrices C_pq
    residuals: dict
    margin: float                   # phase-I margin t (t > 0: strictly feasible Choi matrix)
    ray: np.ndarray | None = None   # phase-I multipliers separating an infeasible instance

    @property
    def feasible(self) -> bool:
        return self.verdict is Feasibility.FEASIBLE

    def choi_matrix(self) -> np.ndarray:
        return np.block(self.choi_blocks)


def _choi_problem(A: LinearPencil, B: LinearPencil, scaled: bool):
    if A.g != B.g:
        raise ArityError(f"pencils have arities {A.g} and {B.g}")
    if A.field is ScalarField.COMPLEX:
        raise FieldError("the source pencil must be real (complex targets are supported)")
    if A.is_bounded is False or (A.is_bounded is None and A.is_diagonal and not level1_bounded(A)):
        raise DomainError("inclusion testing requires D_A(1) bounded")
    d, D = A.d, B.d
    field = B.field
    p = SdpProblem("max" if scaled else "min")
    Am = A.A.items
    if A.is_diagonal:
        blocks = [p.add_block(D, field) for _ in range(d)]
        loc = {(q, q): (blocks[q], 0, 0) for q in range(d)}
    else:
        blk = p.add_block(d * D, field)
        blocks = [blk]
        loc = {(q, r): (blk, q * D, r * D) for q in range(d) for r in range(d)}
    cplx = field is ScalarField.COMPLEX
    _add_mapping(p, [(*loc[(q, q)][:1], 1.0, *loc[(q, q)][1:]) for q in range(d)], np.eye(D), complex_=cplx)
    s_blk = p.add_block(1) if scaled else None
    for i in range(A.g):
        terms = [(loc[(q, r)][0], float(Am[i][q, r].real), loc[(q, r)][1], loc[(q, r)][2])
                 for (q, r) in loc if Am[i][q, r] != 0]
        if scaled:
            _add_mapping(p, terms, np.zeros((D, D), dtype=B.A.items.dtype), (s_blk, B.A.items[i]), cplx)
        else:
            _add_mapping(p, terms, B.A.items[i], complex_=cplx)
    return p, blocks, s_blk, loc


def _choi_grid(A: LinearPencil, B: LinearPencil, Xs, loc) -> list:
    d, D = A.d, B.d
    grid = [[np.zeros((D, D), dtype=B.field.dtype) for _ in range(d)] for _ in range(d)]
    for (q, r), (blk, ro, co) in loc.items():
        grid[q][r] = np.array(Xs[blk][ro:ro + D, co:co + D])
    return grid


def _choi_residuals(A: LinearPencil, B: LinearPencil, grid, s: float = 1.0) -> dict:
    d, D = A.d, B.d
    C = np.block(grid)
    unital = np.abs(sum(grid[q][q] for q in range(d)) - np.eye(D)).max()
    maps = max(np.abs(sum(A.A.items[i][q, r] * grid[q][r] for q in range(d) for r in range(d))
                      - s * B.A.items[i]).max() for i in range(A.g))
    return {"unital": float(unital), "mapping": float(maps),
            "min_eig": float(np.linalg.eigvalsh(0.5 * (C + C.conj().T)).min())}


def hkm_inclusion(A: LinearPencil, B: LinearPencil, cfg: SolverConfig | None = None) -> InclusionCertificate:
    """Decide ``D_A ⊆ D_B`` via the Choi-matrix feasibility SDP.

    The inclusion holds iff there are ``D x D`` blocks ``C_pq`` with
    ``C = (C_pq) ⪰ 0``, ``Σ_p C_pp = I_D`` and ``Σ_pq (A_i)_pq C_pq = B_i``.
    For diagonal ``A`` only the diagonal blocks enter, and the Choi matrix
    is block diagonal.
    """
    p, blocks, _, loc = _choi_problem(A, B, scaled=False)
    # Σ_p C_pp = I_D fixes tr C = D, so a tight phase-I trace bound keeps it well scaled
    res = feasibility(p, cfg, trace_bound=10.0 * (B.d + 1))
    if res.verdict is Feasibility.FEASIBLE:
        grid = _choi_grid(A, B, res.witness, loc)
        return InclusionCertificate(res.verdict, grid, _choi_residuals(A, B, grid), res.t)
    return InclusionCertificate(res.verdict, None, {"max_residual": res.max_residual}, res.t, res.ray)


@dataclass
class ScaleResult:
    s: float
    upper: float                   # certified bound from the dual
    choi_blocks: list | None
    residuals: dict
    status: Status


def max_inclusion_scale(A: LinearPencil, B: LinearPencil, cfg: SolverConfig | None = None) -> ScaleResult:
    """Largest ``s`` with ``s·D_A ⊆ D_B``, computed as one SDP with ``s`` free.

    The mapping constraint reads ``Σ_pq (A_i)_pq C_pq = s·B_i``.
    """
    p, blocks, s_blk, loc = _choi_problem(A, B, scaled=True)
    p.set_objective({s_blk: np.array([[1.0]])}, "max")
    sol = solve(p, cfg)
    if sol.status is not Status.OPTIMAL:
        raise NumericalFailure(f"scale SDP ended with status {sol.status.value}")
    s = float(sol.X[s_blk][0, 0].real)
    grid = _choi_grid(A, B, sol.X, loc)
    if s < 1e-9:
        s = 0.0
    return ScaleResult(s, float(sol.dual_objective), grid, _choi_residuals(A, B, grid, s), sol.status)


# ---------------------------------------------------------------------------
# minimal ball: X ∈ γ W^min(conv P)


@dataclass
class MinBallCertificate:
    gamma: float
    lower: float                    # dual bound: γ* >= lower
    blocks: list                    # C_v, one per vertex
    vertices: np.ndarray
    residuals: dict
    status: Status


def min_ball_gamma(X: MatrixTuple, P, cfg: SolverConfig | None = None) -> MinBallCertificate:
    """Smallest ``γ`` with ``X ∈ γ·W^min(conv P)``.

    Solves ``min γ`` subject to ``C_v ⪰ 0``, ``Σ_v C_v = γ I`` and
    ``Σ_v v_i C_v = X_i``.  ``P`` is a :class:`VertexList`, a pencil carrying
    vertices, or an array whose rows are points.
    """
    V = _vertex_array(P)
    if V.shape[1] != X.g:
        raise ArityError(f"points have dimension {V.shape[1]}, tuple has arity {X.g}")
    if not zero_is_interior(V):
        raise DomainError("0 must be an interior point of conv(P)")
    n = X.n
    p = SdpProblem("min")
    blocks = [p.add_block(n, X.field) for _ in range(len(V))]
    gb = p.add_block(1)
    p.add_matrix_equality([(b, 1.0) for b in blocks], np.zeros((n, n), dtype=X.field.dtype),
                          identity_terms=[(gb, -1.0, 0)])
    for i in range(X.g):
        p.add_matrix_equality([(b, V[j, i]) for j, b in enumerate(blocks)], X[i])
    p.set_objective({gb: np.array([[1.0]])})
    sol = solve(p, cfg)
    if sol.status is Status.NUMERICAL:
        # Reducible boundary points (γ = 1 with a degenerate optimal face) can
        # stall just short of the gap tolerance; keep such an iterate only when
        # the independent checker validates it at NEAR_OPTIMAL_TOL.
        chk = check_solution(p, sol.X_real, sol.y, tol=NEAR_OPTIMAL_TOL)
        if not chk.ok:
            raise NumericalFailure(f"min-ball SDP ended with status {sol.status.value}")
    elif sol.status is not Status.OPTIMAL:
        raise NumericalFailure(f"min-ball SDP ended with status {sol.status.value}")
    Cs = [np.array(sol.X[b]) for b in blocks]
    gamma = float(sol.X[gb][0, 0].real)
    return MinBallCertificate(gamma, float(sol.dual_objective), Cs, V,
                              _ball_residuals(X, V, Cs, gamma), sol.status)


def _ball_residuals(X: MatrixTuple, V: np.ndarray, Cs, gamma: float) -> dict:
    n = X.n
    eq = np.abs(sum(Cs) - gamma * np.eye(n)).max()
    for i in range(X.g):
        eq = max(eq, np.abs(sum(V[j, i] * C for j, C in enumerate(Cs)) - X[i]).max())
    mine = min(np.linalg.eigvalsh(0.5 * (C + C.conj().T)).min() for C in Cs)
    return {"equality": float(eq), "min_eig": float(mine)}


# ---------------------------------------------------------------------------
# closed forms


def gamma_closed_form(k: int) -> float:
    """``γ(k) = 2k / (k - 1 + √(1 + k))``."""
    if k < 1:
        raise DomainError("k must be positive")
    return 2.0 * k / (k - 1 + math.sqrt(1.0 + k))


def s_closed_form(k: int) -> float:
    """``s(k) = (k - 1 + √(k + 1)) / (2k) = 1/γ(k)``."""
    if k < 1:
        raise DomainError("k must be positive")
    return (k - 1 + math.sqrt(k + 1.0)) / (2.0 * k)


def witness_tuples(k: int) -> tuple:
    """Tuples ``X ∈ D_{A(k)}(2)`` and ``Y ∈ D_{B(k)}(2)`` with ``λ_max(Σ X_i⊗Y_i) = γ(k)``.

    For ``k = 1`` these are ``(σ_Z, σ_X)`` and ``(σ_Z, σ_X)/√2``.
    """
    if k < 1:
        raise DomainError("k must be positive")
    X = family_theta("X", math.pi / 2, k)
    if k == 1:
        return X, MatrixTuple.of([SIGMA_Z / math.sqrt(2), SIGMA_X / math.sqrt(2)])
    r = math.sqrt(1.0 + k)
    den = 1.0 + k + 2.0 * r
    Y = [np.diag([(1 + r) / den, -1 / den]), np.diag([-1 / den, (1 + r) / den])]
    Y += [np.zeros((2, 2))] * (k - 2)
    Y.append(k / (k - 1 + r) * SIGMA_X)
    return X, MatrixTuple.of(Y)


def four_lines_witness() -> tuple:
    """Complex level-2 tuples ``X`` in the matrix cube and ``Y`` in its dual (four variables).

    ``λ_max(Σ X_i ⊗ Y_i) = √13/2``.
    """
    w = np.exp(2j * np.pi / 3)
    X = [np.diag([1.0, -1.0]).astype(complex), np.array([[0, 1], [1, 0]], dtype=complex),
         np.array([[0, w], [np.conj(w), 0]]), np.array([[0, np.conj(w)], [w, 0]])]
    c = -3.0 / (2.0 * math.sqrt(13.0))
    Y = [np.diag([-2.0, 2.0]).astype(complex) / math.sqrt(13.0), c * X[1], c * X[2], c * X[3]]
    return MatrixTuple.of(X, ScalarField.COMPLEX), MatrixTuple.of(Y, ScalarField.COMPLEX)


def pairing_value(X: MatrixTuple, Y: MatrixTuple) -> float:
    """``λ_max(Σ X_i ⊗ Y_i)``."""
    if X.g != Y.g:
        raise ArityError("tuples must have equal arity")
    return lambda_max(sum(kron(a, b) for a, b in zip(X.items, Y.items)))


# ---------------------------------------------------------------------------
# θ-families and scans


def reduced_tuple(k: int, theta: float) -> MatrixTuple:
    """``(diag(1,-k), diag(-k,1), X3(θ))``: the three-variable reduction of the family."""
    return MatrixTuple.of([np.diag([1.0, -k]), np.diag([-float(k), 1.0]), x3(theta)])


def scan_problem(k: int):
    """Vertex set and tuple builder used by :func:`theta_scan` for a given ``k``.

    ``k = 1`` uses the square, ``k = 2`` the simplex-times-interval pencil,
    and ``k >= 3`` the three-variable reduction to the pencil ``S(k)``.
    """
    if k < 1:
        raise DomainError("k must be positive")
    if k == 1:
        return catalog("square").vertices.array(), lambda t: family_theta("X", t, 1)
    if k == 2:
        return catalog("simplex_Ak", 2).vertices.array(), lambda t: family_theta("X", t, 2)
    return catalog("simplex_S", k).vertices.array(), lambda t: reduced_tuple(k, t)


def _scan_point(args):
    k, theta, cfg = args
    V, build = scan_problem(k)
    return min_ball_gamma(build(theta), V, cfg).gamma


@dataclass
class ThetaScan:
    k: int
    thetas: np.ndarray
    gammas: np.ndarray
    best_theta: float
    best_gamma: float
    refined: bool = False
    history: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {"k": self.k, "thetas": self.thetas.tolist(), "gammas": self.gammas.tolist(),
                "best_theta": self.best_theta, "best_gamma": self.best_gamma, "refined": self.refined}


def theta_scan(k: int, grid_size: int = 65, refine: bool = True, jobs: int = 1,
               cfg: SolverConfig | None = None) -> ThetaScan:
    """Maximize ``min_ball_gamma`` of the boundary family over ``θ ∈ [0, π/2]``.

    A uniform grid is followed by a bounded scalar refinement within one
    grid spacing of the best grid point.
    """
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    thetas = np.linspace(0.0, math.pi / 2, grid_size)
    args = [(k, float(t), cfg) for t in thetas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            gammas = np.array(list(ex.map(_scan_point, args)))
    else:
        gammas = np.array([_scan_point(a) for a in args])
    i = int(np.argmax(gammas))
    best_t, best_g = float(thetas[i]), float(gammas[i])
    history = []
    refined = False
    if refine:
        h = thetas[1] - thetas[0]
        lo, hi = max(0.0, best_t - h), min(math.pi / 2, best_t + h)

        def neg(t):
            val = _scan_point((k, float(t), cfg))
            history.append((float(t), val))
            return -val

        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-7})
        refined = True
        if -res.fun > best_g:
            best_t, best_g = float(res.x), float(-res.fun)
    return ThetaScan(k, thetas, gammas, best_t, best_g, refined, history)


# ---------------------------------------------------------------------------
# explicit feasible points of the min-ball SDP at γ = γ(k)


@dataclass
class FeasiblePoint:
    """Blocks ``C_v`` with ``Σ_v C_v = γ I`` and ``Σ_v v_i C_v = X_i``."""

    k: int
    theta: float
    gamma: float
    vertices: np.ndarray
    blocks: list
    X: MatrixTuple
    branch: str
    reduced: bool = False   # True when defined on the three-variable reduction

    def lift(self) -> "FeasiblePoint":
        """Lift a three-variable point (``k >= 3``) to the ``k+1``-variable pencil ``A(k)``.

        Vertex order is (all-ones, ``-k`` at position 1, …, ``-k`` at position k)
        for ``y = +1`` and then ``y = -1``; the first reduced block is shared
        equally by the ``k-1`` vertices other than positions 1 and 2.
        """
        k = self.k
        if not self.reduced:
            return self
        V = catalog("simplex_Ak", k).vertices.array()
        out = []
        for half in (self.blocks[:3], self.blocks[3:]):
            b1, b2, b3 = half
            out.append(b1 / (k - 1))
            for l in range(k):
                out.append(b2 if l == 0 else b3 if l == 1 else b1 / (k - 1))
        Xf = MatrixTuple.of([self.X[0], self.X[1]] + [np.eye(2)] * (k - 2) + [self.X[2]])
        return FeasiblePoint(k, self.theta, self.gamma, V, out, Xf, self.branch + "+lift")


@dataclass
class FeasibleCheck:
    ok: bool
    max_residual: float
    min_eigenvalue: float
    lifted: "FeasibleCheck | None" = None


def _alpha_blocks(k: int, theta: float) -> list:
    r = math.sqrt(k + 1.0)
    a = 1.0 / (2 * k + 4 * r + 2)
    q = k + 2 * r + 2
    c, s = math.cos(theta), math.sin(theta)
    M = lambda p, o, t: a * np.array([[p, o], [o, t]])
    return [M(k - 1 - 2 * c, (k - 1) * s, k - 1 + 2 * c),
            M(1 + c, (r + 1) * s, q * (1 - c)),
            M(q * (1 + c), (r + 1) * s, 1 - c),
            M(k - 1 + 2 * c, -(k - 1) * s, k - 1 - 2 * c),
            M(1 - c, -(r + 1) * s, q * (1 + c)),
            M(q * (1 - c), -(r + 1) * s, 1 + c)]


_S3 = math.sqrt(3.0)


def _k2_blocks(theta: float, C2: np.ndarray) -> list:
    g = 4.0 / (1.0 + _S3)
    I = np.eye(2)
    X1, X2, Xt = np.diag([1.0, -2.0]), np.diag([-2.0, 1.0]), x3(theta)
    C1 = (1.0 / _S3 - 0.5) * np.ones((2, 2))
    C3 = -C1 - C2 + Xt / 2 + g * I / 2
    C4 = -C1 + X1 / 3 + X2 / 3 + g * I / 3
    C5 = -C2 - X1 / 3 + g * I / 3
    C6 = C1 + C2 - X2 / 3 - Xt / 2 - g * I / 6
    return [C1, C2, C3, C4, C5, C6]


def _k2_beta_candidates(theta: float) -> list:
    s, c = math.sin(theta), math.cos(theta)
    e1, e2 = 12 + 7 * _S3, 54 + 31 * _S3
    z1 = 12 * (2 + _S3) * s - 4 * _S3
    z2 = math.sqrt(6.0) * math.sqrt(8 * e1 * s + 6 * e1 * math.sin(2 * theta) + 6 * e2 * c
                                    + 6 * (2 + _S3) * math.cos(2 * theta) + 181 * _S3 + 318)
    z3 = -6 * s + 12 * (2 + _S3) * c + 14 * _S3 + 21
    out = []
    for b in ((z1 + z2) / z3, (z1 - z2) / z3):
        alpha = 2.0 / (6 + 4 * _S3 + _S3 * b * b)
        out.append(alpha * np.array([[1.0, b], [b, b * b]]))
    return out


def _min_eig(blocks) -> float:
    return float(min(np.linalg.eigvalsh(C).min() for C in blocks))


def feasible_point(k: int, theta: float, branch: str | None = None) -> FeasiblePoint:
    """Explicit feasible point of the min-ball SDP at ``γ = γ(k)`` for the θ-family.

    ``k >= 3``: closed-form blocks on the three-variable reduction (use
    :meth:`FeasiblePoint.lift` for the full pencil).  ``k = 2``: on
    ``[0, π/8]`` the ``"low"`` construction with ``C_2 = diag(1/10, 7/50)``;
    on ``[π/8, π/2]`` the ``"high"`` rank-one ``C_2`` built from the two roots
    ``β_±``, choosing whichever makes every block PSD.  ``branch`` forces one
    of ``"low"``/``"high"`` (both are valid at ``θ = π/8``).
    """
    if k < 2:
        raise DomainError("feasible points are provided for k >= 2")
    if not -1e-15 <= theta <= math.pi / 2 + 1e-15:
        raise DomainError("θ must lie in [0, π/2]")
    if k >= 3:
        V = catalog("simplex_S", k).vertices.array()
        return FeasiblePoint(k, theta, gamma_closed_form(k), V, _alpha_blocks(k, theta),
                             reduced_tuple(k, theta), "closed-form", reduced=True)
    V = catalog("simplex_Ak", 2).vertices.array()
    X = family_theta("X", theta, 2)
    if branch is None:
        branch = "low" if theta <= math.pi / 8 else "high"
    if branch == "low":
        if theta > math.pi / 8 + 1e-15:
            raise DomainError("the 'low' construction covers θ ∈ [0, π/8]")
        blocks = _k2_blocks(theta, np.diag([0.1, 0.14]))
        return FeasiblePoint(2, theta, gamma_closed_form(2), V, blocks, X, "low")
    if branch != "high":
        raise DomainError(f"unknown branch {branch!r}")
    if theta < math.pi / 8 - 1e-15:
        raise DomainError("the 'high' construction covers θ ∈ [π/8, π/2]")
    cands = [_k2_blocks(theta, C2) for C2 in _k2_beta_candidates(theta)]
    best = max(range(2), key=lambda i: _min_eig(cands[i]))
    return FeasiblePoint(2, theta, gamma_closed_form(2), V, cands[best], X, "high+" if best == 0 else "high-")


def alternative_feasible_point(theta: float) -> FeasiblePoint:
    """A single-formula candidate for ``k = 2`` on all of ``[0, π/2]``.

    Its equalities hold by construction; positive semidefiniteness is only
    conjectured, so callers should inspect :func:`verify_feasible_point`.
    """
    s, c = math.sin(theta), math.cos(theta)
    beta = _S3 * math.sqrt((6 - 4 * _S3) * s + 6 * c - 4 * _S3 + 13)
    off = 3 * s - 2 * _S3 + 3
    C2 = np.array([[3 * c + 8 * _S3 - 9 - beta, off], [off, -3 * c + 8 * _S3 - 3 - beta]]) / 12.0
    V = catalog("simplex_Ak", 2).vertices.array()
    return FeasiblePoint(2, theta, gamma_closed_form(2), V, _k2_blocks(theta, C2),
                         family_theta("X", theta, 2), "alternative")


def verify_feasible_point(fp: FeasiblePoint, tol: float = 1e-10) -> FeasibleCheck:
    """Check equalities and positive semidefiniteness of a feasible point.

    For ``k >= 3`` the lift to the full pencil is checked as well.
    """
    res = _ball_residuals(fp.X, fp.vertices, fp.blocks, fp.gamma)
    ok = res["equality"] <= tol and res["min_eig"] >= -tol
    lifted = None
    if fp.reduced:
        lifted = verify_feasible_point(fp.lift(), tol)
        ok = ok and lifted.ok
    return FeasibleCheck(ok, res["equality"], res["min_eig"], lifted)


def reduction_gap_experiment(k: int = 3, theta: float = math.pi / 2, cfg: SolverConfig | None = None) -> dict:
    """Compare the min-ball constants of ``(I, X_2, I, …, I, X(θ))`` in ``A(k)`` and
    of ``(I, X_2, X(θ))`` in the three-variable pencil ``S(k)``.

    Both points are Arveson extreme, yet the two constants need not agree; the
    values are reported, not asserted.
    """
    if k < 3:
        raise DomainError("the reduction is defined for k >= 3")
    I = np.eye(2)
    X2 = np.diag([-float(k), 1.0])
    full = MatrixTuple.of([I, X2] + [I] * (k - 2) + [x3(theta)])
    red = MatrixTuple.of([I, X2, x3(theta)])
    g_full = min_ball_gamma(full, catalog("simplex_Ak", k), cfg).gamma
    g_red = min_ball_gamma(red, catalog("simplex_S", k), cfg).gamma
    return {"k": k, "theta": theta, "full": g_full, "reduced": g_red}
