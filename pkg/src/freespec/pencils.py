"""Linear pencils, the free spectrahedra they define, and a catalog of free polytopes.

A pencil is a tuple ``A = (A_1, ..., A_g)`` of self-adjoint ``d x d`` matrices.
It defines the free spectrahedron

    D_A(n) = { X in SM_n^g : I_{dn} - sum_i A_i ⊗ X_i  ⪰ 0 }.

Diagonal pencils (free polytopes) are described by their *rows*: row ``p``
collects the ``p``-th diagonal entries ``(A_1[p,p], ..., A_g[p,p])`` and
``D_A(1)`` is the polyhedron ``{x : <row_p, x> <= 1}``.  Catalog pencils keep
their rows as exact fractions so that vertex and polar-dual computations are
exact.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import ArityError, CatalogError, DomainError, FieldError, UnboundedError
from .linalg import DEFAULT_TOL, MatrixTuple, ScalarField, direct_sum, kron, lambda_min, sym

MAX_ENUMERATION_ROWS = 12

Row = tuple  # tuple of Fractions


# ---------------------------------------------------------------------------
# exact helpers


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _solve_exact(rows: Sequence[Row], rhs: Sequence[Fraction]):
    """Solve a square rational system by Gauss-Jordan elimination; ``None`` if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def _rank_exact(vectors: Sequence[Row]) -> int:
    m = [list(v) for v in vectors]
    if not m:
        return 0
    rank, ncol = 0, len(m[0])
    for col in range(ncol):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _dot(a: Row, b: Row) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class VertexList:
    """Vertices of a level-1 polytope ``D_A(1)``, stored exactly."""

    g: int
    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(_frac(c) for c in v) for v in self.vertices)
        if any(len(v) != self.g for v in verts):
            raise ArityError("vertex length differs from arity")
        if len(set(verts)) != len(verts):
            raise DomainError("duplicate vertices")
        object.__setattr__(self, "vertices", verts)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def array(self) -> np.ndarray:
        return np.array([[float(c) for c in v] for v in self.vertices], dtype=float).reshape(len(self), self.g)

    def to_json(self) -> list:
        return [[_fmt(c) for c in v] for v in self.vertices]


@dataclass(frozen=True, eq=False)
class LinearPencil:
    """Defining tuple ``A`` of a free spectrahedron, plus metadata.

    ``rows`` holds exact diagonal rows for catalog free polytopes; ``is_bounded``
    is ``True``/``False`` when known and ``None`` when undetermined.
    """

    A: MatrixTuple
    is_diagonal: bool = False
    is_bounded: bool | None = None
    catalog_id: str | None = None
    rows: tuple | None = dc_field(default=None, repr=False)
    vertices: VertexList | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        items = self.A.items
        off = items - np.einsum("gii->gi", items)[:, :, None] * np.eye(self.d)[None]
        diag_exact = bool(np.all(np.abs(off) <= 1e-12))
        if self.is_diagonal and not diag_exact:
            raise ValueError("pencil flagged diagonal has off-diagonal entries")
        object.__setattr__(self, "is_diagonal", diag_exact)

    @property
    def d(self) -> int:
        return self.A.n

    @property
    def g(self) -> int:
        return self.A.g

    @property
    def field(self) -> ScalarField:
        return self.A.field

    @classmethod
    def from_matrices(cls, mats, field: ScalarField | None = None, **kw) -> "LinearPencil":
        return cls(MatrixTuple.of(mats, field), **kw)

    @classmethod
    def from_rows(cls, rows, catalog_id: str | None = None, vertices=None,
                  is_bounded: bool | None = None) -> "LinearPencil":
        """Diagonal pencil whose ``p``-th diagonal entries are ``rows[p]`` (kept exactly)."""
        exact = tuple(tuple(_frac(c) for c in r) for r in rows)
        d, g = len(exact), len(exact[0])
        items = np.zeros((g, d, d))
        for p, r in enumerate(exact):
            for i, c in enumerate(r):
                items[i, p, p] = float(c)
        vl = VertexList(g, vertices) if vertices is not None else None
        return cls(MatrixTuple(items, ScalarField.REAL), True, is_bounded, catalog_id, exact, vl)

    def row_array(self) -> np.ndarray:
        """Diagonal rows as a float ``(d, g)`` array (diagonal pencils only)."""
        if not self.is_diagonal:
            raise DomainError("rows are defined for diagonal pencils only")
        return np.real(np.einsum("gii->ig", self.A.items))

    def exact_rows(self) -> tuple:
        if self.rows is not None:
            return self.rows
        return tuple(tuple(Fraction(float(c)).limit_denominator(10**9) for c in r) for r in self.row_array())

    def to_json(self) -> dict:
        out = {"field": self.field.value, "d": self.d, "g": self.g,
               "items": self.A.to_json()["items"]}
        if self.catalog_id:
            out["catalog_id"] = self.catalog_id
        if self.vertices is not None:
            out["vertices"] = self.vertices.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "LinearPencil":
        A = MatrixTuple.from_json({"field": data.get("field", "real"), "items": data["items"]})
        if "d" in data and data["d"] != A.n or "g" in data and data["g"] != A.g:
            raise ValueError("pencil JSON: declared d/g do not match items")
        p = cls(A, catalog_id=data.get("catalog_id"))
        if p.is_diagonal and "vertices" in data:
            verts = [[Fraction(c) for c in v] for v in data["vertices"]]
            p = replace(p, vertices=VertexList(p.g, verts), is_bounded=True)
        return p


class Membership(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class MembershipResult:
    status: Membership
    margin: float

    @property
    def contained(self) -> bool:
        return self.status is not Membership.OUTSIDE


# ---------------------------------------------------------------------------
# evaluation


def _as_tuple(X) -> MatrixTuple:
    if isinstance(X, MatrixTuple):
        return X
    arr = np.asarray(X)
    if arr.ndim == 1:
        return MatrixTuple.from_vector(arr)
    return MatrixTuple.of(list(arr))


def eval_lambda(A: LinearPencil, X) -> np.ndarray:
    """``Λ_A(X) = Σ_i A_i ⊗ X_i`` (pencil factor first)."""
    X = _as_tuple(X)
    if A.g != X.g:
        raise ArityError(f"pencil arity {A.g} does not match tuple arity {X.g}")
    out = np.zeros((A.d * X.n, A.d * X.n), dtype=np.result_type(A.A.items, X.items))
    for a, x in zip(A.A.items, X.items):
        out += kron(a, x)
    return out


def eval_L(A: LinearPencil, X) -> np.ndarray:
    """``L_A(X) = I - Λ_A(X)``."""
    lam = eval_lambda(A, X)
    return sym(np.eye(lam.shape[0]) - lam)


def membership(A: LinearPencil, X, tol: float = DEFAULT_TOL) -> MembershipResult:
    """Classify ``X`` as inside / on the boundary of / outside ``D_A``; margin is ``λ_min(L_A(X))``."""
    margin = lambda_min(eval_L(A, X))
    if margin > tol:
        status = Membership.INSIDE
    elif margin >= -tol:
        status = Membership.BOUNDARY
    else:
        status = Membership.OUTSIDE
    return MembershipResult(status, margin)


# ---------------------------------------------------------------------------
# combinators


def _join_meta(A: LinearPencil, B: LinearPencil):
    if A.field is not B.field:
        raise FieldError("pencils over different fields")


def cartesian(A: LinearPencil, B: LinearPencil) -> LinearPencil:
    """Pencil of the product ``D_A × D_B``: ``(A_i ⊕ 0, 0 ⊕ B_j)``."""
    _join_meta(A, B)
    za, zb = np.zeros((A.d, A.d)), np.zeros((B.d, B.d))
    items = [direct_sum(a, zb) for a in A.A.items] + [direct_sum(za, b) for b in B.A.items]
    bounded = None if A.is_bounded is None or B.is_bounded is None else (A.is_bounded and B.is_bounded)
    cid = f"cartesian({A.catalog_id},{B.catalog_id})" if A.catalog_id and B.catalog_id else None
    if A.rows is not None and B.rows is not None:
        zero_a, zero_b = (Fraction(0),) * A.g, (Fraction(0),) * B.g
        rows = tuple(r + zero_b for r in A.rows) + tuple(zero_a + r for r in B.rows)
        verts = None
        if A.vertices is not None and B.vertices is not None:
            verts = [va + vb for va in A.vertices for vb in B.vertices]
        return LinearPencil.from_rows(rows, cid, verts, bounded)
    return LinearPencil(MatrixTuple.of(items, A.field), is_bounded=bounded, catalog_id=cid)


def direct_sum_pencil(A: LinearPencil, B: LinearPencil) -> LinearPencil:
    """Pencil ``(A_i ⊗ I, I ⊗ B_j)`` whose level-1 set is the free sum (polar of the product of polars)."""
    _join_meta(A, B)
    items = [kron(a, np.eye(B.d)) for a in A.A.items] + [kron(np.eye(A.d), b) for b in B.A.items]
    bounded = None if A.is_bounded is None or B.is_bounded is None else (A.is_bounded and B.is_bounded)
    cid = f"direct_sum({A.catalog_id},{B.catalog_id})" if A.catalog_id and B.catalog_id else None
    if A.rows is not None and B.rows is not None:
        rows = tuple(ra + rb for ra in A.rows for rb in B.rows)
        verts = None
        if A.vertices is not None and B.vertices is not None:
            zero_a, zero_b = (Fraction(0),) * A.g, (Fraction(0),) * B.g
            verts = [v + zero_b for v in A.vertices] + [zero_a + v for v in B.vertices]
        return LinearPencil.from_rows(rows, cid, verts, bounded)
    return LinearPencil(MatrixTuple.of(items, A.field), is_bounded=bounded, catalog_id=cid)


def scale_pencil(A: LinearPencil, s: float) -> LinearPencil:
    """Pencil ``s·A``, so that ``D_{sA} = (1/s) D_A``."""
    if not s > 0:
        raise DomainError("scale must be positive")
    if A.rows is not None:
        q = _frac(s) if isinstance(s, (int, Fraction)) else None
        if q is not None:
            rows = tuple(tuple(q * c for c in r) for r in A.rows)
            verts = [tuple(c / q for c in v) for v in A.vertices] if A.vertices is not None else None
            return LinearPencil.from_rows(rows, None, verts, A.is_bounded)
    return LinearPencil(A.A * s, is_bounded=A.is_bounded)


# ---------------------------------------------------------------------------
# polytope geometry


def level1_bounded(A: LinearPencil) -> bool | None:
    """Whether ``D_A(1)`` is bounded (LP recession check); ``None`` for non-diagonal pencils."""
    if A.is_diagonal:
        rows = A.row_array()
        for i in range(A.g):
            for sign in (1.0, -1.0):
                c = np.zeros(A.g)
                c[i] = -sign
                res = linprog(c, A_ub=rows, b_ub=np.ones(len(rows)), bounds=[(None, None)] * A.g,
                              method="highs")
                if res.status == 3:
                    return False
        return True
    return A.is_bounded


def enumerate_vertices(A: LinearPencil) -> VertexList:
    """Exact vertex enumeration of ``D_A(1)`` for a diagonal pencil with ``d <= 12`` rows."""
    if not A.is_diagonal:
        raise DomainError("vertex enumeration needs a diagonal pencil")
    rows = tuple(dict.fromkeys(A.exact_rows()))  # merge exactly equal rows
    if len(rows) > MAX_ENUMERATION_ROWS:
        raise DomainError(f"vertex enumeration capped at {MAX_ENUMERATION_ROWS} distinct rows, got {len(rows)}")
    if level1_bounded(A) is False:
        raise UnboundedError("D_A(1) is unbounded")
    g = A.g
    one = Fraction(1)
    found = []
    for subset in itertools.combinations(rows, g):
        x = _solve_exact(subset, [one] * g)
        if x is None:
            continue
        if all(_dot(r, x) <= one for r in rows) and x not in found:
            found.append(x)
    return VertexList(g, found)


def pencil_vertices(A: LinearPencil) -> VertexList:
    if A.vertices is not None:
        return A.vertices
    return enumerate_vertices(A)


def facet_rows(A: LinearPencil) -> list:
    """Irredundant rows of a bounded diagonal pencil (those supporting a facet of ``D_A(1)``).

    These are exactly the vertices of the polar dual ``D_A(1)°``.
    """
    verts = pencil_vertices(A)
    g = A.g
    out = []
    for r in dict.fromkeys(A.exact_rows()):
        tight = [v for v in verts if _dot(r, v) == 1]
        if len(tight) < g:
            continue
        base = tight[0]
        diffs = [tuple(a - b for a, b in zip(v, base)) for v in tight[1:]]
        if _rank_exact(diffs) == g - 1:
            out.append(r)
    return out


def dual_free_polytope(A: LinearPencil) -> LinearPencil:
    """Dual free polytope: item ``i`` is ``diag(v_i : v a vertex of D_A(1))``.

    Its level-1 set is the polar dual of ``D_A(1)``; the vertices of the dual
    are the facet rows of ``A``.
    """
    if not A.is_diagonal:
        raise DomainError("dual free polytope needs a diagonal pencil")
    if A.is_bounded is False:
        raise UnboundedError("D_A(1) is unbounded")
    verts = pencil_vertices(A)
    cid = f"dual({A.catalog_id})" if A.catalog_id else None
    return LinearPencil.from_rows(verts.vertices, cid, facet_rows(A), True)


# ---------------------------------------------------------------------------
# catalog


def _kron_rows(blocks: Sequence[Sequence[Row]]) -> tuple:
    """Rows of a Kronecker-structured diagonal pencil: concatenate factor rows in Kronecker order."""
    out = [()]
    for block in blocks:
        out = [r + b for r in out for b in block]
    return tuple(out)


def _simplex_factor_rows(k: int) -> list:
    """Rows ``(v_1(j), ..., v_{k-1}(j))`` with ``v_i(j) = -2/k + 2 δ_ij``, ``j = 1..k``."""
    return [tuple(Fraction(-2, k) + (2 if i == j else 0) for i in range(k - 1)) for j in range(k)]


def _polar_vertices_of_rows(rows: Sequence[Row]) -> list:
    """Vertices of ``{x : <r, x> <= 1 for r in rows}`` (small dimension only)."""
    g = len(rows[0])
    out = []
    for subset in itertools.combinations(rows, g):
        x = _solve_exact(subset, [Fraction(1)] * g)
        if x is not None and all(_dot(r, x) <= 1 for r in rows) and x not in out:
            out.append(x)
    return out


def _interval():
    return LinearPencil.from_rows([(1,), (-1,)], "interval", [(1,), (-1,)], True)


def _cube(g: int):
    rows = []
    for i in range(g):
        for s in (1, -1):
            rows.append(tuple(Fraction(s) if j == i else Fraction(0) for j in range(g)))
    verts = list(itertools.product([Fraction(1), Fraction(-1)], repeat=g))
    return LinearPencil.from_rows(rows, f"cube({g})", verts, True)


def _diamond(g: int):
    rows = list(itertools.product([Fraction(1), Fraction(-1)], repeat=g))
    verts = [r for i in range(g) for r in (tuple(Fraction(s) if j == i else Fraction(0) for j in range(g))
                                           for s in (1, -1))]
    return LinearPencil.from_rows(rows, f"diamond({g})", verts, True)


def _jewel(ks: Sequence[int]):
    ks = tuple(int(k) for k in ks)
    if any(k < 1 for k in ks):
        raise CatalogError("jewel outcome counts must be positive")
    factors = [_simplex_factor_rows(k) if k > 1 else [()] for k in ks]
    rows = _kron_rows(factors)
    g = sum(k - 1 for k in ks)
    if g == 0:
        raise CatalogError("jewel with no variables (all outcome counts 1)")
    verts = []
    offset = 0
    for k, fac in zip(ks, factors):
        if k > 1:
            for w in _polar_vertices_of_rows(fac):
                v = [Fraction(0)] * g
                v[offset:offset + k - 1] = w
                verts.append(tuple(v))
        offset += k - 1
    cid = "jewel(" + ",".join(map(str, ks)) + ")"
    return LinearPencil.from_rows(rows, cid, verts, True)


def _simplex(k: int):
    """Free simplex with rows ``e_1..e_k`` and ``-(1,...,1)``; vertices all-ones and ``-k e_l + (1 - e_l)``."""
    rows = [tuple(Fraction(1 if j == i else 0) for j in range(k)) for i in range(k)]
    rows.append(tuple(Fraction(-1) for _ in range(k)))
    verts = [tuple(Fraction(1) for _ in range(k))]
    verts += [tuple(Fraction(-k if j == l else 1) for j in range(k)) for l in range(k)]
    return LinearPencil.from_rows(rows, f"simplex({k})", verts, True)


def _simplex_Ak(k: int):
    """``A(k)``: simplex in ``k`` variables times an interval, ``d = k + 3``."""
    p = cartesian(_simplex(k), _interval())
    verts = [v + (Fraction(y),) for y in (1, -1) for v in _simplex(k).vertices]
    return LinearPencil.from_rows(p.rows, f"simplex_Ak({k})", verts, True)


def _line_simplex_dual_Bk(k: int):
    """``B(k)``: ``B_j = I_2 ⊗ (I_{k+1} - (k+1) E_j)``, ``B_{k+1} = diag(1,-1) ⊗ I_{k+1}``."""
    A = _simplex_Ak(k)
    # the all-ones simplex vertex comes last, matching the Kronecker form
    sv = _simplex(k).vertices.vertices
    order = list(range(1, k + 1)) + [0]
    rows = [sv[m] + (Fraction(y),) for y in (1, -1) for m in order]
    return LinearPencil.from_rows(rows, f"line_simplex_dual_Bk({k})", facet_rows(A), True)


def _simplex_S(k: int):
    """Three-variable reduction pencil ``S``: ``diag(1,0,-1/(k-1),0,0)``, ``diag(0,1,-1/(k-1),0,0)``, ``diag(0,0,0,-1,1)``."""
    if k < 2:
        raise CatalogError("simplex_S needs k >= 2")
    c = Fraction(-1, k - 1)
    rows = [(Fraction(1), Fraction(0), Fraction(0)),
            (Fraction(0), Fraction(1), Fraction(0)),
            (c, c, Fraction(0)),
            (Fraction(0), Fraction(0), Fraction(-1)),
            (Fraction(0), Fraction(0), Fraction(1))]
    base = [(1, 1), (-k, 1), (1, -k)]
    verts = [(Fraction(a), Fraction(b), Fraction(y)) for y in (1, -1) for a, b in base]
    return LinearPencil.from_rows(rows, f"simplex_S({k})", verts, True)


CATALOG_IDS = ("interval", "cube", "square", "diamond", "jewel", "simplex",
               "simplex_Ak", "line_simplex_dual_Bk", "simplex_S")


def catalog(cid: str, params=None) -> LinearPencil:
    """Named free polytope pencil.

    ``cid`` is one of ``CATALOG_IDS``; ``params`` is an integer (``g`` or ``k``)
    or, for ``jewel``, a sequence of outcome counts.
    """
    def need_int(lo: int) -> int:
        if params is None or isinstance(params, (list, tuple)) and len(params) != 1:
            raise CatalogError(f"{cid} needs one integer parameter")
        v = params[0] if isinstance(params, (list, tuple)) else params
        if int(v) != v or int(v) < lo:
            raise CatalogError(f"{cid} parameter must be an integer >= {lo}, got {v!r}")
        return int(v)

    if cid == "interval":
        return _interval()
    if cid == "square":
        return replace(_cube(2), catalog_id="square")
    if cid == "cube":
        return _cube(need_int(1))
    if cid == "diamond":
        g = need_int(1)
        if g > 12:
            raise CatalogError("diamond dimension 2^g too large")
        return _diamond(g)
    if cid == "jewel":
        if params is None:
            raise CatalogError("jewel needs a sequence of outcome counts")
        ks = params if isinstance(params, (list, tuple)) else (params,)
        if int(np.prod(ks)) > 4096:
            raise CatalogError("jewel dimension too large")
        return _jewel(ks)
    if cid == "simplex":
        return _simplex(need_int(1))
    if cid == "simplex_Ak":
        return _simplex_Ak(need_int(1))
    if cid == "line_simplex_dual_Bk":
        return _line_simplex_dual_Bk(need_int(1))
    if cid == "simplex_S":
        return _simplex_S(need_int(2))
    raise CatalogError(f"unknown catalog id {cid!r}; expected one of {CATALOG_IDS}")
