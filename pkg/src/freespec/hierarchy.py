"""Moment relaxations: NPA (non-commutative) and Lasserre (commutative).

Both hierarchies share one builder.  Polynomials are dictionaries from
words (tuples of letter indices) to real coefficients; a *normal form*
function maps every word to a polynomial in reduced words.  For the
non-commutative case the normal form comes from a rewrite system derived
from the equality constraints; for the commutative case it sorts letters.

At level ``ℓ`` the relaxation has

* the moment matrix ``Γ[u, v] = L(u* v)`` over reduced words ``|u|, |v| <= ℓ``,
  with ``L(1) = 1``;
* for each constraint ``g ⪰ 0`` of degree ``δ`` a localizing matrix
  ``L(u* g v)`` over words of length ``<= ℓ - ⌊δ/2⌋``;
* equality constraints as rewrite rules plus ``L(w h) = 0`` for all words
  ``w`` of length ``<= 2ℓ - deg h`` (these vanish identically when the rewrite
  rules already encode ``h``).

Letters are self-adjoint with real coefficients, so real moments with
``L(w) = L(w*)`` suffice.  Optional sign symmetries (a ``±1`` per letter
leaving the objective and the constraint set invariant) force moments of odd
parity to vanish and split the moment matrix into blocks.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import CapacityError, DomainError
from .linalg import ScalarField
from .sdp import LmiProblem, SolverConfig, Status

log = logging.getLogger(__name__)

NPA_BASIS_CAP = 400
LASSERRE_BASIS_CAP = 500

Word = tuple


# ---------------------------------------------------------------------------
# polynomials


def _clean(terms: dict) -> dict:
    return {w: c for w, c in sorted(terms.items(), key=lambda t: (len(t[0]), t[0])) if abs(c) > 1e-15}


@dataclass(frozen=True)
class NcPolynomial:
    """Real polynomial in self-adjoint non-commuting letters ``0..n-1``."""
    terms: tuple   # ((word, coeff), ...) in canonical (degree, lexicographic) order

    @classmethod
    def from_dict(cls, terms: dict) -> "NcPolynomial":
        return cls(tuple(_clean(terms).items()))

    @classmethod
    def const(cls, c: float) -> "NcPolynomial":
        return cls.from_dict({(): float(c)})

    @classmethod
    def var(cls, i: int) -> "NcPolynomial":
        return cls.from_dict({(int(i),): 1.0})

    @property
    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)

    def _combine(self, other, sign: float) -> "NcPolynomial":
        other = other if isinstance(other, NcPolynomial) else NcPolynomial.const(other)
        d = self.as_dict
        for w, c in other.terms:
            d[w] = d.get(w, 0.0) + sign * c
        return NcPolynomial.from_dict(d)

    def __add__(self, other):
        return self._combine(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return NcPolynomial.from_dict({w: -c for w, c in self.terms})

    def __mul__(self, other):
        if not isinstance(other, NcPolynomial):
            return NcPolynomial.from_dict({w: float(other) * c for w, c in self.terms})
        d = {}
        for w1, c1 in self.terms:
            for w2, c2 in other.terms:
                d[w1 + w2] = d.get(w1 + w2, 0.0) + c1 * c2
        return NcPolynomial.from_dict(d)

    def __rmul__(self, other):
        return self * other

    def adjoint(self) -> "NcPolynomial":
        """Adjoint: every word reversed (letters are self-adjoint, coefficients real)."""
        return NcPolynomial.from_dict({w[::-1]: c for w, c in self.terms})

    def is_symmetric(self) -> bool:
        return self.adjoint() == self

    def commutator(self, other: "NcPolynomial") -> "NcPolynomial":
        return self * other - other * self


@dataclass(frozen=True)
class CommutativePoly:
    """Real polynomial in commuting variables, stored by exponent tuples."""
    nvars: int
    terms: tuple   # ((exponents, coeff), ...) sorted

    @classmethod
    def from_dict(cls, nvars: int, terms: dict) -> "CommutativePoly":
        out = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise DomainError(f"exponent tuple {e} does not have {nvars} entries")
            out[e] = out.get(e, 0.0) + float(c)
        return cls(nvars, tuple(sorted(((e, c) for e, c in out.items() if abs(c) > 1e-15),
                                       key=lambda t: (sum(t[0]), t[0]))))

    @classmethod
    def const(cls, nvars: int, c: float) -> "CommutativePoly":
        return cls.from_dict(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "CommutativePoly":
        e = [0] * nvars
        e[i] = 1
        return cls.from_dict(nvars, {tuple(e): 1.0})

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def _other(self, other) -> "CommutativePoly":
        return other if isinstance(other, CommutativePoly) else CommutativePoly.const(self.nvars, other)

    def __add__(self, other):
        other = self._other(other)
        d = dict(self.terms)
        for e, c in other.terms:
            d[e] = d.get(e, 0.0) + c
        return CommutativePoly.from_dict(self.nvars, d)

    __radd__ = __add__

    def __neg__(self):
        return CommutativePoly.from_dict(self.nvars, {e: -c for e, c in self.terms})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CommutativePoly):
            return CommutativePoly.from_dict(self.nvars, {e: float(other) * c for e, c in self.terms})
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0.0) + c1 * c2
        return CommutativePoly.from_dict(self.nvars, d)

    def __rmul__(self, other):
        return self * other

    def as_words(self) -> dict:
        """Sorted-word representation used by the moment builder."""
        out = {}
        for e, c in self.terms:
            w = tuple(i for i, k in enumerate(e) for _ in range(k))
            out[w] = out.get(w, 0.0) + c
        return out

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(sum(c * np.prod(x ** np.asarray(e)) for e, c in self.terms))


# ---------------------------------------------------------------------------
# rewriting


def _word_order(w: Word):
    return (len(w), w)


@dataclass
class RewriteSystem:
    """Rules ``lhs -> rhs`` (word to polynomial dict), applied leftmost-first.

    Rules are oriented so that the right-hand side only contains words that
    are smaller than ``lhs`` in degree-lexicographic order, which makes
    reduction terminate.
    """
    rules: dict = dc_field(default_factory=dict)   # lhs word -> {word: coeff}

    @classmethod
    def from_equalities(cls, equalities: Sequence[NcPolynomial]) -> "RewriteSystem":
        sys = cls()
        for h in equalities:
            sys.add_equality(h)
        return sys

    def add_equality(self, h: NcPolynomial):
        red = self.reduce_poly(h.as_dict)
        if not red:
            return
        lead = max(red, key=_word_order)
        c = red[lead]
        rhs = {w: -v / c for w, v in red.items() if w != lead}
        self.rules[lead] = rhs
        self._reduce_word.cache_clear()

    def __hash__(self):
        return id(self)

    @lru_cache(maxsize=None)
    def _reduce_word(self, w: Word) -> tuple:
        for i in range(len(w)):
            for lhs, rhs in self.rules.items():
                L = len(lhs)
                if w[i:i + L] == lhs:
                    out = {}
                    pre, post = w[:i], w[i + L:]
                    for rw, rc in rhs.items():
                        for fw, fc in self._reduce_word(pre + rw + post):
                            out[fw] = out.get(fw, 0.0) + rc * fc
                    return tuple((k, v) for k, v in out.items() if abs(v) > 1e-15)
        return ((w, 1.0),)

    def reduce_word(self, w: Word) -> dict:
        return dict(self._reduce_word(tuple(w)))

    def reduce_poly(self, p: dict) -> dict:
        out = {}
        for w, c in p.items():
            for rw, rc in self._reduce_word(tuple(w)):
                out[rw] = out.get(rw, 0.0) + c * rc
        return {w: c for w, c in out.items() if abs(c) > 1e-13}

    def is_reduced(self, w: Word) -> bool:
        return not any(w[i:i + len(l)] == l for l in self.rules for i in range(len(w) - len(l) + 1))

    def critical_pairs(self) -> list:
        """Overlap words ``u v w`` with ``uv`` and ``vw`` both left-hand sides."""
        out = []
        for l1 in self.rules:
            for l2 in self.rules:
                for k in range(1, min(len(l1), len(l2))):
                    if l1[-k:] == l2[:k]:
                        out.append((l1, l2, l1 + l2[k:]))
        return out

    def is_confluent(self, tol: float = 1e-12) -> bool:
        """All critical pairs resolve to the same normal form."""
        for l1, l2, w in self.critical_pairs():
            a = self.reduce_poly(_apply_at(w, 0, l1, self.rules[l1]))
            b = self.reduce_poly(_apply_at(w, len(w) - len(l2), l2, self.rules[l2]))
            keys = set(a) | set(b)
            if any(abs(a.get(k, 0.0) - b.get(k, 0.0)) > tol for k in keys):
                return False
        return True


def _apply_at(w: Word, i: int, lhs: Word, rhs: dict) -> dict:
    pre, post = w[:i], w[i + len(lhs):]
    return {pre + rw + post: c for rw, c in rhs.items()}


# ---------------------------------------------------------------------------
# relaxation builder


@dataclass
class SignSymmetry:
    """``letter -> ±1``; moments of words with odd count of flipped letters vanish."""
    signs: tuple

    def parity(self, w: Word) -> int:
        return sum(1 for a in w if self.signs[a] < 0) % 2


@dataclass
class MomentRelaxation:
    kind: str                      # "npa" or "lasserre"
    level: int
    basis: list                    # reduced words of length <= level
    keys: list                     # moment variables (canonical words)
    key_index: dict
    objective: dict                # key -> coeff (plus constant under ())
    blocks: list                   # (name, words, matrix of linear forms) per LMI block
    lmi: LmiProblem
    letters: list
    symmetries: list
    dropped_equalities: int = 0

    @property
    def basis_size(self) -> int:
        return len(self.basis)

    @property
    def num_moments(self) -> int:
        return len(self.keys)

    def summary(self) -> dict:
        return {"kind": self.kind, "level": self.level, "basis_size": self.basis_size,
                "moments": self.num_moments, "blocks": [b[0] for b in self.blocks],
                "block_sizes": [len(b[1]) for b in self.blocks]}


def _words(n_letters: int, max_len: int, nf_is_reduced: Callable, commutative: bool):
    out = [()]
    for L in range(1, max_len + 1):
        gen = (itertools.combinations_with_replacement(range(n_letters), L) if commutative
               else itertools.product(range(n_letters), repeat=L))
        out += [w for w in gen if nf_is_reduced(w)]
    return out


class _Builder:
    def __init__(self, n_letters, normal_form, reverse_key, symmetries, kind):
        self.n = n_letters
        self.nf = normal_form          # word -> {reduced word: coeff}
        self.rev_key = reverse_key     # reduced word -> canonical key
        self.syms = symmetries
        self.kind = kind
        self.keys: list = []
        self.index: dict = {}

    def _key(self, w: Word):
        if any(s.parity(w) for s in self.syms):
            return None
        k = self.rev_key(w)
        if k not in self.index:
            self.index[k] = len(self.keys)
            self.keys.append(k)
        return k

    def linear_form(self, poly: dict) -> dict:
        """``L(poly)`` as ``{key: coeff}``; the empty word carries the constant."""
        out = {}
        for w, c in poly.items():
            for rw, rc in self.nf(w).items():
                k = self._key(rw)
                if k is None:
                    continue
                out[k] = out.get(k, 0.0) + c * rc
        return {k: v for k, v in out.items() if abs(v) > 1e-14}

    def matrix(self, words: list, g: dict | None) -> list:
        """Entries ``L(u* g v)`` for ``u, v`` in ``words`` (``g = 1`` when ``None``)."""
        g = g if g is not None else {(): 1.0}
        m = len(words)
        M = [[None] * m for _ in range(m)]
        for a in range(m):
            ua = words[a][::-1] if self.kind == "npa" else words[a]
            for b in range(a, m):
                poly = {}
                for gw, gc in g.items():
                    w = ua + gw + words[b]
                    poly[w] = poly.get(w, 0.0) + gc
                M[a][b] = M[b][a] = self.linear_form(poly)
        return M

    def independent(self, words: list, g: dict | None) -> list:
        """Words whose polynomials ``g v`` are linearly independent modulo the rules.

        If ``g v = Σ c_j g v_j`` identically, the localizing matrix is a
        congruence ``Tᵀ M' T`` of the one over the kept words, so positivity is
        unchanged; dropping the dependent words removes structural
        singularities (e.g. ``(1 - A) A = -(1 - A)`` when ``A² = 1``).
        """
        g = g if g is not None else {(): 1.0}
        rows, cols = [], {}
        for v in words:
            poly = {}
            for gw, gc in g.items():
                for rw, rc in self.nf(gw + v).items():
                    k = self.rev_key(rw) if self.kind == "lasserre" else rw
                    poly[k] = poly.get(k, 0.0) + gc * rc
            rows.append(poly)
            for k in poly:
                cols.setdefault(k, len(cols))
        if not cols:
            return []
        M = np.zeros((len(words), len(cols)))
        for i, poly in enumerate(rows):
            for k, c in poly.items():
                M[i, cols[k]] = c
        keep, Q = [], np.zeros((0, len(cols)))
        for i in range(len(words)):
            r = M[i] - (Q.T @ (Q @ M[i]) if len(Q) else 0.0)
            nr = np.linalg.norm(r)
            if nr > 1e-9 * max(1.0, np.linalg.norm(M[i])):
                keep.append(words[i])
                Q = np.vstack([Q, r / nr])
        return keep

    def split(self, words: list, g: dict | None) -> list:
        """Group ``words`` by parity signature when ``g`` is symmetry-invariant."""
        if not self.syms:
            return [words]
        if g is not None and any(s.parity(w) for s in self.syms for w in g):
            return [words]
        groups = {}
        for w in words:
            sig = tuple(s.parity(w) for s in self.syms)
            groups.setdefault(sig, []).append(w)
        return list(groups.values())


def _check_invariance(syms: list, objective: dict, constraints: list, normal_form) -> None:
    """Each symmetry must fix the objective and permute the constraint set."""
    def act(s, p):
        out = {}
        for w, c in p.items():
            for rw, rc in normal_form(w).items():
                sign = -1.0 if s.parity(rw) else 1.0
                out[rw] = out.get(rw, 0.0) + sign * c * rc
        return {w: round(c, 12) for w, c in out.items() if abs(c) > 1e-13}

    def canon(p):
        out = {}
        for w, c in p.items():
            for rw, rc in normal_form(w).items():
                out[rw] = out.get(rw, 0.0) + c * rc
        return {w: round(c, 12) for w, c in out.items() if abs(c) > 1e-13}

    cset = [canon(g) for g in constraints]
    for s in syms:
        if act(s, objective) != canon(objective):
            raise DomainError("sign symmetry does not fix the objective")
        for g in constraints:
            if act(s, g) not in cset:
                raise DomainError("sign symmetry does not map the constraint set to itself")


def _assemble(kind, level, n_letters, objective, constraints, equalities, normal_form, reverse_key,
              is_reduced, symmetries, cap, commutative, letters):
    basis = _words(n_letters, level, is_reduced, commutative)
    if len(basis) > cap:
        raise CapacityError(f"{kind} basis of size {len(basis)} at level {level} exceeds the cap {cap}",
                            required=len(basis), cap=cap)
    syms = [s if isinstance(s, SignSymmetry) else SignSymmetry(tuple(s)) for s in symmetries]
    if syms:
        _check_invariance(syms, objective, constraints, normal_form)
    B = _Builder(n_letters, normal_form, reverse_key, syms, kind)
    B._key(())
    blocks = []
    for part in B.split(basis, None):
        blocks.append(("moment", part, B.matrix(part, None)))
    for ci, g in enumerate(constraints):
        deg = max(len(w) for w in g)
        words = B.independent([w for w in basis if len(w) <= level - deg // 2], g)
        if not words:
            continue
        for part in B.split(words, g):
            blocks.append((f"localizing[{ci}]", part, B.matrix(part, g)))
    # equalities: L(w h) = 0 for words w with |w| <= 2 level - deg h
    eq_rows = []
    dropped = 0
    for h in equalities:
        deg = max(len(w) for w in h)
        for w in _words(n_letters, max(0, 2 * level - deg), lambda _: True, commutative):
            form = B.linear_form({w + hw: c for hw, c in h.items()})
            if form:
                eq_rows.append(form)
            else:
                dropped += 1
    obj = B.linear_form(objective)

    nv = len(B.keys) - 1          # the empty word is the constant 1
    def coords(form):
        out = {}
        const = 0.0
        for k, v in form.items():
            if k == ():
                const += v
            else:
                out[B.index[k] - 1] = out.get(B.index[k] - 1, 0.0) + v
        return const, out

    lmi = LmiProblem(nv, "max")
    for name, words, M in blocks:
        m = len(words)
        F0 = np.zeros((m, m))
        Fs = {}
        for a in range(m):
            for b in range(m):
                const, co = coords(M[a][b])
                F0[a, b] = const
                for j, v in co.items():
                    Fs.setdefault(j, np.zeros((m, m)))[a, b] = v
        lmi.add_lmi(F0, Fs, ScalarField.REAL)
    for form in eq_rows:
        const, co = coords(form)
        lmi.add_linear_le(co, -const)
        lmi.add_linear_le({j: -v for j, v in co.items()}, const)
    const, co = coords(obj)
    c = np.zeros(nv)
    for j, v in co.items():
        c[j] = v
    lmi.set_objective(c)
    objective_forms = {"const": const, "coeffs": co}
    return MomentRelaxation(kind, level, basis, list(B.keys), dict(B.index), objective_forms, blocks, lmi,
                            list(letters), syms, dropped)


def build_npa(objective: NcPolynomial, constraints: Sequence[NcPolynomial], equalities: Sequence[NcPolynomial],
              level: int, n_letters: int | None = None, letters: Sequence[str] | None = None,
              symmetries: Sequence = (), basis_cap: int = NPA_BASIS_CAP) -> MomentRelaxation:
    """NPA relaxation of ``max <ψ, p(X) ψ>`` subject to ``g_i(X) ⪰ 0`` and ``h_j(X) = 0``.

    The equalities are oriented into rewrite rules (leading word in degree-
    lexicographic order) that shrink the word basis, and are also imposed as
    linear moment constraints.
    """
    if level < 1:
        raise DomainError("relaxation level must be at least 1")
    polys = [objective, *constraints, *equalities]
    n = n_letters if n_letters is not None else 1 + max((a for p in polys for w, _ in p.terms for a in w), default=0)
    if not objective.is_symmetric():
        raise DomainError("the objective must be self-adjoint")
    rs = RewriteSystem.from_equalities(equalities)

    def reverse_key(w):
        r = rs.reduce_word(w[::-1])
        if len(r) == 1:
            (rw, rc), = r.items()
            if abs(rc - 1.0) < 1e-14 and rw < w:
                return rw
        return w

    rel = _assemble("npa", level, n, objective.as_dict, [g.as_dict for g in constraints],
                    [h.as_dict for h in equalities], rs.reduce_word, reverse_key, rs.is_reduced,
                    symmetries, basis_cap, False, letters or [f"x{i}" for i in range(n)])
    rel.rewrite = rs
    return rel


def build_lasserre(objective: CommutativePoly, constraints: Sequence[CommutativePoly], level: int,
                   symmetries: Sequence = (), basis_cap: int = LASSERRE_BASIS_CAP,
                   letters: Sequence[str] | None = None) -> MomentRelaxation:
    """Lasserre relaxation of ``max f(x)`` subject to ``g_i(x) >= 0``."""
    if level < 1:
        raise DomainError("relaxation level must be at least 1")
    n = objective.nvars

    def nf(w):
        return {tuple(sorted(w)): 1.0}

    return _assemble("lasserre", level, n, objective.as_words(), [g.as_words() for g in constraints], [],
                     nf, lambda w: w, lambda w: list(w) == sorted(w), symmetries, basis_cap, True,
                     letters or [f"x{i}" for i in range(n)])


# ---------------------------------------------------------------------------
# solving


@dataclass
class RelaxationResult:
    status: Status
    value: float                  # objective at the returned moments
    bound: float                  # certificate from the dual side
    moment_matrix: np.ndarray     # full moment matrix over the basis
    rank_profile: list            # numerical rank of the level-t principal block, t = 0..level
    min_eigenvalue: float
    unit: float                   # Γ[∅, ∅]
    level: int
    basis_size: int

    def to_json(self) -> dict:
        return {"status": self.status.value, "value": self.value, "bound": self.bound, "level": self.level,
                "basis_size": self.basis_size, "rank_profile": self.rank_profile,
                "min_eigenvalue": self.min_eigenvalue, "unit": self.unit}


def solve_relaxation(r: MomentRelaxation, cfg: SolverConfig | None = None,
                     rank_tol: float = 1e-6) -> RelaxationResult:
    """Solve the relaxation; report the bound and the moment-matrix rank profile."""
    cfg = cfg or SolverConfig(gap_tol=1e-9, feas_tol=1e-9, max_dim=4000)
    sol = r.lmi.solve(cfg)
    const = r.objective["const"]
    y = sol.y
    value = const + float(r.lmi.c @ y)
    bound = const + sol.bound
    # full moment matrix over the basis (cross-parity entries vanish)
    idx = {w: i for i, w in enumerate(r.basis)}
    n = len(r.basis)
    G = np.zeros((n, n))
    for (name, words, _), S in zip(r.blocks, sol.slacks):
        if name != "moment":
            continue
        ids = [idx[w] for w in words]
        G[np.ix_(ids, ids)] = np.real(S)
    w_all = np.linalg.eigvalsh(G) if n else np.zeros(0)
    prof = []
    for t in range(r.level + 1):
        ids = [i for i, w in enumerate(r.basis) if len(w) <= t]
        ev = np.linalg.eigvalsh(G[np.ix_(ids, ids)])
        prof.append(int(np.sum(ev > rank_tol * max(1.0, ev.max()))))
    return RelaxationResult(sol.status, value, bound, G, prof, float(w_all.min()), float(G[0, 0]), r.level, n)


# ---------------------------------------------------------------------------
# named problems


def line_simplex_problem(k: int, extra_equalities: bool = True):
    """One dichotomic plus one ``k``-outcome measurement, in operator form.

    Letters: ``A11, A_{1|2}..A_{k-1|2}, X11, X_{1|2}..X_{k-1|2}``.  Objective
    ``A11 X11 + Σ A_{i|2} X_{i|2}``; the ``A`` letters commute with the
    ``X`` letters (tensor-product structure).  With ``extra_equalities`` the
    extreme-point structure is imposed: ``A11² = 1``, the ``A_{i|2}`` commute
    and have spectrum ``{-2/k, 2 - 2/k}``; together with the constraints this
    forces ``(A_{i|2} + 2/k)(A_{j|2} + 2/k) = 0`` for ``i != j``, which is added
    as well.

    Returns ``(objective, constraints, equalities, letters, symmetries)``.
    """
    if k < 2:
        raise DomainError("k must be at least 2")
    m = k - 1
    a11, As = NcPolynomial.var(0), [NcPolynomial.var(1 + i) for i in range(m)]
    x11, Xs = NcPolynomial.var(1 + m), [NcPolynomial.var(2 + m + i) for i in range(m)]
    one = NcPolynomial.const(1.0)
    obj = a11 * x11 + sum((a * x for a, x in zip(As, Xs)), NcPolynomial.const(0.0))
    obj = 0.5 * (obj + obj.adjoint())
    cons = [one - a11, one + a11]
    cons += [one + (k / 2.0) * a for a in As]
    cons += [one - (k / 2.0) * sum(As, NcPolynomial.const(0.0))]
    sX = sum(Xs, NcPolynomial.const(0.0))
    for sgn in (1.0, -1.0):
        base = sgn * x11 - (2.0 / k) * sX
        cons += [one - (base + 2.0 * x) for x in Xs]
        cons += [one - base]
    eqs = [a.commutator(x) for a in [a11, *As] for x in [x11, *Xs]]
    if extra_equalities:
        eqs.append(a11 * a11 - one)
        eqs += [As[i].commutator(As[j]) for i in range(m) for j in range(i + 1, m)]
        eqs += [(a + 2.0 / k) * (a - (2.0 - 2.0 / k)) for a in As]
        # implied: the effects 2E_i = A_i + 2/k are then orthogonal projections with
        # Σ E_i <= I, so E_i E_j = 0; imposing it keeps the relaxation strictly feasible
        eqs += [(As[i] + 2.0 / k) * (As[j] + 2.0 / k) for i in range(m) for j in range(i + 1, m)]
    letters = ["A11"] + [f"A{i + 1}|2" for i in range(m)] + ["X11"] + [f"X{i + 1}|2" for i in range(m)]
    signs = [1] * (2 * k)
    signs[0] = signs[1 + m] = -1
    return obj, cons, eqs, letters, [SignSymmetry(tuple(signs))]


def npa_line_simplex(k: int, level: int, extra_equalities: bool = True, **kw) -> MomentRelaxation:
    obj, cons, eqs, letters, syms = line_simplex_problem(k, extra_equalities)
    return build_npa(obj, cons, eqs, level, n_letters=2 * k, letters=letters, symmetries=syms, **kw)


def bloch_problem(g: int):
    """Commutative Bloch problem: maximize ``Σ <a_i, x_i>`` over unit-ball ``a_i``
    with ``‖Σ ε_i x_i‖ <= 1`` for all signs (``ε`` and ``-ε`` give the same constraint,
    so only ``ε_1 = +1`` is listed).

    Variables: ``a^{(i)}_j = 6i + j``, ``x^{(i)}_j = 6i + 3 + j``.  Sign
    symmetries: flipping ``(a_i, x_i)`` for one ``i``, and flipping coordinate
    ``j`` of every vector.
    """
    if g < 1:
        raise DomainError("g must be positive")
    n = 6 * g
    V = lambda i: CommutativePoly.var(n, i)
    one = CommutativePoly.const(n, 1.0)
    obj = CommutativePoly.const(n, 0.0)
    for i in range(g):
        for j in range(3):
            obj = obj + V(6 * i + j) * V(6 * i + 3 + j)
    cons = []
    for i in range(g):
        cons.append(one - sum((V(6 * i + j) * V(6 * i + j) for j in range(3)), CommutativePoly.const(n, 0.0)))
    for tail in itertools.product((1, -1), repeat=g - 1):
        eps = (1,) + tail
        c = one
        for j in range(3):
            s = CommutativePoly.const(n, 0.0)
            for i, e in enumerate(eps):
                s = s + e * V(6 * i + 3 + j)
            c = c - s * s
        cons.append(c)
    syms = []
    for i in range(g):
        signs = [1] * n
        for j in range(6):
            signs[6 * i + j] = -1
        syms.append(SignSymmetry(tuple(signs)))
    for j in range(3):
        signs = [1] * n
        for i in range(g):
            signs[6 * i + j] = signs[6 * i + 3 + j] = -1
        syms.append(SignSymmetry(tuple(signs)))
    letters = [f"{v}{i + 1}_{j + 1}" for i in range(g) for v in ("a", "x") for j in range(3)]
    return obj, cons, letters, syms


def lasserre_bloch(g: int, level: int, **kw) -> MomentRelaxation:
    obj, cons, letters, syms = bloch_problem(g)
    return build_lasserre(obj, cons, level, symmetries=syms, letters=letters, **kw)


# ---------------------------------------------------------------------------
# the extracted 12-dimensional optimizer for k = 3


def extracted_tuple(as_printed: bool = False) -> dict:
    """The 12-dimensional optimizer for the ``k = 3`` problem.

    ``as_printed=True`` returns the matrices exactly as they are usually
    displayed; that version has two sign slips in the diagonal blocks of
    ``X_{2|2}`` (first block ``diag(2-√3, 1-√3)``, last block
    ``diag(1-√3, √3-2)``) and violates the jewel constraints.  The default
    returns the corrected blocks ``diag(√3-2, √3-1)`` and ``diag(1-√3, 2-√3)``.
    """
    s3 = math.sqrt(3.0)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.diag([1.0, -1.0])
    I2, I4 = np.eye(2), np.eye(4)
    k = np.kron
    X11 = (s3 - 1) * block_diag(k(sx, I2), k(k(I2, sx), sz))
    X12 = s3 / 2 * block_diag(-k(sz, I2), k(k(sz, np.diag([s3 - 2, s3 - 1])), I2))
    if as_printed:
        first, last = np.diag([2 - s3, 1 - s3]), np.diag([1 - s3, s3 - 2])
    else:
        first, last = np.diag([s3 - 2, s3 - 1]), np.diag([1 - s3, 2 - s3])
    X22 = s3 / 2 * block_diag(k(first, I2), -k(sz, I2), k(last, I2))
    A11 = -block_diag(k(I2, sx), k(k(I2, sz), sx))
    A12 = -2.0 / 3.0 * block_diag(k(I2, np.diag([1.0, -2.0])), I4, k(I2, np.diag([-2.0, 1.0])))
    A22 = -2.0 / 3.0 * block_diag(I4, k(I4, np.diag([1.0, -2.0])))
    return {"A11": A11, "A1|2": A12, "A2|2": A22, "X11": X11, "X1|2": X12, "X2|2": X22}


@dataclass
class PointCheck:
    ok: bool
    value: float                  # λ_max of the objective operator
    min_constraint_eig: float
    max_equality_residual: float
    max_commutator: float


def _eval_nc(p: NcPolynomial, mats: list) -> np.ndarray:
    n = mats[0].shape[0]
    out = np.zeros((n, n))
    for w, c in p.terms:
        M = np.eye(n)
        for a in w:
            M = M @ mats[a]
        out = out + c * M
    return out


def check_line_simplex_point(mats: dict, k: int = 3, tol: float = 1e-9, extra_equalities: bool = True) -> PointCheck:
    """Evaluate every constraint of the operator problem at concrete matrices."""
    obj, cons, eqs, letters, _ = line_simplex_problem(k, extra_equalities)
    seq = [np.asarray(mats[name], dtype=float) for name in letters]
    min_eig = min(float(np.linalg.eigvalsh(_eval_nc(g, seq)).min()) for g in cons)
    eq_res = max(float(np.max(np.abs(_eval_nc(h, seq)))) for h in eqs)
    m = k - 1
    comm = max(float(np.max(np.abs(seq[a] @ seq[x] - seq[x] @ seq[a])))
               for a in range(1 + m) for x in range(1 + m, 2 + 2 * m))
    value = float(np.linalg.eigvalsh(_eval_nc(obj, seq)).max())
    ok = min_eig >= -tol and eq_res <= tol and comm <= tol
    return PointCheck(ok, value, min_eig, eq_res, comm)
