"""Dense self-adjoint linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays.  A self-adjoint matrix is symmetrized on
construction via :func:`sym`, and tuples of same-size self-adjoint matrices
are wrapped in :class:`MatrixTuple`, which also records the scalar field.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import ArityError, FieldError, NumericalFailure

HERMITIAN_ATOL = 1e-12
DEFAULT_TOL = 1e-8

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


class ScalarField(enum.Enum):
    """The scalar field of a matrix or tuple of matrices."""

    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def of(cls, m) -> "ScalarField":
        """Field needed to represent ``m`` (complex only if some imaginary part is nonzero)."""
        m = np.asarray(m)
        if np.iscomplexobj(m) and np.any(np.abs(m.imag) > 0.0):
            return cls.COMPLEX
        return cls.REAL

    @classmethod
    def join(cls, *fields: "ScalarField") -> "ScalarField":
        return cls.COMPLEX if cls.COMPLEX in fields else cls.REAL

    @property
    def dtype(self):
        return np.complex128 if self is ScalarField.COMPLEX else np.float64


def sym(m, field: ScalarField | None = None, check: bool = False) -> np.ndarray:
    """Return the self-adjoint part ``(m + m^*)/2`` of a square matrix.

    With ``check=True`` an error is raised if ``m`` is farther than
    ``HERMITIAN_ATOL`` (relative to its size) from self-adjoint.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if check:
        dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if dev > HERMITIAN_ATOL * max(1.0, np.max(np.abs(m))):
            raise ValueError(f"matrix is not self-adjoint (deviation {dev:.3e})")
    if field is None:
        field = ScalarField.of(m)
    if field is ScalarField.REAL:
        if np.iscomplexobj(m):
            if np.any(np.abs(m.imag) > HERMITIAN_ATOL * max(1.0, np.max(np.abs(m)))):
                raise FieldError("complex entries in a matrix declared real")
            m = m.real
        m = np.asarray(m, dtype=np.float64)
        return 0.5 * (m + m.T)
    m = np.asarray(m, dtype=np.complex128)
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class EigDecomposition:
    """Eigenvalues in ascending order with orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def max(self) -> float:
        return float(self.values[-1])

    @property
    def min(self) -> float:
        return float(self.values[0])


def eig_sym(m) -> EigDecomposition:
    """Spectral decomposition of a self-adjoint matrix."""
    m = sym(m)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    return EigDecomposition(values, vectors)


def lambda_max(m) -> float:
    return float(np.linalg.eigvalsh(sym(m))[-1])


def lambda_min(m) -> float:
    return float(np.linalg.eigvalsh(sym(m))[0])


def spectral_norm(m) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(sym(m)))))


def kron(a, b) -> np.ndarray:
    """Kronecker product with the block layout ``(a ⊗ b)[i*nb + k, j*nb + l] = a[i,j] b[k,l]``."""
    return np.kron(np.asarray(a), np.asarray(b))


def kernel_basis(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the near-kernel of a self-adjoint matrix.

    Eigenvectors whose eigenvalue satisfies ``|λ| <= tol * max(1, ||m||_2)``
    are kept.  The result has shape ``(n, r)`` with ``r`` possibly zero.
    """
    e = eig_sym(m)
    scale = max(1.0, float(np.max(np.abs(e.values))) if e.values.size else 1.0)
    mask = np.abs(e.values) <= tol * scale
    return e.vectors[:, mask]


def real_embedding(m) -> np.ndarray:
    """Real ``2n x 2n`` matrix ``[[Re m, Im m], [-Im m, Re m]]`` of a Hermitian matrix.

    Its spectrum is that of ``m`` with every multiplicity doubled, so it is
    PSD exactly when ``m`` is.
    """
    m = np.asarray(m)
    re, im = np.real(m), np.imag(m)
    return sym(np.block([[re, im], [-im, re]]), ScalarField.REAL)


def real_embedding_inverse(r) -> np.ndarray:
    """Recover a Hermitian ``n x n`` matrix from (an approximation of) its real embedding.

    The embedding is not onto, so the nearest preimage is used: the real part is
    the average of the two diagonal blocks and the imaginary part the average of
    the off-diagonal blocks with the appropriate sign.
    """
    r = np.asarray(r, dtype=float)
    n = r.shape[0] // 2
    re = 0.5 * (r[:n, :n] + r[n:, n:])
    im = 0.5 * (r[:n, n:] - r[n:, :n])
    return sym(re + 1j * im, ScalarField.COMPLEX)


def direct_sum(*mats) -> np.ndarray:
    return block_diag(*[np.asarray(m) for m in mats])


def psd_check(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``λ_min(m) >= -tol * max(1, ||m||_2)``."""
    m = np.asarray(m)
    if m.size == 0:
        return True
    vals = np.linalg.eigvalsh(sym(m))
    return bool(vals[0] >= -tol * max(1.0, float(np.max(np.abs(vals)))))


def frob_inner(a, b) -> float:
    """Real Frobenius inner product ``Re tr(a^* b)``."""
    return float(np.real(np.vdot(np.asarray(a), np.asarray(b))))


def random_unitary(n: int, rng: np.random.Generator, field: ScalarField = ScalarField.COMPLEX) -> np.ndarray:
    """Haar-random orthogonal/unitary matrix via QR with phase correction."""
    if field is ScalarField.COMPLEX:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, field: ScalarField = ScalarField.REAL) -> np.ndarray:
    m = rng.standard_normal((n, n))
    if field is ScalarField.COMPLEX:
        m = m + 1j * rng.standard_normal((n, n))
    return sym(m, field)


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """A ``g``-tuple of self-adjoint ``n x n`` matrices over one scalar field.

    ``items`` is stored as a ``(g, n, n)`` array; each slice is symmetrized on
    construction.
    """

    items: np.ndarray
    field: ScalarField = ScalarField.REAL

    def __post_init__(self):
        arr = np.asarray(self.items)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"expected shape (g, n, n), got {arr.shape}")
        if self.field is ScalarField.REAL and ScalarField.of(arr) is ScalarField.COMPLEX:
            raise FieldError("complex entries in a tuple declared real")
        arr = arr.astype(self.field.dtype, copy=True)
        arr = 0.5 * (arr + np.conj(np.swapaxes(arr, 1, 2)))
        arr.setflags(write=False)
        object.__setattr__(self, "items", arr)

    @classmethod
    def of(cls, mats: Iterable, field: ScalarField | None = None) -> "MatrixTuple":
        """Build a tuple from a sequence of square matrices (field inferred if omitted)."""
        mats = [np.atleast_2d(np.asarray(m)) for m in mats]
        if not mats:
            raise ArityError("a matrix tuple needs at least one item")
        n = mats[0].shape[0]
        if any(m.shape != (n, n) for m in mats):
            raise ValueError("all items must share the same square shape")
        if field is None:
            field = ScalarField.join(*(ScalarField.of(m) for m in mats))
        return cls(np.stack(mats), field)

    @classmethod
    def zeros(cls, g: int, n: int, field: ScalarField = ScalarField.REAL) -> "MatrixTuple":
        return cls(np.zeros((g, n, n), dtype=field.dtype), field)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "MatrixTuple":
        """Level-1 tuple from a real point ``x``."""
        x = np.asarray(x, dtype=float).reshape(-1)
        return cls(x.reshape(-1, 1, 1), ScalarField.REAL)

    @property
    def g(self) -> int:
        return self.items.shape[0]

    @property
    def n(self) -> int:
        return self.items.shape[1]

    def __len__(self) -> int:
        return self.g

    def __getitem__(self, i) -> np.ndarray:
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def _check_compatible(self, other: "MatrixTuple"):
        if self.g != other.g:
            raise ArityError(f"arity mismatch: {self.g} vs {other.g}")
        if self.n != other.n:
            raise ValueError(f"level mismatch: {self.n} vs {other.n}")
        if self.field is not other.field:
            raise FieldError("mixed-field tuple arithmetic")

    def __add__(self, other: "MatrixTuple") -> "MatrixTuple":
        self._check_compatible(other)
        return MatrixTuple(self.items + other.items, self.field)

    def __sub__(self, other: "MatrixTuple") -> "MatrixTuple":
        self._check_compatible(other)
        return MatrixTuple(self.items - other.items, self.field)

    def __mul__(self, s: float) -> "MatrixTuple":
        return MatrixTuple(float(s) * self.items, self.field)

    __rmul__ = __mul__

    def __neg__(self) -> "MatrixTuple":
        return MatrixTuple(-self.items, self.field)

    def astype(self, field: ScalarField) -> "MatrixTuple":
        return MatrixTuple(self.items, field)

    def allclose(self, other: "MatrixTuple", atol: float = 1e-10) -> bool:
        return self.items.shape == other.items.shape and bool(np.allclose(self.items, other.items, atol=atol))

    def conjugate_by(self, v) -> "MatrixTuple":
        """Itemwise ``V^* X_i V`` for an ``n x m`` matrix ``V``."""
        v = np.asarray(v)
        field = ScalarField.join(self.field, ScalarField.of(v))
        out = np.einsum("ji,gjk,kl->gil", v.conj(), self.items, v)
        return MatrixTuple(out, field)

    def real_embedding(self) -> "MatrixTuple":
        return MatrixTuple(np.stack([real_embedding(x) for x in self.items]), ScalarField.REAL)

    def is_commuting(self, tol: float = 1e-9) -> bool:
        for i in range(self.g):
            for j in range(i + 1, self.g):
                c = self.items[i] @ self.items[j] - self.items[j] @ self.items[i]
                if np.max(np.abs(c)) > tol:
                    return False
        return True

    def to_json(self) -> dict:
        return {"field": self.field.value, "g": self.g, "n": self.n,
                "items": [encode_matrix(m) for m in self.items]}

    @classmethod
    def from_json(cls, data: dict) -> "MatrixTuple":
        field = ScalarField(data.get("field", "real"))
        return cls.of([decode_matrix(m) for m in data["items"]], field)


def direct_sum_tuples(*tuples: MatrixTuple) -> MatrixTuple:
    """Itemwise direct sum of tuples of equal arity."""
    g = tuples[0].g
    if any(t.g != g for t in tuples):
        raise ArityError("direct sum needs equal arities")
    field = ScalarField.join(*(t.field for t in tuples))
    return MatrixTuple(np.stack([direct_sum(*(t[i] for t in tuples)) for i in range(g)]), field)


def conjugate_by(t: MatrixTuple, v) -> MatrixTuple:
    return t.conjugate_by(v)


def encode_matrix(m) -> list:
    """Row-major nested lists; complex entries become ``[re, im]`` pairs."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[float(z) for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr
