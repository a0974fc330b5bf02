"""Scalar backends, the Matrix type and the linear algebra every other module uses.

Four backends share one Matrix type:

* ``rational``: exact ``fractions.Fraction`` entries,
* ``gaussian``: exact ``Gaussian`` entries (a + bi with rational a, b),
* ``float`` and ``complex``: numpy double precision.

Structural decisions (rank, nullspace, inertia) are exact on the exact
backends. On the float backends they use elimination against the pivot
threshold ``rank_tol * max(1, max|entry|)``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BackendMismatch, InvariantError

EXACT = ("rational", "gaussian")
BACKENDS = ("rational", "gaussian", "float", "complex")
_COMPLEX_OF = {"rational": "gaussian", "gaussian": "gaussian", "float": "complex", "complex": "complex"}
_REAL_OF = {"rational": "rational", "gaussian": "rational", "float": "float", "complex": "float"}


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds for float decisions.

    rank_tol: pivot threshold relative to ``max(1, max|entry|)``.
    residual_tol: bound on reconstruction residuals.
    """

    rank_tol: float = 1e-9
    residual_tol: float = 1e-10

    def __post_init__(self):
        if not (self.rank_tol > 0 and self.residual_tol > 0):
            raise InvariantError("tolerances must be strictly positive")

    @classmethod
    def from_env(cls) -> TolerancePolicy:
        """Default policy with ``residual_tol`` overridden by ``SYMPLECTA_TOL``."""
        raw = os.environ.get("SYMPLECTA_TOL")
        if raw is None or raw.strip() == "":
            return cls()
        try:
            return cls(residual_tol=float(raw))
        except ValueError as exc:
            raise InvariantError(f"SYMPLECTA_TOL is not a number: {raw!r}") from exc


def default_policy() -> TolerancePolicy:
    return TolerancePolicy.from_env()


class Gaussian:
    """Exact Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, (int, Fraction)):
            return Gaussian(x)
        return None

    def __add__(self, other):
        o = Gaussian._lift(other)
        if o is None:
            return NotImplemented
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = Gaussian._lift(other)
        if o is None:
            return NotImplemented
        return Gaussian(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = Gaussian._lift(other)
        if o is None:
            return NotImplemented
        return Gaussian(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Gaussian(self.re * other, self.im * other)
        if not isinstance(other, Gaussian):
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return Gaussian(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Gaussian division by zero")
            return Gaussian(self.re / other, self.im / other)
        if not isinstance(other, Gaussian):
            return NotImplemented
        c, d = other.re, other.im
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        a, b = self.re, self.im
        return Gaussian((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        o = Gaussian._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> Gaussian:
        return Gaussian(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __eq__(self, other):
        o = Gaussian._lift(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = Gaussian(0, 1)


def _to_rational(x) -> Fraction:
    if type(x) is Fraction:
        return x
    if isinstance(x, Gaussian):
        if x.im:
            raise InvariantError(f"non-real entry {x} for rational backend")
        return x.re
    if isinstance(x, (int, Rational, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InvariantError("non-finite entry for rational backend")
        return Fraction(x)
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        if x.imag:
            raise InvariantError(f"non-real entry {x} for rational backend")
        return Fraction(float(x.real))
    if isinstance(x, (np.integer, np.floating)):
        return _to_rational(x.item())
    raise InvariantError(f"cannot read {x!r} as a rational")


def _to_gaussian(x) -> Gaussian:
    if isinstance(x, Gaussian):
        return x
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InvariantError(f"complex entry must be [re, im], got {x!r}")
        return Gaussian(_to_rational(x[0]), _to_rational(x[1]))
    if isinstance(x, (complex, np.complexfloating)):
        return Gaussian(Fraction(float(x.real)), Fraction(float(x.imag)))
    return Gaussian(_to_rational(x))


def _to_float(x) -> float:
    if isinstance(x, (list, tuple)):
        raise InvariantError(f"complex entry {x!r} for float backend")
    if isinstance(x, (complex, np.complexfloating, Gaussian)):
        z = complex(x)
        if z.imag:
            raise InvariantError(f"non-real entry {x} for float backend")
        return z.real
    return float(Fraction(x)) if isinstance(x, str) else float(x)


def _to_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InvariantError(f"complex entry must be [re, im], got {x!r}")
        return complex(_to_float(x[0]), _to_float(x[1]))
    if isinstance(x, str):
        return complex(float(Fraction(x)))
    return complex(x)


_CONVERT = {"rational": _to_rational, "gaussian": _to_gaussian, "float": _to_float, "complex": _to_complex}
_DTYPE = {"rational": object, "gaussian": object, "float": np.float64, "complex": np.complex128}


def _zero(backend):
    return {"rational": Fraction(0), "gaussian": Gaussian(0), "float": 0.0, "complex": 0j}[backend]


def _one(backend):
    return {"rational": Fraction(1), "gaussian": Gaussian(1), "float": 1.0, "complex": 1 + 0j}[backend]


class Matrix:
    """Immutable 2-D matrix over a single scalar backend.

    Arithmetic between different backends raises ``BackendMismatch``; use
    ``to`` (exact widening) or ``rationalize`` to move between them.
    """

    __slots__ = ("a", "backend")

    def __init__(self, data, backend: str = "rational"):
        if backend not in BACKENDS:
            raise InvariantError(f"unknown backend {backend!r}")
        if isinstance(data, Matrix):
            if data.backend != backend:
                raise BackendMismatch(f"{data.backend} matrix given where {backend} expected")
            arr = data.a
        else:
            arr = _build_array(data, backend)
        if arr.ndim != 2:
            raise InvariantError(f"matrix data must be 2-D, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "a", arr)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # constructors
    @classmethod
    def zeros(cls, rows: int, cols: int, backend: str = "rational") -> Matrix:
        arr = np.empty((rows, cols), dtype=_DTYPE[backend])
        if backend in EXACT:
            z = _zero(backend)
            for idx in np.ndindex(rows, cols):
                arr[idx] = z
        else:
            arr[...] = 0
        return cls._fast(arr, backend)

    @classmethod
    def eye(cls, n: int, backend: str = "rational") -> Matrix:
        arr = np.empty((n, n), dtype=_DTYPE[backend])
        z, o = _zero(backend), _one(backend)
        for i in range(n):
            for j in range(n):
                arr[i, j] = o if i == j else z
        return cls._fast(arr, backend)

    @classmethod
    def from_numpy(cls, arr) -> Matrix:
        arr = np.asarray(arr)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        backend = "complex" if np.iscomplexobj(arr) else "float"
        return cls._fast(np.array(arr, dtype=_DTYPE[backend]), backend)

    @classmethod
    def _fast(cls, arr: np.ndarray, backend: str) -> Matrix:
        """Wrap an array whose entries already have the backend's scalar type."""
        m = object.__new__(cls)
        arr.flags.writeable = False
        object.__setattr__(m, "a", arr)
        object.__setattr__(m, "backend", backend)
        return m

    # shape
    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def is_exact(self) -> bool:
        return self.backend in EXACT

    @property
    def is_complex(self) -> bool:
        return self.backend in ("gaussian", "complex")

    # conversion
    def to(self, backend: str) -> Matrix:
        """Widen to another backend; narrowing conversions are rejected."""
        if backend == self.backend:
            return self
        allowed = {
            "rational": ("gaussian", "float", "complex"),
            "gaussian": ("complex",),
            "float": ("complex",),
            "complex": (),
        }[self.backend]
        if backend not in allowed:
            raise BackendMismatch(f"cannot convert {self.backend} to {backend} without rationalize/real part")
        if backend in ("float", "complex"):
            if self.backend == "gaussian":
                flat = [complex(x) for x in self.a.ravel()]
            else:
                flat = [float(x) for x in self.a.ravel()]
            return Matrix._fast(np.array(flat, dtype=_DTYPE[backend]).reshape(self.shape), backend)
        return Matrix._fast(_map_obj(self.a, Gaussian), backend)

    def to_numpy(self) -> np.ndarray:
        """Float or complex ndarray copy of the entries."""
        if self.backend == "rational":
            return np.array([float(x) for x in self.a.ravel()], dtype=float).reshape(self.shape)
        if self.backend == "gaussian":
            return np.array([complex(x) for x in self.a.ravel()], dtype=complex).reshape(self.shape)
        return np.array(self.a)

    def real(self) -> Matrix:
        if self.backend == "gaussian":
            return Matrix._fast(_map_obj(self.a, lambda x: x.re), "rational")
        if self.backend == "complex":
            return Matrix._fast(np.ascontiguousarray(self.a.real), "float")
        return self

    def imag(self) -> Matrix:
        if self.backend == "gaussian":
            return Matrix._fast(_map_obj(self.a, lambda x: x.im), "rational")
        if self.backend == "complex":
            return Matrix._fast(np.ascontiguousarray(self.a.imag), "float")
        return Matrix.zeros(*self.shape, backend=self.backend)

    def conj(self) -> Matrix:
        if self.backend == "gaussian":
            return Matrix._fast(_map_obj(self.a, Gaussian.conjugate), "gaussian")
        if self.backend == "complex":
            return Matrix._fast(np.conj(self.a), "complex")
        return self

    @property
    def T(self) -> Matrix:
        return Matrix._fast(np.ascontiguousarray(self.a.T), self.backend)

    @property
    def H(self) -> Matrix:
        return self.conj().T

    # arithmetic
    def _check(self, other: Matrix):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.backend != self.backend:
            raise BackendMismatch(f"mixed backends {self.backend} and {other.backend}")

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.cols != other.rows:
            raise InvariantError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.is_exact:
            if self.cols == 0:
                return Matrix.zeros(self.rows, other.cols, self.backend)
            return Matrix._fast(self.a.dot(other.a), self.backend)
        return Matrix._fast(self.a @ other.a, self.backend)

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.shape != other.shape:
            raise InvariantError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix._fast(self.a + other.a, self.backend)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.shape != other.shape:
            raise InvariantError(f"shape mismatch {self.shape} - {other.shape}")
        return Matrix._fast(self.a - other.a, self.backend)

    def __neg__(self) -> Matrix:
        return Matrix._fast(-self.a, self.backend)

    def _scalar(self, s):
        if isinstance(s, Matrix):
            raise TypeError("use @ for matrix products")
        if self.backend == "rational":
            return _to_rational(s)
        if self.backend == "gaussian":
            return _to_gaussian(s)
        if self.backend == "float":
            if isinstance(s, (Fraction, int, float, np.floating, np.integer)):
                return float(s)
            raise BackendMismatch(f"scalar {s!r} is not a float")
        if isinstance(s, Gaussian):
            raise BackendMismatch("exact scalar on complex backend")
        return complex(s)

    def __mul__(self, s) -> Matrix:
        return Matrix._fast(self.a * self._scalar(s), self.backend)

    __rmul__ = __mul__

    def __truediv__(self, s) -> Matrix:
        return Matrix._fast(self.a / self._scalar(s), self.backend)

    def __getitem__(self, key):
        out = self.a[key]
        if isinstance(out, np.ndarray):
            if out.ndim == 1:
                # a single row or column selected by an integer index
                if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], (int, np.integer)):
                    out = out.reshape(-1, 1)
                else:
                    out = out.reshape(1, -1)
            return Matrix._fast(np.array(out, dtype=self.a.dtype), self.backend)
        return out

    def col(self, j: int) -> Matrix:
        return self[:, j : j + 1]

    def columns(self, idx: Sequence[int]) -> Matrix:
        return Matrix._fast(np.array(self.a[:, list(idx)], dtype=self.a.dtype).reshape(self.rows, len(idx)), self.backend)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if other.backend != self.backend or other.shape != self.shape:
            return False
        return bool(np.all(self.a == other.a)) if self.a.size else True

    __hash__ = None

    def is_zero(self, pol: TolerancePolicy | None = None) -> bool:
        if self.is_exact:
            return all(not x for x in self.a.ravel())
        pol = pol or default_policy()
        return self.norm() <= pol.residual_tol * max(1.0, self.scale())

    def norm(self) -> float:
        """Frobenius norm as a float."""
        return float(np.linalg.norm(self.to_numpy())) if self.a.size else 0.0

    def scale(self) -> float:
        return float(np.max(np.abs(self.to_numpy()))) if self.a.size else 0.0

    def tolist(self) -> list[list]:
        return [list(r) for r in self.a]

    def __repr__(self):
        return f"Matrix({self.tolist()!r}, backend={self.backend!r})"


def _map_obj(arr: np.ndarray, fn: Callable) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(*arr.shape):
        out[idx] = fn(arr[idx])
    return out


def _build_array(data, backend: str) -> np.ndarray:
    if isinstance(data, np.ndarray) and data.dtype != object and backend not in EXACT:
        arr = np.array(data, dtype=_DTYPE[backend])
        return arr.reshape(-1, 1) if arr.ndim == 1 else arr
    rows = [list(r) for r in data]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise InvariantError("ragged matrix data")
    ncols = len(rows[0]) if rows else 0
    conv = _CONVERT[backend]
    arr = np.empty((len(rows), ncols), dtype=_DTYPE[backend])
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            arr[i, j] = conv(x)
    return arr


def hstack(*ms: Matrix) -> Matrix:
    ms = [m for m in ms]
    if not ms:
        raise InvariantError("hstack of nothing")
    b = ms[0].backend
    for m in ms:
        ms[0]._check(m)
    rows = ms[0].rows
    if any(m.rows != rows for m in ms):
        raise InvariantError("hstack row mismatch")
    return Matrix._fast(np.concatenate([m.a for m in ms], axis=1).astype(_DTYPE[b]), b)


def vstack(*ms: Matrix) -> Matrix:
    ms = list(ms)
    if not ms:
        raise InvariantError("vstack of nothing")
    b = ms[0].backend
    for m in ms:
        ms[0]._check(m)
    cols = ms[0].cols
    if any(m.cols != cols for m in ms):
        raise InvariantError("vstack column mismatch")
    return Matrix._fast(np.concatenate([m.a for m in ms], axis=0).astype(_DTYPE[b]), b)


def block(grid: Sequence[Sequence[Matrix]]) -> Matrix:
    return vstack(*[hstack(*row) for row in grid])


def block_diag(*ms: Matrix) -> Matrix:
    b = ms[0].backend
    rows = sum(m.rows for m in ms)
    cols = sum(m.cols for m in ms)
    out = Matrix.zeros(rows, cols, b).a.copy()
    r = c = 0
    for m in ms:
        ms[0]._check(m)
        out[r : r + m.rows, c : c + m.cols] = m.a
        r += m.rows
        c += m.cols
    return Matrix._fast(out, b)


def same_backend(*ms: Matrix) -> list[Matrix]:
    """Widen matrices to a common backend (exact where all inputs are exact)."""
    bs = {m.backend for m in ms}
    if len(bs) == 1:
        return list(ms)
    cplx = bool(bs & {"gaussian", "complex"})
    exact = bs <= set(EXACT)
    target = ("gaussian" if cplx else "rational") if exact else ("complex" if cplx else "float")
    return [m.to(target) for m in ms]


# ---------------------------------------------------------------- elimination


def _abs_tol(M: Matrix, pol: TolerancePolicy) -> float:
    return pol.rank_tol * max(1.0, M.scale())


def rref(M: Matrix, pol: TolerancePolicy | None = None) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns.

    Exact backends pick the first nonzero pivot in each column. On float
    backends the rank is the number of singular values above
    ``rank_tol * max(1, max|M|)``; partial pivoting then selects that many
    pivot columns.
    """
    pol = pol or default_policy()
    if M.backend == "rational":
        return _rref_rational(M)
    if M.is_exact:
        return _rref_exact(M)
    return _rref_float(M, _abs_tol(M, pol))


def _rref_rational(M: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    # rows scaled to integers; fraction-free elimination, each row kept primitive
    nr, nc = M.shape
    rows = []
    for r in M.a:
        den = math.lcm(*(x.denominator for x in r)) if nc else 1
        rows.append([x.numerator * (den // x.denominator) for x in r])
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        p = pr[c]
        for i in range(nr):
            if i != r:
                f = rows[i][c]
                if f:
                    new = [p * a - f * b for a, b in zip(rows[i], pr)]
                    g = math.gcd(*new)
                    if g > 1:
                        new = [x // g for x in new]
                    rows[i] = new
        pivots.append(c)
        r += 1
    arr = np.empty((nr, nc), dtype=object)
    zero = Fraction(0)
    for i in range(nr):
        if i < r:
            p = rows[i][pivots[i]]
            for j in range(nc):
                arr[i, j] = Fraction(rows[i][j], p)
        else:
            for j in range(nc):
                arr[i, j] = zero
    return Matrix._fast(arr, "rational"), tuple(pivots)


def _rref_exact(M: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    rows = [list(r) for r in M.a]
    nr, nc = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        pr = rows[r]
        for i in range(nr):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    arr = np.empty((nr, nc), dtype=object)
    for i in range(nr):
        for j in range(nc):
            arr[i, j] = rows[i][j]
    return Matrix._fast(arr, M.backend), tuple(pivots)


def _rref_float(M: Matrix, tol: float) -> tuple[Matrix, tuple[int, ...]]:
    # rank is the count of singular values above tol; elimination growth can
    # push sub-threshold perturbations above a plain pivot threshold
    A0 = np.array(M.a, dtype=M.a.dtype)
    target = int((np.linalg.svd(A0, compute_uv=False) > tol).sum()) if A0.size else 0
    step = tol
    for _ in range(12):
        A, pivots = _eliminate_float(A0, step, target)
        if len(pivots) == target:
            break
        step /= 10
    return Matrix._fast(A, M.backend), pivots


def _eliminate_float(A0: np.ndarray, tol: float, limit: int) -> tuple[np.ndarray, tuple[int, ...]]:
    A = A0.copy()
    nr, nc = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == min(nr, limit):
            break
        col = np.abs(A[r:, c])
        k = int(np.argmax(col)) + r
        if col[k - r] <= tol:
            A[r:, c] = 0
            continue
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = A[r] / A[r, c]
        others = np.arange(nr) != r
        A[others] -= np.outer(A[others, c], A[r])
        A[others, c] = 0
        pivots.append(c)
        r += 1
    A[r:] = 0
    return A, tuple(pivots)


def rank(M: Matrix, pol: TolerancePolicy | None = None) -> int:
    return len(rref(M, pol)[1])


def rank_and_nullspace(M: Matrix, pol: TolerancePolicy | None = None) -> tuple[int, Matrix]:
    """Rank of M and a basis (as columns) of its right nullspace."""
    R, piv = rref(M, pol)
    nc = M.cols
    free = [c for c in range(nc) if c not in piv]
    N = Matrix.zeros(nc, len(free), M.backend).a.copy()
    one = _one(M.backend)
    for k, f in enumerate(free):
        N[f, k] = one
        for r, p in enumerate(piv):
            N[p, k] = -R.a[r, f]
    return len(piv), Matrix._fast(N, M.backend)


def nullspace(M: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
    return rank_and_nullspace(M, pol)[1]


def column_basis(M: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
    """The pivot columns of M: an independent subset spanning col(M)."""
    _, piv = rref(M, pol)
    return M.columns(piv)


def intersect_columns(A: Matrix, B: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
    """Basis of col(A) ∩ col(B) from the nullspace of [A | -B]."""
    A, B = same_backend(A, B)
    if A.rows != B.rows:
        raise InvariantError("intersect_columns needs equal row counts")
    if A.cols == 0 or B.cols == 0:
        return Matrix.zeros(A.rows, 0, A.backend)
    N = nullspace(hstack(A, -B), pol)
    X = A @ N[: A.cols, :]
    return column_basis(X, pol)


def solve(A: Matrix, B: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
    """A solution X of A X = B; raises InvariantError if inconsistent.

    Free variables are set to zero, so the solution is unique exactly when
    A has independent columns.
    """
    A, B = same_backend(A, B)
    pol = pol or default_policy()
    if A.is_exact:
        R, piv = rref(hstack(A, B))
    else:
        R, piv = _rref_float(hstack(A, B), _abs_tol(A, pol))
    if any(p >= A.cols for p in piv):
        raise InvariantError("linear system is inconsistent")
    X = Matrix.zeros(A.cols, B.cols, A.backend).a.copy()
    for r, p in enumerate(piv):
        X[p, :] = R.a[r, A.cols :]
    X = Matrix._fast(X, A.backend)
    if not A.is_exact:
        res = (A @ X - B).norm()
        if res > pol.rank_tol * max(1.0, A.scale() * max(1.0, X.scale()) * A.cols):
            raise InvariantError(f"linear system is inconsistent (residual {res:.3e})")
    return X


def inverse(M: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
    if M.rows != M.cols:
        raise InvariantError("inverse of a non-square matrix")
    if M.is_exact:
        if rank(M) != M.rows:
            raise InvariantError("matrix is singular")
        return solve(M, Matrix.eye(M.rows, M.backend))
    pol = pol or default_policy()
    s = np.linalg.svd(M.a, compute_uv=False) if M.rows else np.zeros(0)
    if M.rows and s[-1] <= pol.rank_tol * max(1.0, s[0]):
        raise InvariantError("matrix is singular")
    return Matrix._fast(np.linalg.inv(M.a), M.backend)


def orthonormal_basis(M: Matrix, pol: TolerancePolicy | None = None) -> np.ndarray:
    """Orthonormal basis of col(M) as an ndarray (float or complex)."""
    pol = pol or default_policy()
    A = M.to_numpy()
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=A.dtype)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > pol.rank_tol * max(1.0, s[0] if s.size else 0.0)))
    return U[:, :r]


def projector(M: Matrix, pol: TolerancePolicy | None = None) -> np.ndarray:
    U = orthonormal_basis(M, pol)
    return U @ U.conj().T


def projector_distance(A: Matrix, B: Matrix, pol: TolerancePolicy | None = None) -> float:
    """Frobenius distance between the orthogonal projectors onto col(A) and col(B)."""
    if A.rows != B.rows:
        raise InvariantError("projector_distance needs equal row counts")
    PA, PB = projector(A, pol), projector(B, pol)
    return float(np.linalg.norm(PA - PB))


def span_equal(A: Matrix, B: Matrix, pol: TolerancePolicy | None = None) -> bool:
    """Column-span equality: exact rank test, or projector distance < rank_tol."""
    A, B = same_backend(A, B)
    if A.rows != B.rows:
        return False
    if A.is_exact:
        ra, rb = rank(A), rank(B)
        return ra == rb and rank(hstack(A, B)) == ra
    pol = pol or default_policy()
    return projector_distance(A, B, pol) < pol.rank_tol


def contains_columns(A: Matrix, B: Matrix, pol: TolerancePolicy | None = None) -> bool:
    """Whether col(B) ⊆ col(A)."""
    A, B = same_backend(A, B)
    if B.cols == 0:
        return True
    if A.is_exact:
        return rank(hstack(A, B)) == rank(A)
    pol = pol or default_policy()
    U = orthonormal_basis(A, pol)
    Bn = B.to_numpy()
    res = Bn - U @ (U.conj().T @ Bn)
    return float(np.linalg.norm(res)) <= pol.rank_tol * max(1.0, float(np.linalg.norm(Bn)))


def extend_basis(A: Matrix, B: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
    """Columns of B that, appended to the independent columns A, span col(A)+col(B)."""
    A, B = same_backend(A, B)
    _, piv = rref(hstack(A, B), pol)
    if tuple(piv[: A.cols]) != tuple(range(A.cols)):
        raise InvariantError("extend_basis needs independent columns in A")
    return B.columns([p - A.cols for p in piv[A.cols :]])


def rationalize(M: Matrix, max_denominator: int = 10**6) -> Matrix:
    """Nearest rationals (bounded denominator) to a float/complex matrix."""
    if M.is_exact:
        return M
    if M.backend == "float":
        arr = _map_obj(M.a, lambda x: Fraction(float(x)).limit_denominator(max_denominator))
        return Matrix._fast(arr, "rational")
    arr = _map_obj(
        M.a,
        lambda z: Gaussian(
            Fraction(float(z.real)).limit_denominator(max_denominator),
            Fraction(float(z.imag)).limit_denominator(max_denominator),
        ),
    )
    return Matrix._fast(arr, "gaussian")


def canonical_span(M: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
    """Column basis in reduced column echelon form (canonical for the span)."""
    R, piv = rref(M.T, pol)
    return R[: len(piv), :].T


# ---------------------------------------------------------------- inertia


def _is_hermitian(H: Matrix, pol: TolerancePolicy) -> bool:
    if H.rows != H.cols:
        return False
    if H.is_exact:
        return H == H.H
    return float(np.max(np.abs(H.a - H.a.conj().T), initial=0.0)) <= pol.residual_tol * max(1.0, H.scale())


def signature_by_congruence(H: Matrix, pol: TolerancePolicy | None = None) -> tuple[int, int, int]:
    """Inertia (zero, positive, negative counts) of a hermitian matrix.

    Uses congruence elimination T H T^† only, so the count is exact on the
    exact backends. Float pivots at or below the rank threshold count as zero.
    """
    pol = pol or default_policy()
    if not _is_hermitian(H, pol):
        raise InvariantError("signature_by_congruence needs a hermitian matrix")
    n = H.rows
    exact = H.is_exact
    A = [list(r) for r in H.a]
    tol = 0 if exact else _abs_tol(H, pol)
    conj = (lambda x: x.conjugate()) if H.is_complex else (lambda x: x)

    def real_part(x):
        return x.re if isinstance(x, Gaussian) else (x.real if isinstance(x, complex) else x)

    def nz(x):
        return bool(x) if exact else abs(x) > tol

    active = list(range(n))
    pos = neg = 0
    while active:
        i = None
        if exact:
            i = next((k for k in active if A[k][k]), None)
        else:
            best = max(active, key=lambda k: abs(A[k][k]))
            if nz(A[best][best]):
                i = best
        if i is None:
            pair = None
            if exact:
                pair = next(((a, b) for a in active for b in active if a < b and A[a][b]), None)
            else:
                cand = [(abs(A[a][b]), a, b) for a in active for b in active if a < b]
                if cand:
                    m, a, b = max(cand)
                    if m > tol:
                        pair = (a, b)
            if pair is None:
                break
            a, b = pair
            # row_a += c row_b, col_a += conj(c) col_b with c = H[a][b] makes H[a][a] = 2|c|^2
            c = A[a][b]
            A[a] = [x + c * y for x, y in zip(A[a], A[b])]
            cc = conj(c)
            for r in range(n):
                A[r][a] = A[r][a] + cc * A[r][b]
            i = a
        p = A[i][i]
        pr = real_part(p)
        for k in active:
            if k == i:
                continue
            f = A[k][i] / p
            if not nz(f) and exact:
                continue
            A[k] = [x - f * y for x, y in zip(A[k], A[i])]
            fc = conj(f)
            for r in range(n):
                A[r][k] = A[r][k] - fc * A[r][i]
        active.remove(i)
        if pr > 0:
            pos += 1
        else:
            neg += 1
    return n - pos - neg, pos, neg


# ---------------------------------------------------------------- symmetric functions


def _as_float(M) -> np.ndarray:
    if isinstance(M, Matrix):
        if M.is_complex:
            raise InvariantError("expected a real matrix")
        return M.to_numpy()
    return np.asarray(M, dtype=float)


def sym_apply(a: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """fn applied to the spectrum of the symmetric matrix a."""
    s = 0.5 * (a + a.T)
    w, V = np.linalg.eigh(s)
    return (V * fn(w)) @ V.T


def _sym_check(a: np.ndarray, pol: TolerancePolicy):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvariantError("expected a square matrix")
    if np.max(np.abs(a - a.T), initial=0.0) > pol.residual_tol * max(1.0, np.max(np.abs(a), initial=0.0)):
        raise InvariantError("expected a symmetric matrix")


def sym_exp(p, pol: TolerancePolicy | None = None) -> Matrix:
    """Matrix exponential of a symmetric matrix via eigendecomposition."""
    pol = pol or default_policy()
    a = _as_float(p)
    _sym_check(a, pol)
    return Matrix.from_numpy(sym_apply(a, np.exp))


def sym_log(p, pol: TolerancePolicy | None = None) -> Matrix:
    """Matrix logarithm of a symmetric positive-definite matrix."""
    pol = pol or default_policy()
    a = _as_float(p)
    _sym_check(a, pol)
    w = np.linalg.eigvalsh(0.5 * (a + a.T)) if a.size else np.zeros(0)
    if w.size and w[0] <= 0:
        raise InvariantError("log needs a positive-definite matrix")
    return Matrix.from_numpy(sym_apply(a, np.log))


def spd_power(a: np.ndarray, t: float) -> np.ndarray:
    w, V = np.linalg.eigh(0.5 * (a + a.T))
    if w.size and w[0] <= 0:
        raise InvariantError("power needs a positive-definite matrix")
    return (V * w**t) @ V.T


def geometric_mean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Midpoint of the affine-invariant geodesic between SPD matrices a and b."""
    ah = spd_power(a, 0.5)
    aih = spd_power(a, -0.5)
    mid = spd_power(aih @ b @ aih, 0.5)
    out = ah @ mid @ ah
    return 0.5 * (out + out.T)


def standard_omega_np(n: int) -> np.ndarray:
    om = np.zeros((2 * n, 2 * n))
    om[:n, n:] = -np.eye(n)
    om[n:, :n] = np.eye(n)
    return om


def polar_decompose(g, pol: TolerancePolicy | None = None) -> tuple[Matrix, Matrix]:
    """g = u exp(p) with u orthogonal and p symmetric.

    When g is symplectic for the standard form, u is symplectic-orthogonal and
    p is a symmetric element of sp(2n); both are asserted.
    """
    pol = pol or default_policy()
    a = _as_float(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvariantError("polar_decompose needs a square matrix")
    # SVD rather than eigh(aᵀa): keeps the small singular values accurate
    U, sv, Vt = np.linalg.svd(a)
    if a.size and sv[-1] <= pol.rank_tol * max(1.0, sv[0]):
        raise InvariantError("polar_decompose needs an invertible matrix")
    p = (Vt.T * np.log(sv)) @ Vt
    p = 0.5 * (p + p.T)
    u = U @ Vt
    size = a.shape[0]
    if size % 2 == 0 and size:
        om = standard_omega_np(size // 2)
        scale = max(1.0, float(np.linalg.norm(a)) ** 2)
        if np.linalg.norm(a.T @ om @ a - om) <= pol.residual_tol * scale:
            tol = 100 * pol.residual_tol * scale
            if np.linalg.norm(u.T @ om @ u - om) > tol or np.linalg.norm(om @ p + p.T @ om) > tol:
                raise InvariantError("polar factors of a symplectic matrix left the group")
    return Matrix.from_numpy(u), Matrix.from_numpy(p)


def iter_columns(M: Matrix) -> Iterable[Matrix]:
    for j in range(M.cols):
        yield M.col(j)
