"""Scalars and dense matrices over the (max, +) semiring.

The null element ``EPS`` is negative infinity. Positive infinity and NaN are
rejected on construction, so ``EPS + x`` is always ``EPS`` and no undefined
``-inf + inf`` sums can appear.

Matrix comparison (``X <= Y``) is entrywise, with ``EPS <= x`` for every x.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

EPS = -math.inf

__all__ = [
    "EPS",
    "MaxPlusMatrix",
    "oplus",
    "otimes",
    "scalar_power",
    "mat_oplus",
    "mat_otimes",
    "mat_power",
    "norm",
    "diag",
    "identity",
    "null",
    "scale",
    "standard_pattern",
    "mp_matmul",
    "mp_matvec",
]


def _check_scalar(x) -> float:
    x = float(x)
    if math.isnan(x) or x == math.inf:
        raise ValueError(f"not an element of R_max: {x!r}")
    return x


def oplus(x: float, y: float) -> float:
    """``x ⊕ y = max(x, y)``."""
    return max(_check_scalar(x), _check_scalar(y))


def otimes(x: float, y: float) -> float:
    """``x ⊗ y = x + y``, with EPS absorbing."""
    x, y = _check_scalar(x), _check_scalar(y)
    if x == EPS or y == EPS:
        return EPS
    return x + y


def scalar_power(x: float, q: int) -> float:
    """``x^{⊗q}``, i.e. ``q * x`` in conventional notation; ``x^{⊗0} = 0``."""
    if q < 0:
        raise ValueError("power must be nonnegative")
    x = _check_scalar(x)
    if q == 0:
        return 0.0
    return EPS if x == EPS else q * x


def mp_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Max-plus product of raw float arrays, batched over leading axes.

    ``a`` has shape ``(..., n, m)`` and ``b`` shape ``(..., m, l)``. No
    validation: callers guarantee there is no ``+inf`` or NaN.
    """
    return (a[..., :, :, None] + b[..., None, :, :]).max(axis=-2)


def mp_matvec(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Max-plus matrix-vector product ``a ⊗ x`` on raw arrays."""
    return (a + x[..., None, :]).max(axis=-1)


class MaxPlusMatrix:
    """Immutable dense matrix with entries in ``R ∪ {EPS}``.

    ``X | Y`` is the entrywise ``⊕`` and ``X @ Y`` the max-plus product.
    """

    __slots__ = ("_a",)
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, entries):
        if isinstance(entries, MaxPlusMatrix):
            a = entries._a
        else:
            a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-d array, got shape {a.shape}")
        if np.isnan(a).any() or np.isposinf(a).any():
            raise ValueError("entries must be finite reals or EPS (-inf)")
        a = a.copy()
        a.setflags(write=False)
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "MaxPlusMatrix":
        # trusted constructor for results of closed operations
        m = object.__new__(cls)
        a.setflags(write=False)
        m._a = a
        return m

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of the underlying float array."""
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def T(self) -> "MaxPlusMatrix":
        return MaxPlusMatrix._wrap(self._a.T.copy())

    def is_null(self) -> bool:
        return bool(np.all(self._a == EPS))

    def tolist(self) -> list[list[float]]:
        return self._a.tolist()

    def __getitem__(self, idx):
        return self._a[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MaxPlusMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __le__(self, other: "MaxPlusMatrix") -> bool:
        _same_shape(self, other)
        return bool(np.all(self._a <= other._a))

    def __ge__(self, other: "MaxPlusMatrix") -> bool:
        _same_shape(self, other)
        return bool(np.all(self._a >= other._a))

    def __or__(self, other: "MaxPlusMatrix") -> "MaxPlusMatrix":
        return mat_oplus(self, other)

    def __matmul__(self, other: "MaxPlusMatrix") -> "MaxPlusMatrix":
        return mat_otimes(self, other)

    def __pow__(self, q: int) -> "MaxPlusMatrix":
        return mat_power(self, q)

    def __repr__(self) -> str:
        def fmt(v):
            return "ε" if v == EPS else f"{v:g}"

        body = "; ".join(", ".join(fmt(v) for v in row) for row in self._a)
        return f"MaxPlusMatrix([{body}])"


def _same_shape(x: MaxPlusMatrix, y: MaxPlusMatrix) -> None:
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")


def mat_oplus(x: MaxPlusMatrix, y: MaxPlusMatrix) -> MaxPlusMatrix:
    _same_shape(x, y)
    return MaxPlusMatrix._wrap(np.maximum(x.entries, y.entries))


def mat_otimes(x: MaxPlusMatrix, y: MaxPlusMatrix) -> MaxPlusMatrix:
    if x.cols != y.rows:
        raise ValueError(f"dimension mismatch: {x.shape} ⊗ {y.shape}")
    return MaxPlusMatrix._wrap(mp_matmul(x.entries, y.entries))


def mat_power(x: MaxPlusMatrix, q: int) -> MaxPlusMatrix:
    """q-fold max-plus product of a square matrix; ``q = 0`` gives E.

    Uses binary exponentiation once ``q > 3``.
    """
    if x.rows != x.cols:
        raise ValueError(f"power of a non-square matrix {x.shape}")
    if q < 0:
        raise ValueError("power must be nonnegative")
    if q == 0:
        return identity(x.rows)
    a = x.entries
    if q <= 3:
        out = a
        for _ in range(q - 1):
            out = mp_matmul(out, a)
        return MaxPlusMatrix._wrap(np.array(out))
    result = None
    base = a
    while q:
        if q & 1:
            result = base if result is None else mp_matmul(result, base)
        q >>= 1
        if q:
            base = mp_matmul(base, base)
    return MaxPlusMatrix._wrap(np.array(result))


def norm(x: MaxPlusMatrix | np.ndarray) -> float:
    """``‖X‖``: the largest entry; EPS exactly when X is the null matrix."""
    a = x.entries if isinstance(x, MaxPlusMatrix) else np.asarray(x, dtype=float)
    return float(a.max())


def diag(d: Sequence[float] | Iterable[float]) -> MaxPlusMatrix:
    d = np.asarray(list(d) if not isinstance(d, np.ndarray) else d, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("diag expects a non-empty 1-d sequence")
    a = np.full((d.size, d.size), EPS)
    np.fill_diagonal(a, d)
    return MaxPlusMatrix(a)


def identity(n: int) -> MaxPlusMatrix:
    """E: zeros on the diagonal, EPS elsewhere."""
    return diag(np.zeros(n))


def null(rows: int, cols: int | None = None) -> MaxPlusMatrix:
    """The all-EPS matrix."""
    return MaxPlusMatrix(np.full((rows, rows if cols is None else cols), EPS))


def scale(x: MaxPlusMatrix, c: float) -> MaxPlusMatrix:
    """Conventional scaling ``cX`` for ``c > 0``; EPS entries stay EPS."""
    if not c > 0 or math.isinf(c):
        raise ValueError("conventional scaling is defined for finite c > 0")
    return MaxPlusMatrix._wrap(x.entries * c)


def standard_pattern(x: MaxPlusMatrix) -> MaxPlusMatrix:
    """Standard (0/EPS) adjacency matrix of the graph associated with X."""
    return MaxPlusMatrix._wrap(np.where(x.entries == EPS, EPS, 0.0))
