"""Backend helpers shared by every module.

Two numeric backends are supported. The exact backend stores values as
:class:`fractions.Fraction` inside ``dtype=object`` numpy arrays, the real
backend uses ``float64`` arrays. Functions written against plain arithmetic
(``+``, ``*``, ``@``) work unchanged on both.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np
import scipy.linalg
import sympy


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def as_number(value, exact: bool):
    """Convert ``value`` to a scalar of the requested backend.

    Strings such as ``"2/5"`` or ``"0.3"`` and floats are parsed through their
    decimal text so that ``0.3`` becomes ``3/10`` on the exact backend.
    """
    if exact:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, (float, np.floating)):
            return Fraction(repr(float(value)))
        return Fraction(str(value).strip())
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def is_exact_array(a) -> bool:
    return np.asarray(a).dtype == object


def to_array(values, exact: bool) -> np.ndarray:
    if exact:
        arr = np.array(values, dtype=object)
        flat = arr.reshape(-1)
        for idx, v in enumerate(flat):
            flat[idx] = as_number(v, True)
        return arr
    return np.array(values, dtype=float)


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def eye(n: int, exact: bool) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def to_float(a) -> np.ndarray:
    return np.asarray(a, dtype=object).astype(float) if is_exact_array(a) else np.asarray(a, dtype=float)


def max_abs(a):
    """Largest absolute entry; exact zero on the exact backend when all vanish."""
    arr = np.asarray(a)
    if arr.size == 0:
        return Fraction(0) if arr.dtype == object else 0.0
    if arr.dtype == object:
        return max(abs(v) for v in arr.reshape(-1))
    return float(np.max(np.abs(arr)))


def fmt(value) -> str:
    """Render a scalar for CSV/JSON output: exact strings for rationals."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _to_sympy(a: np.ndarray) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in a])


def _from_sympy(m: sympy.Matrix) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            r = sympy.Rational(m[i, j])
            out[i, j] = Fraction(int(r.p), int(r.q))
    return out


def exact_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` exactly over the rationals."""
    x = _to_sympy(a).LUsolve(_to_sympy(b))
    return _from_sympy(x)


def exact_det(a: np.ndarray) -> Fraction:
    r = sympy.Rational(_to_sympy(a).det())
    return Fraction(int(r.p), int(r.q))


def nullspace(a: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Basis of the right nullspace of ``a``; exact on object arrays, SVD otherwise."""
    if is_exact_array(a):
        return [_from_sympy(v).reshape(-1) for v in _to_sympy(a).nullspace()]
    ns = scipy.linalg.null_space(np.asarray(a, dtype=float), rcond=tol)
    return [ns[:, i] for i in range(ns.shape[1])]
