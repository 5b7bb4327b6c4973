"""Banded matrices, Jacobi matrices and matrix polynomials ``Theta(M)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numeric import DomainError, as_number, eye, is_exact_array, zeros
from .scalar_orthopoly import JacobiCoefficients


class BandError(ValueError):
    """Nonzero entries found outside the declared band."""


@dataclass(frozen=True, eq=False)
class BandedMatrix:
    """Dense square matrix with declared lower/upper bandwidth.

    Entries outside the band must be exactly zero. The array is made
    read-only on construction.
    """

    entries: np.ndarray
    lower_bw: int
    upper_bw: int

    def __post_init__(self):
        a = self.entries
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DomainError("banded matrix must be square and non-empty")
        n = a.shape[0]
        if not (0 <= self.lower_bw < n and 0 <= self.upper_bw < n):
            raise DomainError("bandwidths must lie in [0, size)")
        i, j = np.indices(a.shape)
        outside = (j - i > self.upper_bw) | (i - j > self.lower_bw)
        if any(v != 0 for v in a[outside]):
            raise BandError("nonzero entry outside the declared band")
        a.flags.writeable = False

    @classmethod
    def from_dense(cls, a, lower_bw=None, upper_bw=None):
        """Wrap ``a``; missing bandwidths are measured from the nonzero pattern."""
        a = np.array(a, dtype=object if is_exact_array(a) else float)
        nz_i, nz_j = np.nonzero(a != 0)
        if lower_bw is None:
            lower_bw = int(max(np.max(nz_i - nz_j, initial=0), 0))
        if upper_bw is None:
            upper_bw = int(max(np.max(nz_j - nz_i, initial=0), 0))
        return cls(a, lower_bw, upper_bw)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def bandwidth(self) -> int:
        return max(self.lower_bw, self.upper_bw)

    @property
    def exact(self) -> bool:
        return is_exact_array(self.entries)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, BandedMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    __hash__ = None


@dataclass(frozen=True)
class ThetaPolynomial:
    """Real polynomial ``alpha_0 + alpha_1 x + ... + alpha_m x^m``.

    Trailing zero coefficients are trimmed so the leading coefficient is
    nonzero; the zero polynomial is rejected.
    """

    coefficients: tuple

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs or coeffs[-1] == 0:
            raise DomainError("the zero polynomial is not a valid Theta")
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_coefficients(cls, coeffs, exact: bool = True):
        return cls(tuple(as_number(c, exact) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_stochastic(self) -> bool:
        """Whether ``Theta(1) = 1`` (exact for rational coefficients)."""
        s = sum(self.coefficients)
        exact = all(isinstance(c, Fraction) for c in self.coefficients)
        return s == 1 if exact else abs(s - 1) < 1e-12

    def __call__(self, x):
        acc = self.coefficients[-1] + 0 * x
        for c in reversed(self.coefficients[:-1]):
            acc = acc * x + c
        return acc


def jacobi_matrix(coeffs: JacobiCoefficients) -> BandedMatrix:
    """Tridiagonal matrix with ``b`` on the diagonal, ``a`` above and ``c`` below."""
    n = coeffs.size
    J = zeros((n, n), coeffs.exact)
    for i in range(n):
        J[i, i] = coeffs.b[i]
        if i + 1 < n:
            J[i, i + 1] = coeffs.a[i]
            J[i + 1, i] = coeffs.c[i + 1]
    bw = 1 if n > 1 else 0
    return BandedMatrix(J, bw, bw)


def theta_of_matrix(theta: ThetaPolynomial, M: BandedMatrix) -> BandedMatrix:
    """Horner evaluation of ``theta`` at ``M``; bandwidths scale by the degree."""
    A = M.entries
    n = M.size
    exact = M.exact
    identity = eye(n, exact)
    coeffs = [as_number(c, exact) for c in theta.coefficients]
    R = coeffs[-1] * identity
    for c in reversed(coeffs[:-1]):
        R = R @ A + c * identity
    m = theta.degree
    return BandedMatrix(R, min(m * M.lower_bw, n - 1), min(m * M.upper_bw, n - 1))


def is_stochastic(M, tol: float = 1e-12) -> bool:
    """Entries at least ``-tol`` and every row summing to one within ``tol``.

    Exact matrices are judged exactly: no negative entry, row sums equal 1.
    """
    A = M.entries if isinstance(M, BandedMatrix) else np.asarray(M)
    if is_exact_array(A):
        return all(v >= 0 for v in A.reshape(-1)) and all(sum(row) == 1 for row in A)
    A = np.asarray(A, dtype=float)
    return bool(np.all(A >= -tol) and np.all(np.abs(A.sum(axis=1) - 1) <= tol))
