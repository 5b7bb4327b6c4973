"""Scalar orthogonal polynomials on finite discrete measures.

A family is described by its three-term recurrence

    x p_n(x) = a_n p_{n+1}(x) + b_n p_n(x) + c_n p_{n-1}(x),   p_0 = 1, p_{-1} = 0,

truncated to ``size`` states. The only built-in family is the symmetric
Krawtchouk family, which is tied to the classical Ehrenfest chain through
``p_n(1 - 2x/N) = K_n(x)``.

Krawtchouk recurrence
---------------------
We use

    -x K_j(x) = (N-j)/2 K_{j+1}(x) - N/2 K_j(x) + j/2 K_{j-1}(x).

Some references print the last term as ``j/2 K_j(x)``; that version is not a
three-term recurrence and does not reproduce the eigenvectors of the
Ehrenfest matrix, so the ``K_{j-1}`` form is used and checked against the
binomial orthogonality.

Norm convention
---------------
Weights of a :class:`DiscreteMeasure` are probabilities, and the norm ``h_n``
is defined as the computed diagonal Gram entry ``sum_x p_n(nu_x)^2 w_x``.
Hence ``h_0 = 1`` and for the Krawtchouk family ``h_n = 1 / C(N, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from ._numeric import DomainError, as_number, is_exact_array, max_abs, to_array, zeros


class SingularRecurrenceError(ArithmeticError):
    """A vanishing ``a_n`` prevents solving the recurrence for ``p_{n+1}``."""


@dataclass(frozen=True)
class JacobiCoefficients:
    """Recurrence data of a finite family with ``size`` states.

    All three sequences have length ``size``; by convention ``c[0] = 0`` and
    ``a[size-1] = 0`` (the truncation), so ``a[n] + b[n] + c[n]`` is the row
    sum of the Jacobi matrix.
    """

    size: int
    a: tuple
    b: tuple
    c: tuple
    stochastic: bool = False

    def __post_init__(self):
        n = self.size
        if n < 1:
            raise DomainError("size must be at least 1")
        if not (len(self.a) == len(self.b) == len(self.c) == n):
            raise DomainError("a, b, c must each have length size")
        if any(v <= 0 for v in self.a[: n - 1]):
            raise DomainError("a_n must be positive for n < size-1")
        if any(v <= 0 for v in self.c[1:]):
            raise DomainError("c_n must be positive for n >= 1")
        if self.c[0] != 0 or self.a[n - 1] != 0:
            raise DomainError("conventions c_0 = 0 and a_{size-1} = 0 are required")
        if self.stochastic:
            for i in range(n):
                s = self.a[i] + self.b[i] + self.c[i]
                if abs(s - 1) > (0 if self.exact else 1e-12):
                    raise DomainError(f"row {i} of a stochastic family sums to {s}")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in (*self.a, *self.b, *self.c))

    @classmethod
    def from_sequences(cls, a, b, c, exact: bool = True, stochastic: bool = False):
        """Build from ``a_0..a_{N-1}``, ``b_0..b_N`` and ``c_1..c_N``."""
        size = len(b)
        if len(a) != size - 1 or len(c) != size - 1:
            raise DomainError("expected len(a) == len(c) == len(b) - 1")
        zero = as_number(0, exact)
        a = tuple(as_number(v, exact) for v in a) + (zero,)
        c = (zero,) + tuple(as_number(v, exact) for v in c)
        b = tuple(as_number(v, exact) for v in b)
        return cls(size, a, b, c, stochastic)


@dataclass(frozen=True)
class DiscreteMeasure:
    points: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.points) != len(self.weights) or not self.points:
            raise DomainError("points and weights must be non-empty and of equal length")
        if any(w < 0 for w in self.weights):
            raise DomainError("weights must be nonnegative")
        total = sum(self.weights)
        exact = all(isinstance(w, Fraction) for w in self.weights)
        if abs(total - 1) > (0 if exact else 1e-12):
            raise DomainError(f"weights sum to {total}, not 1")
        if len(set(self.points)) != len(self.points):
            raise DomainError("support points must be distinct")

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ScalarFamily:
    coeffs: JacobiCoefficients
    norms: tuple

    def __post_init__(self):
        if any(h <= 0 for h in self.norms):
            raise DomainError("norms must be strictly positive")

    @property
    def size(self) -> int:
        return self.coeffs.size


@dataclass(frozen=True)
class GramReport:
    max_offdiag_deviation: object
    norms: tuple
    gram: np.ndarray


def krawtchouk_eval(j: int, x, N: int):
    """Symmetric Krawtchouk polynomial ``K_j(x)`` by forward recurrence.

    The return type follows ``x``: a Fraction (or int) gives an exact
    Fraction, a float gives a float.
    """
    if j < 0 or j > N:
        raise DomainError(f"degree {j} outside 0..{N}")
    if isinstance(x, int):
        x = Fraction(x)
    prev, cur = 0 * x, 1 + 0 * x
    for n in range(j):
        # K_{n+1} = ((N - 2x) K_n - n K_{n-1}) / (N - n)
        prev, cur = cur, ((N - 2 * x) * cur - n * prev) / (N - n)
    return cur


def krawtchouk_table(N: int, exact: bool = True) -> np.ndarray:
    """``T[n, x] = K_n(x)`` for ``0 <= n, x <= N``."""
    out = zeros((N + 1, N + 1), exact)
    for x in range(N + 1):
        xv = as_number(x, exact)
        prev, cur = 0 * xv, 1 + 0 * xv
        out[0, x] = cur
        for n in range(N):
            prev, cur = cur, ((N - 2 * xv) * cur - n * prev) / (N - n)
            out[n + 1, x] = cur
    return out


def ehrenfest_coefficients(N: int, exact: bool = True) -> JacobiCoefficients:
    """Recurrence of the classical Ehrenfest chain: ``a_n = (N-n)/N``, ``c_n = n/N``."""
    if N < 1:
        raise DomainError("N must be at least 1")
    a = [Fraction(N - n, N) for n in range(N)]
    c = [Fraction(n, N) for n in range(1, N + 1)]
    b = [0] * (N + 1)
    return JacobiCoefficients.from_sequences(a, b, c, exact=exact, stochastic=True)


def poly_eval_by_recurrence(fam, n: int, x):
    """Evaluate ``p_n(x)`` for the family (a :class:`JacobiCoefficients` or
    :class:`ScalarFamily`) by solving the recurrence forward."""
    coeffs = fam.coeffs if isinstance(fam, ScalarFamily) else fam
    if n < 0 or n >= coeffs.size:
        raise DomainError(f"degree {n} outside 0..{coeffs.size - 1}")
    prev, cur = 0 * x, 1 + 0 * x
    for k in range(n):
        if coeffs.a[k] == 0:
            raise SingularRecurrenceError(f"a_{k} = 0")
        prev, cur = cur, ((x - coeffs.b[k]) * cur - coeffs.c[k] * prev) / coeffs.a[k]
    return cur


def eval_all(fam, points) -> np.ndarray:
    """``V[n, x] = p_n(points[x])`` for every degree of the family."""
    coeffs = fam.coeffs if isinstance(fam, ScalarFamily) else fam
    pts = list(points)
    exact = all(isinstance(p, Fraction) for p in pts)
    out = zeros((coeffs.size, len(pts)), exact)
    for col, x in enumerate(pts):
        prev, cur = 0 * x, 1 + 0 * x
        out[0, col] = cur
        for k in range(coeffs.size - 1):
            if coeffs.a[k] == 0:
                raise SingularRecurrenceError(f"a_{k} = 0")
            prev, cur = cur, ((x - coeffs.b[k]) * cur - coeffs.c[k] * prev) / coeffs.a[k]
            out[k + 1, col] = cur
    return out


def ehrenfest_measure(N: int, exact: bool = True) -> DiscreteMeasure:
    """Binomial measure on ``lambda_x = 1 - 2x/N`` with weights ``C(N,x)/2^N``."""
    if N < 1:
        raise DomainError("N must be at least 1")
    points = tuple(as_number(Fraction(N - 2 * x, N), exact) for x in range(N + 1))
    weights = tuple(as_number(Fraction(comb(N, x), 2**N), exact) for x in range(N + 1))
    return DiscreteMeasure(points, weights)


def gram_matrix(fam, mu: DiscreteMeasure) -> np.ndarray:
    V = eval_all(fam, mu.points)
    w = to_array(mu.weights, is_exact_array(V))
    return (V * w) @ V.T


def gram_check(fam, mu: DiscreteMeasure, tol=None) -> GramReport:
    """Gram matrix of the family against ``mu``.

    Reports the largest off-diagonal entry and the diagonal, which is taken
    as the norms ``h_n``. ``tol`` is accepted for symmetry with other checks
    and does not alter the report.
    """
    coeffs = fam.coeffs if isinstance(fam, ScalarFamily) else fam
    if coeffs.size > len(mu):
        raise DomainError("family larger than the measure support")
    G = gram_matrix(fam, mu)
    off = G.copy()
    np.fill_diagonal(off, 0 * G[0, 0])
    return GramReport(max_abs(off), tuple(np.diag(G)), G)


def scalar_family(coeffs: JacobiCoefficients, mu: DiscreteMeasure) -> ScalarFamily:
    """Attach norms computed from the Gram diagonal."""
    return ScalarFamily(coeffs, gram_check(coeffs, mu).norms)


def ehrenfest_family(N: int, exact: bool = True) -> tuple[ScalarFamily, DiscreteMeasure]:
    mu = ehrenfest_measure(N, exact)
    return scalar_family(ehrenfest_coefficients(N, exact), mu), mu
