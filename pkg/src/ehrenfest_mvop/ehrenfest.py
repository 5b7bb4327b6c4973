"""Ehrenfest urn models: classical, q-deformed, k-ball and multi-ball.

Every model is a polynomial ``Theta`` of the classical matrix ``M_0``, so the
eigenvalues are ``Theta(lambda_j)`` with ``lambda_j = 1 - 2j/N``. The matrix
constructors here work from the combinatorial transition probabilities, not
from ``Theta``, so comparing the two is a genuine check.

Eigenvalue indexing: ``spectrum`` reports ``Theta(lambda_j)`` by direct
substitution, which keeps index ``j`` paired with the Krawtchouk eigenvector
``(K_0(j), ..., K_N(j))``. Closed forms written with the reverse indexing
differ by ``j -> N - j``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from ._numeric import DomainError, as_number, max_abs, to_array, to_float, zeros
from .banded import BandedMatrix, ThetaPolynomial, is_stochastic, jacobi_matrix, theta_of_matrix
from .scalar_orthopoly import ehrenfest_coefficients

KINDS = ("classical", "q_deformed", "k_ball", "multi_ball")
CLUSTER_RTOL = 1e-9


class NotStochasticError(ArithmeticError):
    """A constructed transition matrix failed the stochasticity gate."""


@dataclass(frozen=True)
class ModelSpec:
    N: int
    kind: str = "classical"
    q: object = None
    k: int | None = None
    qvec: tuple | None = None
    kvec: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        if self.N < 1:
            raise DomainError("N must be at least 1")
        if self.kind == "q_deformed":
            q = self.q if isinstance(self.q, float) else as_number(self.q, True)
            if not 0 <= q <= 1:
                raise DomainError("q must lie in [0, 1]")
            if self.N < 2 and q != 0:
                raise DomainError("the two-ball move needs N >= 2")
        elif self.kind == "k_ball":
            if self.k is None or not 1 <= self.k <= self.N:
                raise DomainError("k must satisfy 1 <= k <= N")
        elif self.kind == "multi_ball":
            if not self.qvec or self.kvec is None or len(self.qvec) != len(self.kvec):
                raise DomainError("qvec and kvec must be non-empty and of equal length")
            qs = [as_number(v, not isinstance(v, float)) for v in self.qvec]
            if any(v < 0 for v in qs) or abs(sum(qs) - 1) > (1e-12 if any(isinstance(v, float) for v in qs) else 0):
                raise DomainError("qvec must be a probability vector")
            if any(not 1 <= k <= self.N for k in self.kvec):
                raise DomainError("every k_i must satisfy 1 <= k_i <= N")

    @classmethod
    def classical(cls, N):
        return cls(N)

    @classmethod
    def q_deformed(cls, N, q):
        return cls(N, "q_deformed", q=q)

    @classmethod
    def k_ball(cls, N, k):
        return cls(N, "k_ball", k=k)

    @classmethod
    def multi_ball(cls, N, qvec, kvec):
        return cls(N, "multi_ball", qvec=tuple(qvec), kvec=tuple(int(k) for k in kvec))

    def mixture(self, exact: bool = True) -> dict[int, object]:
        """The model as ``{k: weight}`` over k-ball moves, duplicates merged."""
        if self.kind == "classical":
            return {1: as_number(1, exact)}
        if self.kind == "k_ball":
            return {self.k: as_number(1, exact)}
        if self.kind == "q_deformed":
            q = as_number(self.q, exact)
            return {1: 1 - q, 2: q}
        merged = defaultdict(lambda: as_number(0, exact))
        for qi, ki in zip(self.qvec, self.kvec):
            merged[ki] += as_number(qi, exact)
        return dict(sorted(merged.items()))


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple
    multiplicity_classes: tuple
    gap: object

    def __post_init__(self):
        if not any(v == 1 or (isinstance(v, float) and abs(v - 1) < 1e-12) for v in self.eigenvalues):
            raise DomainError("a stochastic spectrum must contain the eigenvalue 1")


@dataclass(frozen=True)
class MultiplicityReport:
    in_omega: bool
    i: int | None
    predicted_doubles: int
    observed_doubles: int

    @property
    def agrees(self) -> bool:
        return self.predicted_doubles == self.observed_doubles


def k_ball_matrix(N: int, k: int, exact: bool = True) -> np.ndarray:
    """Dense k-ball transition matrix; ``k = 0`` gives the identity."""
    if not 0 <= k <= N:
        raise DomainError("k must satisfy 0 <= k <= N")
    out = zeros((N + 1, N + 1), exact)
    denom = comb(N, k)
    for i in range(N + 1):
        for ell in range(k + 1):
            num = comb(i, k - ell) * comb(N - i, ell)
            if num:
                out[i, i - k + 2 * ell] = as_number(Fraction(num, denom), exact)
    return out


def _q_deformed_matrix(N: int, q, exact: bool) -> np.ndarray:
    out = zeros((N + 1, N + 1), exact)
    one = as_number(1, exact)
    if N == 1:
        return to_array([[0, 1], [1, 0]], exact)
    d2 = N * (N - 1)
    for i in range(N + 1):
        entries = {
            i - 2: q * i * (i - 1) / d2,
            i - 1: (one - q) * i / N,
            i: 2 * q * i * (N - i) / d2,
            i + 1: (one - q) * (N - i) / N,
            i + 2: q * (N - i) * (N - i - 1) / d2,
        }
        for j, v in entries.items():
            if 0 <= j <= N and v != 0:
                out[i, j] = v
    return out


def build(spec: ModelSpec, exact: bool = True) -> BandedMatrix:
    """Transition matrix of the model, gated by the stochasticity check."""
    N = spec.N
    if spec.kind == "classical":
        M = jacobi_matrix(ehrenfest_coefficients(N, exact)).entries
    elif spec.kind == "q_deformed":
        M = _q_deformed_matrix(N, as_number(spec.q, exact), exact)
    else:
        M = zeros((N + 1, N + 1), exact)
        for k, w in spec.mixture(exact).items():
            if w != 0:
                M = M + w * k_ball_matrix(N, k, exact)
    if not is_stochastic(M):
        raise NotStochasticError(f"{spec} does not yield a stochastic matrix")
    return BandedMatrix.from_dense(M)


def classical_matrix(N: int, exact: bool = True) -> BandedMatrix:
    return build(ModelSpec.classical(N), exact)


def krawtchouk_in_m0(N: int, k: int, exact: bool = True) -> list:
    """Monomial coefficients of ``K_k(-N(x-1)/2)``.

    In the variable ``x`` the Krawtchouk recurrence reads
    ``K_{j+1} = (N x K_j - j K_{j-1}) / (N - j)``.
    """
    zero, one = as_number(0, exact), as_number(1, exact)
    prev, cur = [zero], [one]
    for j in range(k):
        nxt = [zero] * (len(cur) + 1)
        for d, c in enumerate(cur):
            nxt[d + 1] += N * c
        for d, c in enumerate(prev):
            nxt[d] -= j * c
        prev, cur = cur, [c / (N - j) for c in nxt]
    return cur


def theta_for(spec: ModelSpec, exact: bool = True) -> ThetaPolynomial:
    N = spec.N
    if spec.kind == "q_deformed" and N >= 2:
        q = as_number(spec.q, exact)
        return ThetaPolynomial((-q / (N - 1), 1 - q, q * N / (N - 1)))
    total = [as_number(0, exact)]
    for k, w in spec.mixture(exact).items():
        if w == 0:
            continue
        poly = krawtchouk_in_m0(N, k, exact)
        total += [as_number(0, exact)] * (len(poly) - len(total))
        for d, c in enumerate(poly):
            total[d] += w * c
    return ThetaPolynomial(tuple(total))


def jk_recurrence_check(N: int, kmax: int, exact: bool = True):
    """Largest entry of ``(k-N) J_{k+1} - k J_{k-1} + N J_1 J_k`` over ``1 <= k < kmax``."""
    if not 1 <= kmax <= N:
        raise DomainError("kmax must satisfy 1 <= kmax <= N")
    J = [k_ball_matrix(N, k, exact) for k in range(kmax + 1)]
    worst = as_number(0, exact)
    for k in range(1, kmax):
        resid = (k - N) * J[k + 1] - k * J[k - 1] + N * (J[1] @ J[k])
        worst = max(worst, max_abs(resid))
    return worst


def jk_krawtchouk_check(N: int, k: int, exact: bool = True):
    """Deviation between the k-ball matrix and ``K_k(-N(M_0 - 1)/2)``."""
    if not 0 <= k <= N:
        raise DomainError("k must satisfy 0 <= k <= N")
    theta = ThetaPolynomial(tuple(krawtchouk_in_m0(N, k, exact)))
    lhs = theta_of_matrix(theta, classical_matrix(N, exact)).entries
    return max_abs(lhs - k_ball_matrix(N, k, exact))


def classical_eigenvalues(N: int, exact: bool = True) -> list:
    return [as_number(Fraction(N - 2 * j, N), exact) for j in range(N + 1)]


def _close(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(a - b) < CLUSTER_RTOL * max(1.0, abs(a))


def cluster(values) -> tuple:
    """Partition indices into classes of equal values (exact or clustered)."""
    classes: list[list[int]] = []
    reps: list = []
    for idx, v in enumerate(values):
        for c, r in enumerate(reps):
            if _close(r, v):
                classes[c].append(idx)
                break
        else:
            reps.append(v)
            classes.append([idx])
    return tuple(tuple(c) for c in classes)


def _gaps(eigenvalues):
    def is_one(v):
        return _close(v, as_number(1, isinstance(v, Fraction)))

    non_one = [abs(v) for v in eigenvalues if not is_one(v)]
    non_unimodular = [abs(v) for v in eigenvalues if not is_one(abs(v))]
    return 1 - max(non_one, default=0), 1 - max(non_unimodular, default=0)


def spectrum(spec: ModelSpec, exact: bool = True) -> SpectrumReport:
    theta = theta_for(spec, exact)
    eig = tuple(theta(lam) for lam in classical_eigenvalues(spec.N, exact))
    return SpectrumReport(eig, cluster(eig), _gaps(eig)[0])


def spectral_gap(report: SpectrumReport) -> dict:
    """``1 - max|lambda|`` over eigenvalues != 1, and over ``|lambda| != 1``."""
    g1, g2 = _gaps(report.eigenvalues)
    return {"gap_excluding_one": g1, "gap_excluding_unimodular": g2}


def omega(N: int) -> list[Fraction]:
    """The q values ``(3 - 2i/(N-1))^{-1}``, ``i = 0..N-1``, where doubles appear."""
    if N < 2:
        raise DomainError("N must be at least 2")
    return [1 / (3 - Fraction(2 * i, N - 1)) for i in range(N)]


def omega_index(N: int, q):
    """Index ``i`` with ``q = (3 - 2i/(N-1))^{-1}``, or None when q is not in the set."""
    if q == 0:
        return None
    i = (3 - 1 / q) * (N - 1) / 2
    if isinstance(i, Fraction):
        ok = i.denominator == 1 and 0 <= i <= N - 1
        return int(i) if ok else None
    r = round(i)
    return int(r) if abs(i - r) < 1e-9 and 0 <= r <= N - 1 else None


def predicted_doubles(N: int, i) -> int:
    if i is None:
        return 0
    return i // 2 + 1 if i % 2 == 0 else (i + 1) // 2


def multiplicity_report(N: int, q) -> MultiplicityReport:
    exact = not isinstance(q, float)
    q = as_number(q, exact)
    i = omega_index(N, q)
    rep = spectrum(ModelSpec.q_deformed(N, q), exact)
    observed = sum(1 for c in rep.multiplicity_classes if len(c) == 2)
    return MultiplicityReport(i is not None, i, predicted_doubles(N, i), observed)


def stationary(N: int, exact: bool = True) -> np.ndarray:
    """Binomial distribution ``C(N, m) / 2^N``."""
    if N < 1:
        raise DomainError("N must be at least 1")
    return to_array([Fraction(comb(N, m), 2**N) for m in range(N + 1)], exact)


def symmetrized_eigenvalues(M: BandedMatrix) -> np.ndarray:
    """Eigenvalues of ``D^{1/2} M D^{-1/2}`` with ``D = diag(pi)`` via a symmetric solver."""
    A = to_float(M.entries)
    pi = to_float(stationary(M.size - 1))
    s = np.sqrt(pi)
    S = (s[:, None] * A) / s[None, :]
    return np.linalg.eigvalsh((S + S.T) / 2)
