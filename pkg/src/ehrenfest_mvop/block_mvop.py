"""Matrix-valued orthogonal polynomials attached to ``Theta(J)``.

For a polynomial ``Theta`` of degree ``m`` the banded matrix ``Theta(J)`` is
block tridiagonal with ``m x m`` blocks ``A_i, B_i, C_i``. The block
recurrence

    x P_j(x) = A_j P_{j+1}(x) + B_j P_j(x) + C_j P_{j-1}(x),   P_{-1} = 0, P_0 = I

defines matrix polynomials ``P_j`` that are orthogonal for the inner product

    <P, Q> = sum_x P(Theta(nu_x)) W(x) Q(Theta(nu_x))^*,   W(x) = w_x v(x) v(x)^T,

with ``v(x) = (p_0(nu_x), ..., p_{m-1}(nu_x))``. The measure weight ``w_x``
enters exactly once, inside ``W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from ._numeric import DomainError, exact_det, exact_solve, eye, is_exact_array, max_abs, nullspace, zeros
from .banded import BandedMatrix, ThetaPolynomial
from .scalar_orthopoly import DiscreteMeasure, JacobiCoefficients, ScalarFamily, eval_all

COND_LIMIT = 1e12


class PartitionError(ValueError):
    """Block size does not divide the matrix size."""


class NotBlockTridiagonalError(ValueError):
    """Matrix bandwidth exceeds the block size."""


class IllConditionedBlockError(ArithmeticError):
    """An ``A_i`` block is singular or too badly conditioned to invert."""


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BlockTridiagonal:
    """Block partition of a banded matrix.

    ``A`` has ``L - 1`` blocks, ``B`` has ``L``. ``C`` also has ``L`` entries
    with ``C[0]`` the zero block, so ``C[i]`` lines up with block row ``i``.
    """

    m: int
    L: int
    A: tuple
    B: tuple
    C: tuple

    @property
    def exact(self) -> bool:
        return is_exact_array(self.B[0])

    def assemble(self) -> np.ndarray:
        m, L = self.m, self.L
        out = zeros((m * L, m * L), self.exact)
        for i in range(L):
            out[m * i : m * i + m, m * i : m * i + m] = self.B[i]
            if i + 1 < L:
                out[m * i : m * i + m, m * (i + 1) : m * (i + 2)] = self.A[i]
            if i > 0:
                out[m * i : m * i + m, m * (i - 1) : m * i] = self.C[i]
        return out

    def triangularity_ok(self) -> bool:
        """``A_i`` lower triangular and ``C_i`` upper triangular (exact zeros)."""
        lower = all(np.all(np.triu(a, 1) == 0) for a in self.A)
        upper = all(np.all(np.tril(c, -1) == 0) for c in self.C[1:])
        return bool(lower and upper)


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """``m x m`` matrix polynomial stored as coefficient blocks, lowest degree first."""

    coeffs: tuple

    @property
    def m(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> np.ndarray:
        return self.coeffs[-1]

    def __call__(self, x) -> np.ndarray:
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc


@dataclass(frozen=True)
class NormRatioVerdict:
    constant_pairs: dict = field(default_factory=dict)
    verdict: str = "inconclusive"


def block_partition(M: BandedMatrix, m: int) -> BlockTridiagonal:
    if m < 1:
        raise DomainError("block size must be positive")
    if M.size % m:
        raise PartitionError(f"block size {m} does not divide matrix size {M.size}")
    if M.bandwidth > m:
        raise NotBlockTridiagonalError(f"bandwidth {M.bandwidth} exceeds block size {m}")
    a = M.entries
    L = M.size // m

    def blk(r, c):
        return np.array(a[m * r : m * r + m, m * c : m * c + m])

    A = tuple(blk(i, i + 1) for i in range(L - 1))
    B = tuple(blk(i, i) for i in range(L))
    C = (zeros((m, m), M.exact),) + tuple(blk(i, i - 1) for i in range(1, L))
    return BlockTridiagonal(m, L, A, B, C)


def leading_diagonal_formula(theta: ThetaPolynomial, coeffs: JacobiCoefficients, i: int) -> list:
    """Predicted diagonal of ``A_i``: ``alpha_m * a_{mi+j} ... a_{m(i+1)+j-1}``."""
    m = theta.degree
    out = []
    for j in range(m):
        prod = theta.coefficients[-1]
        for k in range(m * i + j, m * (i + 1) + j):
            prod = prod * coeffs.a[k]
        out.append(prod)
    return out


def check_conditioning(A: np.ndarray) -> None:
    if is_exact_array(A):
        if exact_det(A) == 0:
            raise IllConditionedBlockError("singular A block")
        return
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedBlockError(f"A block condition number {cond:.3g} exceeds {COND_LIMIT:g}")


def _inverse(A: np.ndarray) -> np.ndarray:
    check_conditioning(A)
    m = A.shape[0]
    if is_exact_array(A):
        return exact_solve(A, eye(m, True))
    # LAPACK gesv: LU with partial pivoting
    return np.linalg.solve(A, np.eye(m))


def mvop_sequence(blocks: BlockTridiagonal) -> list[MatrixPolynomial]:
    """``P_0 .. P_{L-1}`` from the block recurrence, on coefficient blocks."""
    m, exact = blocks.m, blocks.exact
    I = eye(m, exact)
    Z = zeros((m, m), exact)
    seq = [MatrixPolynomial((I,))]
    prev = [Z]
    for j in range(blocks.L - 1):
        cur = list(seq[-1].coeffs)
        deg = len(cur)
        nxt = [zeros((m, m), exact) for _ in range(deg + 1)]
        for d, c in enumerate(cur):
            nxt[d + 1] = nxt[d + 1] + c
            nxt[d] = nxt[d] - blocks.B[j] @ c
        for d, c in enumerate(prev):
            nxt[d] = nxt[d] - blocks.C[j] @ c
        Ainv = _inverse(blocks.A[j])
        nxt = [Ainv @ c for c in nxt]
        prev = cur
        seq.append(MatrixPolynomial(tuple(nxt)))
    return seq


def _conj_t(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def weight_at(x_index: int, fam: ScalarFamily, mu: DiscreteMeasure, m: int) -> np.ndarray:
    """Rank-one weight ``w_x v(x) v(x)^T`` at support point ``x_index``."""
    if not 0 <= x_index < len(mu):
        raise DomainError("support index out of range")
    v = eval_all(fam, [mu.points[x_index]])[:m, 0]
    return mu.weights[x_index] * np.outer(v, v)


def weights(fam: ScalarFamily, mu: DiscreteMeasure, m: int) -> list[np.ndarray]:
    V = eval_all(fam, mu.points)[:m]
    return [mu.weights[x] * np.outer(V[:, x], V[:, x]) for x in range(len(mu))]


def norm_blocks(fam: ScalarFamily, m: int) -> list[np.ndarray]:
    """``H_j = diag(h_{mj}, ..., h_{mj+m-1})`` assembled from the scalar norms."""
    h = fam.norms
    exact = all(isinstance(v, Fraction) for v in h)
    out = []
    for j in range(len(h) // m):
        H = zeros((m, m), exact)
        for i in range(m):
            H[i, i] = h[m * j + i]
        out.append(H)
    return out


def inner_product(P: MatrixPolynomial, Q: MatrixPolynomial, theta: ThetaPolynomial, fam: ScalarFamily,
                  mu: DiscreteMeasure) -> np.ndarray:
    if P.m != Q.m:
        raise DomainError("matrix polynomials have different block sizes")
    total = None
    for x, W in enumerate(weights(fam, mu, P.m)):
        t = theta(mu.points[x])
        term = P(t) @ W @ _conj_t(Q(t))
        total = term if total is None else total + term
    return total


def scalar_link_check(j: int, theta: ThetaPolynomial, fam: ScalarFamily, mu: DiscreteMeasure,
                      blocks: BlockTridiagonal, mvops=None):
    """Largest deviation of ``P_j(Theta(nu_x)) p_0(nu_x)`` from ``p_j(nu_x)`` over the support."""
    if not 0 <= j < blocks.L:
        raise DomainError("j must be below the number of block rows")
    mvops = mvops if mvops is not None else mvop_sequence(blocks)
    m = blocks.m
    V = eval_all(fam, mu.points)
    worst = 0 * V[0, 0]
    for x in range(len(mu)):
        lhs = mvops[j](theta(mu.points[x])) @ V[:m, x]
        rhs = V[m * j : m * j + m, x]
        worst = max(worst, max_abs(lhs - rhs))
    return worst


def commutant(weight_list) -> list[tuple[np.ndarray, np.ndarray]]:
    """Basis of ``{T : T W = W T^*}`` over all weights, as (real, imag) pairs.

    With ``T = X + iY`` and real symmetric ``W`` the condition splits into
    ``X W = W X^T`` and ``Y W = -W Y^T``; each is solved as a homogeneous
    linear system over the ``m^2`` entries. The returned list has the real
    dimension of the commutant as its length.
    """
    weight_list = list(weight_list)
    m = weight_list[0].shape[0]
    exact = is_exact_array(weight_list[0])
    basis = []
    for sign, is_imag in ((-1, False), (1, True)):
        cols = []
        for k in range(m * m):
            E = zeros((m, m), exact)
            E[k // m, k % m] = 1
            cols.append(np.concatenate([(E @ W + sign * W @ E.T).reshape(-1) for W in weight_list]))
        system = np.stack(cols, axis=1)
        for vec in nullspace(system):
            T = np.asarray(vec).reshape(m, m)
            Z = zeros((m, m), exact)
            basis.append((Z, T) if is_imag else (T, Z))
    return basis


def weight_commutant(fam: ScalarFamily, mu: DiscreteMeasure, m: int):
    return commutant(weights(fam, mu, m))


def norm_ratio_test(norms, m: int, rtol: float = 1e-12) -> NormRatioVerdict:
    """Decide whether ``h_{mn+i} / h_{mn+j}`` is constant in ``n`` for each pair.

    When no pair has a constant ratio every ``T`` with ``T H_n = H_n T^*`` is
    real diagonal and the verdict is ``"diagonal"``.
    """
    norms = list(norms)
    rows = len(norms) // m
    if rows < 2:
        raise InsufficientDataError("need at least two complete blocks of norms")
    exact = all(isinstance(h, Fraction) for h in norms)
    constant = {}
    for i, j in combinations(range(m), 2):
        ratios = [norms[m * n + i] / norms[m * n + j] for n in range(rows)]
        if exact:
            constant[(i, j)] = all(r == ratios[0] for r in ratios)
        else:
            r0 = float(ratios[0])
            constant[(i, j)] = all(abs(float(r) - r0) <= rtol * abs(r0) for r in ratios)
    verdict = "inconclusive" if any(constant.values()) else "diagonal"
    return NormRatioVerdict(constant, verdict)
