"""Karlin-McGregor representation of n-step transition probabilities.

For ``M = Theta(J)`` and a family orthogonal for ``mu``:

    (M^n)_{ij} = (1/h_j) sum_x Theta(nu_x)^n p_i(nu_x) p_j(nu_x) w_x

and, blockwise with the matrix polynomials of :mod:`block_mvop`,

    [M^n]_{IJ} = (sum_x Theta(nu_x)^n P_I(Theta(nu_x)) W(x) P_J(Theta(nu_x))^*) H_J^{-1}.

Powers ``Theta(nu_x)^n`` are formed by repeated multiplication, so nothing
here relies on an eigensolver.

Real-backend contexts evaluate the scalar representation in float64, with
``Theta(nu_x)`` taken from the exact polynomial and rounded once: the
monomial form of a high-degree Krawtchouk ``Theta`` loses about 1e-8 in
float64 at N = 21. The block representation is not usable in float64: the monomial coefficients of
``P_j`` grow like 1e8 already at N = 11 and cancel against the rank-one
weight. A real context therefore carries an exact twin built from the
rational image of the model parameters, and every block quantity is computed
on the twin and rounded once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._numeric import DomainError, eye, is_exact_array, max_abs, to_array, to_float, zeros
from .banded import BandedMatrix, ThetaPolynomial, jacobi_matrix, theta_of_matrix
from .block_mvop import (BlockTridiagonal, MatrixPolynomial, block_partition, check_conditioning, inner_product,
                         mvop_sequence, norm_blocks, scalar_link_check, weights)
from .ehrenfest import ModelSpec, theta_for
from .scalar_orthopoly import DiscreteMeasure, ScalarFamily, ehrenfest_family, ehrenfest_measure, eval_all

CLAMP_TOL = 1e-12


class ContextError(ValueError):
    """The context lacks the block data an operation needs."""


@dataclass(eq=False)
class KMContext:
    model: ModelSpec
    fam: ScalarFamily
    mu: DiscreteMeasure
    theta: ThetaPolynomial
    blocks: BlockTridiagonal | None = None
    mvops: list | None = None
    exact: bool = True
    H: list = field(default_factory=list)
    twin: "KMContext | None" = None

    @cached_property
    def values(self) -> np.ndarray:
        """``V[n, x] = p_n(nu_x)``."""
        return eval_all(self.fam, self.mu.points)

    @cached_property
    def theta_values(self) -> list:
        return [self.theta(p) for p in self.mu.points]

    @cached_property
    def weight_blocks(self) -> list:
        return weights(self.fam, self.mu, self.blocks.m)

    @cached_property
    def mvop_at_support(self) -> list:
        """``E[I][x] = P_I(Theta(nu_x))``."""
        return [[P(t) for t in self.theta_values] for P in self.mvops]

    def theta_powers(self, n: int) -> list:
        cache = self.__dict__.setdefault("_powers", [[1 + 0 * t for t in self.theta_values]])
        while len(cache) <= n:
            cache.append([p * t for p, t in zip(cache[-1], self.theta_values)])
        return cache[n]

    @property
    def size(self) -> int:
        return self.fam.size


def km_context(spec: ModelSpec, exact: bool = True, with_blocks: bool = True) -> KMContext:
    """Context for a model from the Ehrenfest family.

    Block data is attached when the degree of ``Theta`` divides ``N + 1``.
    """
    fam, mu = ehrenfest_family(spec.N, exact)
    theta = theta_for(spec, exact)
    ctx = KMContext(spec, fam, mu, theta, exact=exact)
    if not exact:
        exact_theta = theta_for(spec, True)
        ctx.theta_values = [float(exact_theta(p)) for p in ehrenfest_measure(spec.N, True).points]
    m = theta.degree
    if not (with_blocks and (spec.N + 1) % m == 0):
        return ctx
    if exact:
        ctx.blocks = block_partition(theta_of_matrix(theta, jacobi_matrix(fam.coeffs)), m)
        ctx.mvops = mvop_sequence(ctx.blocks)
    else:
        ctx.twin = km_context(spec, exact=True)
        tb = ctx.twin.blocks
        ctx.blocks = BlockTridiagonal(m, tb.L, *(tuple(to_float(b) for b in part) for part in (tb.A, tb.B, tb.C)))
        for A in ctx.blocks.A:
            check_conditioning(A)
        ctx.mvops = [MatrixPolynomial(tuple(to_float(c) for c in P.coeffs)) for P in ctx.twin.mvops]
    ctx.H = norm_blocks(fam, m)
    return ctx


def _check_index(ctx, *idx):
    for i in idx:
        if not 0 <= i < ctx.size:
            raise DomainError(f"state {i} outside 0..{ctx.size - 1}")


def km_scalar_entry(ctx: KMContext, n: int, i: int, j: int):
    if n < 0:
        raise DomainError("n must be nonnegative")
    _check_index(ctx, i, j)
    V, w = ctx.values, ctx.mu.weights
    powers = ctx.theta_powers(n)
    total = 0 * V[0, 0]
    for x in range(len(ctx.mu)):
        total = total + powers[x] * V[i, x] * V[j, x] * w[x]
    return total / ctx.fam.norms[j]


def km_scalar_matrix(ctx: KMContext, n: int) -> np.ndarray:
    """The full matrix ``Theta(J)^n`` from the scalar representation."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    V = ctx.values
    scale = to_array(ctx.theta_powers(n), ctx.exact) * to_array(ctx.mu.weights, ctx.exact)
    inv_h = to_array([1 / h for h in ctx.fam.norms], ctx.exact)
    return ((V * scale) @ V.T) * inv_h[None, :]


def km_block_entry(ctx: KMContext, n: int, I: int, J: int) -> np.ndarray:
    if ctx.blocks is None or ctx.mvops is None:
        raise ContextError("block data is not available for this context")
    if ctx.twin is not None:
        return to_float(km_block_entry(ctx.twin, n, I, J))
    if n < 0:
        raise DomainError("n must be nonnegative")
    L = ctx.blocks.L
    if not (0 <= I < L and 0 <= J < L):
        raise DomainError(f"block index outside 0..{L - 1}")
    powers = ctx.theta_powers(n)
    E = ctx.mvop_at_support
    total = zeros((ctx.blocks.m, ctx.blocks.m), ctx.exact)
    for x, W in enumerate(ctx.weight_blocks):
        total = total + powers[x] * (E[I][x] @ W @ np.conj(E[J][x]).T)
    H = ctx.H[J]
    Hinv = zeros(H.shape, ctx.exact)
    for d in range(H.shape[0]):
        Hinv[d, d] = 1 / H[d, d]
    return total @ Hinv


def km_block_matrix(ctx: KMContext, n: int) -> np.ndarray:
    """Assemble every ``m x m`` block of ``Theta(J)^n``."""
    if ctx.blocks is None:
        raise ContextError("block data is not available for this context")
    if ctx.twin is not None:
        return to_float(km_block_matrix(ctx.twin, n))
    m, L = ctx.blocks.m, ctx.blocks.L
    out = zeros((m * L, m * L), ctx.exact)
    for I in range(L):
        for J in range(L):
            out[m * I : m * I + m, m * J : m * J + m] = km_block_entry(ctx, n, I, J)
    return out


def mvop_gram(ctx: KMContext) -> list[list[np.ndarray]]:
    """All inner products ``<P_j, P_k>`` of the context's matrix polynomials."""
    if ctx.blocks is None:
        raise ContextError("block data is not available for this context")
    if ctx.twin is not None:
        return [[to_float(g) for g in row] for row in mvop_gram(ctx.twin)]
    return [[inner_product(P, Q, ctx.theta, ctx.fam, ctx.mu) for Q in ctx.mvops] for P in ctx.mvops]


def scalar_link_deviation(ctx: KMContext, j: int):
    """Deviation of ``P_j(Theta(nu_x)) p_0(nu_x)`` from ``p_j(nu_x)``.

    On a real context the left side comes from the exact twin (rounded) and
    the right side from float64 evaluation of the scalar family.
    """
    if ctx.blocks is None:
        raise ContextError("block data is not available for this context")
    if ctx.twin is None:
        return scalar_link_check(j, ctx.theta, ctx.fam, ctx.mu, ctx.blocks, ctx.mvops)
    tw, m = ctx.twin, ctx.blocks.m
    V = ctx.values
    worst = 0.0
    for x in range(len(tw.mu)):
        lhs = to_float(tw.mvops[j](tw.theta_values[x]) @ tw.values[:m, x])
        worst = max(worst, max_abs(lhs - V[m * j : m * j + m, x]))
    return worst


def n_step_distribution(ctx: KMContext, start: int, n: int) -> np.ndarray:
    """Row ``start`` of ``Theta(J)^n``; float round-off below ``CLAMP_TOL`` is clamped to 0."""
    _check_index(ctx, start)
    row = np.array([km_scalar_entry(ctx, n, start, j) for j in range(ctx.size)],
                   dtype=object if ctx.exact else float)
    if not ctx.exact:
        row[(row < 0) & (row >= -CLAMP_TOL)] = 0.0
    return row


def tv_distance(p, q):
    """Total variation distance ``(1/2) sum |p_i - q_i|``."""
    p, q = np.asarray(p), np.asarray(q)
    if p.shape != q.shape:
        raise DomainError("distributions have different lengths")
    if is_exact_array(p) and is_exact_array(q):
        return sum(abs(a - b) for a, b in zip(p, q)) / 2
    return 0.5 * float(np.sum(np.abs(p.astype(float) - q.astype(float))))


def matrix_power(M, n: int) -> np.ndarray:
    """Direct ``n``-fold product, the oracle the representations are checked against."""
    A = M.entries if isinstance(M, BandedMatrix) else np.asarray(M)
    out = eye(A.shape[0], is_exact_array(A))
    for _ in range(n):
        out = out @ A
    return out
