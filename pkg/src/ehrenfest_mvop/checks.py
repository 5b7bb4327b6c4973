"""Identity suites run by ``ehrenfest-mvop check``."""

from __future__ import annotations

from dataclasses import dataclass

from ._numeric import as_number, max_abs
from .banded import theta_of_matrix
from .ehrenfest import (ModelSpec, build, classical_matrix, jk_krawtchouk_check, jk_recurrence_check, theta_for)
from .km_kernel import km_block_matrix, km_context, km_scalar_matrix, matrix_power, mvop_gram, scalar_link_deviation

REAL_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skipped"
    deviation: object = None
    detail: str = ""

    @property
    def failed(self) -> bool:
        return self.status == "fail"


def _judge(name, dev, exact, detail=""):
    ok = dev == 0 if exact else float(dev) <= REAL_TOL
    return CheckResult(name, "pass" if ok else "fail", dev, detail)


def run_checks(N: int, q="1/2", exact: bool = True, nmax: int = 10) -> list[CheckResult]:
    spec = ModelSpec.q_deformed(N, q)
    out = []

    lhs = build(spec, exact).entries
    rhs = theta_of_matrix(theta_for(spec, exact), classical_matrix(N, exact)).entries
    out.append(_judge("theta_identity", max_abs(lhs - rhs), exact, "q-deformed matrix equals Theta(M_0)"))

    ctx = km_context(spec, exact)
    if ctx.blocks is None:
        reason = f"block size {ctx.theta.degree} does not divide N+1={N + 1}"
        out += [CheckResult(n, "skipped", None, reason) for n in ("scalar_link", "mvop_orthogonality")]
    else:
        L = ctx.blocks.L
        dev = max(scalar_link_deviation(ctx, j) for j in range(L))
        out.append(_judge("scalar_link", dev, exact, "P_j(Theta(x)) p_0(x) = p_j(x) on the support"))
        G = mvop_gram(ctx)
        dev = max(max_abs(G[j][k] - (ctx.H[j] if j == k else 0 * G[j][k])) for j in range(L) for k in range(L))
        out.append(_judge("mvop_orthogonality", dev, exact, "<P_j, P_k> = delta_jk H_j"))

    if N >= 2:
        out.append(_judge("kball_recurrence", jk_recurrence_check(N, N, exact), exact,
                          "(k-N) J_{k+1} = k J_{k-1} - N J_1 J_k"))
    dev = max(jk_krawtchouk_check(N, k, exact) for k in range(N + 1))
    out.append(_judge("kball_krawtchouk", dev, exact, "J_k = K_k(-N(J_1 - 1)/2)"))

    M = build(spec, exact).entries
    power = matrix_power(M, 0)
    dev = as_number(0, exact)
    for n in range(nmax + 1):
        dev = max(dev, max_abs(km_scalar_matrix(ctx, n) - power))
        if ctx.blocks is not None:
            dev = max(dev, max_abs(km_block_matrix(ctx, n) - power))
        power = power @ M
    out.append(_judge("km_oracle", dev, exact, f"scalar and block representations vs direct powers, n <= {nmax}"))
    return out
