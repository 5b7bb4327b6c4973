"""Acceptance criteria. Each test carries a ``criterion`` marker and the
summary hook in conftest prints one PASS/FAIL line per criterion."""

import csv
import io
import random
import time
from fractions import Fraction
from math import factorial, pi, sqrt

import numpy as np
import pytest

from ehrenfest_mvop.banded import is_stochastic, theta_of_matrix
from ehrenfest_mvop.cli import main
from ehrenfest_mvop.ehrenfest import (ModelSpec, build, classical_matrix, jk_krawtchouk_check, jk_recurrence_check,
                                      k_ball_matrix, multiplicity_report, omega, predicted_doubles, spectrum,
                                      stationary, symmetrized_eigenvalues, theta_for)
from ehrenfest_mvop.block_mvop import norm_ratio_test, weight_commutant
from ehrenfest_mvop.figures import Fig1Row, curve_crossings
from ehrenfest_mvop.km_kernel import km_block_matrix, km_context, km_scalar_matrix, mvop_gram, scalar_link_deviation
from ehrenfest_mvop.scalar_orthopoly import ehrenfest_family, gram_check
from ehrenfest_mvop.simulation import SimConfig, empirical_vs_analytic

F = Fraction
crit = pytest.mark.criterion

ODD_N = (3, 5, 7, 9, 11)
Q_GRID = tuple(F(q) for q in ("0", "1/4", "1/3", "1/2", "3/4", "1"))
SPECTRUM_TOL = 1e-8
REAL_TOL = 1e-10


def _cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


# 1 -------------------------------------------------------------------------

@crit(1, "q-deformed matrix equals Theta_q(M_0) exactly, odd N <= 11, runtime < 1 s")
def test_c1_theta_identity():
    t0 = time.perf_counter()
    for N in ODD_N:
        M0 = classical_matrix(N)
        for q in Q_GRID:
            spec = ModelSpec.q_deformed(N, q)
            assert build(spec) == theta_of_matrix(theta_for(spec), M0), (N, q)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"{elapsed:.3f} s"


# 2 -------------------------------------------------------------------------

@crit(2, "analytic spectrum equals symmetrized numeric eigenvalues within 1e-8")
def test_c2_spectrum_vs_oracle():
    for N in ODD_N:
        for q in Q_GRID:
            spec = ModelSpec.q_deformed(N, q)
            ana = np.sort([float(v) for v in spectrum(spec).eigenvalues])
            num = np.sort(symmetrized_eigenvalues(build(spec)))
            assert np.max(np.abs(ana - num)) <= SPECTRUM_TOL, (N, q)


@crit(2, "analytic spectrum equals symmetrized numeric eigenvalues within 1e-8")
def test_c2_n3_half():
    assert sorted(spectrum(ModelSpec.q_deformed(3, "1/2")).eigenvalues) == [F(-1, 3), 0, 0, 1]


# 3 -------------------------------------------------------------------------

@crit(3, "double-eigenvalue counts on Omega and simple spectrum off Omega, runtime < 5 s")
def test_c3_multiplicity_sweep():
    t0 = time.perf_counter()
    for N in (3, 5, 7, 9, 11, 13):
        for i in range(N):
            q = 1 / (3 - F(2 * i, N - 1))
            rep = multiplicity_report(N, q)
            want = i // 2 + 1 if i % 2 == 0 else (i + 1) // 2
            assert rep.i == i and rep.observed_doubles == want == predicted_doubles(N, i), (N, i)
    rng = random.Random(20261018)
    tested = 0
    while tested < 20:
        N = rng.choice((3, 5, 7, 9, 11, 13))
        q = F(rng.randint(1, 999), 1000)
        if q in omega(N):
            continue
        rep = spectrum(ModelSpec.q_deformed(N, q))
        assert all(len(c) == 1 for c in rep.multiplicity_classes), (N, q)
        tested += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"{elapsed:.3f} s"


# 4 / 5 ---------------------------------------------------------------------

MVOP_GRID = [(N, q) for N in (3, 7, 11) for q in ("0.3", "0.5", "0.9")]


@crit(4, "MVOP orthogonality <P_j,P_k> = delta_jk H_j (exact / 1e-10) and H_j from scalar norms")
@pytest.mark.parametrize("N,q", MVOP_GRID)
@pytest.mark.parametrize("exact", [True, False], ids=["rational", "real"])
def test_c4_mvop_orthogonality(N, q, exact):
    ctx = km_context(ModelSpec.q_deformed(N, F(q) if exact else float(q)), exact)
    G = mvop_gram(ctx)
    L = ctx.blocks.L
    norms = gram_check(*ehrenfest_family(N, exact)).norms
    for j in range(L):
        H = ctx.H[j]
        assert (H[0, 0], H[1, 1]) == (norms[2 * j], norms[2 * j + 1])
        assert H[0, 1] == 0 and H[1, 0] == 0
        for k in range(L):
            want = H if j == k else np.zeros((2, 2), dtype=object if exact else float)
            dev = np.max(np.abs(G[j][k] - want))
            if exact:
                assert dev == 0, (j, k)
            else:
                assert dev <= REAL_TOL, (j, k, dev)


@crit(5, "scalar link P_j(Theta(x)) p_0 = stacked p_j on the support (exact / 1e-10)")
@pytest.mark.parametrize("N,q", MVOP_GRID)
@pytest.mark.parametrize("exact", [True, False], ids=["rational", "real"])
def test_c5_scalar_link(N, q, exact):
    ctx = km_context(ModelSpec.q_deformed(N, F(q) if exact else float(q)), exact)
    for j in range((N + 1) // 2):
        dev = scalar_link_deviation(ctx, j)
        assert (dev == 0) if exact else (dev <= REAL_TOL), (j, dev)


# 6 -------------------------------------------------------------------------

@crit(6, "k-ball recurrence and Krawtchouk identities exact for N <= 10; J_1 = M_0; rows sum to 1")
def test_c6_k_ball_identities():
    for N in range(1, 11):
        if N >= 2:
            assert jk_recurrence_check(N, N) == 0, N
        for k in range(N + 1):
            assert jk_krawtchouk_check(N, k) == 0, (N, k)
            J = k_ball_matrix(N, k)
            assert all(sum(row) == 1 for row in J), (N, k)
        assert np.all(k_ball_matrix(N, 1) == classical_matrix(N).entries)


# 7 -------------------------------------------------------------------------

def _km_models():
    out = []
    for N in (1, 2, 5, 11, 21):
        out.append(ModelSpec.classical(N))
        out.append(ModelSpec.k_ball(N, min(3, N)))
        if N >= 2:
            out.append(ModelSpec.q_deformed(N, "3/10"))
            out.append(ModelSpec.multi_ball(N, ["1/2", "1/4", "1/4"], [1, 2, N]))
    out.append(ModelSpec.multi_ball(20, ["1/2", "1/4", "1/4"], [1, 2, 3]))  # degree 3 blocks
    out.append(ModelSpec.q_deformed(21, "9/10"))
    return out


KM_MODELS = _km_models()


@crit(7, "scalar and block KM reproduce direct powers for n <= 10, N <= 21 (exact / 1e-10)")
@pytest.mark.parametrize("spec", KM_MODELS, ids=lambda s: f"{s.kind}-N{s.N}")
@pytest.mark.parametrize("exact", [True, False], ids=["rational", "real"])
def test_c7_km_oracle(spec, exact):
    ctx = km_context(spec, exact)
    M = build(spec, exact).entries
    P = np.eye(spec.N + 1, dtype=object) * F(1) if exact else np.eye(spec.N + 1)
    for n in range(11):
        S = km_scalar_matrix(ctx, n)
        dev = np.max(np.abs(S - P))
        assert (dev == 0) if exact else (dev <= REAL_TOL), ("scalar", n, dev)
        if ctx.blocks is not None:
            B = km_block_matrix(ctx, n)
            dev = np.max(np.abs(B - P))
            assert (dev == 0) if exact else (dev <= REAL_TOL), ("block", n, dev)
            dev = np.max(np.abs(B - S))
            assert (dev == 0) if exact else (dev <= REAL_TOL), ("assembly", n, dev)
        P = P @ M


@crit(7, "scalar and block KM reproduce direct powers for n <= 10, N <= 21 (exact / 1e-10)")
def test_c7_block_path_exercised():
    with_blocks = [s for s in KM_MODELS if km_context(s, True, with_blocks=True).blocks is not None]
    assert {s.kind for s in with_blocks} >= {"q_deformed", "k_ball", "multi_ball", "classical"}
    assert any(s.N == 21 for s in with_blocks)


# 8 -------------------------------------------------------------------------

@crit(8, "pi M = pi and detailed balance exactly for every built model in the grid")
def test_c8_stationarity():
    models = [ModelSpec.q_deformed(N, q) for N in ODD_N for q in Q_GRID]
    models += [ModelSpec.k_ball(N, k) for N in range(1, 11) for k in range(1, N + 1)]
    models += KM_MODELS
    for spec in models:
        M = build(spec).entries
        assert is_stochastic(M)
        pi_ = stationary(spec.N)
        assert np.all(pi_ @ M == pi_), spec
        D = pi_[:, None] * M
        assert np.all(D == D.T), spec


# 9 -------------------------------------------------------------------------

@crit(9, "weight commutant has dimension 1; Hermite norm test says diagonal")
def test_c9_irreducibility():
    for N in (3, 5, 7, 11):
        fam, mu = ehrenfest_family(N)
        assert len(weight_commutant(fam, mu, 2)) == 1, N
    hermite = [sqrt(pi) * 2**n * factorial(n) for n in range(12)]
    assert norm_ratio_test(hermite, 2).verdict == "diagonal"


# 10 ------------------------------------------------------------------------

def _fig1_rows(text):
    return [Fig1Row(F(r["q"]), int(r["j"]), F(r["eigenvalue"])) for r in csv.DictReader(io.StringIO(text))]


@crit(10, "fig1 crossings exactly at Omega(11), none for q < 1/3; fig2 N=100 datasets complete; < 10 s")
def test_c10_figures(capsys):
    t0 = time.perf_counter()
    code, out = _cli(capsys, "fig1", "--N", "11")
    assert code == 0
    rows = _fig1_rows(out)
    assert len(rows) == 12 * 201
    assert curve_crossings(rows) == set(omega(11))
    by_q = {}
    for r in rows:
        by_q.setdefault(r.q, []).append(r.eigenvalue)
    for q, vals in by_q.items():
        if q < F(1, 3):
            assert len(set(vals)) == len(vals), q

    sweep = ",".join(str(q) for q in omega(11))
    code, out = _cli(capsys, "fig1", "--N", "11", "--q-grid", sweep)
    assert code == 0
    by_q = {}
    for r in _fig1_rows(out):
        by_q.setdefault(r.q, []).append(r.eigenvalue)
    for i, q in enumerate(omega(11)):
        vals = by_q[q]
        doubles = sum(1 for v in set(vals) if vals.count(v) == 2)
        assert doubles == predicted_doubles(11, i), (q, doubles)

    for q in ("0.3", "0.8"):
        code, out = _cli(capsys, "fig2", "--N", "100", "--q", q)
        assert code == 0
        rows2 = list(csv.DictReader(io.StringIO(out)))
        assert len(rows2) == 40 * 101
        for k in range(1, 41):
            sub = [r for r in rows2 if int(r["k"]) == k]
            assert sorted(int(r["j"]) for r in sub) == list(range(101))
            vals = [F(r["eigenvalue"]) for r in sub]
            assert all(-1 <= v <= 1 for v in vals) and vals[0] == 1
            flagged = [abs(F(r["eigenvalue"])) for r in sub if r["is_subdominant"] == "1"]
            assert flagged and max(flagged) == max(abs(v) for v in vals if abs(v) < 1)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"{elapsed:.3f} s"


# 11 ------------------------------------------------------------------------

@crit(11, "Monte Carlo N=11 q=0.3 n=5 1e6 trials: TV <= 3 sqrt(12/1e6), z_max < 5, identical across workers")
def test_c11_monte_carlo():
    cfg = SimConfig(ModelSpec.q_deformed(11, 0.3), start=0, steps=5, trials=10**6, seed=20261018)
    one = empirical_vs_analytic(cfg, 5, workers=1)
    many = empirical_vs_analytic(cfg, 5, workers=8)
    assert one.tv <= 3 * sqrt(12 / 10**6), one.tv
    assert one.z_max < 5, one.z_max
    assert np.array_equal(one.counts, many.counts)
    assert one.tv == many.tv and one.z_max == many.z_max
