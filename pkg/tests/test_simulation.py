import numpy as np
import pytest

from ehrenfest_mvop._numeric import DomainError
from ehrenfest_mvop.ehrenfest import ModelSpec
from ehrenfest_mvop.simulation import (BLOCK, SimConfig, empirical_vs_analytic, sample_path, sample_paths,
                                       state_counts, z_scores)


def test_classical_n1_flips():
    path = sample_path(SimConfig(ModelSpec.classical(1), start=0, steps=3, trials=1, seed=9))
    assert path.tolist() == [0, 1, 0, 1]


def test_zero_steps():
    assert sample_path(SimConfig(ModelSpec.q_deformed(5, "1/2"), start=3, steps=0)).tolist() == [3]


def test_even_k_keeps_parity():
    paths = sample_paths(SimConfig(ModelSpec.k_ball(4, 2), start=2, steps=200, trials=50, seed=1))
    assert np.all(paths % 2 == 0)


def test_classical_parity_alternates():
    paths = sample_paths(SimConfig(ModelSpec.classical(6), start=1, steps=40, trials=20, seed=2))
    assert np.all((paths - 1 - np.arange(41)) % 2 == 0)


def test_same_seed_same_paths():
    cfg = SimConfig(ModelSpec.q_deformed(7, "0.3"), steps=12, trials=2 * BLOCK + 17, seed=123)
    a = sample_paths(cfg, workers=1)
    b = sample_paths(cfg, workers=4)
    assert np.array_equal(a, b)
    assert np.array_equal(sample_path(cfg, BLOCK + 5), a[BLOCK + 5])
    other = sample_paths(SimConfig(cfg.spec, steps=12, trials=cfg.trials, seed=124))
    assert not np.array_equal(a, other)


def test_counts_agree_with_paths():
    cfg = SimConfig(ModelSpec.k_ball(5, 3), start=1, steps=6, trials=3000, seed=5)
    paths = sample_paths(cfg)
    assert np.array_equal(state_counts(cfg, 4), np.bincount(paths[:, 4], minlength=6))


def test_config_validation():
    spec = ModelSpec.classical(3)
    for kw in ({"trials": 0}, {"steps": -1}, {"start": 4}, {"seed": 2**64}):
        with pytest.raises(DomainError):
            SimConfig(spec, **kw)
    with pytest.raises(DomainError):
        state_counts(SimConfig(spec, steps=2), 3)
    with pytest.raises(DomainError):
        sample_path(SimConfig(spec, trials=2), 2)


def test_point_mass_report():
    rep = empirical_vs_analytic(SimConfig(ModelSpec.q_deformed(5, "1/2"), start=2, trials=1), 0)
    # the analytic row is float64 KM output, so only round-off separates it from the point mass
    assert rep.tv <= 1e-12 and np.isfinite(rep.z_max)


def test_deterministic_row_report():
    rep = empirical_vs_analytic(SimConfig(ModelSpec.classical(2), start=0, steps=1, trials=500), 1)
    assert rep.counts.tolist() == [0, 500, 0]
    assert rep.tv <= 1e-12 and rep.z_max == 0


def test_statistical_agreement_small():
    cfg = SimConfig(ModelSpec.multi_ball(8, ["1/2", "1/2"], [1, 5]), start=3, steps=4, trials=200_000, seed=7)
    rep = empirical_vs_analytic(cfg, 4, workers=2)
    assert rep.tv <= 3 * np.sqrt(9 / cfg.trials)
    assert rep.z_max < 5


def test_z_scores():
    z = z_scores(np.array([50, 50, 0]), np.array([0.5, 0.5, 0.0]))
    assert z.tolist() == [0.0, 0.0, 0.0]
    assert np.isinf(z_scores(np.array([1, 0]), np.array([0.0, 1.0]))[0])
