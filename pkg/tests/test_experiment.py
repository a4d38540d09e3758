"""Synthetic study: generation, knowledge constraints, and the runner."""

import numpy as np
import pytest

from sideknow import (
    LinearModel,
    build_knowledge_constraints,
    desk_config,
    generate_synthetic,
    paper_config,
    predict_rmse,
    run_experiment,
    seeded_rng,
)
from sideknow.experiment import (
    FEATURE_CORRELATION,
    SETUPS,
    ExperimentConfig,
    _feature_cholesky,
    write_records_csv,
    write_summary_csv,
)


def tiny_config(seed=0, **over):
    base = dict(
        train_sizes=(30,),
        n_replicates=2,
        n_test=40,
        n_knowledge=12,
        poset_pair_count=20,
        p=6,
    )
    base.update(over)
    return desk_config(seed=seed, **base)


class TestConfig:
    def test_paper_preset_dimensions(self):
        cfg = paper_config()
        assert cfg.p == 60
        assert cfg.n_test == 750
        assert cfg.n_knowledge == 120
        assert cfg.train_sizes == (300, 450, 600, 750)
        assert cfg.n_replicates == 30
        assert cfg.poset_pair_count == 1200
        assert 5 * len(cfg.train_sizes) * cfg.n_replicates == 600

    def test_desk_preset_dimensions(self):
        cfg = desk_config()
        assert (cfg.p, cfg.n_test, cfg.n_knowledge) == (20, 200, 40)
        assert cfg.train_sizes == (60, 100, 150)
        assert cfg.n_replicates == 10

    def test_pair_budget_checked(self):
        with pytest.raises(ValueError, match="pairs"):
            ExperimentConfig(
                p=4,
                train_sizes=(10,),
                n_test=10,
                n_knowledge=4,
                n_replicates=1,
                poset_pair_count=100,
            )


class TestGeneration:
    def test_noiseless_true_model_has_zero_rmse(self):
        cfg = tiny_config(noise_sd=0.0)
        trains, knowledge, test, beta_true = generate_synthetic(cfg, 99)
        assert predict_rmse(LinearModel(beta_true), test) == pytest.approx(0.0, abs=1e-12)

    def test_same_seed_bit_identical(self):
        cfg = tiny_config()
        a = generate_synthetic(cfg, 123)
        b = generate_synthetic(cfg, 123)
        np.testing.assert_array_equal(a[0][30].features, b[0][30].features)
        np.testing.assert_array_equal(a[2].labels, b[2].labels)
        np.testing.assert_array_equal(a[3], b[3])

    def test_sample_covariance_matches_target(self):
        p = 5
        L = _feature_cholesky(p)
        rng = seeded_rng(7, "cov-check")
        draws = L @ rng.standard_normal((p, 100_000))
        emp = draws @ draws.T / draws.shape[1]
        target = np.full((p, p), FEATURE_CORRELATION)
        np.fill_diagonal(target, 1.0)
        assert np.abs(emp - target).max() <= 0.02

    def test_nested_training_prefixes(self):
        cfg = tiny_config(train_sizes=(10, 20))
        trains, *_ = generate_synthetic(cfg, 5)
        np.testing.assert_array_equal(
            trains[10].features, trains[20].features[:, :10]
        )


class TestKnowledgeConstraints:
    def test_true_model_feasible_for_all_sets(self):
        cfg = tiny_config(noise_sd=0.0)
        _, knowledge, _, beta_true = generate_synthetic(cfg, 11)
        sets = build_knowledge_constraints(knowledge, beta_true, cfg)
        for name, cset in sets.items():
            assert cset.max_violation(beta_true) <= 1e-9, name

    def test_true_model_feasible_even_with_noisy_training(self):
        # knowledge labels are exact, so feasibility of the true model does
        # not depend on the training noise level
        cfg = tiny_config(noise_sd=2.0)
        _, knowledge, _, beta_true = generate_synthetic(cfg, 13)
        sets = build_knowledge_constraints(knowledge, beta_true, cfg)
        for name, cset in sets.items():
            assert cset.max_violation(beta_true) <= 1e-9, name

    def test_counts_match_configuration(self):
        cfg = tiny_config()
        _, knowledge, _, beta_true = generate_synthetic(cfg, 17)
        sets = build_knowledge_constraints(knowledge, beta_true, cfg)
        assert len(sets["polygonal"].halfspaces) == cfg.poset_pair_count
        assert len(sets["quadratic"].ellipsoids) == 1
        assert len(sets["conic"].cones) == cfg.n_knowledge

    def test_reference_scale_pair_count(self):
        cfg = paper_config(seed=1)
        rng = seeded_rng(1, "ref")
        X = rng.standard_normal((60, 120))
        from sideknow import UnlabeledSet

        beta = rng.standard_normal(60)
        beta *= 3.0 / np.linalg.norm(beta)
        knowledge = UnlabeledSet(X, knowledge_labels=beta @ X)
        sets = build_knowledge_constraints(knowledge, beta, cfg)
        assert len(sets["polygonal"].halfspaces) == 1200
        # smoothness operator on 120 sorted points has 119 rows
        assert sets["quadratic"].ellipsoids[0].matrix.shape == (60, 60)

    def test_missing_labels_rejected(self):
        from sideknow import UnlabeledSet

        cfg = tiny_config()
        u = UnlabeledSet(np.eye(6))
        with pytest.raises(ValueError, match="labels"):
            build_knowledge_constraints(u, np.ones(6), cfg)


class TestRunner:
    def test_record_count_and_determinism(self, tmp_path):
        cfg = tiny_config(seed=3)
        r1 = run_experiment(cfg)
        r2 = run_experiment(cfg, threads=2)
        assert len(r1.records) == 5 * 1 * 2
        assert r1.records == r2.records
        assert r1.summary == r2.summary
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_records_csv(r1, p1)
        write_records_csv(r2, p2)
        assert p1.read_bytes() == p2.read_bytes()
        s1, s2 = tmp_path / "sa.csv", tmp_path / "sb.csv"
        write_summary_csv(r1, s1)
        write_summary_csv(r2, s2)
        assert s1.read_bytes() == s2.read_bytes()

    def test_all_setups_present(self):
        cfg = tiny_config(seed=4)
        result = run_experiment(cfg)
        assert {r.setup for r in result.records} == set(SETUPS)
        assert all(r.status == "ok" for r in result.records)
