"""Voting, bagging, stacking: arithmetic, reductions, OOF construction."""

import numpy as np
import pytest
import scipy.sparse as sp

from ekmanlab.ensembles import (
    BaggingConfig,
    StackingConfig,
    VotingConfig,
    VotingModel,
    bagging_fit,
    bagging_predict_proba,
    default_stacking_bases,
    default_voting_members,
    stacking_fit,
    stacking_oof_features,
    vote_hard,
    vote_soft,
    voting_fit,
)
from ekmanlab.learners import (
    ForestConfig,
    GBTConfig,
    LogRegConfig,
    SVMConfig,
    logreg_fit,
    stratified_kfold,
)


class _FixedModel:
    """Test double emitting a constant distribution for every input."""

    kind = "fixed"

    def __init__(self, dist, feature_dim=4):
        self.dist = np.asarray(dist, dtype=np.float64)
        self.feature_dim = feature_dim
        self.n_classes = len(self.dist)
        self.fit_report = {}

    def predict_proba(self, X):
        n = X.shape[0] if hasattr(X, "shape") else 1
        return np.tile(self.dist, (n, 1))


def _one_hot_dist(i, k=7):
    d = np.zeros(k)
    d[i] = 1.0
    return d


SMALL = (LogRegConfig(epochs=40), LogRegConfig(epochs=40, l2=0.01), SVMConfig(epochs=5))


class TestDefaults:
    def test_voting_members_match_selected_triple(self):
        kinds = tuple(type(m).__name__ for m in default_voting_members())
        assert kinds == ("GBTConfig", "LogRegConfig", "SVMConfig")

    def test_stacking_quadruple(self):
        kinds = tuple(type(b).__name__ for b in default_stacking_bases())
        assert kinds == ("ForestConfig", "GBTConfig", "SVMConfig")
        assert type(StackingConfig().meta).__name__ == "LogRegConfig"
        assert StackingConfig().k_folds == 5

    def test_bagging_default_estimators(self):
        assert BaggingConfig().n_estimators == 10


class TestVoting:
    def test_three_members_fitted(self, toy_binary):
        X, y = toy_binary
        model = voting_fit(X, y, VotingConfig(members=SMALL))
        assert len(model.members) == 3

    def test_single_member_reduction(self, toy_binary):
        X, y = toy_binary
        member_cfg = LogRegConfig(epochs=40)
        solo = voting_fit(X, y, VotingConfig(members=(member_cfg,)))
        member = logreg_fit(X, y, member_cfg)
        assert np.allclose(solo.vote_soft(X), member.predict_proba(X), atol=1e-12)
        assert np.array_equal(solo.vote_hard(X), member.predict(X))

    def test_soft_identical_members_equal_member(self):
        dist = np.array([0.1, 0.2, 0.05, 0.3, 0.15, 0.1, 0.1])
        members = [_FixedModel(dist) for _ in range(3)]
        model = VotingModel(members, "soft", np.ones(3), 4, 7)
        X = sp.csr_matrix((2, 4))
        assert np.allclose(model.vote_soft(X), dist, atol=1e-12)

    def test_soft_mean_of_one_hots(self):
        members = [_FixedModel(_one_hot_dist(0)), _FixedModel(_one_hot_dist(1))]
        model = VotingModel(members, "soft", np.ones(2), 4, 7)
        x = sp.csr_matrix((1, 4))
        expected = np.zeros(7)
        expected[0] = expected[1] = 0.5
        assert np.allclose(vote_soft(model, x), expected, atol=1e-12)

    def test_soft_weighted(self):
        members = [_FixedModel(_one_hot_dist(0)), _FixedModel(_one_hot_dist(1))]
        model = VotingModel(members, "soft", np.array([2.0, 1.0]), 4, 7)
        x = sp.csr_matrix((1, 4))
        got = vote_soft(model, x)
        assert got[0] == pytest.approx(2 / 3, abs=1e-12)
        assert got[1] == pytest.approx(1 / 3, abs=1e-12)

    def test_soft_argmax_invariant_to_weight_scaling(self):
        members = [_FixedModel(_one_hot_dist(2)), _FixedModel(_one_hot_dist(5))]
        x = sp.csr_matrix((1, 4))
        a = VotingModel(members, "soft", np.array([3.0, 1.0]), 4, 7)
        b = VotingModel(members, "soft", np.array([300.0, 100.0]), 4, 7)
        assert np.argmax(vote_soft(a, x)) == np.argmax(vote_soft(b, x))

    def test_hard_majority(self):
        members = [
            _FixedModel(_one_hot_dist(3)),
            _FixedModel(_one_hot_dist(3)),
            _FixedModel(_one_hot_dist(0)),
        ]
        model = VotingModel(members, "hard", np.ones(3), 4, 7)
        assert vote_hard(model, sp.csr_matrix((1, 4))) == 3

    def test_hard_tie_broken_by_summed_probability(self):
        # joy (3) and anger (0) tie 1-1; joy's vote is more confident
        members = [
            _FixedModel(np.array([0.0, 0.0, 0.0, 0.9, 0.1, 0.0, 0.0])),
            _FixedModel(np.array([0.6, 0.0, 0.0, 0.1, 0.3, 0.0, 0.0])),
        ]
        model = VotingModel(members, "hard", np.ones(2), 4, 7)
        assert vote_hard(model, sp.csr_matrix((1, 4))) == 3

    def test_hard_all_agree(self):
        members = [_FixedModel(_one_hot_dist(6)) for _ in range(3)]
        model = VotingModel(members, "hard", np.ones(3), 4, 7)
        assert vote_hard(model, sp.csr_matrix((1, 4))) == 6

    def test_hard_permutation_invariant(self):
        dists = [
            np.array([0.5, 0.2, 0.0, 0.3, 0.0, 0.0, 0.0]),
            np.array([0.1, 0.1, 0.0, 0.7, 0.1, 0.0, 0.0]),
            np.array([0.3, 0.3, 0.0, 0.4, 0.0, 0.0, 0.0]),
        ]
        x = sp.csr_matrix((1, 4))
        results = set()
        import itertools

        for perm in itertools.permutations(dists):
            model = VotingModel([_FixedModel(d) for d in perm], "hard", np.ones(3), 4, 7)
            results.add(vote_hard(model, x))
        assert len(results) == 1


class TestBagging:
    def test_default_is_ten_estimators(self, toy_binary):
        X, y = toy_binary
        model = bagging_fit(X, y, BaggingConfig(base=LogRegConfig(epochs=5)))
        assert len(model.members) == 10

    def test_identity_sample_reduction(self, toy_binary):
        X, y = toy_binary
        cfg = LogRegConfig(epochs=40)
        bagged = bagging_fit(X, y, BaggingConfig(base=cfg, n_estimators=1, bootstrap=False))
        base = logreg_fit(X, y, cfg)
        assert np.allclose(bagged.predict_proba(X), base.predict_proba(X), atol=1e-12)

    def test_fixed_seed_identical_members(self, toy_binary):
        X, y = toy_binary
        cfg = BaggingConfig(base=LogRegConfig(epochs=20), n_estimators=3, seed=9)
        m1 = bagging_fit(X, y, cfg)
        m2 = bagging_fit(X, y, cfg)
        for a, b in zip(m1.members, m2.members):
            assert np.array_equal(a.W, b.W)

    def test_mean_of_member_dists(self):
        from ekmanlab.ensembles import BaggingModel

        members = [_FixedModel(_one_hot_dist(0)), _FixedModel(_one_hot_dist(1))]
        model = BaggingModel(members, "fixed", 4, 7)
        got = bagging_predict_proba(model, sp.csr_matrix((1, 4)))
        assert got[0] == pytest.approx(0.5) and got[1] == pytest.approx(0.5)
        assert got.sum() == pytest.approx(1.0, abs=1e-12)


class TestStackingFolds:
    def test_stratified_when_possible(self):
        y = np.array([0] * 10 + [1] * 10 + [2] * 10)
        fold_id, stratified = stratified_kfold(y, 5, seed=0)
        assert stratified
        for f in range(5):
            for c in range(3):
                assert ((fold_id == f) & (y == c)).sum() == 2

    def test_fallback_when_class_too_small(self):
        y = np.array([0] * 12 + [1] * 2)
        fold_id, stratified = stratified_kfold(y, 5, seed=0)
        assert not stratified
        assert np.bincount(fold_id, minlength=5).min() >= 2


class TestStacking:
    def test_meta_dimension(self, toy_multiclass):
        X, y = toy_multiclass
        cfg = StackingConfig(bases=SMALL, meta=LogRegConfig(epochs=60), k_folds=3, seed=0)
        model = stacking_fit(X, y, cfg)
        assert model.meta_dim == 3 * 7
        assert model.fit_report["meta_dim"] == 21

    def test_oof_rows_never_seen_by_their_base(self, toy_multiclass):
        """Bases disagree between folds when fitted on disjoint data; rows in
        fold f must carry the fold-f-complement model's output."""
        X, y = toy_multiclass
        cfg = StackingConfig(bases=(LogRegConfig(epochs=30),), meta=LogRegConfig(epochs=30),
                             k_folds=3, seed=1)
        meta, stratified = stacking_oof_features(X, y, cfg, 7)
        assert meta.shape == (X.shape[0], 7)
        fold_id, _ = stratified_kfold(y, 3, seed=1)
        for f in range(3):
            holdout = fold_id == f
            refit = logreg_fit(X[~holdout], y[~holdout], LogRegConfig(epochs=30), n_classes=7)
            assert np.allclose(meta[holdout], refit.predict_proba(X[holdout]), atol=1e-12)

    def test_oof_blocks_are_prob_dists(self, toy_multiclass):
        X, y = toy_multiclass
        cfg = StackingConfig(bases=SMALL, meta=LogRegConfig(epochs=30), k_folds=3, seed=2)
        meta, _ = stacking_oof_features(X, y, cfg, 7)
        assert meta.shape == (X.shape[0], 21)
        for b in range(3):
            block = meta[:, b * 7 : (b + 1) * 7]
            assert np.allclose(block.sum(axis=1), 1.0, atol=1e-6)

    def test_functional_determinism_of_prediction(self, toy_multiclass):
        X, y = toy_multiclass
        cfg = StackingConfig(bases=SMALL, meta=LogRegConfig(epochs=30), k_folds=3, seed=3)
        model = stacking_fit(X, y, cfg)
        p1 = model.predict_proba(X[:5])
        p2 = model.predict_proba(X[:5])
        assert np.array_equal(p1, p2)

    def test_synthetic_benchmark_close_to_best_base(self):
        """500-point seeded task: stacking test accuracy within 0.05 of the
        best single base."""
        rng = np.random.default_rng(500)
        n, d = 500, 12
        X = np.abs(rng.normal(0, 1, (n, d)))
        X[rng.random((n, d)) < 0.4] = 0.0
        w = rng.normal(0, 1, (3, d))
        y = np.argmax(X @ w.T + rng.normal(0, 0.4, (n, 3)), axis=1)
        Xs = sp.csr_matrix(X)
        train, test = slice(0, 350), slice(350, 500)
        bases = (
            ForestConfig(n_trees=20, max_depth=8, seed=1),
            GBTConfig(n_rounds=20, max_depth=3, seed=1),
            SVMConfig(epochs=10),
        )
        base_accs = []
        for cfg in bases:
            m = cfg.fit(Xs[train], y[train], 3)
            base_accs.append((m.predict(Xs[test]) == y[test]).mean())
        stack = stacking_fit(
            Xs[train], y[train],
            StackingConfig(bases=bases, meta=LogRegConfig(epochs=200), k_folds=5, seed=1),
            n_classes=3,
        )
        stack_acc = (stack.predict(Xs[test]) == y[test]).mean()
        assert stack_acc >= max(base_accs) - 0.05
