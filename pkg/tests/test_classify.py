import math

import numpy as np
import pytest

from revclass.classify import (
    DEFAULT_BUDGETS,
    BinaryMember,
    Hyperparams,
    OvrModel,
    STUB_NO_NEGATIVES,
    STUB_NO_POSITIVES,
    hinge,
    load_ovr,
    lr_gradient,
    lr_prob,
    nb_log_odds,
    predict,
    save_ovr,
    svm_decision,
    svm_objective,
    train_lr,
    train_nb,
    train_ovr,
    train_svm,
)
from revclass.corpus import Category
from revclass.preprocess import VectorizedCorpus, Vocabulary


# ---------------------------------------------------------------------------
# Naive Bayes
# ---------------------------------------------------------------------------

NB_X = np.array([[1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
NB_Y = np.array([1, 1, -1, -1])


def _enumerate_log_odds(model, x):
    """Independent Bayes-rule computation from the fitted parameters."""
    log_pos = model.log_prior_pos
    log_neg = model.log_prior_neg
    for j, bit in enumerate(x):
        p_pos = model.cond_pos[j] if bit else 1.0 - model.cond_pos[j]
        p_neg = model.cond_neg[j] if bit else 1.0 - model.cond_neg[j]
        log_pos += math.log(p_pos)
        log_neg += math.log(p_neg)
    return log_pos - log_neg


class TestTrainNb:
    def test_hand_counted_conditionals(self):
        model = train_nb(NB_X, NB_Y, l=1.0)
        assert model.cond_pos[0] == pytest.approx(0.75)
        assert model.cond_neg[0] == pytest.approx(0.25)
        assert model.cond_pos[1] == pytest.approx(0.5)
        assert model.cond_neg[1] == pytest.approx(0.5)

    def test_unseen_term_smoothing(self):
        X = np.array([[1, 0], [1, 0], [0, 0], [0, 0]], dtype=float)
        model = train_nb(X, NB_Y, l=1.0)
        # feature 1 never occurs: both sides get (0 + l) / (2 + 2l)
        assert model.cond_pos[1] == pytest.approx(0.25)
        assert model.cond_neg[1] == pytest.approx(0.25)
        # and the algebraic fixed point with no samples on a side is l/(2l)
        assert (0 + 1.0) / (0 + 2 * 1.0) == 0.5

    def test_balanced_labels_zero_log_prior(self):
        model = train_nb(NB_X, NB_Y, l=1.0)
        assert model.log_prior_pos == model.log_prior_neg

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="both labels"):
            train_nb(NB_X, np.ones(4), l=1.0)

    def test_smoothing_must_be_positive(self):
        with pytest.raises(ValueError):
            train_nb(NB_X, NB_Y, l=0.0)

    def test_conditionals_strictly_inside_unit_interval(self):
        rng = np.random.default_rng(0)
        X = (rng.random((20, 6)) < 0.4).astype(float)
        y = np.where(rng.random(20) < 0.5, 1, -1)
        y[0], y[1] = 1, -1
        model = train_nb(X, y, l=0.5)
        for arr in (model.cond_pos, model.cond_neg):
            assert np.all(arr > 0) and np.all(arr < 1)


class TestNbLogOdds:
    def test_hand_example_sign_positive(self):
        model = train_nb(NB_X, NB_Y, l=1.0)
        assert nb_log_odds(model, np.array([1, 0])) > 0

    def test_symmetric_model_is_exactly_zero(self):
        X = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=float)
        y = np.array([1, 1, -1, -1])
        model = train_nb(X, y, l=1.0)  # cond identical on both sides, priors equal
        assert np.array_equal(model.cond_pos, model.cond_neg)
        for bits in ([0, 0], [1, 0], [0, 1], [1, 1]):
            assert nb_log_odds(model, np.array(bits)) == 0.0

    def test_matches_enumeration_oracle_on_all_16_vectors(self):
        rng = np.random.default_rng(1)
        X = (rng.random((12, 4)) < 0.5).astype(float)
        y = np.where(rng.random(12) < 0.6, 1, -1)
        y[0], y[1] = 1, -1
        model = train_nb(X, y, l=1.0)
        for bits in range(16):
            x = np.array([(bits >> j) & 1 for j in range(4)])
            assert nb_log_odds(model, x) == pytest.approx(
                _enumerate_log_odds(model, x), abs=1e-12
            )

    def test_dimension_mismatch(self):
        model = train_nb(NB_X, NB_Y, l=1.0)
        with pytest.raises(ValueError, match="features"):
            nb_log_odds(model, np.array([1, 0, 1]))


# ---------------------------------------------------------------------------
# Logistic regression
# ---------------------------------------------------------------------------


def _oracle_lr_objective(w, w0, X, y, lam):
    z = X @ w + w0
    p = 1.0 / (1.0 + np.exp(-z))
    return float(np.sum(y * np.log(p) + (1 - y) * np.log(1 - p)) - 0.5 * lam * (w @ w))


class TestTrainLr:
    def test_first_step_matches_closed_form_at_origin(self):
        rng = np.random.default_rng(2)
        X = (rng.random((10, 3)) < 0.5).astype(float)
        y = (rng.random(10) < 0.5).astype(float)
        eta = 0.05
        model = train_lr(X, y, eta=eta, lam=0.0, epochs=1)
        expected_w = eta * (X.T @ (y - 0.5))
        expected_b = eta * float((y - 0.5).sum())
        assert np.allclose(model.weights, expected_w, atol=1e-12)
        assert model.bias == pytest.approx(expected_b, abs=1e-12)

    def test_linearly_separable_reaches_full_accuracy(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        model = train_lr(X, y, eta=0.5, lam=0.0, epochs=500)
        preds = [lr_prob(model, x) >= 0.5 for x in X]
        assert preds == [False, False, True, True]

    def test_gradient_matches_central_differences(self):
        h = 1e-5
        worst = 0.0
        for trial in range(20):
            rng = np.random.default_rng(100 + trial)
            X = rng.normal(size=(30, 5))
            y = (rng.random(30) < 0.5).astype(float)
            lam = 0.1
            w = rng.normal(scale=0.5, size=5)
            w0 = float(rng.normal())
            grad_w, grad_b = lr_gradient(w, w0, X, y, lam)
            for j in range(5):
                e = np.zeros(5)
                e[j] = h
                fd = (_oracle_lr_objective(w + e, w0, X, y, lam)
                      - _oracle_lr_objective(w - e, w0, X, y, lam)) / (2 * h)
                worst = max(worst, abs(grad_w[j] - fd) / max(abs(fd), 1.0))
            fd_b = (_oracle_lr_objective(w, w0 + h, X, y, lam)
                    - _oracle_lr_objective(w, w0 - h, X, y, lam)) / (2 * h)
            worst = max(worst, abs(grad_b - fd_b) / max(abs(fd_b), 1.0))
        assert worst <= 1e-5

    def test_objective_monotone_at_small_eta(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(30, 5))
        y = (rng.random(30) < 0.5).astype(float)
        model = train_lr(X, y, eta=1e-3, lam=0.1, epochs=200)
        history = model.history
        assert len(history) == 201
        assert all(history[i + 1] >= history[i] for i in range(len(history) - 1))

    def test_diverging_eta_aborts_with_diagnostic(self):
        rng = np.random.default_rng(4)
        X = rng.normal(scale=50.0, size=(40, 5))
        y = (rng.random(40) < 0.5).astype(float)
        # eta * lam > 2 makes the penalty step expansive, so weights blow up
        with pytest.raises(ArithmeticError, match="eta"):
            train_lr(X, y, eta=1e6, lam=0.1, epochs=200)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        X = (rng.random((15, 4)) < 0.5).astype(float)
        y = (rng.random(15) < 0.5).astype(float)
        m1 = train_lr(X, y, eta=0.1, lam=0.1, epochs=50)
        m2 = train_lr(X, y, eta=0.1, lam=0.1, epochs=50)
        assert np.array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias


class TestLrProb:
    def test_zero_model_gives_half(self):
        model = train_lr(np.eye(2), np.array([1.0, 0.0]), epochs=1, eta=0.1)
        zeroed = type(model)(weights=np.zeros(2), bias=0.0, eta=0.1, lam=0.0, epochs=0)
        for x in (np.zeros(2), np.ones(2)):
            assert lr_prob(zeroed, x) == 0.5

    def test_saturation_is_clamped_open_interval(self):
        model = type(train_lr(np.eye(1), np.array([1.0]), epochs=1))(
            weights=np.zeros(1), bias=1e9, eta=0.1, lam=0.0, epochs=0
        )
        p = lr_prob(model, np.array([0.0]))
        assert 0.0 < p < 1.0
        model_neg = type(model)(weights=np.zeros(1), bias=-1e9, eta=0.1, lam=0.0, epochs=0)
        assert 0.0 < lr_prob(model_neg, np.array([0.0])) < 1.0

    def test_unit_weight_scalar_value(self):
        model = type(train_lr(np.eye(1), np.array([1.0]), epochs=1))(
            weights=np.ones(1), bias=0.0, eta=0.1, lam=0.0, epochs=0
        )
        assert lr_prob(model, np.array([1.0])) == pytest.approx(0.731059, abs=1e-6)


# ---------------------------------------------------------------------------
# Linear SVM
# ---------------------------------------------------------------------------


class TestHinge:
    def test_values(self):
        assert hinge(2.0) == 0.0
        assert hinge(0.0) == 1.0
        assert hinge(-1.0) == 2.0

    def test_nonnegative(self):
        for z in np.linspace(-5, 5, 101):
            assert hinge(float(z)) >= 0.0


def _separable_set(rng, n=20, d=6, margin=0.5):
    w_star = rng.normal(size=d)
    w_star /= np.linalg.norm(w_star)
    X, y = [], []
    while len(X) < n:
        x = rng.normal(size=d)
        v = float(w_star @ x)
        if abs(v) >= margin:
            X.append(x)
            y.append(1.0 if v > 0 else -1.0)
    return np.array(X), np.array(y)


class TestTrainSvm:
    def test_two_point_fixture_recovers_hard_margin(self):
        X = np.array([[1.0], [-1.0]])
        y = np.array([1.0, -1.0])
        model = train_svm(X, y, C=100.0, epochs=20000, seed=42)
        assert 0.9 <= abs(model.weights[0]) <= 1.1
        assert svm_decision(model, X[0]) >= 0
        assert svm_decision(model, X[1]) < 0

    def test_zero_model_objective_closed_form(self):
        X = np.ones((7, 3))
        y = np.array([1.0, -1.0] * 3 + [1.0])
        C = 2.5
        assert svm_objective(np.zeros(3), 0.0, X, y, C) == pytest.approx(C * 7)

    def test_separable_set_reaches_zero_error(self):
        X, y = _separable_set(np.random.default_rng(6))
        model = train_svm(X, y, C=100.0, epochs=500, seed=0)
        decisions = X @ model.weights + model.bias
        assert np.all((decisions >= 0) == (y > 0))

    def test_objective_beats_zero_model(self):
        X, y = _separable_set(np.random.default_rng(7))
        model = train_svm(X, y, C=10.0, epochs=500, seed=1)
        assert svm_objective(model.weights, model.bias, X, y, 10.0) <= svm_objective(
            np.zeros(X.shape[1]), 0.0, X, y, 10.0
        )

    def test_deterministic_for_fixed_seed(self):
        X, y = _separable_set(np.random.default_rng(8))
        m1 = train_svm(X, y, C=1.0, epochs=100, seed=3)
        m2 = train_svm(X, y, C=1.0, epochs=100, seed=3)
        assert np.array_equal(m1.weights, m2.weights) and m1.bias == m2.bias
        m3 = train_svm(X, y, C=1.0, epochs=100, seed=4)
        assert not np.array_equal(m1.weights, m3.weights)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="both labels"):
            train_svm(np.ones((4, 2)), np.ones(4), C=1.0, epochs=10, seed=0)


class TestSvmDecision:
    def test_zero_model_ties_positive(self):
        X = np.array([[1.0], [-1.0]])
        model = train_svm(X, np.array([1.0, -1.0]), C=1.0, epochs=10, seed=0)
        zeroed = type(model)(weights=np.zeros(1), bias=0.0, C=1.0, epochs=0, seed=0)
        assert svm_decision(zeroed, np.array([5.0])) == 0.0  # >= 0 means positive

    def test_zero_input_returns_bias(self):
        model = type(train_svm(np.array([[1.0], [-1.0]]), np.array([1.0, -1.0]), epochs=5))(
            weights=np.array([2.0]), bias=-0.75, C=1.0, epochs=0, seed=0
        )
        assert svm_decision(model, np.zeros(1)) == -0.75

    def test_two_point_model_at_midpoint(self):
        X = np.array([[1.0], [-1.0]])
        model = train_svm(X, np.array([1.0, -1.0]), C=100.0, epochs=20000, seed=42)
        assert svm_decision(model, np.array([0.5])) == pytest.approx(0.5, abs=0.1)


# ---------------------------------------------------------------------------
# One-vs-rest
# ---------------------------------------------------------------------------


def _synthetic_vc(rng, docs_per_cat=12, vocab_words=6):
    """Small 8-category corpus with disjoint planted vocabularies."""
    terms = []
    for c in range(8):
        terms += [f"c{c}w{i}" for i in range(vocab_words)]
    terms += [f"bg{i}" for i in range(10)]
    docs, labels = [], []
    for c in range(8):
        for _ in range(docs_per_cat):
            doc = [f"c{c}w{int(rng.integers(0, vocab_words))}" for _ in range(4)]
            doc += [f"bg{int(rng.integers(0, 10))}" for _ in range(3)]
            docs.append(doc)
            labels.append(c)
    return VectorizedCorpus.from_tokens(docs, labels, Vocabulary(tuple(terms)))


class TestTrainOvr:
    def test_default_budgets_vector(self):
        assert DEFAULT_BUDGETS == (1000, 1000, 4000, 4000, 1000, 4000, 1000, 4000)

    def test_member_vocab_is_min_of_budget_and_vocab(self):
        vc = _synthetic_vc(np.random.default_rng(9))
        model = train_ovr(vc, method="nb", per_class_feature_sizes=(5, 5, 5, 5, 30, 30, 30, 30))
        V = len(vc.vocab)
        for member in model.members:
            budget = model.budgets[int(member.category)]
            assert len(member.terms) == min(budget, V)

    def test_single_category_corpus_stubs(self):
        docs = [["a", "b"], ["b"], ["a"]]
        vc = VectorizedCorpus.from_tokens(docs, [0, 0, 0], Vocabulary(("a", "b")))
        model = train_ovr(vc, method="nb")
        assert model.member_for(0).stub == STUB_NO_NEGATIVES
        for cat in range(1, 8):
            assert model.member_for(cat).stub == STUB_NO_POSITIVES

    def test_every_method_trains(self):
        vc = _synthetic_vc(np.random.default_rng(10))
        for method in ("nb", "lr", "svm"):
            model = train_ovr(vc, method=method, hyperparams=Hyperparams(lr_epochs=20, svm_epochs=5))
            assert all(m.stub is None for m in model.members)

    def test_deterministic(self):
        vc = _synthetic_vc(np.random.default_rng(11))
        m1 = train_ovr(vc, method="svm", hyperparams=Hyperparams(svm_epochs=5), seed=13)
        m2 = train_ovr(vc, method="svm", hyperparams=Hyperparams(svm_epochs=5), seed=13)
        for a, b in zip(m1.members, m2.members):
            assert a.terms == b.terms
            assert np.array_equal(a.model.weights, b.model.weights)
            assert a.model.bias == b.model.bias


class TestPredict:
    def test_single_positive_member_wins(self):
        vc = _synthetic_vc(np.random.default_rng(12))
        model = train_ovr(vc, method="nb")
        tokens = [f"c3w{i}" for i in range(4)]
        assert predict(model, tokens) is Category.DIALOGUE

    def test_all_stub_tie_breaks_to_category_zero(self):
        docs = [["a"], ["a"], ["a"]]
        vc = VectorizedCorpus.from_tokens(docs, [2, 2, 2], Vocabulary(("a",)))
        model = train_ovr(vc, method="nb")
        # member 2 always-positive wins; drop it to an always-negative copy to
        # force the all-equal tie
        members = tuple(
            BinaryMember(m.category, m.method, (), None, stub=STUB_NO_POSITIVES)
            for m in model.members
        )
        tied = OvrModel(members=members, method="nb", selector="chi2", budgets=model.budgets, seed=0)
        assert predict(tied, ["a"]) is Category.PLOT

    def test_equal_finite_scores_tie_break(self):
        X = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=float)
        y = np.array([1, 1, -1, -1])
        symmetric = train_nb(X, y, l=1.0)
        members = tuple(
            BinaryMember(Category(c), "nb", ("a", "b"), symmetric) for c in range(8)
        )
        model = OvrModel(members=members, method="nb", selector="chi2", budgets=(2,) * 8, seed=0)
        assert predict(model, ["a"]) is Category.PLOT

    def test_invariant_under_member_permutation(self):
        vc = _synthetic_vc(np.random.default_rng(13))
        model = train_ovr(vc, method="nb")
        rng = np.random.default_rng(14)
        order = list(range(8))
        rng.shuffle(order)
        shuffled = OvrModel(
            members=tuple(model.members[i] for i in order),
            method=model.method,
            selector=model.selector,
            budgets=model.budgets,
            seed=model.seed,
        )
        for c in range(8):
            tokens = [f"c{c}w0", f"c{c}w1", "bg0"]
            assert predict(model, tokens) == predict(shuffled, tokens)

    def test_planted_reviews_recovered(self):
        vc = _synthetic_vc(np.random.default_rng(15))
        model = train_ovr(vc, method="svm", hyperparams=Hyperparams(svm_epochs=20))
        hits = 0
        for c in range(8):
            tokens = [f"c{c}w{i}" for i in range(3)] + ["bg1"]
            hits += predict(model, tokens) == Category(c)
        assert hits >= 7


class TestSerialization:
    @pytest.mark.parametrize("method", ["nb", "lr", "svm"])
    def test_roundtrip_preserves_scores(self, method, tmp_path):
        vc = _synthetic_vc(np.random.default_rng(16))
        model = train_ovr(vc, method=method, hyperparams=Hyperparams(lr_epochs=20, svm_epochs=5))
        save_ovr(model, tmp_path / "model")
        loaded = load_ovr(tmp_path / "model")
        assert loaded.method == model.method
        assert loaded.budgets == model.budgets
        probe = ["c0w0", "c4w2", "bg3"]
        for a, b in zip(model.members, loaded.members):
            assert a.terms == b.terms
            assert a.score(set(probe)) == pytest.approx(b.score(set(probe)), rel=1e-12)

    def test_stub_roundtrip(self, tmp_path):
        docs = [["a"], ["a"]]
        vc = VectorizedCorpus.from_tokens(docs, [0, 0], Vocabulary(("a",)))
        model = train_ovr(vc, method="nb")
        save_ovr(model, tmp_path / "model")
        loaded = load_ovr(tmp_path / "model")
        assert loaded.member_for(0).stub == STUB_NO_NEGATIVES
        assert loaded.member_for(5).stub == STUB_NO_POSITIVES
