"""Binary review classifiers (Bernoulli NB, logistic regression, linear SVM)
and their one-vs-rest composition into an 8-way predictor."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from revclass.corpus import Category, N_CATEGORIES
from revclass.feature_select import CHI2, METHODS, rank_features
from revclass.preprocess import VectorizedCorpus

NB = "nb"
LR = "lr"
SVM = "svm"
CLASSIFIERS = (NB, LR, SVM)

# Per-class feature budgets in category index order: 1000 where accuracy
# saturates early (plot, actor/actress, analysis, thumb-up-or-down), 4000
# for the remaining four.
DEFAULT_BUDGETS = (1000, 1000, 4000, 4000, 1000, 4000, 1000, 4000)


def _sigmoid(z: np.ndarray | float) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    flat = np.atleast_1d(z)
    out = np.empty_like(flat)
    pos = flat >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-flat[pos]))
    ez = np.exp(flat[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out.reshape(z.shape)


def hinge(z: float) -> float:
    """Soft-margin penalty h(z) = max(0, 1 - z)."""
    return max(0.0, 1.0 - z)


# ---------------------------------------------------------------------------
# Naive Bayes (Bernoulli event model)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NbModel:
    """Smoothed Bernoulli Naive Bayes parameters for one binary task."""

    log_prior_pos: float
    log_prior_neg: float
    cond_pos: np.ndarray  # p(x_j = 1 | positive)
    cond_neg: np.ndarray  # p(x_j = 1 | negative)
    smoothing: float
    # Log-odds decomposes into an all-absent baseline plus per-present-term
    # deltas, which makes sparse scoring O(tokens).
    _base: float = field(init=False, repr=False, compare=False, default=0.0)
    _delta: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        absent = np.log1p(-self.cond_pos) - np.log1p(-self.cond_neg)
        present = np.log(self.cond_pos) - np.log(self.cond_neg)
        object.__setattr__(self, "_base", float(absent.sum()) + self.log_prior_pos - self.log_prior_neg)
        object.__setattr__(self, "_delta", present - absent)

    @property
    def n_features(self) -> int:
        return len(self.cond_pos)

    def log_odds_active(self, active: Sequence[int]) -> float:
        if len(active) == 0:
            return self._base
        return self._base + float(self._delta[np.asarray(active, dtype=np.intp)].sum())


def train_nb(X: np.ndarray, y: np.ndarray, l: float = 1.0) -> NbModel:
    """Fit smoothed Bernoulli NB from binary vectors X and labels y in {-1, +1}.

    Conditional estimates follow (count(x_j=1, side) + l) / (count(side) + 2l);
    priors are empirical label frequencies.
    """
    if l <= 0:
        raise ValueError("smoothing l must be > 0")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    pos = y > 0
    n_pos = int(pos.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("training set must contain both labels")
    cond_pos = (X[pos].sum(axis=0) + l) / (n_pos + 2 * l)
    cond_neg = (X[~pos].sum(axis=0) + l) / (n_neg + 2 * l)
    n = n_pos + n_neg
    return NbModel(
        log_prior_pos=math.log(n_pos / n),
        log_prior_neg=math.log(n_neg / n),
        cond_pos=cond_pos,
        cond_neg=cond_neg,
        smoothing=l,
    )


def nb_log_odds(m: NbModel, x: np.ndarray) -> float:
    """Full Bernoulli log-odds of the positive side for one binary vector.

    Both present terms (p(x=1|.)) and absent terms (p(x=0|.)) contribute;
    predict positive iff the result is >= 0.
    """
    x = np.asarray(x)
    if x.shape != (m.n_features,):
        raise ValueError(f"expected {m.n_features} features, got shape {x.shape}")
    return m.log_odds_active(np.flatnonzero(x))


# ---------------------------------------------------------------------------
# Logistic regression (MAP with Gaussian prior, full-batch gradient ascent)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LrModel:
    """Logistic-regression weights plus the training trajectory."""

    weights: np.ndarray
    bias: float
    eta: float
    lam: float
    epochs: int
    history: tuple[float, ...] = ()  # penalized log-likelihood per step, index 0 = init

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def decision_value(self, x: np.ndarray) -> float:
        return float(self.weights @ x + self.bias)


def _lr_objective(w: np.ndarray, w0: float, X: np.ndarray, y: np.ndarray, lam: float) -> float:
    # Overflow here just means the iterate diverged; the caller turns the
    # resulting non-finite value into an abort.
    with np.errstate(over="ignore", invalid="ignore"):
        z = X @ w + w0
        # sum of log sigma(s) with s = +z for y=1 and -z for y=0, computed stably
        s = np.where(y > 0, z, -z)
        loglik = -np.logaddexp(0.0, -s).sum()
        return float(loglik - 0.5 * lam * (w @ w))


def lr_gradient(
    w: np.ndarray, w0: float, X: np.ndarray, y: np.ndarray, lam: float
) -> tuple[np.ndarray, float]:
    """Gradient of the penalized log-likelihood: (d/dw, d/dw0)."""
    with np.errstate(over="ignore", invalid="ignore"):
        residual = y - _sigmoid(X @ w + w0)
        return X.T @ residual - lam * w, float(residual.sum())


def train_lr(
    X: np.ndarray,
    y: np.ndarray,
    eta: float = 0.1,
    lam: float = 0.1,
    epochs: int = 200,
) -> LrModel:
    """Full-batch gradient ascent on the penalized log-likelihood.

    Objective: sum_k [y log sigma(z) + (1-y) log(1-sigma(z))] - lam/2 ||w||^2
    with z = w.x + w0 and the bias unpenalized.  y takes values in {0, 1};
    weights start at zero, so training is deterministic.  Aborts when the
    objective turns non-finite (learning rate too large).
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    w = np.zeros(d)
    w0 = 0.0
    history = [_lr_objective(w, w0, X, y, lam)]
    for step in range(epochs):
        grad_w, grad_w0 = lr_gradient(w, w0, X, y, lam)
        w = w + eta * grad_w
        w0 = w0 + eta * grad_w0
        objective = _lr_objective(w, w0, X, y, lam)
        if not math.isfinite(objective):
            raise ArithmeticError(
                f"non-finite objective at step {step + 1} (eta={eta} too large for this data)"
            )
        history.append(objective)
    return LrModel(weights=w, bias=w0, eta=eta, lam=lam, epochs=epochs, history=tuple(history))


def lr_prob(m: LrModel, x: np.ndarray) -> float:
    """sigma(w.x + w0), clamped inside (0, 1); predict positive iff >= 0.5."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m.n_features,):
        raise ValueError(f"expected {m.n_features} features, got shape {x.shape}")
    p = float(_sigmoid(m.decision_value(x)))
    return min(max(p, 1e-15), 1.0 - 1e-15)


# ---------------------------------------------------------------------------
# Linear SVM (seeded stochastic subgradient descent on the primal)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SvmModel:
    """Soft-margin linear SVM weights (averaged SGD iterate)."""

    weights: np.ndarray
    bias: float
    C: float
    epochs: int
    seed: int

    @property
    def n_features(self) -> int:
        return len(self.weights)


def svm_objective(w: np.ndarray, w0: float, X: np.ndarray, y: np.ndarray, C: float) -> float:
    """Primal objective 1/2 ||w||^2 + C * sum hinge(y * (w.x + w0))."""
    margins = y * (X @ w + w0)
    return float(0.5 * (w @ w) + C * np.maximum(0.0, 1.0 - margins).sum())


def train_svm(
    X: np.ndarray,
    y: np.ndarray,
    C: float = 1.0,
    epochs: int = 50,
    seed: int = 42,
) -> SvmModel:
    """Minimize the primal soft-margin objective by seeded stochastic
    subgradient descent, returning the averaged iterate.

    Steps follow eta_t = 1 / (lambda_eff * t) with lambda_eff = 1 / (C * N),
    under which the per-sample stochastic objective is the primal scaled by
    a positive constant.  The bias rides along as an augmented coordinate
    (sharing the contraction), which keeps the iteration strongly convex.
    Runs epochs * N steps.
    """
    if C <= 0:
        raise ValueError("C must be > 0")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("training set must contain both labels")
    lam = 1.0 / (C * n)
    rng = np.random.default_rng(seed)
    w = np.zeros(d)
    w0 = 0.0
    steps = epochs * n
    # Suffix averaging: the early iterates under the 1/(lam*t) schedule are
    # far from the optimum, so only the second half enters the average.
    start = steps // 2
    w_avg = np.zeros(d)
    w0_avg = 0.0
    averaged = 0
    for t in range(1, steps + 1):
        i = int(rng.integers(0, n))
        eta = 1.0 / (lam * t)
        margin = y[i] * (w @ X[i] + w0)
        shrink = 1.0 - 1.0 / t  # = (1 - eta * lam)
        w *= shrink
        w0 *= shrink
        if margin < 1.0:
            w += eta * y[i] * X[i]
            w0 += eta * y[i]
        if t > start:
            averaged += 1
            w_avg += (w - w_avg) / averaged
            w0_avg += (w0 - w0_avg) / averaged
    return SvmModel(weights=w_avg, bias=w0_avg, C=C, epochs=epochs, seed=seed)


def svm_decision(m: SvmModel, x: np.ndarray) -> float:
    """Decision value w.x + w0; positive class iff >= 0."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m.n_features,):
        raise ValueError(f"expected {m.n_features} features, got shape {x.shape}")
    return float(m.weights @ x + m.bias)


# ---------------------------------------------------------------------------
# One-vs-rest composition
# ---------------------------------------------------------------------------

STUB_NO_POSITIVES = "no_positives"
STUB_NO_NEGATIVES = "no_negatives"


@dataclass(frozen=True)
class Hyperparams:
    """Training knobs shared by all eight members; every field overridable."""

    l: float = 1.0  # NB smoothing
    eta: float = 0.1  # LR learning rate
    lam: float = 0.1  # LR Gaussian-prior precision
    lr_epochs: int = 200
    C: float = 1.0  # SVM cost
    svm_epochs: int = 50  # SVM runs svm_epochs * N steps


@dataclass(frozen=True)
class BinaryMember:
    """One one-vs-rest member: its class, selected vocabulary, and model.

    Degenerate training data (a class with no positives, or one covering
    the whole corpus) yields a flagged constant-decision stub.
    """

    category: Category
    method: str
    terms: tuple[str, ...]
    model: Optional[NbModel | LrModel | SvmModel]
    stub: Optional[str] = None
    _positions: dict[str, int] = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_positions", {t: j for j, t in enumerate(self.terms)})

    def _active(self, tokens: Iterable[str]) -> list[int]:
        pos = self._positions
        return sorted({pos[t] for t in tokens if t in pos})

    def score(self, tokens: Iterable[str]) -> float:
        """Cross-member comparable score: NB log-odds, LR sigma - 0.5, SVM margin."""
        if self.stub == STUB_NO_POSITIVES:
            return float("-inf")
        if self.stub == STUB_NO_NEGATIVES:
            return float("inf")
        active = self._active(tokens)
        if self.method == NB:
            return self.model.log_odds_active(active)
        z = float(self.model.weights[active].sum() + self.model.bias) if active else self.model.bias
        if self.method == LR:
            return float(_sigmoid(z)) - 0.5
        return z

    def decide(self, tokens: Iterable[str]) -> bool:
        """Positive decision for this member's class (ties resolve positive)."""
        return self.score(tokens) >= 0.0


@dataclass(frozen=True)
class OvrModel:
    """Eight binary members, exactly one per category."""

    members: tuple[BinaryMember, ...]
    method: str
    selector: str
    budgets: tuple[int, ...]
    seed: int

    def __post_init__(self):
        cats = sorted(int(m.category) for m in self.members)
        if cats != list(range(N_CATEGORIES)):
            raise ValueError(f"expected one member per category, got categories {cats}")

    def member_for(self, category: Category | int) -> BinaryMember:
        cat = int(category)
        for member in self.members:
            if int(member.category) == cat:
                return member
        raise KeyError(cat)


def train_ovr(
    corpus: VectorizedCorpus,
    method: str = SVM,
    per_class_feature_sizes: Sequence[int] | None = None,
    selector: str = CHI2,
    hyperparams: Hyperparams | None = None,
    seed: int = 42,
) -> OvrModel:
    """Train the eight one-vs-rest members, each on its own selected features.

    Relevance for member c is (label == c); feature selection runs per class
    at that class's budget (clamped to the vocabulary size).  A degenerate
    class trains a flagged constant stub instead of a model.
    """
    if method not in CLASSIFIERS:
        raise ValueError(f"unknown method {method!r}; expected one of {CLASSIFIERS}")
    if selector not in METHODS:
        raise ValueError(f"unknown selector {selector!r}; expected one of {METHODS}")
    budgets = tuple(per_class_feature_sizes) if per_class_feature_sizes else DEFAULT_BUDGETS
    if len(budgets) != N_CATEGORIES:
        raise ValueError(f"need {N_CATEGORIES} per-class feature sizes, got {len(budgets)}")
    hp = hyperparams or Hyperparams()
    labels = np.asarray(corpus.labels)
    V = len(corpus.vocab)

    members = []
    for cat in Category:
        rel = labels == int(cat)
        n_pos = int(rel.sum())
        if n_pos == 0:
            members.append(BinaryMember(cat, method, (), None, stub=STUB_NO_POSITIVES))
            continue
        if n_pos == len(labels):
            members.append(BinaryMember(cat, method, (), None, stub=STUB_NO_NEGATIVES))
            continue
        k = min(budgets[int(cat)], V)
        ranking = rank_features(corpus, cat, method=selector, k=k)
        terms = ranking.terms()
        positions = [corpus.vocab.index[t] for t in terms]
        X = corpus.dense_matrix(positions)
        if method == NB:
            model = train_nb(X, np.where(rel, 1, -1), l=hp.l)
        elif method == LR:
            model = train_lr(X, rel.astype(np.float64), eta=hp.eta, lam=hp.lam, epochs=hp.lr_epochs)
        else:
            model = train_svm(X, np.where(rel, 1.0, -1.0), C=hp.C, epochs=hp.svm_epochs, seed=seed + int(cat))
        members.append(BinaryMember(cat, method, terms, model))
    return OvrModel(members=tuple(members), method=method, selector=selector, budgets=budgets, seed=seed)


def predict(m: OvrModel, tokens: Iterable[str]) -> Category:
    """Single-label assignment: every member scores the review on its own
    vocabulary projection; highest score wins, ties go to the lowest
    category index (invariant under member order)."""
    token_set = set(tokens)
    best_cat: Optional[Category] = None
    best_score = float("-inf")
    for member in m.members:
        score = member.score(token_set)
        if best_cat is None or score > best_score or (score == best_score and member.category < best_cat):
            best_cat = member.category
            best_score = score
    return best_cat


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _member_parameters(member: BinaryMember) -> dict:
    if member.stub:
        return {"stub": member.stub}
    model = member.model
    if member.method == NB:
        return {
            "log_prior_pos": model.log_prior_pos,
            "log_prior_neg": model.log_prior_neg,
            "cond_pos": [float(v) for v in model.cond_pos],
            "cond_neg": [float(v) for v in model.cond_neg],
            "smoothing": model.smoothing,
        }
    return {"weights": [float(v) for v in model.weights], "bias": float(model.bias)}


def _member_hyperparameters(member: BinaryMember) -> dict:
    if member.stub:
        return {}
    model = member.model
    if member.method == NB:
        return {"l": model.smoothing}
    if member.method == LR:
        return {"eta": model.eta, "lam": model.lam, "epochs": model.epochs}
    return {"C": model.C, "epochs": model.epochs, "seed": model.seed}


def _dump_json_atomic(path: str, doc: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def save_ovr(m: OvrModel, out_dir) -> list[str]:
    """Write one JSON file per member plus a manifest; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for member in m.members:
        doc = {
            "method": member.method,
            "category": int(member.category),
            "category_name": member.category.display_name,
            "vocabulary": list(member.terms),
            "parameters": _member_parameters(member),
            "hyperparameters": _member_hyperparameters(member),
            "seed": m.seed,
        }
        path = os.path.join(out_dir, f"member_{int(member.category)}.json")
        _dump_json_atomic(path, doc)
        paths.append(path)
    manifest = {
        "members": [os.path.basename(p) for p in paths],
        "method": m.method,
        "selector": m.selector,
        "budgets": list(m.budgets),
        "seed": m.seed,
    }
    manifest_path = os.path.join(out_dir, "model_manifest.json")
    _dump_json_atomic(manifest_path, manifest)
    paths.append(manifest_path)
    return paths


def load_ovr(model_dir) -> OvrModel:
    """Reload an OvrModel written by :func:`save_ovr`."""
    with open(os.path.join(model_dir, "model_manifest.json"), encoding="utf-8") as fh:
        manifest = json.load(fh)
    members = []
    for name in manifest["members"]:
        with open(os.path.join(model_dir, name), encoding="utf-8") as fh:
            doc = json.load(fh)
        cat = Category(doc["category"])
        method = doc["method"]
        params = doc["parameters"]
        terms = tuple(doc["vocabulary"])
        if "stub" in params:
            members.append(BinaryMember(cat, method, terms, None, stub=params["stub"]))
            continue
        hp = doc["hyperparameters"]
        if method == NB:
            model = NbModel(
                log_prior_pos=params["log_prior_pos"],
                log_prior_neg=params["log_prior_neg"],
                cond_pos=np.asarray(params["cond_pos"]),
                cond_neg=np.asarray(params["cond_neg"]),
                smoothing=params["smoothing"],
            )
        elif method == LR:
            model = LrModel(
                weights=np.asarray(params["weights"]),
                bias=params["bias"],
                eta=hp["eta"],
                lam=hp["lam"],
                epochs=hp["epochs"],
            )
        else:
            model = SvmModel(
                weights=np.asarray(params["weights"]),
                bias=params["bias"],
                C=hp["C"],
                epochs=hp["epochs"],
                seed=hp["seed"],
            )
        members.append(BinaryMember(cat, method, terms, model))
    return OvrModel(
        members=tuple(members),
        method=manifest["method"],
        selector=manifest["selector"],
        budgets=tuple(manifest["budgets"]),
        seed=manifest["seed"],
    )
