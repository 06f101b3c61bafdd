"""Desk-scale experiment harness: accuracy metrics, a seeded synthetic-corpus
generator with planted category vocabularies and rank-aligned name mentions,
the feature-size sweep, and the cross-series surrogate ablation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from revclass.classify import (
    CLASSIFIERS,
    DEFAULT_BUDGETS,
    LR,
    NB,
    STUB_NO_NEGATIVES,
    STUB_NO_POSITIVES,
    SVM,
    BinaryMember,
    Hyperparams,
    predict,
    train_lr,
    train_nb,
    train_ovr,
    train_svm,
)
from revclass.corpus import Category, Corpus, N_CATEGORIES, Review
from revclass.feature_select import CHI2, METHODS, rank_features
from revclass.preprocess import (
    KnowledgeBase,
    PersonEntry,
    Segmenter,
    SurrogateMap,
    TokenizedCorpus,
    VectorizedCorpus,
    Vocabulary,
    WhitespaceSegmenter,
    build_surrogate_map,
    preprocess_text,
)

Rotation = tuple[tuple[str, str], str]  # (train pair, held-out test series)

SURROGATE_ON = "on"
SURROGATE_OFF = "off"


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def accuracy(predictions: Sequence[int], gold: Sequence[int]) -> float:
    """Fraction of exact matches between two equal-length label lists."""
    if len(predictions) != len(gold):
        raise ValueError(f"length mismatch: {len(predictions)} vs {len(gold)}")
    if not predictions:
        raise ValueError("empty input")
    hits = sum(1 for p, g in zip(predictions, gold) if int(p) == int(g))
    return hits / len(predictions)


def binary_accuracy(member: BinaryMember, test: TokenizedCorpus, category: Category | int) -> float:
    """Accuracy of one member's positive/negative decisions against
    (label == category) on a labeled test corpus."""
    if len(test) == 0:
        raise ValueError("empty test set")
    cat = int(category)
    hits = 0
    for doc, label in zip(test.docs, test.labels):
        if member.decide(set(doc)) == (label == cat):
            hits += 1
    return hits / len(test)


# ---------------------------------------------------------------------------
# Synthetic corpus generator (the ground-truth oracle for acceptance runs)
# ---------------------------------------------------------------------------

# Which (kind, ranks) a category's name mentions draw from.  The first five
# categories each get a distinct signature, so with surrogate tags the rank
# pattern is a cross-series-stable signal; the last three have none.
_MENTION_SIGNATURES: dict[int, tuple[str, tuple[int, ...]]] = {
    0: ("role", (1, 2)),
    1: ("actor", (1, 2)),
    2: ("role", (3, 4)),
    3: ("actor", (3, 4)),
    4: ("role", (5, 6)),
}


def _default_planted() -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(f"cat{c}_w{i}" for i in range(12)) for c in range(N_CATEGORIES))


def _default_noise() -> tuple[str, ...]:
    return tuple(f"noise_{i}" for i in range(300))


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a seeded synthetic review corpus.

    Each review draws ``planted_fraction`` of its tokens from its category's
    planted vocabulary (pairwise disjoint across categories) and the rest
    from the shared noise vocabulary.  In categories with a positive mention
    rate, a review additionally mentions series-specific role/actor names
    whose ranks follow the category's signature, aligned across series so
    surrogate tags unify the signal.  Annotations are unanimous.
    """

    series: tuple[str, ...] = ("alpha", "beta", "gamma")
    reviews_per_series: int = 200
    tokens_per_review: int = 12
    planted_vocab: tuple[tuple[str, ...], ...] = field(default_factory=_default_planted)
    noise_vocab: tuple[str, ...] = field(default_factory=_default_noise)
    roles_per_series: int = 6
    actors_per_series: int = 6
    mention_rate: tuple[float, ...] = (0.9, 0.9, 0.9, 0.9, 0.9, 0.0, 0.0, 0.0)
    mentions_per_hit: int = 3
    planted_fraction: float = 0.2
    seed: int = 7

    def __post_init__(self):
        if len(self.planted_vocab) != N_CATEGORIES:
            raise ValueError(f"planted_vocab must have {N_CATEGORIES} groups")
        if len(self.mention_rate) != N_CATEGORIES:
            raise ValueError(f"mention_rate must have {N_CATEGORIES} entries")
        if any(not 0.0 <= r <= 1.0 for r in self.mention_rate):
            raise ValueError("mention rates must lie in [0, 1]")
        seen: set[str] = set()
        for group in self.planted_vocab:
            for word in group:
                if word in seen:
                    raise ValueError(f"planted vocabularies overlap on {word!r}")
                seen.add(word)
        if not 0.0 <= self.planted_fraction <= 1.0:
            raise ValueError("planted_fraction must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "series": list(self.series),
            "reviews_per_series": self.reviews_per_series,
            "tokens_per_review": self.tokens_per_review,
            "planted_vocab": [list(g) for g in self.planted_vocab],
            "noise_vocab": list(self.noise_vocab),
            "roles_per_series": self.roles_per_series,
            "actors_per_series": self.actors_per_series,
            "mention_rate": list(self.mention_rate),
            "mentions_per_hit": self.mentions_per_hit,
            "planted_fraction": self.planted_fraction,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SyntheticSpec":
        kwargs = dict(obj)
        if "series" in kwargs:
            kwargs["series"] = tuple(kwargs["series"])
        if "planted_vocab" in kwargs:
            kwargs["planted_vocab"] = tuple(tuple(g) for g in kwargs["planted_vocab"])
        if "noise_vocab" in kwargs:
            kwargs["noise_vocab"] = tuple(kwargs["noise_vocab"])
        if "mention_rate" in kwargs:
            kwargs["mention_rate"] = tuple(kwargs["mention_rate"])
        return cls(**kwargs)

    @classmethod
    def ablation_default(cls) -> "SyntheticSpec":
        """Spec tuned for the cross-series surrogate ablation: weak planted
        signal, heavy rank-patterned name mentions in the first five categories."""
        return cls()

    @classmethod
    def sweep_default(cls) -> "SyntheticSpec":
        """Spec for the feature-size sweep: 50 informative words in a large
        noise vocabulary, no name mentions."""
        counts = (6, 6, 6, 6, 6, 6, 7, 7)  # 50 informative words total
        return cls(
            planted_vocab=tuple(
                tuple(f"cat{c}_w{i}" for i in range(counts[c])) for c in range(N_CATEGORIES)
            ),
            noise_vocab=tuple(f"noise_{i}" for i in range(8000)),
            tokens_per_review=30,
            planted_fraction=0.5,
            mention_rate=(0.0,) * N_CATEGORIES,
            seed=11,
        )


def _series_kb(series: str, roles: int, actors: int) -> KnowledgeBase:
    return KnowledgeBase(
        series=series,
        roles=tuple(
            PersonEntry(canonical_name=f"{series}_hero{r}", kind="role", rank=r)
            for r in range(1, roles + 1)
        ),
        actors=tuple(
            PersonEntry(canonical_name=f"{series}_star{r}", kind="actor", rank=r)
            for r in range(1, actors + 1)
        ),
    )


def generate_synthetic(spec: SyntheticSpec) -> tuple[Corpus, dict[str, KnowledgeBase]]:
    """Deterministically generate a labeled corpus and per-series knowledge bases."""
    needed = [r for sig in _MENTION_SIGNATURES.values() for r in sig[1]]
    max_rank = max(needed)
    if any(spec.mention_rate[c] > 0 for c in _MENTION_SIGNATURES):
        if spec.roles_per_series < max_rank or spec.actors_per_series < max_rank:
            raise ValueError(f"need at least {max_rank} roles and actors per series for name mentions")
    rng = np.random.default_rng(spec.seed)
    kbs = {s: _series_kb(s, spec.roles_per_series, spec.actors_per_series) for s in spec.series}
    names = {
        s: {
            "role": {e.rank: e.canonical_name for e in kb.roles},
            "actor": {e.rank: e.canonical_name for e in kb.actors},
        }
        for s, kb in kbs.items()
    }

    reviews: list[Review] = []
    labels: list[Category] = []
    for series in spec.series:
        cats = [i % N_CATEGORIES for i in range(spec.reviews_per_series)]
        rng.shuffle(cats)
        for r_idx, cat in enumerate(cats):
            planted = spec.planted_vocab[cat]
            n_planted = max(1, round(spec.tokens_per_review * spec.planted_fraction))
            n_noise = max(0, spec.tokens_per_review - n_planted)
            tokens = [planted[j] for j in rng.integers(0, len(planted), n_planted)]
            tokens += [spec.noise_vocab[j] for j in rng.integers(0, len(spec.noise_vocab), n_noise)]
            rng.shuffle(tokens)
            if rng.random() < spec.mention_rate[cat]:
                for _ in range(spec.mentions_per_hit):
                    sig = _MENTION_SIGNATURES.get(cat)
                    if sig is None:
                        kind = ("role", "actor")[rng.integers(0, 2)]
                        limit = spec.roles_per_series if kind == "role" else spec.actors_per_series
                        rank = int(rng.integers(1, limit + 1))
                    else:
                        kind, ranks = sig
                        rank = int(ranks[rng.integers(0, len(ranks))])
                    tokens.insert(int(rng.integers(0, len(tokens) + 1)), names[series][kind][rank])
            reviews.append(
                Review(
                    id=f"{series}-{r_idx:04d}",
                    series=series,
                    text=" ".join(tokens),
                    annotations=(cat, cat),
                )
            )
            labels.append(Category(cat))
    return Corpus(reviews=tuple(reviews), labels=tuple(labels)), kbs


# ---------------------------------------------------------------------------
# Experiment configuration and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared knobs for the sweep and cross-series experiments."""

    methods: tuple[str, ...] = CLASSIFIERS
    selector: str = CHI2
    feature_sizes: tuple[int, ...] = (250, 500, 1000, 2000, 4000)
    rotation: Optional[Rotation] = None  # sweep split; derived for 3-series corpora
    rotations: Optional[tuple[Rotation, ...]] = None  # cross-series; derived when None
    surrogate_mode: str = SURROGATE_OFF  # sweep-only; cross-series always runs both
    sweep_method: str = SVM
    per_class_budgets: tuple[int, ...] = DEFAULT_BUDGETS
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    stopwords: frozenset[str] = frozenset()
    per_series_cap: Optional[int] = 5000  # first-N-in-file-order cap per series
    seed: int = 42

    def __post_init__(self):
        for m in self.methods:
            if m not in CLASSIFIERS:
                raise ValueError(f"unknown classifier method {m!r}")
        if self.selector not in METHODS:
            raise ValueError(f"unknown selector {self.selector!r}")
        if self.sweep_method not in CLASSIFIERS:
            raise ValueError(f"unknown sweep method {self.sweep_method!r}")
        sizes = self.feature_sizes
        if any(s < 1 for s in sizes) or list(sizes) != sorted(set(sizes)):
            raise ValueError("feature sizes must be positive and strictly ascending")
        if self.surrogate_mode not in (SURROGATE_ON, SURROGATE_OFF):
            raise ValueError("surrogate_mode must be 'on' or 'off'")
        explicit = ((self.rotation,) if self.rotation else ()) + (self.rotations or ())
        for rot in explicit:
            _check_rotation(rot)


def _check_rotation(rot: Rotation) -> None:
    (a, b), t = rot
    if len({a, b, t}) != 3:
        raise ValueError(f"rotation series must be disjoint: {rot}")


def rotation_label(rot: Rotation) -> str:
    (a, b), t = rot
    return f"{a}&{b}-{t}"


def derive_rotations(series: Sequence[str]) -> tuple[Rotation, ...]:
    """The three train-two/test-one rotations of a 3-series corpus."""
    names = sorted(series)
    if len(names) != 3:
        raise ValueError(
            f"rotations can only be derived for exactly 3 series, found {len(names)}; "
            "pass explicit rotations"
        )
    out = []
    for held_out in names:
        pair = tuple(s for s in names if s != held_out)
        out.append(((pair[0], pair[1]), held_out))
    return tuple(out)


@dataclass(frozen=True)
class SweepCell:
    actual_size: int
    train_acc: float
    test_acc: float


@dataclass
class ResultTable:
    """Keyed experiment cells; every accuracy lies in [0, 1].

    ``sweep`` is keyed by (category index, requested feature size);
    ``generalization`` by (category index, rotation label, surrogate mode);
    ``multiclass`` by (rotation label, surrogate mode).
    """

    sweep: dict[tuple[int, int], SweepCell] = field(default_factory=dict)
    generalization: dict[tuple[int, str, str], float] = field(default_factory=dict)
    multiclass: dict[tuple[str, str], float] = field(default_factory=dict)

    def validate(self) -> None:
        for cell in self.sweep.values():
            if not (0.0 <= cell.train_acc <= 1.0 and 0.0 <= cell.test_acc <= 1.0):
                raise ValueError("sweep accuracy outside [0, 1]")
        for value in (*self.generalization.values(), *self.multiclass.values()):
            if not 0.0 <= value <= 1.0:
                raise ValueError("accuracy outside [0, 1]")


def write_sweep_csv(table: ResultTable, path) -> None:
    lines = ["category,size,train_acc,test_acc"]
    for (cat, _requested), cell in sorted(table.sweep.items()):
        lines.append(f"{cat},{cell.actual_size},{cell.train_acc:.6f},{cell.test_acc:.6f}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_generalization_csv(table: ResultTable, path) -> None:
    lines = ["category,rotation,surrogate,accuracy"]
    for (cat, rotation, mode), value in sorted(table.generalization.items()):
        lines.append(f"{cat},{rotation},{mode},{value:.6f}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Pipeline plumbing shared by the experiments
# ---------------------------------------------------------------------------


def _apply_series_cap(corpus: Corpus, cap: Optional[int]) -> Corpus:
    if cap is None:
        return corpus
    taken: dict[str, int] = {}
    keep = []
    for i, review in enumerate(corpus.reviews):
        count = taken.get(review.series, 0)
        if count < cap:
            taken[review.series] = count + 1
            keep.append(i)
    if len(keep) == len(corpus.reviews):
        return corpus
    return Corpus(
        reviews=tuple(corpus.reviews[i] for i in keep),
        labels=tuple(corpus.labels[i] for i in keep),
    )


def tokenize_corpus(
    corpus: Corpus,
    seg: Optional[Segmenter] = None,
    stoplist: Sequence[str] | frozenset[str] = frozenset(),
    kbs: Optional[dict[str, KnowledgeBase]] = None,
    surrogate_mode: str = SURROGATE_OFF,
) -> TokenizedCorpus:
    """Run the text pipeline over a labeled corpus.

    With surrogates on, each review is substituted with its own series' map;
    a missing knowledge base is an error.
    """
    seg = seg or WhitespaceSegmenter()
    maps: dict[str, SurrogateMap] = {}
    if surrogate_mode == SURROGATE_ON:
        if kbs is None:
            raise ValueError("surrogate mode 'on' requires knowledge bases")
        missing = [s for s in corpus.series_index if s not in kbs]
        if missing:
            raise ValueError(f"missing knowledge base for series: {sorted(missing)}")
        maps = {s: build_surrogate_map(kbs[s]) for s in corpus.series_index}
    docs = []
    for review in corpus.reviews:
        surrogates = maps.get(review.series) if surrogate_mode == SURROGATE_ON else None
        docs.append(tuple(preprocess_text(review.text, seg, stoplist, surrogates)))
    return TokenizedCorpus(
        ids=tuple(r.id for r in corpus.reviews),
        series=tuple(r.series for r in corpus.reviews),
        docs=tuple(docs),
        labels=tuple(None if lab is None else int(lab) for lab in corpus.labels),
    )


def _require_labels(tokenized: TokenizedCorpus) -> None:
    if any(lab is None for lab in tokenized.labels):
        raise ValueError("experiment corpora must be fully labeled (run the agreement filter)")


def _split_tokenized(
    tokenized: TokenizedCorpus, rot: Rotation
) -> tuple[TokenizedCorpus, TokenizedCorpus]:
    (a, b), t = rot
    train = tokenized.subset(tokenized.series_indices((a, b)))
    test = tokenized.subset(tokenized.series_indices((t,)))
    if len(train) == 0 or len(test) == 0:
        raise ValueError(f"rotation {rotation_label(rot)} produced an empty split")
    return train, test


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def feature_size_sweep(
    corpus: Corpus,
    config: ExperimentConfig,
    kbs: Optional[dict[str, KnowledgeBase]] = None,
    seg: Optional[Segmenter] = None,
    out_csv=None,
) -> ResultTable:
    """Train every category's member at each feature size and record
    train/test accuracy; optionally emit the grid as CSV."""
    corpus = _apply_series_cap(corpus, config.per_series_cap)
    rotation = config.rotation or derive_rotations(list(corpus.series_index))[0]
    _check_rotation(rotation)
    tokenized = tokenize_corpus(corpus, seg, config.stopwords, kbs, config.surrogate_mode)
    _require_labels(tokenized)
    train, test = _split_tokenized(tokenized, rotation)
    vocab = Vocabulary.from_documents(train.docs)
    vc_train = VectorizedCorpus.from_tokens(train.docs, train.labels, vocab)
    V = len(vocab)
    max_size = min(max(config.feature_sizes), V)
    hp = config.hyperparams

    table = ResultTable()
    for cat in Category:
        full_ranking = rank_features(vc_train, cat, method=config.selector, k=max_size)
        full_terms = full_ranking.terms()
        for size in config.feature_sizes:
            actual = min(size, V)
            if size > V:
                warnings.warn(
                    f"feature size {size} exceeds vocabulary size {V}; using full vocabulary",
                    stacklevel=2,
                )
            terms = full_terms[:actual]
            member = _train_member(vc_train, cat, terms, config.sweep_method, hp, config.seed)
            table.sweep[(int(cat), size)] = SweepCell(
                actual_size=actual,
                train_acc=binary_accuracy(member, train, cat),
                test_acc=binary_accuracy(member, test, cat),
            )
    table.validate()
    if out_csv is not None:
        write_sweep_csv(table, out_csv)
    return table


def _train_member(
    vc: VectorizedCorpus,
    cat: Category,
    terms: tuple[str, ...],
    method: str,
    hp: Hyperparams,
    seed: int,
) -> BinaryMember:
    # Single-category trainer mirroring train_ovr's per-member path, for the
    # sweep where only one class budget varies at a time.
    labels = np.asarray(vc.labels)
    rel = labels == int(cat)
    if not rel.any():
        return BinaryMember(cat, method, (), None, stub=STUB_NO_POSITIVES)
    if rel.all():
        return BinaryMember(cat, method, (), None, stub=STUB_NO_NEGATIVES)
    positions = [vc.vocab.index[t] for t in terms]
    X = vc.dense_matrix(positions)
    if method == NB:
        model = train_nb(X, np.where(rel, 1, -1), l=hp.l)
    elif method == LR:
        model = train_lr(X, rel.astype(np.float64), eta=hp.eta, lam=hp.lam, epochs=hp.lr_epochs)
    else:
        model = train_svm(X, np.where(rel, 1.0, -1.0), C=hp.C, epochs=hp.svm_epochs, seed=seed + int(cat))
    return BinaryMember(cat, method, tuple(terms), model)


def cross_series_experiment(
    corpus: Corpus,
    kbs: dict[str, KnowledgeBase],
    config: ExperimentConfig,
    seg: Optional[Segmenter] = None,
    out_csv=None,
) -> ResultTable:
    """Train on two series and test on the held-out third, for every rotation
    and both surrogate modes; per-category accuracies are averaged over the
    configured classifier methods."""
    corpus = _apply_series_cap(corpus, config.per_series_cap)
    if len(corpus.series_index) < 3:
        raise ValueError("cross-series experiment needs at least 3 series")
    rotations = config.rotations or derive_rotations(list(corpus.series_index))
    table = ResultTable()
    for mode in (SURROGATE_OFF, SURROGATE_ON):
        tokenized = tokenize_corpus(corpus, seg, config.stopwords, kbs, mode)
        _require_labels(tokenized)
        for rot in rotations:
            label = rotation_label(rot)
            train, test = _split_tokenized(tokenized, rot)
            vocab = Vocabulary.from_documents(train.docs)
            vc_train = VectorizedCorpus.from_tokens(train.docs, train.labels, vocab)
            per_cat = np.zeros((len(config.methods), N_CATEGORIES))
            multi = np.zeros(len(config.methods))
            for mi, method in enumerate(config.methods):
                ovr = train_ovr(
                    vc_train,
                    method=method,
                    per_class_feature_sizes=config.per_class_budgets,
                    selector=config.selector,
                    hyperparams=config.hyperparams,
                    seed=config.seed,
                )
                for cat in Category:
                    per_cat[mi, int(cat)] = binary_accuracy(ovr.member_for(cat), test, cat)
                preds = [int(predict(ovr, doc)) for doc in test.docs]
                multi[mi] = accuracy(preds, test.labels)
            for cat in Category:
                table.generalization[(int(cat), label, mode)] = float(per_cat[:, int(cat)].mean())
            table.multiclass[(label, mode)] = float(multi.mean())
    table.validate()
    if out_csv is not None:
        write_generalization_csv(table, out_csv)
    return table
