"""Labeled review corpora: loading, annotator-agreement filtering, series splits."""

from __future__ import annotations

import enum
import json
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Optional


class CorpusFormatError(ValueError):
    """Raised when a corpus file violates the line-delimited JSON contract."""


class Category(enum.IntEnum):
    """The eight review categories, in fixed index order."""

    PLOT = 0
    ACTOR = 1
    ROLE = 2
    DIALOGUE = 3
    ANALYSIS = 4
    PLATFORM = 5
    THUMB = 6
    NOISE = 7

    @property
    def display_name(self) -> str:
        return _CATEGORY_NAMES[self.value]

    @classmethod
    def from_name(cls, name: str) -> "Category":
        try:
            return cls(_CATEGORY_NAMES.index(name))
        except ValueError:
            raise ValueError(f"unknown category name: {name!r}") from None


_CATEGORY_NAMES = (
    "plot",
    "actor/actress",
    "role",
    "dialogue",
    "analysis",
    "platform",
    "thumb-up-or-down",
    "noise/others",
)

N_CATEGORIES = len(_CATEGORY_NAMES)


@dataclass(frozen=True)
class Review:
    """One review with its provenance and per-annotator category labels."""

    id: str
    series: str
    text: str
    annotations: tuple[int, ...]
    episode: Optional[int] = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("review id must be non-empty")
        if not self.text:
            raise ValueError(f"review {self.id}: text must be non-empty")
        if self.episode is not None and self.episode < 0:
            raise ValueError(f"review {self.id}: episode must be non-negative")
        for a in self.annotations:
            if not 0 <= a < N_CATEGORIES:
                raise ValueError(f"review {self.id}: annotation {a} outside [0, {N_CATEGORIES - 1}]")


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of reviews.

    ``labels[i]`` is the resolved category of ``reviews[i]`` when all its
    annotations agree (set by :func:`agreement_filter`), else ``None``.
    ``series_index`` partitions review positions by series.
    """

    reviews: tuple[Review, ...]
    labels: tuple[Optional[Category], ...] = ()
    series_index: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", (None,) * len(self.reviews))
        if len(self.labels) != len(self.reviews):
            raise ValueError("labels must align with reviews")
        if not self.series_index:
            object.__setattr__(self, "series_index", _build_series_index(self.reviews))

    def __len__(self) -> int:
        return len(self.reviews)


def _build_series_index(reviews: Iterable[Review]) -> dict[str, tuple[int, ...]]:
    index: dict[str, list[int]] = {}
    for i, r in enumerate(reviews):
        index.setdefault(r.series, []).append(i)
    return {s: tuple(ix) for s, ix in index.items()}


_REQUIRED_FIELDS = ("id", "series", "text", "annotations")


def _parse_line(obj: dict, lineno: int) -> Review:
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise CorpusFormatError(f"line {lineno}: missing field {name!r}")
    rid = obj["id"]
    if not isinstance(rid, str) or not rid:
        raise CorpusFormatError(f"line {lineno}: field 'id' must be a non-empty string")
    series = obj["series"]
    if not isinstance(series, str) or not series:
        raise CorpusFormatError(f"line {lineno}: field 'series' must be a non-empty string")
    text = obj["text"]
    if not isinstance(text, str):
        raise CorpusFormatError(f"line {lineno}: field 'text' must be a string")
    text = unicodedata.normalize("NFC", text)
    if not text:
        raise CorpusFormatError(f"line {lineno}: field 'text' is empty after normalization")
    annotations = obj["annotations"]
    if not isinstance(annotations, list) or not all(
        isinstance(a, int) and not isinstance(a, bool) for a in annotations
    ):
        raise CorpusFormatError(f"line {lineno}: field 'annotations' must be a list of integers")
    if any(not 0 <= a < N_CATEGORIES for a in annotations):
        raise CorpusFormatError(
            f"line {lineno}: field 'annotations' has a value outside [0, {N_CATEGORIES - 1}]"
        )
    episode = obj.get("episode")
    if episode is not None and (isinstance(episode, bool) or not isinstance(episode, int) or episode < 0):
        raise CorpusFormatError(f"line {lineno}: field 'episode' must be a non-negative integer")
    return Review(id=rid, series=series, text=text, annotations=tuple(annotations), episode=episode)


def load_corpus(path) -> Corpus:
    """Load a UTF-8, one-JSON-object-per-line corpus file.

    Unknown fields are ignored and empty lines skipped.  Text is NFC
    normalized at load.  Raises :class:`CorpusFormatError` naming the line
    and field on malformed input, and on duplicate review ids.
    """
    reviews: list[Review] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"line {lineno}: expected a JSON object")
            review = _parse_line(obj, lineno)
            if review.id in seen:
                raise CorpusFormatError(f"line {lineno}: duplicate review id {review.id!r}")
            seen.add(review.id)
            reviews.append(review)
    return Corpus(reviews=tuple(reviews))


def agreement_filter(corpus: Corpus) -> tuple[Corpus, dict[str, int]]:
    """Keep only reviews whose annotators all assigned the same label.

    Reviews with fewer than two annotations are dropped and counted, as are
    disagreements.  Kept reviews get their common annotation as resolved
    label; order is preserved.  Returns ``(filtered_corpus, drop_counts)``
    with counts keyed ``"too_few_annotations"`` and ``"disagreement"``.
    """
    kept: list[Review] = []
    labels: list[Category] = []
    drops = {"too_few_annotations": 0, "disagreement": 0}
    for review in corpus.reviews:
        anns = review.annotations
        if len(anns) < 2:
            drops["too_few_annotations"] += 1
        elif len(set(anns)) == 1:
            kept.append(review)
            labels.append(Category(anns[0]))
        else:
            drops["disagreement"] += 1
    return Corpus(reviews=tuple(kept), labels=tuple(labels)), drops


def split_by_series(corpus: Corpus, train: set[str], test: set[str]) -> tuple[Corpus, Corpus]:
    """Partition a corpus into train/test by series membership.

    ``train`` and ``test`` must be disjoint and name only series present in
    the corpus.  Reviews of series in neither set are left out of both
    outputs; both outputs preserve corpus order.
    """
    overlap = set(train) & set(test)
    if overlap:
        raise ValueError(f"train and test series overlap: {sorted(overlap)}")
    known = set(corpus.series_index)
    unknown = (set(train) | set(test)) - known
    if unknown:
        raise ValueError(f"unknown series: {sorted(unknown)}")

    def take(wanted: set[str]) -> Corpus:
        idx = [i for i, r in enumerate(corpus.reviews) if r.series in wanted]
        return Corpus(
            reviews=tuple(corpus.reviews[i] for i in idx),
            labels=tuple(corpus.labels[i] for i in idx),
        )

    return take(set(train)), take(set(test))
