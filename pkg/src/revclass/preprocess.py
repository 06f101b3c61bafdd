"""Text preprocessing: surrogate name tags, tokenization, stop words, vectorization."""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

Segmenter = Callable[[str], list[str]]

ROLE_TAG = "role_{rank}"
ACTOR_TAG = "actor_{rank}"


class KnowledgeBaseError(ValueError):
    """Raised on a malformed role/actor knowledge base."""


@dataclass(frozen=True)
class PersonEntry:
    """A role or actor with its surface forms and importance rank (1 = most important)."""

    canonical_name: str
    kind: str  # "role" | "actor"
    rank: int
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("role", "actor"):
            raise KnowledgeBaseError(f"kind must be 'role' or 'actor', got {self.kind!r}")
        if self.rank < 1:
            raise KnowledgeBaseError(f"{self.canonical_name!r}: rank must be >= 1")
        object.__setattr__(self, "canonical_name", _nfc_nonempty(self.canonical_name, "canonical_name"))
        object.__setattr__(self, "aliases", tuple(_nfc_nonempty(a, "alias") for a in self.aliases))

    @property
    def surfaces(self) -> tuple[str, ...]:
        return (self.canonical_name, *self.aliases)


def _nfc_nonempty(s: str, what: str) -> str:
    s = unicodedata.normalize("NFC", s)
    if not s:
        raise KnowledgeBaseError(f"{what} must be non-empty")
    return s


@dataclass(frozen=True)
class KnowledgeBase:
    """Importance-ranked roles and actors of one series.

    Within each kind, ranks must be unique and contiguous from 1, so that
    a lower index always means a more important person.
    """

    series: str
    roles: tuple[PersonEntry, ...] = ()
    actors: tuple[PersonEntry, ...] = ()

    def __post_init__(self):
        for kind, entries in (("role", self.roles), ("actor", self.actors)):
            for e in entries:
                if e.kind != kind:
                    raise KnowledgeBaseError(f"{e.canonical_name!r}: kind {e.kind!r} in {kind} list")
            ranks = sorted(e.rank for e in entries)
            if ranks != list(range(1, len(entries) + 1)):
                raise KnowledgeBaseError(f"{kind} ranks must be unique and contiguous from 1, got {ranks}")


def load_knowledge_base(path) -> KnowledgeBase:
    """Load a knowledge-base JSON file: {"series", "roles": [...], "actors": [...]}."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or not isinstance(obj.get("series"), str):
        raise KnowledgeBaseError(f"{path}: expected an object with a 'series' string")

    def entries(key: str, kind: str) -> tuple[PersonEntry, ...]:
        out = []
        for item in obj.get(key, []):
            if not isinstance(item, dict) or "name" not in item or "rank" not in item:
                raise KnowledgeBaseError(f"{path}: every {key} entry needs 'name' and 'rank'")
            out.append(
                PersonEntry(
                    canonical_name=item["name"],
                    kind=kind,
                    rank=int(item["rank"]),
                    aliases=tuple(item.get("aliases", ())),
                )
            )
        return tuple(out)

    return KnowledgeBase(series=obj["series"], roles=entries("roles", "role"), actors=entries("actors", "actor"))


@dataclass(frozen=True)
class SurrogateMap:
    """Mapping from every known surface string to its generic tag (role_i / actor_j)."""

    entries: dict[str, str]
    _pattern: Optional[re.Pattern] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.entries:
            # Longest alternative first so overlapping names resolve to the longest match.
            ordered = sorted(self.entries, key=len, reverse=True)
            pattern = re.compile("|".join(re.escape(s) for s in ordered))
            object.__setattr__(self, "_pattern", pattern)

    def __len__(self) -> int:
        return len(self.entries)


def build_surrogate_map(kb: KnowledgeBase) -> SurrogateMap:
    """Assign each role/actor surface string the tag carrying its rank.

    Roles and actors are numbered independently.  A surface string claimed
    by two different entries is ambiguous and raises.
    """
    entries: dict[str, str] = {}
    for group, template in ((kb.roles, ROLE_TAG), (kb.actors, ACTOR_TAG)):
        for person in group:
            tag = template.format(rank=person.rank)
            for surface in person.surfaces:
                existing = entries.get(surface)
                if existing is not None and existing != tag:
                    raise KnowledgeBaseError(
                        f"surface {surface!r} is ambiguous: maps to both {existing} and {tag}"
                    )
                entries[surface] = tag
    return SurrogateMap(entries=entries)


def substitute(text: str, surrogates: SurrogateMap) -> str:
    """Replace every known role/actor mention with its generic tag.

    Overlapping candidates resolve longest-match-first, left to right, in a
    single pass, so emitted tags are never re-scanned.
    """
    if not surrogates.entries:
        return text
    return surrogates._pattern.sub(lambda m: surrogates.entries[m.group(0)], text)


class WhitespaceSegmenter:
    """Trivial segmenter: split on whitespace (intended for tests and synthetic corpora)."""

    def __call__(self, text: str) -> list[str]:
        return text.split()


_ASCII_WORD = re.compile(r"[A-Za-z0-9_]+")


class DictionarySegmenter:
    """Greedy longest-match segmentation against a word list.

    ASCII alphanumeric/underscore runs are kept whole (this preserves
    surrogate tags like ``role_1`` and forum slang like ``LOL``); otherwise
    the longest dictionary word starting at the cursor wins, falling back to
    a single character.  Concatenating the output always reproduces the
    input exactly.
    """

    def __init__(self, words: Iterable[str]):
        self.words = frozenset(unicodedata.normalize("NFC", w) for w in words if w)
        self.max_len = max((len(w) for w in self.words), default=1)

    def __call__(self, text: str) -> list[str]:
        tokens: list[str] = []
        i, n = 0, len(text)
        while i < n:
            m = _ASCII_WORD.match(text, i)
            if m:
                tokens.append(m.group(0))
                i = m.end()
                continue
            for length in range(min(self.max_len, n - i), 1, -1):
                candidate = text[i : i + length]
                if candidate in self.words:
                    tokens.append(candidate)
                    i += length
                    break
            else:
                tokens.append(text[i])
                i += 1
        return tokens


def load_dictionary(path) -> DictionarySegmenter:
    """Build the default segmenter from a one-word-per-line UTF-8 file."""
    with open(path, encoding="utf-8") as fh:
        return DictionarySegmenter(line.strip() for line in fh if line.strip())


def tokenize(text: str, seg: Segmenter) -> list[str]:
    """Break text into tokens with the given segmenter."""
    return seg(text)


def load_stopwords(path) -> frozenset[str]:
    """Load stop words, one per line; '#' comment lines and blanks ignored."""
    words: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(unicodedata.normalize("NFC", word))
    return frozenset(words)


def remove_stopwords(tokens: Sequence[str], stoplist: Iterable[str]) -> list[str]:
    """Drop stop-listed tokens, preserving order.

    Latin-script tokens (pure ASCII) match case-insensitively so forum slang
    like "LOL"/"lol" is caught either way; other scripts match exactly.
    """
    exact = set(stoplist)
    lowered = {w.lower() for w in exact if w.isascii()}
    return [t for t in tokens if t not in exact and not (t.isascii() and t.lower() in lowered)]


@dataclass(frozen=True)
class Vocabulary:
    """Ordered unique terms with a term -> position index."""

    terms: tuple[str, ...]
    index: dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.index:
            object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})
        if len(self.index) != len(self.terms):
            raise ValueError("vocabulary terms must be unique")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    @classmethod
    def from_documents(cls, docs: Iterable[Sequence[str]]) -> "Vocabulary":
        """Collect terms in first-occurrence order across documents."""
        seen: dict[str, None] = {}
        for doc in docs:
            for token in doc:
                seen.setdefault(token)
        return cls(terms=tuple(seen))


def vectorize(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Binary presence vector over the vocabulary; out-of-vocabulary tokens ignored."""
    x = np.zeros(len(vocab), dtype=np.int8)
    for t in tokens:
        pos = vocab.index.get(t)
        if pos is not None:
            x[pos] = 1
    return x


@dataclass(frozen=True)
class VectorizedCorpus:
    """Binary bag-of-words view of a labeled corpus.

    ``doc_terms[i]`` is the set of vocabulary positions present in document
    i; ``labels[i]`` its resolved category index.
    """

    vocab: Vocabulary
    doc_terms: tuple[frozenset[int], ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.doc_terms) != len(self.labels):
            raise ValueError("doc_terms and labels must align")

    def __len__(self) -> int:
        return len(self.doc_terms)

    @classmethod
    def from_tokens(
        cls,
        docs: Sequence[Sequence[str]],
        labels: Sequence[int],
        vocab: Optional[Vocabulary] = None,
    ) -> "VectorizedCorpus":
        if vocab is None:
            vocab = Vocabulary.from_documents(docs)
        doc_terms = tuple(
            frozenset(vocab.index[t] for t in doc if t in vocab.index) for doc in docs
        )
        return cls(vocab=vocab, doc_terms=doc_terms, labels=tuple(int(y) for y in labels))

    def dense_matrix(self, term_positions: Sequence[int]) -> np.ndarray:
        """Documents x selected-terms binary matrix (float64, for training)."""
        cols = {int(t): j for j, t in enumerate(term_positions)}
        X = np.zeros((len(self.doc_terms), len(cols)))
        for i, present in enumerate(self.doc_terms):
            for t in present:
                j = cols.get(t)
                if j is not None:
                    X[i, j] = 1.0
        return X


def preprocess_text(
    text: str,
    seg: Segmenter,
    stoplist: Iterable[str] = (),
    surrogates: Optional[SurrogateMap] = None,
    drop_whitespace_tokens: bool = True,
) -> list[str]:
    """Full text pipeline: substitute (when a map is given), tokenize, remove stop words.

    Whitespace-only fallback tokens from the dictionary segmenter carry no
    signal and are dropped by default.
    """
    if surrogates is not None:
        text = substitute(text, surrogates)
    tokens = tokenize(text, seg)
    if drop_whitespace_tokens:
        tokens = [t for t in tokens if t.strip()]
    return remove_stopwords(tokens, stoplist)


@dataclass(frozen=True)
class TokenizedCorpus:
    """Per-review token lists with provenance and resolved labels."""

    ids: tuple[str, ...]
    series: tuple[str, ...]
    docs: tuple[tuple[str, ...], ...]
    labels: tuple[Optional[int], ...]

    def __post_init__(self):
        n = len(self.ids)
        if not (len(self.series) == len(self.docs) == len(self.labels) == n):
            raise ValueError("ids, series, docs, and labels must align")

    def __len__(self) -> int:
        return len(self.ids)

    def subset(self, indices: Sequence[int]) -> "TokenizedCorpus":
        return TokenizedCorpus(
            ids=tuple(self.ids[i] for i in indices),
            series=tuple(self.series[i] for i in indices),
            docs=tuple(self.docs[i] for i in indices),
            labels=tuple(self.labels[i] for i in indices),
        )

    def series_indices(self, wanted: Iterable[str]) -> list[int]:
        names = set(wanted)
        return [i for i, s in enumerate(self.series) if s in names]

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(
                {"id": rid, "series": series, "label": label, "tokens": list(doc)},
                ensure_ascii=False,
                sort_keys=True,
            )
            for rid, series, doc, label in zip(self.ids, self.series, self.docs, self.labels)
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def load(cls, path) -> "TokenizedCorpus":
        ids, series, docs, labels = [], [], [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
                for name in ("id", "series", "tokens"):
                    if name not in obj:
                        raise ValueError(f"{path}: line {lineno}: missing field {name!r}")
                label = obj.get("label")
                if label is not None and (isinstance(label, bool) or not isinstance(label, int)):
                    raise ValueError(f"{path}: line {lineno}: field 'label' must be an integer or null")
                ids.append(obj["id"])
                series.append(obj["series"])
                docs.append(tuple(obj["tokens"]))
                labels.append(label)
        return cls(ids=tuple(ids), series=tuple(series), docs=tuple(docs), labels=tuple(labels))
