import json

import pytest

from revclass.corpus import (
    Category,
    Corpus,
    CorpusFormatError,
    Review,
    agreement_filter,
    load_corpus,
    split_by_series,
)
from conftest import review_record, write_jsonl


class TestCategory:
    def test_exactly_eight_in_fixed_order(self):
        names = [c.display_name for c in Category]
        assert names == [
            "plot",
            "actor/actress",
            "role",
            "dialogue",
            "analysis",
            "platform",
            "thumb-up-or-down",
            "noise/others",
        ]

    def test_index_name_bijection(self):
        for c in Category:
            assert Category.from_name(c.display_name) is c
        with pytest.raises(ValueError):
            Category.from_name("sentiment")


class TestLoadCorpus:
    def test_three_valid_lines(self, tmp_path):
        path = write_jsonl(tmp_path / "c.jsonl", [review_record(f"r{i}") for i in range(3)])
        corpus = load_corpus(path)
        assert len(corpus) == 3
        assert [r.id for r in corpus.reviews] == ["r0", "r1", "r2"]

    def test_missing_text_names_line_and_field(self, tmp_path):
        record = review_record("r0")
        del record["text"]
        path = write_jsonl(tmp_path / "c.jsonl", [record])
        with pytest.raises(CorpusFormatError, match=r"line 1.*'text'"):
            load_corpus(path)

    def test_duplicate_id(self, tmp_path):
        path = write_jsonl(tmp_path / "c.jsonl", [review_record("dup"), review_record("dup")])
        with pytest.raises(CorpusFormatError, match="duplicate"):
            load_corpus(path)

    def test_empty_lines_and_unknown_fields_ignored(self, tmp_path):
        path = tmp_path / "c.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(review_record("r0", extra_field="ignored")) + "\n")
            fh.write("\n")
            fh.write(json.dumps(review_record("r1")) + "\n")
        assert len(load_corpus(path)) == 2

    def test_invalid_json_cites_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps(review_record("r0")) + "\n{broken\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_corpus(path)

    def test_annotation_out_of_range(self, tmp_path):
        path = write_jsonl(tmp_path / "c.jsonl", [review_record("r0", annotations=[8])])
        with pytest.raises(CorpusFormatError, match="annotations"):
            load_corpus(path)

    def test_text_nfc_normalized(self, tmp_path):
        # U+0065 U+0301 (e + combining acute) normalizes to U+00E9
        path = write_jsonl(tmp_path / "c.jsonl", [review_record("r0", text="café")])
        corpus = load_corpus(path)
        assert corpus.reviews[0].text == "café"

    def test_series_index_matches_per_series_counts(self, tmp_path):
        sizes = {"series_a": 6381, "series_b": 7527, "series_c": 5424}
        records = []
        n = 0
        for series, size in sizes.items():
            for i in range(size):
                records.append(review_record(f"{series}-{i}", series=series, text="x"))
                n += 1
        path = write_jsonl(tmp_path / "big.jsonl", records)
        corpus = load_corpus(path)
        assert len(corpus) == n
        assert {s: len(ix) for s, ix in corpus.series_index.items()} == sizes


class TestAgreementFilter:
    def test_unanimous_kept_with_label(self):
        corpus = Corpus(reviews=(Review("r0", "s", "t", (3, 3)),))
        kept, drops = agreement_filter(corpus)
        assert len(kept) == 1
        assert kept.labels[0] is Category.DIALOGUE
        assert drops == {"too_few_annotations": 0, "disagreement": 0}

    def test_disagreement_dropped(self):
        corpus = Corpus(reviews=(Review("r0", "s", "t", (3, 5)),))
        kept, drops = agreement_filter(corpus)
        assert len(kept) == 0
        assert drops["disagreement"] == 1

    def test_ten_review_fixture_keeps_six(self, tmp_path, ten_review_fixture):
        path = write_jsonl(tmp_path / "c.jsonl", ten_review_fixture)
        kept, drops = agreement_filter(load_corpus(path))
        assert len(kept) == 6
        assert drops == {"too_few_annotations": 1, "disagreement": 3}
        assert [r.id for r in kept.reviews] == ["r0", "r1", "r2", "r4", "r6", "r9"]
        assert [int(lab) for lab in kept.labels] == [3, 0, 7, 2, 5, 1]

    def test_idempotent(self, tmp_path, ten_review_fixture):
        path = write_jsonl(tmp_path / "c.jsonl", ten_review_fixture)
        once, _ = agreement_filter(load_corpus(path))
        twice, drops = agreement_filter(once)
        assert twice.reviews == once.reviews
        assert twice.labels == once.labels
        assert drops == {"too_few_annotations": 0, "disagreement": 0}

    def test_kept_plus_dropped_equals_input(self, tmp_path, ten_review_fixture):
        path = write_jsonl(tmp_path / "c.jsonl", ten_review_fixture)
        corpus = load_corpus(path)
        kept, drops = agreement_filter(corpus)
        assert len(kept) + sum(drops.values()) == len(corpus)


def _three_series_corpus():
    reviews = []
    for series in ("s1", "s2", "s3"):
        for i in range(4):
            reviews.append(Review(f"{series}-{i}", series, "text", (0, 0)))
    return Corpus(reviews=tuple(reviews))


class TestSplitBySeries:
    def test_partition_sizes(self):
        corpus = _three_series_corpus()
        train, test = split_by_series(corpus, {"s1", "s2"}, {"s3"})
        assert len(train) + len(test) == len(corpus)
        assert set(r.series for r in train.reviews) == {"s1", "s2"}
        assert set(r.series for r in test.reviews) == {"s3"}

    def test_overlap_is_error(self):
        with pytest.raises(ValueError, match="overlap"):
            split_by_series(_three_series_corpus(), {"s1"}, {"s1"})

    def test_unknown_series_is_error(self):
        with pytest.raises(ValueError, match="unknown"):
            split_by_series(_three_series_corpus(), {"s1", "nope"}, {"s3"})

    def test_three_rotations_are_disjoint(self):
        corpus = _three_series_corpus()
        rotations = [({"s1", "s2"}, {"s3"}), ({"s1", "s3"}, {"s2"}), ({"s2", "s3"}, {"s1"})]
        test_ids = []
        for train_set, test_set in rotations:
            train, test = split_by_series(corpus, train_set, test_set)
            assert set(r.id for r in train.reviews).isdisjoint(r.id for r in test.reviews)
            test_ids.append(frozenset(r.id for r in test.reviews))
        # the three held-out sets partition the corpus
        assert len(frozenset.union(*test_ids)) == len(corpus)
        assert sum(len(t) for t in test_ids) == len(corpus)

    def test_union_covers_requested_series_only(self):
        corpus = _three_series_corpus()
        train, test = split_by_series(corpus, {"s1"}, {"s2"})
        got = set(r.id for r in train.reviews) | set(r.id for r in test.reviews)
        expected = {r.id for r in corpus.reviews if r.series in ("s1", "s2")}
        assert got == expected

    def test_order_preserved(self):
        corpus = _three_series_corpus()
        train, _ = split_by_series(corpus, {"s1", "s2"}, {"s3"})
        ids = [r.id for r in train.reviews]
        assert ids == sorted(ids, key=lambda i: [r.id for r in corpus.reviews].index(i))
