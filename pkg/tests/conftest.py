import json

import pytest


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


def review_record(rid, series="s1", text="还不错", annotations=(0, 0), **extra):
    record = {"id": rid, "series": series, "text": text, "annotations": list(annotations)}
    record.update(extra)
    return record


@pytest.fixture
def ten_review_fixture():
    """Fixed 10-review corpus: 6 unanimous, 3 disagreements, 1 single-annotator."""
    return [
        review_record("r0", annotations=[3, 3]),
        review_record("r1", annotations=[0, 0]),
        review_record("r2", annotations=[7, 7, 7]),
        review_record("r3", annotations=[3, 5]),
        review_record("r4", annotations=[2, 2]),
        review_record("r5", annotations=[0, 1]),
        review_record("r6", annotations=[5, 5]),
        review_record("r7", annotations=[4]),
        review_record("r8", annotations=[2, 2, 4]),
        review_record("r9", annotations=[1, 1]),
    ]
