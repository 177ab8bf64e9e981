import io
import json
import math
import zipfile

import pytest

from annotool.config import AppConfig
from annotool.selection import NoCandidateError
from annotool.service import AnnotationPlatform
from annotool.store import DatasetArchiveError, MotionStore, UnknownEntryError

from conftest import make_motion_document, populate_store

VALID = "a person walks forward and stops"


def annotated_store(n_motions=5, texts_per_motion=1):
    store = populate_store(n_motions)
    for i, entry_id in enumerate(store.entry_ids()):
        for k in range(texts_per_motion):
            store.add_annotation(
                entry_id,
                f"annotator-{(i + k) % 2}",
                VALID if (i + k) % 2 == 0 else "a person walks in a circle to the left",
            )
    return store


# -- annotations -----------------------------------------------------------------


def test_add_annotation_bumps_count_and_keeps_many(small_store):
    entry_id = small_store.entry_ids()[0]
    small_store.add_annotation(entry_id, "ann-a", VALID)
    small_store.add_annotation(entry_id, "ann-b", "a person walks backward slowly")
    entry = small_store.entry(entry_id)
    assert entry.annotation_count == 2
    texts = [r.text for r in small_store.annotations_for(entry_id)]
    assert texts == [VALID, "a person walks backward slowly"]
    assert entry.metadata.annotation_ids == tuple(entry.annotation_ids)


def test_add_annotation_unknown_entry(small_store):
    with pytest.raises(UnknownEntryError):
        small_store.add_annotation(999, "ann-a", VALID)


def test_submit_through_platform_excludes_motion(small_store):
    platform = AnnotationPlatform(small_store, AppConfig(seed=3))
    for entry_id in small_store.entry_ids():
        small_store.add_annotation(entry_id, "seed", VALID)
    platform.recompute_now()
    target = small_store.entry_ids()[2]
    receipt = platform.submit_annotation("ann-a", target, VALID)
    assert receipt.entry_annotation_count == 2
    assert target in platform.engine.snapshot.excluded
    result = platform.recompute_now()
    assert result.snapshot.excluded == frozenset()


def test_reported_entry_never_sampled(small_store):
    platform = AnnotationPlatform(small_store, AppConfig(seed=11))
    broken = small_store.entry_ids()[1]
    platform.report_problem("ann-a", broken, "arms explode at frame 2")
    assert small_store.entry(broken).problem_flag
    served = {platform.next_motion()[0] for _ in range(10_000)}
    assert broken not in served
    assert served  # everything else still reachable
    small_store.clear_problem_flag(broken)
    served_after = {platform.next_motion()[0] for _ in range(200)}
    assert broken in served_after


def test_double_report_is_idempotent(small_store):
    entry_id = small_store.entry_ids()[0]
    small_store.report_problem(entry_id, "a", "broken")
    small_store.report_problem(entry_id, "b", "still broken")
    assert small_store.entry(entry_id).problem_flag
    assert len(small_store.problem_reports()) == 2


def test_all_entries_flagged_leaves_no_candidate(small_store):
    platform = AnnotationPlatform(small_store, AppConfig(seed=1))
    for entry_id in small_store.entry_ids():
        small_store.report_problem(entry_id, None, "broken")
    with pytest.raises(NoCandidateError):
        platform.next_motion()


# -- dataset archive ----------------------------------------------------------------


def test_export_layout_and_annotation_member():
    store = populate_store(2)
    first, second = store.entry_ids()
    for text in (VALID, "a person walks forward quickly", "someone waves with the left hand"):
        store.add_annotation(first, "ann-a", text)
    data = store.export_dataset("2016-06-14")
    archive = zipfile.ZipFile(io.BytesIO(data))
    assert sorted(archive.namelist()) == [
        "1/1_annotations.json",
        "1/1_meta.json",
        "1/1_mmm.xml",
        "2/2_annotations.json",
        "2/2_meta.json",
        "2/2_mmm.xml",
        "manifest.json",
    ]
    texts = json.loads(archive.read("1/1_annotations.json"))
    assert texts == [
        VALID,
        "a person walks forward quickly",
        "someone waves with the left hand",
    ]
    manifest = json.loads(archive.read("manifest.json"))
    assert manifest["release_date"] == "2016-06-14"
    assert manifest["entries"] == [first, second]


def test_export_empty_store_rejected():
    with pytest.raises(ValueError):
        MotionStore().export_dataset("2016-06-14")


def test_export_is_deterministic():
    store = annotated_store()
    assert store.export_dataset("2016-06-14") == store.export_dataset("2016-06-14")


def test_round_trip_preserves_entities_and_ids():
    store = annotated_store(n_motions=5, texts_per_motion=2)
    data = store.export_dataset("2016-06-14")
    clone, warnings = MotionStore.import_dataset(data)
    assert warnings == []
    assert clone.entry_ids() == store.entry_ids()
    for entry_id in store.entry_ids():
        original = store.entry(entry_id)
        imported = clone.entry(entry_id)
        assert imported.annotation_ids == original.annotation_ids
        assert imported.motion == original.motion
        assert imported.metadata.source_institution == original.metadata.source_institution
        assert imported.metadata.source_database_id == original.metadata.source_database_id
        assert [r.text for r in clone.annotations_for(entry_id)] == [
            r.text for r in store.annotations_for(entry_id)
        ]
    # A second export of the imported store reproduces the archive exactly.
    assert clone.export_dataset("2016-06-14") == data


def test_import_reports_corrupted_member():
    data = annotated_store().export_dataset("2016-06-14")
    source = zipfile.ZipFile(io.BytesIO(data))
    rebuilt = io.BytesIO()
    with zipfile.ZipFile(rebuilt, "w") as out:
        for name in source.namelist():
            payload = source.read(name)
            if name == "2/2_annotations.json":
                payload = b"{not json"
            out.writestr(name, payload)
    with pytest.raises(DatasetArchiveError, match="2/2_annotations.json"):
        MotionStore.import_dataset(rebuilt.getvalue())


def test_import_warns_on_unknown_members():
    data = annotated_store().export_dataset("2016-06-14")
    buffer = io.BytesIO(data)
    with zipfile.ZipFile(buffer, "a") as archive:
        archive.writestr("EXTRAS/readme.txt", "surprise")
    _, warnings = MotionStore.import_dataset(buffer.getvalue())
    assert any("EXTRAS/readme.txt" in w for w in warnings)


def test_import_requires_manifest():
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        archive.writestr("1/1_meta.json", "{}")
    with pytest.raises(DatasetArchiveError, match="manifest"):
        MotionStore.import_dataset(buffer.getvalue())


def test_export_marks_missing_raw_file():
    store = populate_store(1, with_docs=True)
    store.add_annotation(store.entry_ids()[0], "a", VALID)
    archive = zipfile.ZipFile(io.BytesIO(store.export_dataset("2020-01-01")))
    meta = json.loads(archive.read("1/1_meta.json"))
    assert meta["files"] == {"raw": False, "motion": True}


# -- referential integrity and persistence --------------------------------------------


def test_referential_integrity():
    store = annotated_store(4, texts_per_motion=3)
    for record in store.all_annotations():
        entry = store.entry(record.entry_id)
        assert record.annotation_id in entry.annotation_ids
    for entry_id in store.entry_ids():
        for annotation_id in store.entry(entry_id).annotation_ids:
            assert store.annotation(annotation_id).entry_id == entry_id


def test_snapshot_save_load_round_trip(tmp_path):
    store = annotated_store(3, texts_per_motion=2)
    store.report_problem(store.entry_ids()[0], "ann-0", "slipping feet")
    store.set_annotation_perplexities({1: 2.5})
    path = tmp_path / "store.json"
    store.save(path)
    clone = MotionStore.load(path)
    assert clone.entry_ids() == store.entry_ids()
    assert clone.entry(store.entry_ids()[0]).problem_flag
    assert clone.annotation(1).perplexity == 2.5
    assert [p.annotator_id for p in clone.annotator_profiles()] == [
        p.annotator_id for p in store.annotator_profiles()
    ]
    assert clone.annotation_counts() == store.annotation_counts()
    assert clone.export_dataset("2022-02-02") == store.export_dataset("2022-02-02")


# -- statistics ------------------------------------------------------------------------


def test_corpus_counts_hand_counted():
    store = MotionStore()
    for frames in (101, 201, 301):  # durations 1 s, 2 s, 3 s at 100 Hz
        store.add_motion(motion=make_motion_document(n_frames=frames, rate=100.0))
    m1, m2, m3 = store.entry_ids()
    store.add_annotation(m1, "ann-x", "A person walks forward.")
    store.add_annotation(m1, "ann-y", "Someone turns around.")
    store.add_annotation(m2, "ann-x", "A person jumps twice.")
    store.add_annotation(m3, "ann-x", "The person walks away.")
    stats = store.corpus_counts()
    assert stats.recordings == 3
    assert stats.total_duration_secs == pytest.approx(6.0)
    assert stats.mean_duration_secs == pytest.approx(2.0)
    assert stats.std_duration_secs == pytest.approx(math.sqrt(2 / 3))
    assert stats.annotations == 4
    assert stats.annotators == 2
    assert stats.total_words == 15
    assert stats.vocabulary_size == 11
    assert stats.mean_sentence_length == pytest.approx(15 / 4)
    assert stats.std_sentence_length == pytest.approx(math.sqrt(0.1875))


def test_corpus_counts_empty_store():
    stats = MotionStore().corpus_counts()
    assert stats.recordings == 0
    assert stats.annotations == 0
    assert stats.vocabulary_size == 0
    assert stats.mean_sentence_length == 0.0


def test_vocabulary_ignores_case_and_punctuation():
    store = populate_store(1)
    entry_id = store.entry_ids()[0]
    store.add_annotation(entry_id, "a", "Walks Forward Fast Now.")
    store.add_annotation(entry_id, "b", "walks forward fast now")
    assert store.corpus_counts().vocabulary_size == 4
