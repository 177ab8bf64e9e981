"""Persistence for motions, annotations, annotators, and problem reports.

The store is an in-process, lock-guarded object with a single-file JSON
snapshot for durability (desk-scale deployments; trivial to back up).
Published datasets are ZIP archives with four members per entry: the
raw capture file, the motion document, the annotation texts, and the
metadata. Member contents are deterministic for a given store state
and release date.
"""

from __future__ import annotations

import base64
import io
import json
import statistics
import threading
import time
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus_lm
from .engage import AnnotatorProfile
from .ingest import (
    MotionDocument,
    MotionMetadata,
    parse_metadata,
    parse_motion_document,
    serialize_metadata,
    serialize_motion_document,
)

ARCHIVE_FORMAT_VERSION = 1
_ARCHIVE_EPOCH = (1980, 1, 1, 0, 0, 0)
_NOW = object()  # sentinel: default created_at; None means "unknown"


class UnknownEntryError(KeyError):
    pass


class DatasetArchiveError(ValueError):
    pass


@dataclass
class MotionEntry:
    entry_id: int
    metadata: MotionMetadata
    motion: MotionDocument | None = None
    raw_c3d: bytes | None = None
    annotation_ids: list[int] = field(default_factory=list)
    problem_flag: bool = False

    @property
    def annotation_count(self) -> int:
        return len(self.annotation_ids)


@dataclass
class AnnotationRecord:
    annotation_id: int
    entry_id: int
    annotator_id: str | None
    text: str
    created_at: float | None
    perplexity: float | None = None


@dataclass
class ProblemReport:
    report_id: int
    entry_id: int
    annotator_id: str | None
    note: str
    created_at: float


@dataclass(frozen=True)
class DatasetStats:
    """Corpus-level statistics; text measures use the model tokenizer."""

    recordings: int = 0
    total_duration_secs: float = 0.0
    mean_duration_secs: float = 0.0
    std_duration_secs: float = 0.0
    annotations: int = 0
    annotators: int = 0
    total_words: int = 0
    vocabulary_size: int = 0
    mean_sentence_length: float = 0.0
    std_sentence_length: float = 0.0

    def to_dict(self) -> dict:
        return {
            "recordings": self.recordings,
            "total_duration_secs": self.total_duration_secs,
            "mean_duration_secs": self.mean_duration_secs,
            "std_duration_secs": self.std_duration_secs,
            "annotations": self.annotations,
            "annotators": self.annotators,
            "total_words": self.total_words,
            "vocabulary_size": self.vocabulary_size,
            "mean_sentence_length": self.mean_sentence_length,
            "std_sentence_length": self.std_sentence_length,
        }


@dataclass
class _AnnotatorState:
    annotator_id: str
    display_name: str
    annotation_count: int = 0
    first_annotation_at: float | None = None


class MotionStore:
    """Entries, annotations, annotators, and reports behind one lock.

    Writes are serialized; reads take the same lock briefly and return
    plain values or copies, so callers never observe partial updates.
    """

    def __init__(self, *, clock=time.time):
        self._lock = threading.RLock()
        self._clock = clock
        self._entries: dict[int, MotionEntry] = {}
        self._annotations: dict[int, AnnotationRecord] = {}
        self._annotators: dict[str, _AnnotatorState] = {}
        self._reports: list[ProblemReport] = []
        self._next_entry_id = 1
        self._next_annotation_id = 1

    # -- motions ---------------------------------------------------------

    def add_motion(
        self,
        *,
        motion: MotionDocument | None = None,
        raw_c3d: bytes | None = None,
        source_institution: str = "",
        source_database_id: str = "",
        entry_id: int | None = None,
    ) -> MotionEntry:
        with self._lock:
            if entry_id is None:
                entry_id = self._next_entry_id
            elif entry_id in self._entries:
                raise ValueError(f"entry id {entry_id} already exists")
            self._next_entry_id = max(self._next_entry_id, entry_id + 1)
            metadata = MotionMetadata(
                entry_id=entry_id,
                annotation_ids=(),
                source_institution=source_institution,
                source_database_id=source_database_id,
            )
            entry = MotionEntry(
                entry_id=entry_id, metadata=metadata, motion=motion, raw_c3d=raw_c3d
            )
            self._entries[entry_id] = entry
            return entry

    def entry(self, entry_id: int) -> MotionEntry:
        with self._lock:
            try:
                return self._entries[entry_id]
            except KeyError:
                raise UnknownEntryError(f"no entry with id {entry_id}") from None

    def entry_ids(self) -> list[int]:
        with self._lock:
            return sorted(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def annotation_counts(self, *, eligible_only: bool = False) -> dict[int, int]:
        with self._lock:
            return {
                e.entry_id: e.annotation_count
                for e in self._entries.values()
                if not (eligible_only and e.problem_flag)
            }

    # -- annotations -----------------------------------------------------

    def add_annotation(
        self,
        entry_id: int,
        annotator_id: str | None,
        text: str,
        *,
        created_at: float | None = _NOW,
        annotation_id: int | None = None,
        display_name: str | None = None,
    ) -> AnnotationRecord:
        """Persist one validated annotation and bump the counters.

        Texts are stored verbatim; validation is the caller's step.
        ``created_at=None`` records an unknown submission time (imports).
        """
        with self._lock:
            entry = self.entry(entry_id)
            if annotation_id is None:
                annotation_id = self._next_annotation_id
            elif annotation_id in self._annotations:
                raise ValueError(f"annotation id {annotation_id} already exists")
            self._next_annotation_id = max(self._next_annotation_id, annotation_id + 1)
            if created_at is _NOW:
                created_at = self._clock()
            record = AnnotationRecord(
                annotation_id=annotation_id,
                entry_id=entry_id,
                annotator_id=annotator_id,
                text=text,
                created_at=created_at,
            )
            self._annotations[annotation_id] = record
            entry.annotation_ids.append(annotation_id)
            entry.metadata = MotionMetadata(
                entry_id=entry.metadata.entry_id,
                annotation_ids=tuple(entry.annotation_ids),
                source_institution=entry.metadata.source_institution,
                source_database_id=entry.metadata.source_database_id,
                extra=entry.metadata.extra,
            )
            if annotator_id is not None:
                state = self._annotators.get(annotator_id)
                if state is None:
                    state = _AnnotatorState(
                        annotator_id=annotator_id,
                        display_name=display_name or annotator_id,
                    )
                    self._annotators[annotator_id] = state
                if display_name:
                    state.display_name = display_name
                state.annotation_count += 1
                if state.first_annotation_at is None:
                    state.first_annotation_at = created_at
            return record

    def annotation(self, annotation_id: int) -> AnnotationRecord:
        with self._lock:
            return self._annotations[annotation_id]

    def annotations_for(self, entry_id: int) -> list[AnnotationRecord]:
        with self._lock:
            entry = self.entry(entry_id)
            return [self._annotations[a] for a in entry.annotation_ids]

    def texts_by_motion(self) -> dict[int, list[str]]:
        """Annotation texts grouped by motion, annotated motions only."""
        with self._lock:
            grouped: dict[int, list[str]] = {}
            for entry in self._entries.values():
                if entry.annotation_ids:
                    grouped[entry.entry_id] = [
                        self._annotations[a].text for a in entry.annotation_ids
                    ]
            return grouped

    def all_annotations(self) -> list[AnnotationRecord]:
        with self._lock:
            return sorted(self._annotations.values(), key=lambda r: r.annotation_id)

    def set_annotation_perplexities(self, values: dict[int, float]) -> None:
        with self._lock:
            for annotation_id, value in values.items():
                record = self._annotations.get(annotation_id)
                if record is not None:
                    record.perplexity = value

    # -- annotators ------------------------------------------------------

    def ensure_annotator(self, annotator_id: str, display_name: str | None = None) -> None:
        with self._lock:
            state = self._annotators.get(annotator_id)
            if state is None:
                self._annotators[annotator_id] = _AnnotatorState(
                    annotator_id=annotator_id,
                    display_name=display_name or annotator_id,
                )
            elif display_name:
                state.display_name = display_name

    def annotator_profiles(self) -> list[AnnotatorProfile]:
        with self._lock:
            return [
                AnnotatorProfile(
                    annotator_id=s.annotator_id,
                    display_name=s.display_name,
                    annotation_count=s.annotation_count,
                    first_annotation_at=s.first_annotation_at,
                )
                for s in self._annotators.values()
            ]

    def annotator_count_for(self, annotator_id: str) -> int:
        with self._lock:
            state = self._annotators.get(annotator_id)
            return 0 if state is None else state.annotation_count

    # -- problem reports ---------------------------------------------------

    def report_problem(
        self, entry_id: int, annotator_id: str | None, note: str
    ) -> ProblemReport:
        """Flag an entry as broken; flagged entries leave the selection pool."""
        with self._lock:
            entry = self.entry(entry_id)
            report = ProblemReport(
                report_id=len(self._reports) + 1,
                entry_id=entry_id,
                annotator_id=annotator_id,
                note=note,
                created_at=self._clock(),
            )
            self._reports.append(report)
            entry.problem_flag = True
            return report

    def clear_problem_flag(self, entry_id: int) -> None:
        with self._lock:
            self.entry(entry_id).problem_flag = False

    def problem_reports(self) -> list[ProblemReport]:
        with self._lock:
            return list(self._reports)

    # -- statistics --------------------------------------------------------

    def corpus_counts(self) -> DatasetStats:
        """Dataset statistics; vocabulary ignores capitalization/punctuation
        by construction because it is counted over normalized tokens."""
        with self._lock:
            entries = list(self._entries.values())
            records = list(self._annotations.values())
        durations = [e.motion.duration for e in entries if e.motion is not None]
        lengths: list[int] = []
        vocabulary: set[str] = set()
        for record in records:
            try:
                tokens = corpus_lm.normalize(record.text)
            except corpus_lm.EmptyAnnotationError:
                continue
            lengths.append(len(tokens))
            vocabulary.update(tokens)
        annotators = {r.annotator_id for r in records if r.annotator_id is not None}
        return DatasetStats(
            recordings=len(entries),
            total_duration_secs=sum(durations),
            mean_duration_secs=statistics.fmean(durations) if durations else 0.0,
            std_duration_secs=statistics.pstdev(durations) if durations else 0.0,
            annotations=len(records),
            annotators=len(annotators),
            total_words=sum(lengths),
            vocabulary_size=len(vocabulary),
            mean_sentence_length=statistics.fmean(lengths) if lengths else 0.0,
            std_sentence_length=statistics.pstdev(lengths) if lengths else 0.0,
        )

    # -- dataset archives --------------------------------------------------

    def export_dataset(self, release_date: str) -> bytes:
        """Build the versioned four-file-per-entry ZIP archive.

        Entries without a raw capture file or motion document omit that
        member and mark it in their metadata. Member bytes depend only
        on store content and the release date.
        """
        with self._lock:
            if not self._entries:
                raise ValueError("cannot export an empty store")
            entries = [self._entries[i] for i in sorted(self._entries)]
            annotations = dict(self._annotations)

        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
            manifest = {
                "release_date": release_date,
                "format_version": ARCHIVE_FORMAT_VERSION,
                "documentation": "docs/dataset_format.md in the annotool repository",
                "entries": [e.entry_id for e in entries],
            }
            _write_member(
                archive, "manifest.json", json.dumps(manifest, indent=2).encode() + b"\n"
            )
            for entry in entries:
                prefix = f"{entry.entry_id}/{entry.entry_id}"
                meta = MotionMetadata(
                    entry_id=entry.metadata.entry_id,
                    annotation_ids=entry.metadata.annotation_ids,
                    source_institution=entry.metadata.source_institution,
                    source_database_id=entry.metadata.source_database_id,
                    extra={
                        **entry.metadata.extra,
                        "files": {
                            "raw": entry.raw_c3d is not None,
                            "motion": entry.motion is not None,
                        },
                    },
                )
                if entry.raw_c3d is not None:
                    _write_member(archive, f"{prefix}_raw.c3d", entry.raw_c3d)
                if entry.motion is not None:
                    _write_member(
                        archive,
                        f"{prefix}_mmm.xml",
                        serialize_motion_document(entry.motion).encode(),
                    )
                texts = [annotations[a].text for a in entry.annotation_ids]
                _write_member(
                    archive,
                    f"{prefix}_annotations.json",
                    json.dumps(texts, indent=2).encode() + b"\n",
                )
                _write_member(
                    archive, f"{prefix}_meta.json", serialize_metadata(meta).encode()
                )
        return buffer.getvalue()

    @classmethod
    def import_dataset(
        cls, data: bytes, *, clock=time.time
    ) -> tuple["MotionStore", list[str]]:
        """Rebuild a store from an exported archive.

        Returns the store plus warnings for unknown members. Annotator
        attribution and submission times are not part of the published
        archive, so imported records carry neither.
        """
        store = cls(clock=clock)
        warnings: list[str] = []
        try:
            archive = zipfile.ZipFile(io.BytesIO(data))
        except zipfile.BadZipFile as exc:
            raise DatasetArchiveError(f"not a ZIP archive: {exc}") from None
        with archive:
            names = set(archive.namelist())
            if "manifest.json" not in names:
                raise DatasetArchiveError("archive has no manifest.json")
            manifest = _read_json(archive, "manifest.json")
            entry_ids = manifest.get("entries")
            if not isinstance(entry_ids, list):
                raise DatasetArchiveError("manifest.json: missing entries list")

            known: set[str] = {"manifest.json"}
            for raw_id in entry_ids:
                prefix = f"{raw_id}/{raw_id}"
                meta_name = f"{prefix}_meta.json"
                ann_name = f"{prefix}_annotations.json"
                if meta_name not in names:
                    raise DatasetArchiveError(f"missing member {meta_name}")
                if ann_name not in names:
                    raise DatasetArchiveError(f"missing member {ann_name}")
                try:
                    meta = parse_metadata(archive.read(meta_name).decode())
                except ValueError as exc:
                    raise DatasetArchiveError(f"{meta_name}: {exc}") from None
                texts = _read_json(archive, ann_name)
                if not isinstance(texts, list) or not all(
                    isinstance(t, str) for t in texts
                ):
                    raise DatasetArchiveError(
                        f"{ann_name}: expected a plain array of strings"
                    )
                if meta.annotation_ids and len(meta.annotation_ids) != len(texts):
                    raise DatasetArchiveError(
                        f"{ann_name}: {len(texts)} texts but metadata lists "
                        f"{len(meta.annotation_ids)} annotation ids"
                    )

                motion = None
                xml_name = f"{prefix}_mmm.xml"
                if xml_name in names:
                    known.add(xml_name)
                    try:
                        motion = parse_motion_document(archive.read(xml_name).decode())
                    except ValueError as exc:
                        raise DatasetArchiveError(f"{xml_name}: {exc}") from None
                raw = None
                raw_name = f"{prefix}_raw.c3d"
                if raw_name in names:
                    known.add(raw_name)
                    raw = archive.read(raw_name)

                entry_id = int(meta.entry_id)
                entry = store.add_motion(
                    motion=motion,
                    raw_c3d=raw,
                    source_institution=meta.source_institution,
                    source_database_id=meta.source_database_id,
                    entry_id=entry_id,
                )
                extra = {k: v for k, v in meta.extra.items() if k != "files"}
                entry.metadata = MotionMetadata(
                    entry_id=entry_id,
                    annotation_ids=(),
                    source_institution=meta.source_institution,
                    source_database_id=meta.source_database_id,
                    extra=extra,
                )
                ids = meta.annotation_ids or [None] * len(texts)
                for annotation_id, text in zip(ids, texts):
                    store.add_annotation(
                        entry_id,
                        annotator_id=None,
                        text=text,
                        created_at=None,
                        annotation_id=None if annotation_id is None else int(annotation_id),
                    )
                known.update({meta_name, ann_name})
            unknown = sorted(names - known)
            for name in unknown:
                warnings.append(f"ignored unknown archive member {name}")
        return store, warnings

    # -- single-file snapshot ----------------------------------------------

    def save(self, path: str | Path) -> None:
        """Single-file JSON snapshot of the full operational state."""
        with self._lock:
            payload = {
                "format_version": ARCHIVE_FORMAT_VERSION,
                "entries": [
                    {
                        "entry_id": e.entry_id,
                        "source_institution": e.metadata.source_institution,
                        "source_database_id": e.metadata.source_database_id,
                        "extra": e.metadata.extra,
                        "problem_flag": e.problem_flag,
                        "motion": serialize_motion_document(e.motion)
                        if e.motion is not None
                        else None,
                        "raw_c3d": base64.b64encode(e.raw_c3d).decode()
                        if e.raw_c3d is not None
                        else None,
                        "annotation_ids": list(e.annotation_ids),
                    }
                    for e in self._entries.values()
                ],
                "annotations": [
                    {
                        "annotation_id": r.annotation_id,
                        "entry_id": r.entry_id,
                        "annotator_id": r.annotator_id,
                        "text": r.text,
                        "created_at": r.created_at,
                        "perplexity": r.perplexity,
                    }
                    for r in self._annotations.values()
                ],
                "annotators": [
                    {
                        "annotator_id": s.annotator_id,
                        "display_name": s.display_name,
                        "annotation_count": s.annotation_count,
                        "first_annotation_at": s.first_annotation_at,
                    }
                    for s in self._annotators.values()
                ],
                "reports": [
                    {
                        "report_id": p.report_id,
                        "entry_id": p.entry_id,
                        "annotator_id": p.annotator_id,
                        "note": p.note,
                        "created_at": p.created_at,
                    }
                    for p in self._reports
                ],
            }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path, *, clock=time.time) -> "MotionStore":
        payload = json.loads(Path(path).read_text())
        store = cls(clock=clock)
        for e in payload.get("entries", []):
            entry = store.add_motion(
                motion=parse_motion_document(e["motion"]) if e.get("motion") else None,
                raw_c3d=base64.b64decode(e["raw_c3d"]) if e.get("raw_c3d") else None,
                source_institution=e.get("source_institution", ""),
                source_database_id=e.get("source_database_id", ""),
                entry_id=e["entry_id"],
            )
            entry.problem_flag = bool(e.get("problem_flag", False))
            if e.get("extra"):
                entry.metadata = MotionMetadata(
                    entry_id=entry.entry_id,
                    annotation_ids=(),
                    source_institution=entry.metadata.source_institution,
                    source_database_id=entry.metadata.source_database_id,
                    extra=e["extra"],
                )
        for s in payload.get("annotators", []):
            store._annotators[s["annotator_id"]] = _AnnotatorState(
                annotator_id=s["annotator_id"],
                display_name=s.get("display_name", s["annotator_id"]),
                annotation_count=0,
                first_annotation_at=s.get("first_annotation_at"),
            )
        for r in sorted(payload.get("annotations", []), key=lambda r: r["annotation_id"]):
            record = store.add_annotation(
                r["entry_id"],
                annotator_id=r.get("annotator_id"),
                text=r["text"],
                created_at=r.get("created_at"),
                annotation_id=r["annotation_id"],
            )
            record.perplexity = r.get("perplexity")
        for p in payload.get("reports", []):
            store._reports.append(
                ProblemReport(
                    report_id=p["report_id"],
                    entry_id=p["entry_id"],
                    annotator_id=p.get("annotator_id"),
                    note=p.get("note", ""),
                    created_at=p.get("created_at", 0.0),
                )
            )
        return store


def _write_member(archive: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_ARCHIVE_EPOCH)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    archive.writestr(info, data)


def _read_json(archive: zipfile.ZipFile, name: str):
    try:
        return json.loads(archive.read(name).decode())
    except json.JSONDecodeError as exc:
        raise DatasetArchiveError(f"{name}: malformed JSON ({exc})") from None
