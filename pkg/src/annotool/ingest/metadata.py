"""Per-entry metadata: dataset identifiers and source-database pointers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


class MetadataError(ValueError):
    pass


@dataclass(frozen=True)
class MotionMetadata:
    """Identifiers linking one dataset entry to the annotation tool and
    to the source motion database it was recorded in.

    ``extra`` preserves unknown top-level keys so newer metadata files
    survive a parse/serialize round trip.
    """

    entry_id: int | str
    annotation_ids: tuple[int | str, ...] = ()
    source_institution: str = ""
    source_database_id: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.entry_id in (None, ""):
            raise MetadataError("entry id must be nonempty")
        if len(set(self.annotation_ids)) != len(self.annotation_ids):
            raise MetadataError("annotation ids must be distinct")


def parse_metadata(text: str) -> MotionMetadata:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MetadataError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise MetadataError("metadata must be a JSON object")
    tool = data.get("motion_annotation_tool")
    if not isinstance(tool, dict) or "id" not in tool:
        raise MetadataError("missing motion_annotation_tool.id")
    source = data.get("source") or {}
    extra = {
        k: v for k, v in data.items() if k not in ("motion_annotation_tool", "source")
    }
    return MotionMetadata(
        entry_id=tool["id"],
        annotation_ids=tuple(tool.get("annotation_ids", ())),
        source_institution=str(source.get("institution", "")),
        source_database_id=str(source.get("id", "")),
        extra=extra,
    )


def serialize_metadata(meta: MotionMetadata) -> str:
    payload: dict[str, Any] = {
        "motion_annotation_tool": {
            "id": meta.entry_id,
            "annotation_ids": list(meta.annotation_ids),
        },
        "source": {
            "institution": meta.source_institution,
            "id": meta.source_database_id,
        },
    }
    payload.update(meta.extra)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
