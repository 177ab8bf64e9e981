"""Parsers for raw capture files, motion documents, and entry metadata."""

from .c3d import C3dDocument, C3dError, UnsupportedC3dError, parse_c3d, write_c3d
from .metadata import MetadataError, MotionMetadata, parse_metadata, serialize_metadata
from .motion_xml import (
    ROOT_DOF_NAMES,
    STANDARD_BODY_JOINTS,
    MotionDocument,
    MotionDocumentError,
    MotionFrame,
    parse_motion_document,
    playback_frames,
    serialize_motion_document,
    standard_dof_names,
)

__all__ = [
    "C3dDocument",
    "C3dError",
    "UnsupportedC3dError",
    "parse_c3d",
    "write_c3d",
    "MetadataError",
    "MotionMetadata",
    "parse_metadata",
    "serialize_metadata",
    "ROOT_DOF_NAMES",
    "STANDARD_BODY_JOINTS",
    "MotionDocument",
    "MotionDocumentError",
    "MotionFrame",
    "parse_motion_document",
    "playback_frames",
    "serialize_motion_document",
    "standard_dof_names",
]
