"""Reader and writer for the C3D optical motion-capture container.

Covers the little-endian (Intel) subset used by the supported capture
setups: the 512-byte header block, the POINT parameter group (LABELS,
USED, FRAMES, RATE, SCALE, DATA_START), and the 3D point section in
either float or integer-scaled storage. Analog channels and event
sections are ignored. Files written by DEC or MIPS processors are
rejected explicitly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

BLOCK = 512
PROC_INTEL = 84
PROC_DEC = 85
PROC_MIPS = 86


class C3dError(ValueError):
    """Malformed or truncated C3D data."""


class UnsupportedC3dError(C3dError):
    """Structurally valid C3D written for an unsupported processor type."""


@dataclass
class C3dDocument:
    """Decoded point data: coordinates are millimeters, one row per frame.

    ``points`` has shape (frames, markers, 3) and ``residuals``
    (frames, markers); a negative residual marks an invalid point.
    """

    marker_labels: tuple[str, ...]
    sample_rate: float
    points: np.ndarray
    residuals: np.ndarray
    point_scale: float = -1.0

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=np.float32)
        self.residuals = np.asarray(self.residuals, dtype=np.float32)
        if self.points.ndim != 3 or self.points.shape[2] != 3:
            raise ValueError(f"points must have shape (frames, markers, 3), got {self.points.shape}")
        if self.points.shape[1] != len(self.marker_labels):
            raise ValueError(
                f"{len(self.marker_labels)} marker labels but frames carry "
                f"{self.points.shape[1]} points"
            )
        if self.residuals.shape != self.points.shape[:2]:
            raise ValueError("residuals must have shape (frames, markers)")
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")

    @property
    def frame_count(self) -> int:
        return self.points.shape[0]

    @property
    def valid_mask(self) -> np.ndarray:
        return self.residuals >= 0


def parse_c3d(data: bytes) -> C3dDocument:
    """Decode a little-endian C3D byte string into a document."""
    if len(data) < BLOCK:
        raise C3dError(f"file too short for a C3D header block ({len(data)} bytes)")
    param_block = data[0]
    if data[1] != 0x50:
        raise C3dError("missing C3D magic byte (0x50) in header")

    n_points, _n_analog, first_frame, last_frame = struct.unpack_from("<4h", data, 2)
    header_scale = struct.unpack_from("<f", data, 12)[0]
    data_block = struct.unpack_from("<h", data, 16)[0]
    header_rate = struct.unpack_from("<f", data, 20)[0]

    params_offset = (param_block - 1) * BLOCK
    if params_offset < 0 or params_offset + 4 > len(data):
        raise C3dError("parameter section pointer outside file")
    processor = data[params_offset + 3]
    if processor in (PROC_DEC, PROC_MIPS):
        name = "DEC" if processor == PROC_DEC else "MIPS"
        raise UnsupportedC3dError(
            f"{name} processor type ({processor}) is not supported; only "
            f"little-endian Intel ({PROC_INTEL}) files are handled"
        )
    if processor != PROC_INTEL:
        raise C3dError(f"unknown processor type byte {processor}")

    params = _parse_parameters(data, params_offset + 4)
    point = params.get("POINT", {})

    labels = _decode_labels(point.get("LABELS"))
    used = _decode_int(point.get("USED"), default=n_points)
    frames = _decode_int(point.get("FRAMES"), default=last_frame - first_frame + 1)
    rate = _decode_float(point.get("RATE"), default=header_rate)
    scale = _decode_float(point.get("SCALE"), default=header_scale)
    start_block = _decode_int(point.get("DATA_START"), default=data_block)

    if used != n_points or (labels and len(labels) != n_points):
        raise C3dError(
            f"point count mismatch: header {n_points}, POINT:USED {used}, "
            f"{len(labels)} labels"
        )
    if frames != last_frame - first_frame + 1:
        raise C3dError(
            f"frame count mismatch: header range gives {last_frame - first_frame + 1}, "
            f"POINT:FRAMES {frames}"
        )
    if rate <= 0:
        raise C3dError(f"non-positive sample rate {rate}")
    if not labels:
        labels = [f"M{i:03d}" for i in range(n_points)]

    offset = (start_block - 1) * BLOCK
    float_storage = scale < 0
    if float_storage:
        needed = frames * n_points * 16
        if offset < 0 or offset + needed > len(data):
            raise C3dError("point data section truncated")
        raw = np.frombuffer(data, dtype="<f4", count=frames * n_points * 4, offset=offset)
        raw = raw.reshape(frames, n_points, 4)
        points = raw[:, :, :3].astype(np.float32)
        residuals = raw[:, :, 3].astype(np.float32)
    else:
        needed = frames * n_points * 8
        if offset < 0 or offset + needed > len(data):
            raise C3dError("point data section truncated")
        raw = np.frombuffer(data, dtype="<i2", count=frames * n_points * 4, offset=offset)
        raw = raw.reshape(frames, n_points, 4)
        points = raw[:, :, :3].astype(np.float32) * np.float32(scale)
        residuals = raw[:, :, 3].astype(np.float32)

    return C3dDocument(
        marker_labels=tuple(labels),
        sample_rate=rate,
        points=points,
        residuals=residuals,
        point_scale=scale,
    )


def write_c3d(doc: C3dDocument) -> bytes:
    """Encode a document as little-endian C3D.

    Float storage (negative ``point_scale``) reproduces coordinates
    bit-exactly on re-parse; integer storage quantizes to the scale.
    """
    n_points = len(doc.marker_labels)
    frames = doc.frame_count
    float_storage = doc.point_scale < 0
    scale = float(doc.point_scale)

    label_len = max([len(l) for l in doc.marker_labels] + [4])
    label_data = b"".join(l.ljust(label_len).encode("ascii") for l in doc.marker_labels)

    records = bytearray()
    records += _group_record("POINT", 1)
    records += _param_record("USED", 1, 2, [], struct.pack("<h", n_points))
    records += _param_record("FRAMES", 1, 2, [], struct.pack("<h", frames))
    records += _param_record("RATE", 1, 4, [], struct.pack("<f", doc.sample_rate))
    records += _param_record("SCALE", 1, 4, [], struct.pack("<f", scale))
    # Payload position of DATA_START inside its record:
    # name_len(1) gid(1) name offset(2) elem(1) ndims(1) -> payload
    ds_payload_at = len(records) + 2 + len("DATA_START") + 2 + 1 + 1
    records += _param_record("DATA_START", 1, 2, [], struct.pack("<h", 0))
    records += _param_record("LABELS", 1, -1, [label_len, n_points], label_data)
    records += b"\x00\x00"  # terminator record

    param_payload = bytearray(b"\x01\x50" + bytes([0, PROC_INTEL]) + records)
    param_blocks = -(-len(param_payload) // BLOCK)
    param_payload[2] = param_blocks
    data_block = 2 + param_blocks
    struct.pack_into("<h", param_payload, 4 + ds_payload_at, data_block)
    param_payload += b"\x00" * (param_blocks * BLOCK - len(param_payload))

    header = bytearray(BLOCK)
    header[0] = 2  # parameter section starts at block 2
    header[1] = 0x50
    struct.pack_into("<4h", header, 2, n_points, 0, 1, frames)
    struct.pack_into("<f", header, 12, scale)
    struct.pack_into("<h", header, 16, data_block)
    struct.pack_into("<h", header, 18, 0)
    struct.pack_into("<f", header, 20, doc.sample_rate)

    if float_storage:
        body = np.empty((frames, n_points, 4), dtype="<f4")
        body[:, :, :3] = doc.points
        body[:, :, 3] = doc.residuals
        data_bytes = body.tobytes()
    else:
        body = np.empty((frames, n_points, 4), dtype="<i2")
        body[:, :, :3] = np.round(doc.points / np.float32(scale)).astype("<i2")
        body[:, :, 3] = np.round(doc.residuals).astype("<i2")
        data_bytes = body.tobytes()
    data_blocks = -(-len(data_bytes) // BLOCK) or 1
    data_bytes = data_bytes.ljust(data_blocks * BLOCK, b"\x00")

    return bytes(header) + bytes(param_payload) + data_bytes


def _group_record(name: str, group_id: int) -> bytes:
    encoded = name.encode("ascii")
    # offset field -> next record: 2 (offset) + 1 (description length)
    return (
        struct.pack("<bb", len(encoded), -group_id)
        + encoded
        + struct.pack("<h", 3)
        + b"\x00"
    )


def _param_record(
    name: str, group_id: int, elem_size: int, dims: list[int], payload: bytes
) -> bytes:
    encoded = name.encode("ascii")
    offset = 2 + 1 + 1 + len(dims) + len(payload) + 1
    return (
        struct.pack("<bb", len(encoded), group_id)
        + encoded
        + struct.pack("<h", offset)
        + struct.pack("<b", elem_size)
        + bytes([len(dims)])
        + bytes(dims)
        + payload
        + b"\x00"
    )


def _parse_parameters(data: bytes, pos: int) -> dict[str, dict[str, tuple]]:
    """Collect group/parameter records into {group: {param: (size, dims, raw)}}."""
    groups_by_id: dict[int, str] = {}
    params_by_gid: dict[int, dict[str, tuple]] = {}
    while True:
        if pos + 2 > len(data):
            raise C3dError("parameter section ran past end of file")
        name_len = struct.unpack_from("<b", data, pos)[0]
        group_id = struct.unpack_from("<b", data, pos + 1)[0]
        if name_len == 0:
            break
        name_len = abs(name_len)  # negative length flags a locked record
        name_end = pos + 2 + name_len
        if name_end + 2 > len(data):
            raise C3dError("parameter record truncated")
        name = data[pos + 2 : name_end].decode("ascii", errors="replace")
        offset = struct.unpack_from("<h", data, name_end)[0]
        if group_id < 0:
            desc_len = data[name_end + 2]
            if name_end + 3 + desc_len > len(data):
                raise C3dError(f"group {name!r} description truncated")
            groups_by_id[-group_id] = name
        else:
            cursor = name_end + 2
            if cursor + 2 > len(data):
                raise C3dError(f"parameter {name!r} truncated")
            elem_size = struct.unpack_from("<b", data, cursor)[0]
            n_dims = data[cursor + 1]
            cursor += 2
            if cursor + n_dims > len(data):
                raise C3dError(f"parameter {name!r} dimensions truncated")
            dims = list(data[cursor : cursor + n_dims])
            cursor += n_dims
            count = 1
            for d in dims:
                count *= d
            payload_len = abs(elem_size) * count
            if cursor + payload_len > len(data):
                raise C3dError(f"parameter {name!r} data truncated")
            payload = data[cursor : cursor + payload_len]
            params_by_gid.setdefault(group_id, {})[name] = (elem_size, dims, payload)
        if offset == 0:
            break
        pos = name_end + offset
    resolved: dict[str, dict[str, tuple]] = {}
    for gid, params in params_by_gid.items():
        resolved[groups_by_id.get(gid, f"GROUP{gid}")] = params
    return resolved


def _decode_labels(entry: tuple | None) -> list[str]:
    if entry is None:
        return []
    elem_size, dims, payload = entry
    if elem_size != -1 or len(dims) != 2:
        raise C3dError("POINT:LABELS must be a 2-D character array")
    width, count = dims
    return [
        payload[i * width : (i + 1) * width].decode("ascii", errors="replace").strip()
        for i in range(count)
    ]


def _decode_int(entry: tuple | None, default: int) -> int:
    if entry is None:
        return default
    elem_size, _dims, payload = entry
    if elem_size == 2:
        return struct.unpack_from("<h", payload, 0)[0]
    if elem_size == 1:
        return struct.unpack_from("<b", payload, 0)[0]
    raise C3dError(f"expected integer parameter, got element size {elem_size}")


def _decode_float(entry: tuple | None, default: float) -> float:
    if entry is None:
        return default
    elem_size, _dims, payload = entry
    if elem_size == 4:
        return struct.unpack_from("<f", payload, 0)[0]
    if elem_size == 2:
        return float(struct.unpack_from("<h", payload, 0)[0])
    raise C3dError(f"expected float parameter, got element size {elem_size}")
