"""Unified joint-trajectory motion documents (XML) and playback preparation.

A motion document stores a recording as joint-angle trajectories on a
reference body, independent of the capture setup: a model name, the
ordered degree-of-freedom names (six root-pose values plus one value
per body joint), and per-frame timestamps, root pose, and joint values.
Units are meters, radians, and seconds.

The XML grammar accepted here is the minimal subset documented in
docs/motion_document_format.md; unknown child elements are ignored so
richer exports from upstream tooling still parse.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from xml.etree.ElementTree import ParseError

ROOT_DOF_NAMES = (
    "root_tx",
    "root_ty",
    "root_tz",
    "root_rx",
    "root_ry",
    "root_rz",
)

# Canonical 44-DoF body layout used by the standard corpus: three spine
# segments plus neck and head, two 9-DoF arms, two 7-DoF legs.
STANDARD_BODY_JOINTS = tuple(
    f"{segment}_{axis}"
    for segment, axes in (
        ("lower_spine", "xyz"),
        ("upper_spine", "xyz"),
        ("neck", "xyz"),
        ("head", "xyz"),
        ("left_clavicle", "xy"),
        ("left_shoulder", "xyz"),
        ("left_elbow", "xy"),
        ("left_wrist", "xy"),
        ("right_clavicle", "xy"),
        ("right_shoulder", "xyz"),
        ("right_elbow", "xy"),
        ("right_wrist", "xy"),
        ("left_hip", "xyz"),
        ("left_knee", "x"),
        ("left_ankle", "xy"),
        ("left_toe", "x"),
        ("right_hip", "xyz"),
        ("right_knee", "x"),
        ("right_ankle", "xy"),
        ("right_toe", "x"),
    )
    for axis in axes
)


def standard_dof_names() -> tuple[str, ...]:
    return ROOT_DOF_NAMES + STANDARD_BODY_JOINTS


class MotionDocumentError(ValueError):
    """Schema or consistency violation, carrying the offending element path."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class MotionFrame:
    timestamp: float
    root_position: tuple[float, float, float]
    root_rotation: tuple[float, float, float]
    joint_values: tuple[float, ...]


@dataclass(frozen=True)
class MotionDocument:
    model_name: str
    dof_names: tuple[str, ...]
    frames: tuple[MotionFrame, ...]

    def __post_init__(self) -> None:
        if len(self.dof_names) < 7:
            raise MotionDocumentError(
                f"need the 6 root DoF plus at least one joint, got {len(self.dof_names)}"
            )
        if not self.frames:
            raise MotionDocumentError("motion has no frames")
        expected = len(self.dof_names) - len(ROOT_DOF_NAMES)
        previous = None
        for i, frame in enumerate(self.frames):
            if len(frame.joint_values) != expected:
                raise MotionDocumentError(
                    f"frame {i} has {len(frame.joint_values)} joint values, expected {expected}"
                )
            if previous is not None and frame.timestamp <= previous:
                raise MotionDocumentError(
                    f"frame {i} timestamp {frame.timestamp} not after {previous}"
                )
            previous = frame.timestamp

    @property
    def body_joint_names(self) -> tuple[str, ...]:
        return self.dof_names[len(ROOT_DOF_NAMES) :]

    @property
    def duration(self) -> float:
        return self.frames[-1].timestamp - self.frames[0].timestamp

    @property
    def frame_count(self) -> int:
        return len(self.frames)


def parse_motion_document(text: str) -> MotionDocument:
    """Parse the XML subset into a validated MotionDocument."""
    try:
        root = ET.fromstring(text)
    except ParseError as exc:
        raise MotionDocumentError(f"not well-formed XML: {exc}") from None
    if root.tag != "MMM":
        raise MotionDocumentError(f"unexpected root element <{root.tag}>", path="/")
    motion = root.find("Motion")
    if motion is None:
        raise MotionDocumentError("missing <Motion> element", path="MMM")
    model_name = motion.get("name", "")

    joint_order = motion.find("JointOrder")
    if joint_order is None:
        raise MotionDocumentError("missing <JointOrder>", path="MMM/Motion")
    joints = []
    for i, joint in enumerate(joint_order.findall("Joint")):
        name = joint.get("name")
        if not name:
            raise MotionDocumentError(
                "joint without name attribute", path=f"MMM/Motion/JointOrder/Joint[{i}]"
            )
        joints.append(name)
    if not joints:
        raise MotionDocumentError("no joints declared", path="MMM/Motion/JointOrder")

    frames_el = motion.find("MotionFrames")
    if frames_el is None:
        raise MotionDocumentError("missing <MotionFrames>", path="MMM/Motion")
    frames = []
    for i, frame_el in enumerate(frames_el.findall("MotionFrame")):
        path = f"MMM/Motion/MotionFrames/MotionFrame[{i}]"
        timestamp = _floats_from(frame_el, "Timestep", 1, path)[0]
        position = _floats_from(frame_el, "RootPosition", 3, path)
        rotation = _floats_from(frame_el, "RootRotation", 3, path)
        values = _floats_from(frame_el, "JointPosition", len(joints), path)
        frames.append(
            MotionFrame(
                timestamp=timestamp,
                root_position=(position[0], position[1], position[2]),
                root_rotation=(rotation[0], rotation[1], rotation[2]),
                joint_values=tuple(values),
            )
        )
    if not frames:
        raise MotionDocumentError(
            "zero-length motion", path="MMM/Motion/MotionFrames"
        )
    return MotionDocument(
        model_name=model_name,
        dof_names=ROOT_DOF_NAMES + tuple(joints),
        frames=tuple(frames),
    )


def serialize_motion_document(doc: MotionDocument) -> str:
    """Emit the XML subset; floats use repr so parsing round-trips exactly."""
    lines = ['<?xml version="1.0"?>', "<MMM>", f'  <Motion name="{doc.model_name}">']
    lines.append("    <JointOrder>")
    for name in doc.body_joint_names:
        lines.append(f'      <Joint name="{name}"/>')
    lines.append("    </JointOrder>")
    lines.append("    <MotionFrames>")
    for frame in doc.frames:
        lines.append("      <MotionFrame>")
        lines.append(f"        <Timestep>{frame.timestamp!r}</Timestep>")
        lines.append(
            "        <RootPosition>"
            + " ".join(repr(v) for v in frame.root_position)
            + "</RootPosition>"
        )
        lines.append(
            "        <RootRotation>"
            + " ".join(repr(v) for v in frame.root_rotation)
            + "</RootRotation>"
        )
        lines.append(
            "        <JointPosition>"
            + " ".join(repr(v) for v in frame.joint_values)
            + "</JointPosition>"
        )
        lines.append("      </MotionFrame>")
    lines.append("    </MotionFrames>")
    lines.append("  </Motion>")
    lines.append("</MMM>")
    return "\n".join(lines) + "\n"


def playback_frames(doc: MotionDocument, target_fps: float = 25.0) -> tuple[MotionFrame, ...]:
    """Downsample to roughly ``target_fps`` for browser playback.

    Picks the source frame nearest each point of a uniform time grid;
    the first and last frames are always kept and timestamps are
    rebased to start at zero. Asking for at least the source rate
    returns every frame.
    """
    if target_fps <= 0:
        raise ValueError(f"target fps must be positive, got {target_fps}")
    t0 = doc.frames[0].timestamp
    duration = doc.duration
    if len(doc.frames) == 1 or duration == 0:
        frame = doc.frames[0]
        return (_rebased(frame, t0),)
    source_rate = (len(doc.frames) - 1) / duration
    if target_fps >= source_rate:
        return tuple(_rebased(f, t0) for f in doc.frames)

    times = [f.timestamp - t0 for f in doc.frames]
    indices = {0, len(doc.frames) - 1}
    steps = int(duration * target_fps)
    cursor = 0
    for k in range(1, steps + 1):
        target = k / target_fps
        while cursor + 1 < len(times) and abs(times[cursor + 1] - target) <= abs(
            times[cursor] - target
        ):
            cursor += 1
        indices.add(cursor)
    return tuple(_rebased(doc.frames[i], t0) for i in sorted(indices))


def _rebased(frame: MotionFrame, t0: float) -> MotionFrame:
    if t0 == 0:
        return frame
    return MotionFrame(
        timestamp=frame.timestamp - t0,
        root_position=frame.root_position,
        root_rotation=frame.root_rotation,
        joint_values=frame.joint_values,
    )


def _floats_from(parent, tag: str, expected: int, path: str) -> list[float]:
    element = parent.find(tag)
    if element is None:
        raise MotionDocumentError(f"missing <{tag}>", path=path)
    raw = (element.text or "").split()
    try:
        values = [float(v) for v in raw]
    except ValueError:
        raise MotionDocumentError(f"non-numeric value in <{tag}>", path=f"{path}/{tag}") from None
    if len(values) != expected:
        raise MotionDocumentError(
            f"<{tag}> holds {len(values)} values, expected {expected}",
            path=f"{path}/{tag}",
        )
    return values
