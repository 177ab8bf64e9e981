// Stick-figure pose reconstruction for the 50-DoF motion document:
// a fixed kinematic chain over the 44 body joints, matching the layout
// documented in docs/motion_document_format.md. Segment lengths are a
// generic adult body; the result is a recognizable figure, not a
// biomechanical reconstruction.

import type { MotionFrame } from "./types.js";
import type { OrbitCamera } from "./playback.js";

export type Vec3 = [number, number, number];

interface Bone {
  name: string;
  parent: string | null;
  // Rest-pose offset from the parent joint, meters (x right, y forward, z up).
  offset: Vec3;
  // Degree-of-freedom prefix controlling this bone ("left_knee" reads
  // left_knee_x/y/z when present); null for rigid attachments.
  dof: string | null;
}

const BONES: Bone[] = [
  { name: "pelvis", parent: null, offset: [0, 0, 0], dof: null },
  { name: "lower_spine", parent: "pelvis", offset: [0, 0, 0.12], dof: "lower_spine" },
  { name: "upper_spine", parent: "lower_spine", offset: [0, 0, 0.16], dof: "upper_spine" },
  { name: "neck", parent: "upper_spine", offset: [0, 0, 0.14], dof: "neck" },
  { name: "head", parent: "neck", offset: [0, 0, 0.12], dof: "head" },

  { name: "left_clavicle", parent: "upper_spine", offset: [-0.09, 0, 0.12], dof: "left_clavicle" },
  { name: "left_shoulder", parent: "left_clavicle", offset: [-0.11, 0, 0], dof: "left_shoulder" },
  { name: "left_elbow", parent: "left_shoulder", offset: [-0.02, 0, -0.28], dof: "left_elbow" },
  { name: "left_wrist", parent: "left_elbow", offset: [0, 0, -0.25], dof: "left_wrist" },
  { name: "left_hand", parent: "left_wrist", offset: [0, 0, -0.09], dof: null },

  { name: "right_clavicle", parent: "upper_spine", offset: [0.09, 0, 0.12], dof: "right_clavicle" },
  { name: "right_shoulder", parent: "right_clavicle", offset: [0.11, 0, 0], dof: "right_shoulder" },
  { name: "right_elbow", parent: "right_shoulder", offset: [0.02, 0, -0.28], dof: "right_elbow" },
  { name: "right_wrist", parent: "right_elbow", offset: [0, 0, -0.25], dof: "right_wrist" },
  { name: "right_hand", parent: "right_wrist", offset: [0, 0, -0.09], dof: null },

  { name: "left_hip", parent: "pelvis", offset: [-0.09, 0, -0.02], dof: "left_hip" },
  { name: "left_knee", parent: "left_hip", offset: [0, 0, -0.42], dof: "left_knee" },
  { name: "left_ankle", parent: "left_knee", offset: [0, 0, -0.42], dof: "left_ankle" },
  { name: "left_toe", parent: "left_ankle", offset: [0, 0.14, -0.05], dof: "left_toe" },

  { name: "right_hip", parent: "pelvis", offset: [0.09, 0, -0.02], dof: "right_hip" },
  { name: "right_knee", parent: "right_hip", offset: [0, 0, -0.42], dof: "right_knee" },
  { name: "right_ankle", parent: "right_knee", offset: [0, 0, -0.42], dof: "right_ankle" },
  { name: "right_toe", parent: "right_ankle", offset: [0, 0.14, -0.05], dof: "right_toe" },
];

/** Bone pairs to draw as line segments. */
export const SEGMENTS: Array<[string, string]> = BONES.filter(
  (b) => b.parent !== null,
).map((b) => [b.parent as string, b.name]);

type Mat3 = [number, number, number, number, number, number, number, number, number];

const IDENTITY: Mat3 = [1, 0, 0, 0, 1, 0, 0, 0, 1];

function rotationXYZ(rx: number, ry: number, rz: number): Mat3 {
  const cx = Math.cos(rx), sx = Math.sin(rx);
  const cy = Math.cos(ry), sy = Math.sin(ry);
  const cz = Math.cos(rz), sz = Math.sin(rz);
  // Rz * Ry * Rx
  return [
    cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx,
    sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
    -sy, cy * sx, cy * cx,
  ];
}

function matMul(a: Mat3, b: Mat3): Mat3 {
  const out = new Array(9) as Mat3;
  for (let r = 0; r < 3; r++) {
    for (let c = 0; c < 3; c++) {
      out[3 * r + c] =
        a[3 * r] * b[c] + a[3 * r + 1] * b[3 + c] + a[3 * r + 2] * b[6 + c];
    }
  }
  return out;
}

function apply(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
    m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
    m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
  ];
}

function boneRotation(bone: Bone, dofValue: (name: string) => number): Mat3 {
  if (!bone.dof) {
    return IDENTITY;
  }
  return rotationXYZ(
    dofValue(`${bone.dof}_x`),
    dofValue(`${bone.dof}_y`),
    dofValue(`${bone.dof}_z`),
  );
}

/** World-space joint positions for one frame of a motion document. */
export function jointPositions(
  frame: MotionFrame,
  dofNames: string[],
): Map<string, Vec3> {
  const bodyNames = dofNames.slice(6);
  const valueByName = new Map<string, number>();
  bodyNames.forEach((name, i) => valueByName.set(name, frame.joint_values[i] ?? 0));
  const dofValue = (name: string) => valueByName.get(name) ?? 0;

  const rootRotation = rotationXYZ(...frame.root_rotation);
  const positions = new Map<string, Vec3>();
  const rotations = new Map<string, Mat3>();

  for (const bone of BONES) {
    if (bone.parent === null) {
      positions.set(bone.name, frame.root_position);
      rotations.set(bone.name, rootRotation);
      continue;
    }
    const parentPos = positions.get(bone.parent)!;
    const parentRot = rotations.get(bone.parent)!;
    const rot = matMul(parentRot, boneRotation(bone, dofValue));
    const offsetWorld = apply(parentRot, bone.offset);
    positions.set(bone.name, [
      parentPos[0] + offsetWorld[0],
      parentPos[1] + offsetWorld[1],
      parentPos[2] + offsetWorld[2],
    ]);
    rotations.set(bone.name, rot);
  }
  return positions;
}

export interface Projected {
  x: number;
  y: number;
}

/** Orthographic orbit projection onto the canvas. */
export function project(
  point: Vec3,
  camera: OrbitCamera,
  target: Vec3,
  width: number,
  height: number,
): Projected {
  const ca = Math.cos(camera.azimuth), sa = Math.sin(camera.azimuth);
  const ce = Math.cos(camera.elevation), se = Math.sin(camera.elevation);
  const dx = point[0] - target[0];
  const dy = point[1] - target[1];
  const dz = point[2] - target[2];
  // Rotate into camera space: azimuth around z, then elevation.
  const rx = ca * dx + sa * dy;
  const ry = -sa * dx + ca * dy;
  const upComponent = ce * dz - se * ry;
  const scale = Math.min(width, height) / (camera.distance * 1.2);
  return {
    x: width / 2 + rx * scale,
    y: height / 2 - upComponent * scale,
  };
}

/** Draw one frame as a stick figure; a null context is a no-op. */
export function renderSkeleton(
  ctx: CanvasRenderingContext2D | null,
  frame: MotionFrame,
  dofNames: string[],
  camera: OrbitCamera,
  width: number,
  height: number,
): void {
  if (!ctx) {
    return;
  }
  const positions = jointPositions(frame, dofNames);
  const target: Vec3 = [
    frame.root_position[0],
    frame.root_position[1],
    frame.root_position[2] * 0.6,
  ];
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#d8e6ff";
  ctx.lineWidth = 3;
  ctx.lineCap = "round";
  for (const [from, to] of SEGMENTS) {
    const a = project(positions.get(from)!, camera, target, width, height);
    const b = project(positions.get(to)!, camera, target, width, height);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
  ctx.fillStyle = "#6ea8ff";
  for (const position of positions.values()) {
    const p = project(position, camera, target, width, height);
    ctx.beginPath();
    ctx.arc(p.x, p.y, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
}
