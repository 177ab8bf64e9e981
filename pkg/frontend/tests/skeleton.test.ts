import { describe, expect, it } from "vitest";

import { SEGMENTS, jointPositions, project } from "../src/skeleton.js";
import type { MotionFrame } from "../src/types.js";

const DOF_NAMES = [
  "root_tx", "root_ty", "root_tz", "root_rx", "root_ry", "root_rz",
  ...[
    ["lower_spine", "xyz"], ["upper_spine", "xyz"], ["neck", "xyz"], ["head", "xyz"],
    ["left_clavicle", "xy"], ["left_shoulder", "xyz"], ["left_elbow", "xy"], ["left_wrist", "xy"],
    ["right_clavicle", "xy"], ["right_shoulder", "xyz"], ["right_elbow", "xy"], ["right_wrist", "xy"],
    ["left_hip", "xyz"], ["left_knee", "x"], ["left_ankle", "xy"], ["left_toe", "x"],
    ["right_hip", "xyz"], ["right_knee", "x"], ["right_ankle", "xy"], ["right_toe", "x"],
  ].flatMap(([segment, axes]) => [...axes].map((axis) => `${segment}_${axis}`)),
];

function restFrame(): MotionFrame {
  return {
    t: 0,
    root_position: [0.5, -0.25, 0.9],
    root_rotation: [0, 0, 0],
    joint_values: new Array(44).fill(0),
  };
}

describe("skeleton reconstruction", () => {
  it("uses the 50-DoF layout", () => {
    expect(DOF_NAMES).toHaveLength(50);
  });

  it("places a plausible rest pose around the root", () => {
    const positions = jointPositions(restFrame(), DOF_NAMES);
    const pelvis = positions.get("pelvis")!;
    expect(pelvis).toEqual([0.5, -0.25, 0.9]);
    expect(positions.get("head")![2]).toBeGreaterThan(pelvis[2]);
    expect(positions.get("left_ankle")![2]).toBeLessThan(pelvis[2]);
    expect(positions.get("left_wrist")![0]).toBeLessThan(pelvis[0]);
    expect(positions.get("right_wrist")![0]).toBeGreaterThan(pelvis[0]);
  });

  it("moves joints when their angles change", () => {
    const rest = jointPositions(restFrame(), DOF_NAMES);
    const bent = restFrame();
    bent.joint_values[DOF_NAMES.indexOf("left_knee_x") - 6] = 1.2;
    const posed = jointPositions(bent, DOF_NAMES);
    expect(posed.get("left_ankle")).not.toEqual(rest.get("left_ankle"));
    expect(posed.get("right_ankle")).toEqual(rest.get("right_ankle"));
  });

  it("connects every drawn segment to known bones", () => {
    const positions = jointPositions(restFrame(), DOF_NAMES);
    for (const [from, to] of SEGMENTS) {
      expect(positions.has(from)).toBe(true);
      expect(positions.has(to)).toBe(true);
    }
  });

  it("projects the orbit target to the canvas center", () => {
    const camera = { azimuth: 0.8, elevation: 0.3, distance: 3 };
    const target: [number, number, number] = [1, 2, 0.5];
    const center = project(target, camera, target, 640, 480);
    expect(center.x).toBeCloseTo(320);
    expect(center.y).toBeCloseTo(240);
  });
});
