import type { MotionFrame } from "./types.js";

export interface OrbitCamera {
  azimuth: number; // radians around the vertical axis
  elevation: number; // radians above the ground plane
  distance: number; // meters from the orbit target, > 0
}

const MIN_DISTANCE = 0.25;
const MAX_ELEVATION = Math.PI / 2 - 0.05;

/** Playback cursor plus orbit camera for one loaded motion. */
export class PlaybackState {
  playing = false;
  cursor = 0; // seconds, always within [0, duration]
  camera: OrbitCamera = { azimuth: 0.7, elevation: 0.35, distance: 3.5 };

  constructor(readonly frames: MotionFrame[]) {
    if (frames.length === 0) {
      throw new Error("a motion needs at least one frame");
    }
  }

  get duration(): number {
    return this.frames[this.frames.length - 1].t;
  }

  /** Index of the frame whose timestamp is nearest to `time`. */
  frameIndexAt(time: number): number {
    const t = this.clampTime(time);
    let lo = 0;
    let hi = this.frames.length - 1;
    while (hi - lo > 1) {
      const mid = (lo + hi) >> 1;
      if (this.frames[mid].t <= t) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return t - this.frames[lo].t <= this.frames[hi].t - t ? lo : hi;
  }

  currentFrame(): MotionFrame {
    return this.frames[this.frameIndexAt(this.cursor)];
  }

  seek(time: number): void {
    this.cursor = this.clampTime(time);
  }

  /** Advance the cursor while playing; wraps around at the end. */
  tick(dtSeconds: number): void {
    if (!this.playing || this.duration === 0) {
      return;
    }
    let next = this.cursor + dtSeconds;
    if (next > this.duration) {
      next = 0;
    }
    this.cursor = next;
  }

  orbit(dAzimuth: number, dElevation: number): void {
    this.camera.azimuth += dAzimuth;
    this.camera.elevation = clamp(
      this.camera.elevation + dElevation,
      -MAX_ELEVATION,
      MAX_ELEVATION,
    );
  }

  zoom(factor: number): void {
    this.camera.distance = Math.max(MIN_DISTANCE, this.camera.distance * factor);
  }

  private clampTime(time: number): number {
    return clamp(time, 0, this.duration);
  }
}

export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}
