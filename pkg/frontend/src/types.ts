// Payload shapes of the annotation service HTTP API.

export interface ProgressInfo {
  annotator_id: string;
  annotation_count: number;
  level_title: string;
  level_index: number;
  progress_to_next: number;
}

export interface PlaybackInfo {
  frames_url: string;
  default_fps: number;
  has_motion: boolean;
  duration_secs: number;
}

export interface NextMotion {
  entry_id: number;
  strategy: string;
  annotation_count: number;
  playback: PlaybackInfo;
  progress: ProgressInfo;
}

export interface MotionFrame {
  t: number;
  root_position: [number, number, number];
  root_rotation: [number, number, number];
  joint_values: number[];
}

export interface FramesPayload {
  entry_id: number;
  fps: number;
  dof_names: string[];
  frames: MotionFrame[];
}

export interface SubmitAccepted {
  annotation_id: number;
  entry_id: number;
  entry_annotation_count: number;
  progress: ProgressInfo;
}

export interface SubmitRejected {
  reason: string;
  message: string;
}

export type SubmitOutcome =
  | { kind: "accepted"; result: SubmitAccepted }
  | { kind: "rejected"; rejection: SubmitRejected };

export interface LeaderboardRow {
  rank: number;
  annotator_id: string;
  display_name: string;
  annotation_count: number;
  level_title: string;
}

export interface SessionInfo {
  token: string;
  annotator_id: string;
  expires_at: number;
}
