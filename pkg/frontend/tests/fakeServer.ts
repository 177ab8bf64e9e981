// In-memory stand-in for the annotation service, mounted as a fetch
// function. Mirrors the wire contract the real API serves.

import type { MotionFrame, ProgressInfo } from "../src/types.js";

interface Submission {
  entry_id: number;
  text: string;
}

export class FakeServer {
  motionIds: number[];
  counts = new Map<number, number>();
  flagged = new Set<number>();
  skipsByToken = new Map<string, Set<number>>();
  submissions: Submission[] = [];
  reports: Array<{ entry_id: number; note: string }> = [];
  annotatorCount = 0;
  failNextRequest = false;
  minWords = 4;
  frameCount = 11;
  frameDt = 0.1;
  leaderboardRows = [
    { rank: 1, annotator_id: "bo", display_name: "Bo", annotation_count: 12, level_title: "Research Assistant" },
    { rank: 2, annotator_id: "alice", display_name: "Alice", annotation_count: 5, level_title: "Novice" },
    { rank: 3, annotator_id: "chris", display_name: "Chris", annotation_count: 5, level_title: "Novice" },
  ];

  constructor(motionIds: number[] = [1, 2, 3]) {
    this.motionIds = [...motionIds];
  }

  fetch = (input: string, init?: RequestInit): Promise<Response> => {
    if (this.failNextRequest) {
      this.failNextRequest = false;
      return Promise.reject(new Error("network unreachable"));
    }
    return Promise.resolve(this.route(input, init));
  };

  private route(input: string, init?: RequestInit): Response {
    const method = init?.method ?? "GET";
    const url = new URL(input, "http://test.local");
    const path = url.pathname;
    const token = this.tokenFrom(init);
    const body = init?.body ? JSON.parse(String(init.body)) : {};

    if (method === "POST" && path === "/api/sessions") {
      const annotatorId = body.annotator_id ?? `anon-${this.skipsByToken.size}`;
      const tok = `tok-${this.skipsByToken.size}`;
      this.skipsByToken.set(tok, new Set());
      return json(201, { token: tok, annotator_id: annotatorId, expires_at: 9e12 });
    }
    if (method === "GET" && path === "/api/next-motion") {
      const skips = this.skipsByToken.get(token) ?? new Set();
      const eligible = this.motionIds.filter((m) => !this.flagged.has(m));
      if (eligible.length === 0) {
        return json(503, { detail: "no motion available" });
      }
      let pool = eligible.filter((m) => !skips.has(m));
      if (pool.length === 0) {
        pool = eligible;
      }
      // lowest annotation count first, then id: mirrors the bootstrap rule
      pool.sort(
        (a, b) => (this.counts.get(a) ?? 0) - (this.counts.get(b) ?? 0) || a - b,
      );
      const entryId = pool[0];
      return json(200, {
        entry_id: entryId,
        strategy: "fewest-uniform",
        annotation_count: this.counts.get(entryId) ?? 0,
        playback: {
          frames_url: `/api/motions/${entryId}/frames`,
          default_fps: 25,
          has_motion: true,
          duration_secs: (this.frameCount - 1) * this.frameDt,
        },
        progress: this.progress(),
      });
    }
    if (method === "POST" && path === "/api/annotations") {
      const words = String(body.text ?? "").trim().split(/\s+/).filter(Boolean);
      if (words.length < this.minWords) {
        return json(422, {
          reason: "too-few-words",
          message: `${words.length} words; at least ${this.minWords} required`,
        });
      }
      this.submissions.push({ entry_id: body.entry_id, text: body.text });
      this.counts.set(body.entry_id, (this.counts.get(body.entry_id) ?? 0) + 1);
      this.annotatorCount += 1;
      return json(201, {
        annotation_id: this.submissions.length,
        entry_id: body.entry_id,
        entry_annotation_count: this.counts.get(body.entry_id),
        progress: this.progress(),
      });
    }
    if (method === "POST" && path === "/api/skip") {
      this.skipsByToken.get(token)?.add(body.entry_id);
      return new Response(null, { status: 204 });
    }
    if (method === "POST" && path === "/api/report") {
      this.flagged.add(body.entry_id);
      this.reports.push({ entry_id: body.entry_id, note: body.note ?? "" });
      return json(201, { report_id: this.reports.length, entry_id: body.entry_id });
    }
    const framesMatch = path.match(/^\/api\/motions\/(\d+)\/frames$/);
    if (method === "GET" && framesMatch) {
      const entryId = Number(framesMatch[1]);
      return json(200, {
        entry_id: entryId,
        fps: Number(url.searchParams.get("fps") ?? 25),
        dof_names: DOF_NAMES,
        frames: this.frames(),
      });
    }
    if (method === "GET" && path === "/api/leaderboard") {
      return json(200, { leaderboard: this.leaderboardRows });
    }
    return json(404, { detail: `no route ${method} ${path}` });
  }

  private frames(): MotionFrame[] {
    const frames: MotionFrame[] = [];
    for (let i = 0; i < this.frameCount; i++) {
      frames.push({
        t: Number((i * this.frameDt).toFixed(6)),
        root_position: [0.01 * i, 0, 0.9],
        root_rotation: [0, 0, 0],
        joint_values: new Array(44).fill(0).map((_, j) => 0.05 * Math.sin(i + j)),
      });
    }
    return frames;
  }

  private progress(): ProgressInfo {
    return {
      annotator_id: "alice",
      annotation_count: this.annotatorCount,
      level_title: this.annotatorCount >= 10 ? "Research Assistant" : "Novice",
      level_index: this.annotatorCount >= 10 ? 1 : 0,
      progress_to_next: Math.min(this.annotatorCount / 10, 1),
    };
  }

  private tokenFrom(init?: RequestInit): string {
    const headers = (init?.headers ?? {}) as Record<string, string>;
    const auth = headers["Authorization"] ?? "";
    return auth.replace("Bearer ", "");
  }
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

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
