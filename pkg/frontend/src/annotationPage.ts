import { ApiClient } from "./api.js";
import { PlaybackState } from "./playback.js";
import { renderSkeleton } from "./skeleton.js";
import type { NextMotion } from "./types.js";

const SCRUBBER_STEPS = 1000;

const EXAMPLE_HINTS = [
  "A person walks four steps forward and stops.",
  "Someone picks up a box with both hands and puts it back down.",
];

export interface AnnotationPage {
  root: HTMLElement;
  /** Fetch and display the next motion; shows the retry banner on failure. */
  loadNext(): Promise<void>;
  submit(): Promise<void>;
  skip(): Promise<void>;
  report(): Promise<void>;
  currentEntryId(): number | null;
  playback: PlaybackState | null;
}

export function createAnnotationPage(
  container: HTMLElement,
  api: ApiClient,
): AnnotationPage {
  container.innerHTML = `
    <div class="annotation-page">
      <div class="banner hidden" role="alert">
        <span class="banner-text"></span>
        <button class="retry" type="button">Retry</button>
      </div>
      <div class="progress-box">
        <span class="level-title"></span>
        <div class="progress-bar"><div class="progress-fill" style="width: 0%"></div></div>
        <span class="progress-label"></span>
      </div>
      <canvas class="viewer" width="640" height="480"></canvas>
      <div class="playback-controls">
        <button class="play-toggle" type="button">Play</button>
        <input class="scrubber" type="range" min="0" max="${SCRUBBER_STEPS}" value="0" step="1" />
      </div>
      <p class="hint">Describe the motion in one complete English sentence, for example:
        <em class="hint-example">${EXAMPLE_HINTS[0]}</em></p>
      <textarea class="annotation-input" rows="2"
        placeholder="What is the person doing?"></textarea>
      <div class="feedback hidden" role="status"></div>
      <div class="action-buttons">
        <button class="submit" type="button">Submit</button>
        <button class="skip" type="button">Skip</button>
        <button class="report" type="button">Report a problem</button>
      </div>
    </div>`;

  const el = <T extends HTMLElement>(selector: string): T => {
    const found = container.querySelector<T>(selector);
    if (!found) {
      throw new Error(`missing element ${selector}`);
    }
    return found;
  };

  const banner = el<HTMLDivElement>(".banner");
  const bannerText = el<HTMLSpanElement>(".banner-text");
  const retryButton = el<HTMLButtonElement>(".retry");
  const levelTitle = el<HTMLSpanElement>(".level-title");
  const progressFill = el<HTMLDivElement>(".progress-fill");
  const progressLabel = el<HTMLSpanElement>(".progress-label");
  const canvas = el<HTMLCanvasElement>(".viewer");
  const playToggle = el<HTMLButtonElement>(".play-toggle");
  const scrubber = el<HTMLInputElement>(".scrubber");
  const input = el<HTMLTextAreaElement>(".annotation-input");
  const feedback = el<HTMLDivElement>(".feedback");

  let current: NextMotion | null = null;
  let playback: PlaybackState | null = null;
  let dofNames: string[] = [];
  let animationHandle: number | null = null;
  let lastTimestamp = 0;

  const page: AnnotationPage = {
    root: container,
    playback: null,

    async loadNext() {
      hide(banner);
      hide(feedback);
      stopPlaying();
      try {
        current = await api.nextMotion();
      } catch (error) {
        current = null;
        bannerText.textContent = `Could not reach the annotation service (${describe(error)}).`;
        show(banner);
        return;
      }
      container
        .querySelector(".annotation-page")!
        .setAttribute("data-entry-id", String(current.entry_id));
      showProgress(current.progress);
      playback = null;
      page.playback = null;
      if (current.playback.has_motion) {
        try {
          const frames = await api.frames(current.playback.frames_url);
          playback = new PlaybackState(frames.frames);
          dofNames = frames.dof_names;
          page.playback = playback;
        } catch (error) {
          bannerText.textContent = `Could not load playback frames (${describe(error)}).`;
          show(banner);
        }
      }
      scrubber.value = "0";
      draw();
    },

    async submit() {
      if (!current) {
        return;
      }
      const text = input.value.trim();
      const outcome = await api.submitAnnotation(current.entry_id, text);
      if (outcome.kind === "rejected") {
        feedback.textContent = `Not saved (${outcome.rejection.reason}): ${outcome.rejection.message}`;
        feedback.classList.add("error");
        show(feedback);
        return;
      }
      input.value = "";
      feedback.textContent = "Annotation saved, thank you!";
      feedback.classList.remove("error");
      show(feedback);
      showProgress(outcome.result.progress);
      await page.loadNext();
    },

    async skip() {
      if (!current) {
        return;
      }
      await api.skip(current.entry_id);
      await page.loadNext();
    },

    async report() {
      if (!current) {
        return;
      }
      await api.report(current.entry_id, input.value.trim());
      input.value = "";
      await page.loadNext();
    },

    currentEntryId() {
      return current ? current.entry_id : null;
    },
  };

  function showProgress(progress: NextMotion["progress"]): void {
    levelTitle.textContent = progress.level_title;
    progressFill.style.width = `${Math.round(progress.progress_to_next * 100)}%`;
    progressLabel.textContent = `${progress.annotation_count} annotations`;
  }

  function draw(): void {
    const ctx = context2d(canvas);
    if (!playback) {
      ctx?.clearRect(0, 0, canvas.width, canvas.height);
      return;
    }
    renderSkeleton(
      ctx,
      playback.currentFrame(),
      dofNames,
      playback.camera,
      canvas.width,
      canvas.height,
    );
  }

  function stopPlaying(): void {
    if (animationHandle !== null && typeof cancelAnimationFrame === "function") {
      cancelAnimationFrame(animationHandle);
    }
    animationHandle = null;
    if (playback) {
      playback.playing = false;
    }
    playToggle.textContent = "Play";
  }

  function animate(timestamp: number): void {
    if (!playback || !playback.playing) {
      return;
    }
    const dt = lastTimestamp ? (timestamp - lastTimestamp) / 1000 : 0;
    lastTimestamp = timestamp;
    playback.tick(dt);
    scrubber.value = String(
      Math.round((playback.cursor / Math.max(playback.duration, 1e-9)) * SCRUBBER_STEPS),
    );
    draw();
    animationHandle = requestAnimationFrame(animate);
  }

  retryButton.addEventListener("click", () => void page.loadNext());
  el<HTMLButtonElement>(".submit").addEventListener("click", () => void page.submit());
  el<HTMLButtonElement>(".skip").addEventListener("click", () => void page.skip());
  el<HTMLButtonElement>(".report").addEventListener("click", () => void page.report());

  playToggle.addEventListener("click", () => {
    if (!playback) {
      return;
    }
    if (playback.playing) {
      stopPlaying();
      return;
    }
    playback.playing = true;
    playToggle.textContent = "Pause";
    lastTimestamp = 0;
    if (typeof requestAnimationFrame === "function") {
      animationHandle = requestAnimationFrame(animate);
    }
  });

  scrubber.addEventListener("input", () => {
    if (!playback) {
      return;
    }
    const fraction = Number(scrubber.value) / SCRUBBER_STEPS;
    playback.seek(fraction * playback.duration);
    draw();
  });

  canvas.addEventListener("pointermove", (event: PointerEvent) => {
    if (!playback || event.buttons !== 1) {
      return;
    }
    playback.orbit(event.movementX * 0.01, event.movementY * 0.01);
    draw();
  });

  canvas.addEventListener("wheel", (event: WheelEvent) => {
    if (!playback) {
      return;
    }
    event.preventDefault();
    playback.zoom(event.deltaY > 0 ? 1.1 : 0.9);
    draw();
  });

  return page;
}

function show(element: HTMLElement): void {
  element.classList.remove("hidden");
}

function hide(element: HTMLElement): void {
  element.classList.add("hidden");
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

// Headless test environments may not implement canvas rendering.
function context2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D | null {
  try {
    return canvas.getContext("2d");
  } catch {
    return null;
  }
}
