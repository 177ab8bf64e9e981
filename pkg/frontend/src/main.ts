import { ApiClient } from "./api.js";
import { createAnnotationPage } from "./annotationPage.js";
import { renderLeaderboard } from "./leaderboard.js";

const STORAGE_KEY = "annotool.annotator";

async function start(): Promise<void> {
  const api = new ApiClient("");
  const stored = localStorage.getItem(STORAGE_KEY);
  const name =
    stored ?? window.prompt("Pick a display name for the leaderboard") ?? "guest";
  localStorage.setItem(STORAGE_KEY, name);
  await api.openSession(name, name);

  const pageRoot = document.getElementById("annotation")!;
  const boardRoot = document.getElementById("leaderboard")!;
  const page = createAnnotationPage(pageRoot, api);
  await page.loadNext();

  const refreshBoard = async () => {
    renderLeaderboard(boardRoot, await api.leaderboard(), api.annotatorId);
  };
  await refreshBoard();
  setInterval(() => void refreshBoard(), 30_000);
}

void start();
