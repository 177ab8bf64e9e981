import type { LeaderboardRow } from "./types.js";

/** Render the standings exactly in API order; the caller's own row is
 * tagged with the `me` class for highlighting. */
export function renderLeaderboard(
  container: HTMLElement,
  rows: LeaderboardRow[],
  currentAnnotatorId: string | null,
): void {
  if (rows.length === 0) {
    container.innerHTML = '<p class="leaderboard-empty">No annotations yet.</p>';
    return;
  }
  const list = document.createElement("ol");
  list.className = "leaderboard";
  for (const row of rows) {
    const item = document.createElement("li");
    item.className = "leaderboard-row";
    if (currentAnnotatorId !== null && row.annotator_id === currentAnnotatorId) {
      item.classList.add("me");
    }
    item.setAttribute("data-annotator-id", row.annotator_id);
    item.innerHTML = `
      <span class="rank">${row.rank}</span>
      <span class="name"></span>
      <span class="level"></span>
      <span class="count">${row.annotation_count}</span>`;
    item.querySelector(".name")!.textContent = row.display_name;
    item.querySelector(".level")!.textContent = row.level_title;
    list.appendChild(item);
  }
  container.innerHTML = "";
  container.appendChild(list);
}
