/** DOM wiring: one page, one session, pairwise clicks as the only
 * input gesture.  The server is the source of truth — every render
 * reads straight from the SessionModel's last responses. */

import { ApiClient, ApiError } from "./api.js";
import { checklistItems, heatmapCells, posteriorChart1d } from "./chart.js";
import { Card, SessionModel, validateCreateForm } from "./model.js";

const api = new ApiClient("");
const model = new SessionModel(api);

const VIEW = { width: 640, height: 280, margin: 32 };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

let selectedWinner: number | null = null;
let lastAction: (() => Promise<void>) | null = null;

function setStatus(text: string, isError = false): void {
  const bar = byId("status");
  bar.textContent = text;
  bar.classList.toggle("error", isError);
  const retry = byId("retry") as HTMLButtonElement;
  retry.hidden = !(isError && lastAction !== null);
}

async function guarded(label: string, action: () => Promise<void>): Promise<void> {
  lastAction = action;
  setStatus(label ? `${label}…` : "");
  document.body.classList.add("busy");
  try {
    await action();
    lastAction = null;
    setStatus("");
    render();
  } catch (err) {
    if (err instanceof ApiError) {
      setStatus(`${err.code}: ${err.message}`, true);
    } else {
      setStatus(String(err), true);
    }
  } finally {
    document.body.classList.remove("busy");
  }
}

function renderCard(card: Card, rank: number): HTMLElement {
  const node = el("div", "card");
  node.dataset.index = String(card.index);
  if (selectedWinner === card.index) node.classList.add("selected");
  node.append(
    el("div", "rank", `#${rank + 1}`),
    el("div", "action", formatAction(card.action)),
    el("div", "y", `Y = ${card.y.toFixed(4)}`),
    el(
      "div",
      "band",
      `U ≈ ${card.mean.toFixed(3)} [${card.lo.toFixed(3)}, ${card.hi.toFixed(3)}]`,
    ),
  );
  if (model.problem === "knapsack") {
    const list = el("div", "checklist");
    for (const item of checklistItems(card.action)) {
      list.append(
        el("span", item.included ? "item in" : "item", `item ${item.item}`),
      );
    }
    node.append(list);
  }
  node.addEventListener("click", () => onCardClick(card.index));
  return node;
}

function formatAction(action: number[]): string {
  if (model.problem === "knapsack") {
    return action.map((b) => (b >= 0.5 ? "1" : "0")).join("");
  }
  return `(${action.map((x) => x.toFixed(4)).join(", ")})`;
}

function onCardClick(index: number): void {
  if (model.busy) return;
  if (selectedWinner === null) {
    selectedWinner = index;
    setStatus(`preferring candidate ${index} — now click the candidate it beats`);
    render();
    return;
  }
  if (selectedWinner === index) {
    setStatus("pick two different candidates", true);
    return;
  }
  const winner = selectedWinner;
  selectedWinner = null;
  void guarded("recording preference", async () => {
    await model.prefer(winner, index);
  });
}

function renderChart(): void {
  const host = byId("chart");
  host.textContent = "";
  const p = model.posterior;
  if (!p) return;
  const dim = p.grid[0]?.length ?? 0;
  const svgNS = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNS, "svg");
  svg.setAttribute("viewBox", `0 0 ${VIEW.width} ${VIEW.height}`);
  if (dim === 1) {
    const chart = posteriorChart1d(
      p.grid,
      p.mean,
      p.lo,
      p.hi,
      model.allCards().map((c) => ({ index: c.index, action: c.action, mean: c.mean })),
      VIEW,
    );
    const band = document.createElementNS(svgNS, "path");
    band.setAttribute("d", chart.bandPath);
    band.setAttribute("class", "band-fill");
    const mean = document.createElementNS(svgNS, "path");
    mean.setAttribute("d", chart.meanPath);
    mean.setAttribute("class", "mean-line");
    svg.append(band, mean);
    for (const marker of chart.markers) {
      const dot = document.createElementNS(svgNS, "circle");
      dot.setAttribute("cx", String(marker.x));
      dot.setAttribute("cy", String(marker.y));
      dot.setAttribute("r", "4");
      dot.setAttribute("class", "marker");
      svg.append(dot);
    }
  } else if (dim === 2) {
    for (const cell of heatmapCells(p.grid, p.mean, VIEW)) {
      const rect = document.createElementNS(svgNS, "rect");
      rect.setAttribute("x", String(cell.x));
      rect.setAttribute("y", String(cell.y));
      rect.setAttribute("width", String(cell.w));
      rect.setAttribute("height", String(cell.h));
      rect.setAttribute("fill", `rgba(30, 90, 160, ${0.15 + 0.85 * cell.shade})`);
      svg.append(rect);
    }
  } else {
    host.append(el("p", "hint", "posterior over item subsets — see candidate checklists"));
    return;
  }
  host.append(svg);
}

function render(): void {
  byId("session-meta").textContent = model.sessionId
    ? `session ${model.sessionId.slice(0, 12)}… — ${model.problem}, ` +
      `σ=${model.sigma}, m=${model.m}, batch ${model.batches.length - 1}`
    : "no session";
  const cards = byId("cards");
  cards.textContent = "";
  const ranked = model.rankedCards();
  const rankByIndex = new Map(ranked.map((c, r) => [c.index, r]));
  for (const card of model.latestBatchCards()) {
    cards.append(renderCard(card, rankByIndex.get(card.index) ?? -1));
  }
  const historyHost = byId("history");
  historyHost.textContent = "";
  model.history.forEach((entry, i) => {
    historyHost.append(
      el("li", undefined, `${i + 1}. candidate ${entry.winner} over ${entry.loser}`),
    );
  });
  renderChart();
  (byId("next-batch") as HTMLButtonElement).disabled = !model.sessionId || model.busy;
  if (model.sessionId) window.location.hash = model.sessionId;
}

function readForm(): { problem: string; sigma: string; m: string; seed: string } {
  return {
    problem: (byId("problem") as HTMLSelectElement).value,
    sigma: (byId("sigma") as HTMLInputElement).value,
    m: (byId("m") as HTMLInputElement).value,
    seed: (byId("seed") as HTMLInputElement).value,
  };
}

function wire(): void {
  byId("start-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = readForm();
    const problem = validateCreateForm(input);
    if (problem) {
      setStatus(problem, true);
      return;
    }
    selectedWinner = null;
    void guarded("starting session", async () => {
      await model.start({
        problem: input.problem,
        sigma: Number(input.sigma),
        m: Number(input.m),
        seed: Number(input.seed),
      });
    });
  });
  byId("next-batch").addEventListener("click", () => {
    void guarded("generating next batch", async () => {
      await model.nextBatch();
    });
  });
  byId("retry").addEventListener("click", () => {
    const action = lastAction;
    if (action) void guarded("retrying", action);
  });
  const existing = window.location.hash.replace(/^#/, "");
  if (existing) {
    void guarded("restoring session", async () => {
      await model.restore(existing);
    });
  }
}

wire();
render();
