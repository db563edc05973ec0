/** DOM wiring: trial list with condition filter, the toggle canvas, the
 * shortcut buttons, and the submission/result panel. */

import { ApiClient } from "./api";
import { TrialController } from "./controller";
import { hitTest } from "./geometry";
import { decodePbm } from "./pbm";
import { drawBitmap, drawTrial, viewportFor } from "./render";
import type { TrialSummary } from "./types";

const api = new ApiClient(import.meta.env?.VITE_API_BASE ?? "");

const el = {
  trialList: document.getElementById("trial-list") as HTMLSelectElement,
  conditionFilter: document.getElementById("condition-filter") as HTMLSelectElement,
  canvas: document.getElementById("figure") as HTMLCanvasElement,
  observed: document.getElementById("observed") as HTMLDivElement,
  allOn: document.getElementById("all-on") as HTMLButtonElement,
  allOff: document.getElementById("all-off") as HTMLButtonElement,
  submit: document.getElementById("submit") as HTMLButtonElement,
  predict: document.getElementById("predict") as HTMLButtonElement,
  result: document.getElementById("result") as HTMLDivElement,
  resultImage: document.getElementById("result-image") as HTMLCanvasElement,
  error: document.getElementById("error-banner") as HTMLDivElement,
};

let trials: TrialSummary[] = [];
let controller: TrialController | null = null;
let hoverIndex: number | null = null;
let flashIndices: number[] = [];
let cursor: [number, number] | null = null;

function redraw(): void {
  if (!controller) return;
  drawTrial(el.canvas, controller.trial.segments, controller.state.assignment, {
    hoverIndex,
    flashIndices,
    magnifyAt: cursor,
  });
  const { result, prediction, error, busy } = controller.state;
  el.error.textContent = error ?? "";
  el.error.style.display = error ? "block" : "none";
  el.submit.disabled = busy;
  let text = "";
  if (result) {
    const s = result.score;
    text += `segment accuracy ${(100 * s.segment_accuracy).toFixed(1)}%`;
    text += s.exact_visual_match ? " - exact match!" : "";
    drawBitmap(el.resultImage, decodePbm(s.image.base64));
  }
  if (prediction) {
    text += ` | model: ${(100 * prediction.segment_accuracy).toFixed(1)}%`;
    text += ` (${prediction.n_steps} steps, seed ${prediction.seed})`;
  }
  el.result.textContent = text;
}

async function loadTrial(id: number): Promise<void> {
  const detail = await api.getTrial(id);
  controller = new TrialController(api, detail, undefined, redraw);
  el.observed.replaceChildren(
    ...detail.observed.map(({ depth, image }) => {
      const wrap = document.createElement("figure");
      const cv = document.createElement("canvas");
      drawBitmap(cv, decodePbm(image.base64));
      const cap = document.createElement("figcaption");
      cap.textContent = `step ${depth}`;
      wrap.append(cv, cap);
      return wrap;
    }),
  );
  redraw();
}

function refreshList(): void {
  const cond = el.conditionFilter.value;
  const visible = trials.filter((t) => cond === "all" || t.condition === cond);
  el.trialList.replaceChildren(
    ...visible.map((t) => {
      const opt = document.createElement("option");
      opt.value = String(t.id);
      opt.textContent = `trial ${t.id} - ${t.condition}, ${t.n_segments} segments`;
      return opt;
    }),
  );
  if (visible.length > 0) void loadTrial(visible[0]!.id);
}

el.canvas.addEventListener("mousemove", (ev) => {
  if (!controller) return;
  const rect = el.canvas.getBoundingClientRect();
  cursor = [ev.clientX - rect.left, ev.clientY - rect.top];
  const hit = hitTest(controller.trial.segments, cursor, viewportFor(el.canvas));
  hoverIndex = hit.kind === "hit" ? hit.index : null;
  redraw();
});

el.canvas.addEventListener("mouseleave", () => {
  hoverIndex = null;
  cursor = null;
  redraw();
});

el.canvas.addEventListener("click", (ev) => {
  if (!controller) return;
  const rect = el.canvas.getBoundingClientRect();
  const p: [number, number] = [ev.clientX - rect.left, ev.clientY - rect.top];
  const hit = hitTest(controller.trial.segments, p, viewportFor(el.canvas));
  if (hit.kind === "hit") {
    controller.apply({ kind: "toggle", index: hit.index });
  } else if (hit.kind === "ambiguous") {
    flashIndices = hit.indices; // toggle nothing; flash the contenders
    redraw();
    setTimeout(() => {
      flashIndices = [];
      redraw();
    }, 250);
  }
});

el.allOn.addEventListener("click", () => controller?.apply({ kind: "all_on" }));
el.allOff.addEventListener("click", () => controller?.apply({ kind: "all_off" }));
el.submit.addEventListener("click", () => void controller?.submit());
el.predict.addEventListener("click", () => void controller?.fetchPrediction());
el.trialList.addEventListener("change", () =>
  void loadTrial(Number(el.trialList.value)),
);
el.conditionFilter.addEventListener("change", refreshList);

void api.listTrials().then((ts) => {
  trials = ts;
  refreshList();
});
