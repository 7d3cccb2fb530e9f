/**
 * Explorer entry point: fetch the served bundle, render the ternary picker
 * with a loss heatmap, and keep the readout in sync while the user drags.
 */

import { ClientModel, Manifest, parseModel } from "./model";
import {
  Triangle,
  barycentricToPixel,
  defaultTriangle,
  pixelToBarycentric,
  rampColor,
  sampleHeatmap,
} from "./ternary";
import { ReadoutState, buildReadout, formatHyper } from "./readout";

const HEATMAP_RESOLUTION = 50;

interface EdgeTrace {
  members: number[];
  label: string;
  weights: number[][];
  values: number[][];
}

interface AppState {
  model: ClientModel;
  manifest: Manifest;
  edges: EdgeTrace[];
  w: number[];
  threshold: number;
  lossColumn: number; // 0..2, offset by manifest.n into the output vector
  dragging: boolean;
}

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function drawTernary(state: AppState, canvas: HTMLCanvasElement, tri: Triangle): void {
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const heat = sampleHeatmap(state.model, tri, state.manifest.n + state.lossColumn,
    HEATMAP_RESOLUTION);
  for (const cell of heat.cells) {
    ctx.fillStyle = rampColor(cell.value, heat.min, heat.max);
    ctx.fillRect(cell.x, cell.y, heat.cellW + 0.5, heat.cellH + 0.5);
  }

  ctx.strokeStyle = "#1b1b1b";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(tri.x1, tri.y1);
  ctx.lineTo(tri.x2, tri.y2);
  ctx.lineTo(tri.x3, tri.y3);
  ctx.closePath();
  ctx.stroke();

  ctx.fillStyle = "#1b1b1b";
  ctx.font = "13px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText("w1 (OLS)", tri.x1, tri.y1 + 24);
  ctx.fillText("w2 (L1-reg.)", tri.x2, tri.y2 + 24);
  ctx.fillText("w3 (L2-reg.)", tri.x3, tri.y3 - 12);
  ctx.fillText("lasso edge", (tri.x1 + tri.x2) / 2, tri.y1 + 24);
  ctx.save();
  ctx.translate((tri.x1 + tri.x3) / 2 - 18, (tri.y1 + tri.y3) / 2);
  ctx.rotate(-Math.PI / 3);
  ctx.fillText("ridge edge", 0, 0);
  ctx.restore();

  const [mx, my] = barycentricToPixel(tri, state.w);
  ctx.beginPath();
  ctx.arc(mx, my, 7, 0, 2 * Math.PI);
  ctx.fillStyle = "#ffffff";
  ctx.fill();
  ctx.lineWidth = 2.5;
  ctx.strokeStyle = "#c4002f";
  ctx.stroke();
}

/** Solution paths along one simplex edge: each theta coordinate vs the edge parameter. */
function drawEdgeTrace(edge: EdgeTrace, n: number, canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d")!;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const thetas = edge.values.map((v) => v.slice(0, n));
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of thetas) {
    for (const v of row) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!(hi > lo)) {
    lo -= 1;
    hi += 1;
  }
  const pad = 6;
  const sx = (k: number) => pad + (k / (thetas.length - 1)) * (width - 2 * pad);
  const sy = (v: number) => height - pad - ((v - lo) / (hi - lo)) * (height - 2 * pad);
  if (lo < 0 && hi > 0) {
    ctx.strokeStyle = "#ddd";
    ctx.beginPath();
    ctx.moveTo(pad, sy(0));
    ctx.lineTo(width - pad, sy(0));
    ctx.stroke();
  }
  for (let j = 0; j < n; j++) {
    ctx.strokeStyle = `hsl(${(j * 360) / n} 60% 45%)`;
    ctx.lineWidth = 1.2;
    ctx.beginPath();
    thetas.forEach((row, k) => {
      if (k === 0) ctx.moveTo(sx(k), sy(row[j]));
      else ctx.lineTo(sx(k), sy(row[j]));
    });
    ctx.stroke();
  }
}

function renderEdgePanels(state: AppState): void {
  const host = $("edge-traces");
  host.innerHTML = "";
  for (const edge of state.edges) {
    const box = document.createElement("div");
    box.className = "edge-box";
    const caption = document.createElement("div");
    caption.className = "edge-caption";
    caption.textContent = `${edge.label} edge (w${edge.members[0]} → w${edge.members[1]})`;
    const canvas = document.createElement("canvas");
    canvas.width = 170;
    canvas.height = 90;
    drawEdgeTrace(edge, state.manifest.n, canvas);
    box.append(canvas, caption);
    host.appendChild(box);
  }
}

function renderReadout(state: AppState): void {
  const readout: ReadoutState = buildReadout(state.model, state.manifest, state.w,
    state.threshold);

  $("w-display").textContent =
    `w = (${readout.w.map((v) => v.toFixed(4)).join(", ")})`;
  $("hyper-display").textContent = formatHyper(readout);
  $("sparsity-display").textContent =
    `${readout.nearZero} of ${readout.theta.length} coefficients within ` +
    `${state.threshold.toExponential(1)} of zero`;

  const losses = $("losses");
  losses.innerHTML = "";
  state.manifest.loss_labels.forEach((label, k) => {
    const row = document.createElement("div");
    row.className = "loss-row" + (k === state.lossColumn ? " selected" : "");
    row.textContent = `${label}: ${readout.losses[k].toPrecision(6)}`;
    row.onclick = () => {
      state.lossColumn = k;
      refresh(state);
    };
    losses.appendChild(row);
  });

  const bars = $("theta-bars");
  bars.innerHTML = "";
  const peak = Math.max(1e-12, ...readout.theta.map((v) => Math.abs(v)));
  readout.theta.forEach((v, j) => {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = `θ${j + 1}`;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill" + (v < 0 ? " negative" : "") +
      (Math.abs(v) <= state.threshold ? " zeroish" : "");
    fill.style.width = `${(Math.abs(v) / peak) * 100}%`;
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = v.toPrecision(4);
    track.appendChild(fill);
    row.append(label, track, value);
    bars.appendChild(row);
  });
}

let canvasRef: HTMLCanvasElement;
let triRef: Triangle;

function refresh(state: AppState): void {
  drawTernary(state, canvasRef, triRef);
  renderReadout(state);
}

async function fetchJson(path: string): Promise<unknown> {
  const resp = await fetch(path);
  if (!resp.ok) throw new Error(`GET ${path} -> ${resp.status}`);
  return resp.json();
}

async function start(): Promise<void> {
  const [rawModel, manifest, rawEdges] = await Promise.all([
    fetchJson("/model.json"),
    fetchJson("/manifest.json") as Promise<Manifest>,
    fetchJson("/edges.json") as Promise<{ edges: EdgeTrace[] }>,
  ]);
  const state: AppState = {
    model: parseModel(rawModel),
    manifest,
    edges: rawEdges.edges,
    w: [1 / 3, 1 / 3, 1 / 3],
    threshold: 1e-3,
    lossColumn: 0,
    dragging: false,
  };

  $("title").textContent =
    `${manifest.dataset} — degree ${state.model.d}, ${manifest.n} coefficients`;

  canvasRef = $("ternary") as HTMLCanvasElement;
  triRef = defaultTriangle(canvasRef.width, canvasRef.height);

  const pick = (ev: PointerEvent) => {
    const rect = canvasRef.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * canvasRef.width;
    const y = ((ev.clientY - rect.top) / rect.height) * canvasRef.height;
    state.w = pixelToBarycentric(triRef, x, y);
    refresh(state);
  };
  canvasRef.addEventListener("pointerdown", (ev) => {
    state.dragging = true;
    canvasRef.setPointerCapture(ev.pointerId);
    pick(ev);
  });
  canvasRef.addEventListener("pointermove", (ev) => {
    if (state.dragging) pick(ev);
  });
  canvasRef.addEventListener("pointerup", (ev) => {
    state.dragging = false;
    canvasRef.releasePointerCapture(ev.pointerId);
  });

  const slider = $("threshold") as HTMLInputElement;
  const syncThresholdLabel = () => {
    $("threshold-exp").textContent = Number(slider.value).toFixed(1);
  };
  slider.addEventListener("input", () => {
    state.threshold = Math.pow(10, Number(slider.value));
    syncThresholdLabel();
    renderReadout(state);
  });
  syncThresholdLabel();

  renderEdgePanels(state);
  refresh(state);
}

start().catch((err) => {
  $("title").textContent = `failed to load bundle: ${err}`;
});
