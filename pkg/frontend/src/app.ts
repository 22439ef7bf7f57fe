// DOM bootstrap: wires the runner, digit ring, keyboard, status rows,
// retry banner, glyph toggle, and the aggregate view.

import { ApiClient } from "./api.js";
import { ringLayout } from "./layout.js";
import { drawAggregate, drawTrial } from "./render.js";
import { TestRunner, ViewState } from "./runner.js";

const api = new ApiClient();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function buildDigitRing(container: HTMLElement, size: number, onDigit: (d: number) => void) {
  for (const spot of ringLayout(size)) {
    const btn = document.createElement("button");
    btn.className = "digit";
    btn.textContent = String(spot.digit);
    btn.style.left = `${spot.x}px`;
    btn.style.top = `${spot.y}px`;
    btn.addEventListener("click", () => onDigit(spot.digit));
    container.appendChild(btn);
  }
}

function main() {
  const canvas = el<HTMLCanvasElement>("trial-canvas");
  const ring = el<HTMLDivElement>("digit-ring");
  const msRow = el<HTMLDivElement>("ms-row");
  const statusRow = el<HTMLDivElement>("status-row");
  const verdict = el<HTMLDivElement>("verdict");
  const countdown = el<HTMLDivElement>("countdown");
  const banner = el<HTMLDivElement>("banner");
  const retryBtn = el<HTMLButtonElement>("retry");
  const startBtn = el<HTMLButtonElement>("start");
  const glyphToggle = el<HTMLInputElement>("glyph-toggle");
  const aggregateBtn = el<HTMLButtonElement>("show-aggregate");
  const aggregateCanvas = el<HTMLCanvasElement>("aggregate-canvas");

  let lastView: ViewState | null = null;

  const render = (view: ViewState) => {
    lastView = view;
    banner.hidden = view.phase !== "error";
    if (view.error) banner.querySelector("span")!.textContent = view.error;

    if (view.state) {
      msRow.textContent = view.state.ms_row || " ";
      statusRow.textContent = view.state.display;
    }
    if (view.phase === "showing" && view.trial) {
      drawTrial(canvas, view.trial.positions, view.trial.trial_index, glyphToggle.checked);
      verdict.textContent = `level ${view.trial.level} | streak ${view.trial.streak}`;
      countdown.textContent = `${(view.remainingMs / 1000).toFixed(1)}s`;
    } else if (view.phase === "answered" && view.state) {
      const word = view.lastTimeout ? "too late" : view.lastCorrect ? "correct" : "wrong";
      verdict.textContent = view.levelChanged
        ? `${word} - level up to ${view.state.level}!`
        : `${word} - level ${view.state.level}, streak ${view.state.streak}`;
      countdown.textContent = "";
    } else if (view.phase === "finished" && view.state) {
      verdict.textContent = `finished: ${view.state.status}, score ${view.state.score.toFixed(8)}`;
      countdown.textContent = "";
    }
  };

  const runner = new TestRunner(api, { onChange: render });

  buildDigitRing(ring, canvas.width, (d) => runner.answerDigit(d));
  document.addEventListener("keydown", (ev) => {
    if (ev.key >= "0" && ev.key <= "9") runner.answerDigit(Number(ev.key));
  });
  startBtn.addEventListener("click", () => {
    startBtn.disabled = true;
    void runner.start();
  });
  retryBtn.addEventListener("click", () => void runner.retry());
  glyphToggle.addEventListener("change", () => {
    if (lastView?.phase === "showing" && lastView.trial) {
      drawTrial(canvas, lastView.trial.positions, lastView.trial.trial_index,
                glyphToggle.checked);
    }
  });

  aggregateBtn.addEventListener("click", () => {
    void api
      .fetchAggregate()
      .then((table) => {
        aggregateCanvas.hidden = false;
        drawAggregate(aggregateCanvas, table.rows);
      })
      .catch((err) => {
        banner.hidden = false;
        banner.querySelector("span")!.textContent = String(err);
      });
  });
}

document.addEventListener("DOMContentLoaded", main);
