/** Studio bootstrap: session setup, event wiring, render loop. */

import { ApiClient, ApiError } from "./api.js";
import { auditGrid, renderGrid } from "./grid.js";
import { Player } from "./playback.js";
import { StudioController, StudioStore } from "./state.js";
import { TICKS_PER_BAR, type ModelInfo } from "./types.js";

const DEFAULT_LENGTH = 64;
const DEFAULT_BPM = 80;

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) {
    return;
  }
  const baseUrl = new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";
  const api = new ApiClient(baseUrl);

  let info: ModelInfo;
  try {
    info = await api.modelInfo();
  } catch (error) {
    root.textContent = `Cannot reach the service at ${baseUrl}: ${String(error)}`;
    return;
  }

  const created = await api.createSessionFromLength(DEFAULT_LENGTH);
  const store = new StudioStore();
  const controller = new StudioController(api, store, created.session_id);
  controller.adoptScore(created.score);

  const player = new Player(undefined, (tick) => store.update({ playheadTick: tick }));

  root.innerHTML = `
    <header>
      <strong>choralegen studio</strong>
      <span class="model-info">${info.kind} model, ${info.encoding} encoding, scope ${info.delta_t}</span>
    </header>
    <div class="toolbar">
      <button id="regen">Regenerate selection</button>
      <button id="regen-same">Regenerate same seed</button>
      <button id="undo">Undo</button>
      <button id="clear">Clear selection</button>
      <label>Bar <input id="bar" type="number" min="0" value="0" style="width:4em"></label>
      <button id="select-bar">Select bar</button>
      <label>Tempo <input id="bpm" type="number" min="20" max="240" value="${DEFAULT_BPM}" style="width:5em"></label>
      <button id="play">Play</button>
      <button id="stop">Stop</button>
      <a id="export-xml" href="#">MusicXML</a>
      <a id="export-midi" href="#">MIDI</a>
    </div>
    <div id="status"></div>
    <div id="grid"></div>
    <dialog id="pin-dialog">
      <p id="pin-title"></p>
      <select id="pin-token" multiple size="10"></select>
      <div>
        <button id="pin-apply">Pin</button>
        <button id="pin-remove">Unpin</button>
        <button id="pin-cancel">Cancel</button>
      </div>
    </dialog>
  `;

  const grid = root.querySelector<HTMLElement>("#grid")!;
  const status = root.querySelector<HTMLElement>("#status")!;
  const dialog = root.querySelector<HTMLDialogElement>("#pin-dialog")!;
  const tokenSelect = root.querySelector<HTMLSelectElement>("#pin-token")!;
  let pinTarget: [number, number] | null = null;

  (root.querySelector<HTMLAnchorElement>("#export-xml")!).href = api.exportUrl(
    created.session_id,
    "musicxml",
  );
  (root.querySelector<HTMLAnchorElement>("#export-midi")!).href = api.exportUrl(
    created.session_id,
    "midi",
  );

  function render(): void {
    const state = store.state;
    if (state.score === null) {
      return;
    }
    renderGrid(grid, state.score, controller.selection, state.changedCells, {
      onCellClick: (voice, tick) => {
        if (controller.selection.has(voice, tick)) {
          openPinDialog(voice, tick);
        } else {
          controller.selection.toggleCell(voice, tick);
          render();
        }
      },
      onFermataClick: (tick) => {
        const current =
          controller.selection.fermataEdits.get(tick) ?? state.score!.fermata[tick];
        controller.selection.setFermata(tick, !current);
        render();
      },
      onKeyBarClick: (bar) => {
        const current =
          controller.selection.keyEdits.get(bar) ??
          state.score!.key_signature[bar * TICKS_PER_BAR];
        const answer = prompt(`Key signature for bar ${bar} (-7..7)`, String(current));
        if (answer !== null) {
          controller.selection.setKeySignature(bar, Number(answer));
          render();
        }
      },
    });
    const audit = auditGrid(grid, state.score);
    const busy = state.busy ? " … working" : "";
    const errors = state.errors.length > 0 ? ` | ${state.errors.join("; ")}` : "";
    const seed = state.lastSeed !== null ? ` | seed ${state.lastSeed}` : "";
    const playhead = state.playheadTick !== null ? ` | tick ${state.playheadTick}` : "";
    const auditNote = audit.length > 0 ? ` | RENDER AUDIT FAILED: ${audit[0]}` : "";
    status.textContent =
      `undo depth ${state.undoDepth} | ${controller.selection.cells.size} cells selected` +
      `${seed}${busy}${errors}${playhead}${auditNote}` +
      (player.unavailableMessage ? ` | ${player.unavailableMessage}` : "");
    markPlayhead(state.playheadTick);
  }

  function markPlayhead(tick: number | null): void {
    for (const cell of grid.querySelectorAll<HTMLElement>(".cell.playhead")) {
      cell.classList.remove("playhead");
    }
    if (tick !== null) {
      for (const cell of grid.querySelectorAll<HTMLElement>(`.cell[data-tick="${tick}"]`)) {
        cell.classList.add("playhead");
      }
    }
  }

  function openPinDialog(voice: number, tick: number): void {
    pinTarget = [voice, tick];
    const title = root!.querySelector<HTMLElement>("#pin-title")!;
    title.textContent = `Pin voice ${voice}, tick ${tick} (or unpin / deselect)`;
    tokenSelect.innerHTML = "";
    for (const label of info.vocabularies[voice - 1]) {
      if (label === "START" || label === "END") {
        continue;
      }
      const option = document.createElement("option");
      option.value = label;
      option.textContent = label;
      tokenSelect.appendChild(option);
    }
    dialog.showModal();
  }

  root.querySelector("#pin-apply")!.addEventListener("click", () => {
    if (pinTarget !== null) {
      const labels = [...tokenSelect.selectedOptions].map((option) => option.value);
      if (labels.length > 0) {
        controller.selection.pin(pinTarget[0], pinTarget[1], labels);
      }
    }
    dialog.close();
    render();
  });
  root.querySelector("#pin-remove")!.addEventListener("click", () => {
    if (pinTarget !== null) {
      controller.selection.unpin(pinTarget[0], pinTarget[1]);
      controller.selection.toggleCell(pinTarget[0], pinTarget[1]);
    }
    dialog.close();
    render();
  });
  root.querySelector("#pin-cancel")!.addEventListener("click", () => dialog.close());

  root.querySelector("#select-bar")!.addEventListener("click", () => {
    const bar = Number(root.querySelector<HTMLInputElement>("#bar")!.value);
    controller.selection.selectBar(bar, TICKS_PER_BAR);
    render();
  });
  root.querySelector("#clear")!.addEventListener("click", () => {
    controller.selection.clear();
    render();
  });
  root.querySelector("#regen")!.addEventListener("click", () => {
    controller.submitRegion().catch(() => undefined);
  });
  root.querySelector("#regen-same")!.addEventListener("click", () => {
    controller.regenerateSame().catch(() => undefined);
  });
  root.querySelector("#undo")!.addEventListener("click", () => {
    controller.undo().catch(() => undefined);
  });
  root.querySelector("#play")!.addEventListener("click", () => {
    const bpm = Number(root.querySelector<HTMLInputElement>("#bpm")!.value);
    if (store.state.score !== null) {
      player.play(store.state.score, bpm);
      render();
    }
  });
  root.querySelector("#stop")!.addEventListener("click", () => {
    player.stop();
  });

  store.subscribe(() => render());
  render();
}

boot().catch((error) => {
  const root = document.getElementById("app");
  if (root !== null) {
    root.textContent = error instanceof ApiError ? error.message : String(error);
  }
});
