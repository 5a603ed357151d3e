/** DOM rendering of a score document: four voice lanes (one row per pitch of
 * that voice's range, notes drawn as glyphs spanning their hold run), a
 * fermata lane and a key-signature lane.  Every cell carries data attributes
 * so tests can audit that the DOM shows exactly the document's tokens.
 */

import { GridSelection } from "./selection.js";
import {
  SCORE_FORMAT,
  SCORE_VERSION,
  TICKS_PER_BAR,
  VOICE_NAMES,
  cellKey,
  isHold,
  tokenLabel,
  type ScoreDocument,
  type Token,
} from "./types.js";

export interface NoteRun {
  voice: number;
  startTick: number; // 0-based
  length: number;
  midi: number;
  label: string;
}

/** Pitch-plus-holds runs of one voice (0-based voice row index input). */
export function noteRuns(tokens: Token[], voice: number): NoteRun[] {
  const runs: NoteRun[] = [];
  tokens.forEach((token, tick) => {
    if (isHold(token)) {
      if (runs.length === 0) {
        throw new Error("leading hold in score document");
      }
      runs[runs.length - 1].length += 1;
    } else {
      runs.push({ voice, startTick: tick, length: 1, midi: token.midi, label: token.label });
    }
  });
  return runs;
}

export interface GridCallbacks {
  onCellClick?: (voice: number, tick: number) => void;
  onFermataClick?: (tick: number) => void;
  onKeyBarClick?: (bar: number) => void;
}

export function renderGrid(
  container: HTMLElement,
  doc: ScoreDocument,
  selection?: GridSelection,
  changed?: Set<string>,
  callbacks: GridCallbacks = {},
): void {
  container.textContent = "";
  if (doc.format !== SCORE_FORMAT || doc.version !== SCORE_VERSION) {
    const banner = document.createElement("div");
    banner.className = "schema-banner";
    banner.textContent =
      `Unsupported score document (${doc.format} v${doc.version}); ` +
      `this studio speaks ${SCORE_FORMAT} v${SCORE_VERSION}.`;
    container.appendChild(banner);
    return;
  }

  for (let voice = 1; voice <= 4; voice += 1) {
    container.appendChild(renderVoiceLane(doc, voice, selection, changed, callbacks));
  }
  container.appendChild(renderFermataLane(doc, selection, callbacks));
  container.appendChild(renderKeyLane(doc, selection, callbacks));
}

function renderVoiceLane(
  doc: ScoreDocument,
  voice: number,
  selection: GridSelection | undefined,
  changed: Set<string> | undefined,
  callbacks: GridCallbacks,
): HTMLElement {
  const lane = document.createElement("section");
  lane.className = "lane voice-lane";
  lane.dataset.voice = String(voice);

  const title = document.createElement("h2");
  title.textContent = VOICE_NAMES[voice - 1];
  lane.appendChild(title);

  const tokens = doc.voices[voice - 1];
  const pitches = tokens.filter((t) => !isHold(t)).map((t) => (t.kind === "pitch" ? t.midi : 0));
  const high = Math.max(...pitches);
  const low = Math.min(...pitches);

  const grid = document.createElement("div");
  grid.className = "pitch-grid";
  grid.style.gridTemplateColumns = `repeat(${doc.length}, var(--tick-width))`;
  grid.style.gridTemplateRows = `repeat(${high - low + 1}, var(--row-height))`;

  // One addressable cell per tick (row chosen by the sounding pitch).
  const sounding: number[] = [];
  let current = 0;
  for (const token of tokens) {
    if (!isHold(token)) {
      current = token.midi;
    }
    sounding.push(current);
  }
  tokens.forEach((token, tick) => {
    const cell = document.createElement("div");
    cell.className = "cell";
    cell.dataset.voice = String(voice);
    cell.dataset.tick = String(tick);
    cell.dataset.label = tokenLabel(token);
    cell.dataset.kind = token.kind;
    cell.style.gridColumn = String(tick + 1);
    cell.style.gridRow = String(high - sounding[tick] + 1);
    const key = cellKey(voice, tick);
    if (selection?.cells.has(key)) {
      cell.classList.add("selected");
    }
    if (selection?.pins.has(key)) {
      cell.classList.add("pinned");
      cell.dataset.pin = (selection.pins.get(key) ?? []).join(",");
    }
    if (changed?.has(key)) {
      cell.classList.add("changed");
    }
    if (callbacks.onCellClick) {
      cell.addEventListener("click", () => callbacks.onCellClick?.(voice, tick));
    }
    grid.appendChild(cell);
  });

  // Note glyphs span their hold run; holds render as extensions, not cells.
  for (const run of noteRuns(tokens, voice)) {
    const glyph = document.createElement("div");
    glyph.className = "note";
    glyph.dataset.voice = String(voice);
    glyph.dataset.onsetTick = String(run.startTick);
    glyph.dataset.length = String(run.length);
    glyph.dataset.midi = String(run.midi);
    glyph.dataset.label = run.label;
    glyph.title = `${run.label} (${run.length}/16)`;
    glyph.style.gridColumn = `${run.startTick + 1} / span ${run.length}`;
    glyph.style.gridRow = String(high - run.midi + 1);
    grid.appendChild(glyph);
  }

  lane.appendChild(grid);
  return lane;
}

function renderFermataLane(
  doc: ScoreDocument,
  selection: GridSelection | undefined,
  callbacks: GridCallbacks,
): HTMLElement {
  const lane = document.createElement("section");
  lane.className = "lane fermata-lane";
  const title = document.createElement("h2");
  title.textContent = "Fermata";
  lane.appendChild(title);
  const row = document.createElement("div");
  row.className = "meta-row";
  row.style.gridTemplateColumns = `repeat(${doc.length}, var(--tick-width))`;
  doc.fermata.forEach((active, tick) => {
    const cell = document.createElement("div");
    cell.className = "fermata-cell";
    cell.dataset.tick = String(tick);
    cell.dataset.active = String(active);
    const pending = selection?.fermataEdits.get(tick);
    if (active) {
      cell.classList.add("active");
      cell.textContent = "\u{1D110}";
    }
    if (pending !== undefined) {
      cell.classList.add("edited");
      cell.dataset.pending = String(pending);
    }
    if (callbacks.onFermataClick) {
      cell.addEventListener("click", () => callbacks.onFermataClick?.(tick));
    }
    row.appendChild(cell);
  });
  lane.appendChild(row);
  return lane;
}

function renderKeyLane(
  doc: ScoreDocument,
  selection: GridSelection | undefined,
  callbacks: GridCallbacks,
): HTMLElement {
  const lane = document.createElement("section");
  lane.className = "lane key-lane";
  const title = document.createElement("h2");
  title.textContent = "Key";
  lane.appendChild(title);
  const row = document.createElement("div");
  row.className = "meta-row";
  const bars = Math.ceil(doc.length / TICKS_PER_BAR);
  row.style.gridTemplateColumns = `repeat(${bars}, calc(var(--tick-width) * ${TICKS_PER_BAR}))`;
  for (let bar = 0; bar < bars; bar += 1) {
    const cell = document.createElement("div");
    cell.className = "key-cell";
    cell.dataset.bar = String(bar);
    const value = doc.key_signature[bar * TICKS_PER_BAR];
    cell.dataset.value = String(value);
    cell.textContent = value > 0 ? `+${value}` : String(value);
    const pending = selection?.keyEdits.get(bar);
    if (pending !== undefined) {
      cell.classList.add("edited");
      cell.dataset.pending = String(pending);
    }
    if (callbacks.onKeyBarClick) {
      cell.addEventListener("click", () => callbacks.onKeyBarClick?.(bar));
    }
    row.appendChild(cell);
  }
  lane.appendChild(row);
  return lane;
}

/** Cells whose DOM label disagrees with the document: must always be empty.
 * The UI never fabricates tokens; whatever it shows came from the service. */
export function auditGrid(container: HTMLElement, doc: ScoreDocument): string[] {
  const mismatches: string[] = [];
  for (let voice = 1; voice <= 4; voice += 1) {
    for (let tick = 0; tick < doc.length; tick += 1) {
      const cell = container.querySelector<HTMLElement>(
        `.cell[data-voice="${voice}"][data-tick="${tick}"]`,
      );
      const expected = tokenLabel(doc.voices[voice - 1][tick]);
      if (cell === null || cell.dataset.label !== expected) {
        mismatches.push(`${cellKey(voice, tick)}: dom=${cell?.dataset.label} doc=${expected}`);
      }
    }
  }
  const glyphs = container.querySelectorAll<HTMLElement>(".note");
  for (const glyph of glyphs) {
    const voice = Number(glyph.dataset.voice);
    const tick = Number(glyph.dataset.onsetTick);
    const token = doc.voices[voice - 1][tick];
    if (isHold(token) || tokenLabel(token) !== glyph.dataset.label) {
      mismatches.push(`note glyph at ${cellKey(voice, tick)} has no matching onset`);
    }
  }
  return mismatches;
}
