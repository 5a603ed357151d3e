/** View state and the submit/undo loop.
 *
 * The score shown is always the server's document - responses replace it
 * wholesale and failures leave everything untouched. One request may be in
 * flight per session (busy flag), matching the service's per-session
 * serialization.
 */

import { ApiClient } from "./api.js";
import { GridSelection } from "./selection.js";
import {
  cellKey,
  diffCells,
  tokenLabel,
  type GenerationRequest,
  type ScoreDocument,
} from "./types.js";

export interface ViewState {
  score: ScoreDocument | null;
  undoDepth: number;
  busy: boolean;
  playheadTick: number | null;
  changedCells: Set<string>;
  errors: string[];
  lastSeed: number | null;
  notice: string | null;
}

export type Listener = (state: ViewState) => void;

export class StudioStore {
  state: ViewState = {
    score: null,
    undoDepth: 0,
    busy: false,
    playheadTick: null,
    changedCells: new Set(),
    errors: [],
    lastSeed: null,
    notice: null,
  };

  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((entry) => entry !== listener);
    };
  }

  update(changes: Partial<ViewState>): void {
    this.state = { ...this.state, ...changes };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }
}

export class PinMismatchError extends Error {
  cells: string[];

  constructor(cells: string[]) {
    super(`response violates pinned cells: ${cells.join(", ")}`);
    this.name = "PinMismatchError";
    this.cells = cells;
  }
}

/** Pinned cells whose response token is not among the allowed labels. */
export function pinViolations(request: GenerationRequest, score: ScoreDocument): string[] {
  const bad: string[] = [];
  for (const pin of request.pins ?? []) {
    const token = score.voices[pin.voice - 1][pin.tick];
    if (!pin.allowed.includes(tokenLabel(token))) {
      bad.push(cellKey(pin.voice, pin.tick));
    }
  }
  return bad;
}

export class StudioController {
  readonly selection = new GridSelection();
  private lastRequest: GenerationRequest | null = null;

  constructor(
    private api: ApiClient,
    readonly store: StudioStore,
    private sessionId: string,
    private iterations?: number,
  ) {}

  get state(): ViewState {
    return this.store.state;
  }

  adoptScore(score: ScoreDocument, undoDepth = 0): void {
    this.store.update({
      score,
      undoDepth,
      changedCells: new Set(),
      errors: [],
      notice: null,
    });
  }

  /** Post the current selection; the response document replaces the view. */
  async submitRegion(seed?: number): Promise<void> {
    if (this.state.busy) {
      throw new Error("a request is already in flight");
    }
    const request = this.selection.toGenerationRequest(this.iterations, seed);
    await this.send(request);
  }

  /** Re-apply the previous request with the seed the server used. */
  async regenerateSame(): Promise<void> {
    if (this.state.busy) {
      throw new Error("a request is already in flight");
    }
    if (this.lastRequest === null || this.state.lastSeed === null) {
      throw new Error("nothing to regenerate yet");
    }
    await this.send({ ...this.lastRequest, seed: this.state.lastSeed });
  }

  private async send(request: GenerationRequest): Promise<void> {
    const before = this.state.score;
    this.store.update({ busy: true, errors: [], notice: null });
    try {
      const response = await this.api.generate(this.sessionId, request);
      const mismatches = pinViolations(request, response.score);
      if (mismatches.length > 0) {
        throw new PinMismatchError(mismatches);
      }
      this.lastRequest = request;
      this.store.update({
        busy: false,
        score: response.score,
        changedCells: before ? diffCells(before, response.score) : new Set(),
        undoDepth: this.state.undoDepth + 1,
        lastSeed: response.seed,
      });
    } catch (error) {
      // Score and selection stay exactly as they were.
      this.store.update({ busy: false, errors: describe(error) });
      throw error;
    }
  }

  async undo(): Promise<void> {
    if (this.state.busy) {
      throw new Error("a request is already in flight");
    }
    this.store.update({ busy: true, errors: [] });
    try {
      const response = await this.api.undo(this.sessionId);
      this.store.update({
        busy: false,
        score: response.score,
        undoDepth: response.undo_depth,
        changedCells: new Set(),
      });
    } catch (error) {
      this.store.update({ busy: false, errors: describe(error) });
      throw error;
    }
  }
}

function describe(error: unknown): string[] {
  if (error && typeof error === "object" && "violations" in error) {
    const violations = (error as { violations: string[] }).violations;
    if (violations.length > 0) {
      return violations;
    }
  }
  return [error instanceof Error ? error.message : String(error)];
}
